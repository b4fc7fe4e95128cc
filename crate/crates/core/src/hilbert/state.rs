//! State vectors and the bipartite index bookkeeping.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::MatrixJson;

/// Dimensions of a bipartite space `H_A (x) H_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteShape {
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteShape {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(BipartiteShape { dim_a, dim_b })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn composite_dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// Row-major composite index of the basis pair `(a, b)`.
    pub fn joint_index(&self, a: usize, b: usize) -> usize {
        a * self.dim_b + b
    }
}

/// Complex amplitude vector over a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MatrixJson", try_from = "MatrixJson")]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::DegenerateInput);
        }
        Ok(StateVector { amplitudes })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        StateVector::new(vec![Complex64::ZERO; dim])
    }

    /// Computational basis vector `|k>` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::shape(format!("index < {dim}"), format!("{k}")));
        }
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[k] = Complex64::ONE;
        StateVector::new(amplitudes)
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        StateVector::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.amplitudes[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Inner product `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::shape(
                format!("dim {}", self.dim()),
                format!("dim {}", other.dim()),
            ));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &StateVector) -> Result<StateVector> {
        if self.dim() != other.dim() {
            return Err(Error::shape(
                format!("dim {}", self.dim()),
                format!("dim {}", other.dim()),
            ));
        }
        Ok(StateVector {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &StateVector) -> Result<StateVector> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn conj(&self) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn normalized(&self) -> Result<StateVector> {
        let n = self.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::DegenerateInput);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }
}

/// Tensor product `x (x) y` under the row-major pairing `(a, b) -> a*dim_b + b`.
pub fn tensor_product(
    x: &StateVector,
    y: &StateVector,
    shape: &BipartiteShape,
) -> Result<StateVector> {
    if x.dim() != shape.dim_a() || y.dim() != shape.dim_b() {
        return Err(Error::shape(
            format!("({}, {})", shape.dim_a(), shape.dim_b()),
            format!("({}, {})", x.dim(), y.dim()),
        ));
    }
    let mut amplitudes = Vec::with_capacity(shape.composite_dim());
    for a in x.amplitudes() {
        for b in y.amplitudes() {
            amplitudes.push(a * b);
        }
    }
    StateVector::new(amplitudes)
}
