//! Dense complex matrices, the vectorization isomorphism, and partial traces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{BipartiteShape, MatrixJson, StateVector};

/// Dense complex matrix in row-major storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MatrixJson", try_from = "MatrixJson")]
pub struct Operator {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroDimension);
        }
        if entries.len() != rows * cols {
            return Err(Error::shape(
                format!("{} entries", rows * cols),
                format!("{}", entries.len()),
            ));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::DegenerateInput);
        }
        Ok(Operator {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Operator::new(rows, cols, vec![Complex64::ZERO; rows * cols])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Operator::zeros(dim, dim)?;
        for i in 0..dim {
            op.set(i, i, Complex64::ONE);
        }
        Ok(op)
    }

    /// Rank-one operator `|x><y|` with entries `x_i * conj(y_j)`.
    pub fn outer(x: &StateVector, y: &StateVector) -> Self {
        let mut entries = Vec::with_capacity(x.dim() * y.dim());
        for i in 0..x.dim() {
            for j in 0..y.dim() {
                entries.push(x.get(i) * y.get(j).conj());
            }
        }
        Operator {
            rows: x.dim(),
            cols: y.dim(),
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.cols + j] = value;
    }

    #[inline]
    pub(crate) fn add_assign_at(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.cols + j] += value;
    }

    pub fn adjoint(&self) -> Operator {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).conj());
            }
        }
        Operator {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Operator {
        Operator {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scaled_real(&self, factor: f64) -> Operator {
        self.scaled(Complex64::new(factor, 0.0))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Operator,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Operator> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::shape(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(Operator {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        if self.cols != other.rows {
            return Err(Error::shape(
                format!("inner dim {}", self.cols),
                format!("{}", other.rows),
            ));
        }
        let mut out = Operator::zeros(self.rows, other.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.add_assign_at(i, j, aik * other.get(k, j));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if self.cols != v.dim() {
            return Err(Error::shape(
                format!("dim {}", self.cols),
                format!("{}", v.dim()),
            ));
        }
        let mut out = vec![Complex64::ZERO; self.rows];
        for (i, out_i) in out.iter_mut().enumerate() {
            for j in 0..self.cols {
                *out_i += self.get(i, j) * v.get(j);
            }
        }
        StateVector::new(out)
    }

    /// Kronecker product under the row-major composite pairing.
    pub fn kron(&self, other: &Operator) -> Operator {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut entries = vec![Complex64::ZERO; rows * cols];
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        let i = i1 * other.rows + i2;
                        let j = j1 * other.cols + j2;
                        entries[i * cols + j] = a * other.get(i2, j2);
                    }
                }
            }
        }
        Operator {
            rows,
            cols,
            entries,
        }
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry-wise deviation from the adjoint. Zero for Hermitian input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut defect: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                defect = defect.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        defect
    }

    /// Hermitian part `(A + A^H) / 2`.
    pub fn hermitized(&self) -> Result<Operator> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        self.add(&self.adjoint()).map(|s| s.scaled_real(0.5))
    }
}

/// Hilbert-Schmidt inner product `Tr(v1^H v2)`, conjugate-linear in `v1`.
pub fn hs_inner(v1: &Operator, v2: &Operator) -> Result<Complex64> {
    if v1.rows() != v2.rows() || v1.cols() != v2.cols() {
        return Err(Error::shape(
            format!("{}x{}", v1.rows(), v1.cols()),
            format!("{}x{}", v2.rows(), v2.cols()),
        ));
    }
    Ok(v1
        .entries()
        .iter()
        .zip(v2.entries())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Flatten an operator `H_B -> H_A` into a composite vector, row-major.
pub fn vectorize(op: &Operator, shape: &BipartiteShape) -> Result<StateVector> {
    if op.rows() != shape.dim_a() || op.cols() != shape.dim_b() {
        return Err(Error::shape(
            format!("{}x{}", shape.dim_a(), shape.dim_b()),
            format!("{}x{}", op.rows(), op.cols()),
        ));
    }
    StateVector::new(op.entries().to_vec())
}

/// Inverse of [`vectorize`]: reshape a composite vector into an operator.
pub fn matricize(v: &StateVector, shape: &BipartiteShape) -> Result<Operator> {
    if v.dim() != shape.composite_dim() {
        return Err(Error::shape(
            format!("dim {}", shape.composite_dim()),
            format!("{}", v.dim()),
        ));
    }
    Operator::new(shape.dim_a(), shape.dim_b(), v.amplitudes().to_vec())
}

fn check_composite_square(rho: &Operator, shape: &BipartiteShape) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::NotSquare {
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    if rho.rows() != shape.composite_dim() {
        return Err(Error::shape(
            format!("dim {}", shape.composite_dim()),
            format!("{}", rho.rows()),
        ));
    }
    Ok(())
}

/// Trace out the second factor: `(Tr_B rho)_{ij} = sum_m rho_{(i,m),(j,m)}`.
pub fn partial_trace_b(rho: &Operator, shape: &BipartiteShape) -> Result<Operator> {
    check_composite_square(rho, shape)?;
    let (da, db) = (shape.dim_a(), shape.dim_b());
    let mut out = Operator::zeros(da, da)?;
    for i in 0..da {
        for j in 0..da {
            let mut sum = Complex64::ZERO;
            for m in 0..db {
                sum += rho.get(shape.joint_index(i, m), shape.joint_index(j, m));
            }
            out.set(i, j, sum);
        }
    }
    Ok(out)
}

/// Trace out the first factor: `(Tr_A rho)_{mn} = sum_i rho_{(i,m),(i,n)}`.
pub fn partial_trace_a(rho: &Operator, shape: &BipartiteShape) -> Result<Operator> {
    check_composite_square(rho, shape)?;
    let (da, db) = (shape.dim_a(), shape.dim_b());
    let mut out = Operator::zeros(db, db)?;
    for m in 0..db {
        for n in 0..db {
            let mut sum = Complex64::ZERO;
            for i in 0..da {
                sum += rho.get(shape.joint_index(i, m), shape.joint_index(i, n));
            }
            out.set(m, n, sum);
        }
    }
    Ok(out)
}
