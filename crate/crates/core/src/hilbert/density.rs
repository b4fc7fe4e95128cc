//! Density operators: validation, spectral decomposition, trace distance.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::eigen::{hermitian_eigen, hermitian_trace_norm};
use crate::hilbert::{Operator, StateVector};
use crate::tol;

/// Validation report for a density-operator candidate.
#[derive(Debug, Clone, Serialize)]
pub struct DensityCheck {
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub trace_defect: f64,
    pub tol: f64,
}

impl DensityCheck {
    pub fn passes(&self) -> bool {
        self.hermiticity_defect <= self.tol
            && self.min_eigenvalue >= -self.tol
            && self.trace_defect <= self.tol
    }
}

/// Measure how far `op` is from being Hermitian, positive semi-definite and
/// trace-one.
pub fn check_density(op: &Operator, tol: f64) -> Result<DensityCheck> {
    if !op.is_square() {
        return Err(Error::NotSquare {
            rows: op.rows(),
            cols: op.cols(),
        });
    }
    let hermiticity_defect = op.hermiticity_defect();
    let (values, _) = hermitian_eigen(op)?;
    let min_eigenvalue = values.last().copied().unwrap_or(0.0);
    let trace_defect = (op.trace() - Complex64::ONE).norm();
    Ok(DensityCheck {
        hermiticity_defect,
        min_eigenvalue,
        trace_defect,
        tol,
    })
}

/// Hermitian, positive semi-definite, trace-one matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityOperator {
    matrix: Operator,
    #[serde(skip)]
    tol: f64,
}

impl DensityOperator {
    /// Validate with the default tolerance, scaled by dimension.
    pub fn new(matrix: Operator) -> Result<Self> {
        let tol = tol::DENSITY * matrix.rows() as f64;
        DensityOperator::with_tol(matrix, tol)
    }

    pub fn with_tol(matrix: Operator, tol: f64) -> Result<Self> {
        let check = check_density(&matrix, tol)?;
        if !check.passes() {
            return Err(Error::InvalidDensity(check));
        }
        Ok(DensityOperator { matrix, tol })
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let normalized = psi.normalized()?;
        DensityOperator::new(Operator::outer(&normalized, &normalized))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        DensityOperator::new(Operator::identity(dim)?.scaled_real(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Expectation value `<psi| rho |psi>` (real part).
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        Ok(psi.inner(&self.matrix.apply(psi)?)?.re)
    }
}

/// Trace distance `(1/2) * sum |eig(r1 - r2)|`, in `[0, 1]` for states.
pub fn trace_distance(r1: &DensityOperator, r2: &DensityOperator) -> Result<f64> {
    let diff = r1.matrix().sub(r2.matrix())?;
    Ok(hermitian_trace_norm(&diff)? / 2.0)
}

/// Spectral decomposition of a density operator: `(lambda_k, psi_k)` pairs
/// sorted by descending eigenvalue, eigenvectors orthonormal.
pub fn spectral_decompose(rho: &DensityOperator) -> Result<Vec<(f64, StateVector)>> {
    let (values, vectors) = hermitian_eigen(rho.matrix())?;
    Ok(values.into_iter().zip(vectors).collect())
}
