//! JSON wire schema for vectors and matrices.
//!
//! Everything serializes as `{ "rows", "cols", "re": [...], "im": [...] }`
//! with entries in row-major order. Vectors are columns (`cols == 1`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hilbert::{Operator, StateVector};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixJson {
    fn from_entries(rows: usize, cols: usize, entries: &[Complex64]) -> Self {
        MatrixJson {
            rows,
            cols,
            re: entries.iter().map(|z| z.re).collect(),
            im: entries.iter().map(|z| z.im).collect(),
        }
    }

    fn entries(&self) -> Result<Vec<Complex64>, Error> {
        let n = self.rows * self.cols;
        if self.re.len() != n || self.im.len() != n {
            return Err(Error::shape(
                format!("{n} entries for {}x{}", self.rows, self.cols),
                format!("re: {}, im: {}", self.re.len(), self.im.len()),
            ));
        }
        Ok(self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect())
    }
}

impl From<Operator> for MatrixJson {
    fn from(op: Operator) -> Self {
        MatrixJson::from_entries(op.rows(), op.cols(), op.entries())
    }
}

impl From<&Operator> for MatrixJson {
    fn from(op: &Operator) -> Self {
        MatrixJson::from_entries(op.rows(), op.cols(), op.entries())
    }
}

impl TryFrom<MatrixJson> for Operator {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self, Error> {
        let entries = m.entries()?;
        Operator::new(m.rows, m.cols, entries)
    }
}

impl From<StateVector> for MatrixJson {
    fn from(v: StateVector) -> Self {
        MatrixJson::from_entries(v.dim(), 1, v.amplitudes())
    }
}

impl From<&StateVector> for MatrixJson {
    fn from(v: &StateVector) -> Self {
        MatrixJson::from_entries(v.dim(), 1, v.amplitudes())
    }
}

impl TryFrom<MatrixJson> for StateVector {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self, Error> {
        if m.cols != 1 {
            return Err(Error::shape(
                "column vector (cols = 1)",
                format!("cols = {}", m.cols),
            ));
        }
        StateVector::new(m.entries()?)
    }
}
