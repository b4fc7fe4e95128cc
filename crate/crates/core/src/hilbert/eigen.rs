//! Hermitian eigendecomposition bridge.
//!
//! The one numerical primitive everything else reduces to. Backed by
//! nalgebra's `SymmetricEigen`, which handles complex Hermitian input;
//! results come back sorted by descending eigenvalue.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{Operator, StateVector};

fn to_dmatrix(op: &Operator) -> DMatrix<Complex64> {
    DMatrix::from_row_iterator(op.rows(), op.cols(), op.entries().iter().copied())
}

/// Eigendecomposition of a Hermitian operator.
///
/// The input is symmetrized as `(A + A^H)/2` before factorization, so callers
/// must validate Hermiticity to whatever tolerance they need. Returns
/// `(eigenvalues, eigenvectors)` sorted by descending eigenvalue, with
/// orthonormal eigenvectors.
pub fn hermitian_eigen(op: &Operator) -> Result<(Vec<f64>, Vec<StateVector>)> {
    if !op.is_square() {
        return Err(Error::NotSquare {
            rows: op.rows(),
            cols: op.cols(),
        });
    }
    let n = op.rows();
    let herm = op.hermitized()?;
    let se = nalgebra::SymmetricEigen::new(to_dmatrix(&herm));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        se.eigenvalues[j]
            .partial_cmp(&se.eigenvalues[i])
            .expect("eigenvalues are finite")
    });
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for &k in &order {
        values.push(se.eigenvalues[k]);
        let col = se.eigenvectors.column(k);
        vectors.push(StateVector::new(col.iter().copied().collect())?);
    }
    Ok((values, vectors))
}

/// Trace norm (sum of absolute eigenvalues) of a Hermitian operator.
pub fn hermitian_trace_norm(op: &Operator) -> Result<f64> {
    let (values, _) = hermitian_eigen(op)?;
    Ok(values.iter().map(|v| v.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigen_reconstructs_hermitian_matrix() {
        let m = Operator::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(2.0, 0.0)],
        )
        .unwrap();
        let (values, vectors) = hermitian_eigen(&m).unwrap();
        assert!(values[0] >= values[1]);
        let mut rec = Operator::zeros(2, 2).unwrap();
        for (v, psi) in values.iter().zip(&vectors) {
            rec = rec.add(&Operator::outer(psi, psi).scaled_real(*v)).unwrap();
        }
        assert!(rec.sub(&m).unwrap().max_abs_entry() < 1e-13);
        // Orthonormality.
        for i in 0..2 {
            for j in 0..2 {
                let g = vectors[i].inner(&vectors[j]).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((g - c(expected, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn trace_norm_of_diagonal_sign_matrix() {
        let m = Operator::new(
            2,
            2,
            vec![c(3.0, 0.0), Complex64::ZERO, Complex64::ZERO, c(-1.0, 0.0)],
        )
        .unwrap();
        assert!((hermitian_trace_norm(&m).unwrap() - 4.0).abs() < 1e-13);
    }
}
