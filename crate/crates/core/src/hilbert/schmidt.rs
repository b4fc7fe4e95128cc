//! Schmidt decomposition of bipartite vectors.
//!
//! Computed through the Gram-matrix route: for `M = matricize(psi)` the
//! Hermitian factor `M M^H` yields the A-side factors and squared
//! coefficients; the B-side factors follow from `M^H u`. This keeps the whole
//! crate on a single numerical primitive (the Hermitian eigensolver).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::eigen::hermitian_eigen;
use crate::hilbert::{matricize, tensor_product, BipartiteShape, StateVector};

/// Result of a Schmidt decomposition: `psi = sum_l s_l * u_l (x) v_l` with
/// `s_l > 0` descending and both factor families orthonormal.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    coefficients: Vec<f64>,
    a_vectors: Vec<StateVector>,
    b_vectors: Vec<StateVector>,
}

impl SchmidtForm {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn a_vectors(&self) -> &[StateVector] {
        &self.a_vectors
    }

    pub fn b_vectors(&self) -> &[StateVector] {
        &self.b_vectors
    }

    /// Rebuild `sum_l s_l * u_l (x) v_l`.
    pub fn reconstruct(&self, shape: &BipartiteShape) -> Result<StateVector> {
        let mut acc = StateVector::zeros(shape.composite_dim())?;
        for ((s, u), v) in self
            .coefficients
            .iter()
            .zip(&self.a_vectors)
            .zip(&self.b_vectors)
        {
            let term = tensor_product(u, v, shape)?.scaled(Complex64::new(*s, 0.0));
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}

/// Schmidt-decompose `psi`; coefficients at or below `cutoff` are dropped.
pub fn schmidt_decompose(
    psi: &StateVector,
    shape: &BipartiteShape,
    cutoff: f64,
) -> Result<SchmidtForm> {
    if psi.norm() <= 0.0 {
        return Err(Error::DegenerateInput);
    }
    let m = matricize(psi, shape)?;
    let gram = m.matmul(&m.adjoint())?;
    let (values, u_vectors) = hermitian_eigen(&gram)?;
    let adj = m.adjoint();

    // Numerical-rank floor: Gram eigenvalues at eigensolver noise level are
    // zero coefficients whatever the caller's cutoff, otherwise their factor
    // directions are pure noise.
    let lambda_max = values.first().copied().unwrap_or(0.0).max(0.0);
    let noise_floor = (gram.rows() as f64 * f64::EPSILON * lambda_max).sqrt();

    let mut coefficients = Vec::new();
    let mut a_vectors = Vec::new();
    let mut b_vectors = Vec::new();
    for (lambda, u) in values.into_iter().zip(u_vectors) {
        let s = lambda.max(0.0).sqrt();
        if s <= cutoff.max(noise_floor) {
            continue;
        }
        // M^H u = s * conj(v), so the B-side factor is the conjugate.
        let v = adj.apply(&u)?.conj().normalized()?;
        coefficients.push(s);
        a_vectors.push(u);
        b_vectors.push(v);
    }
    if coefficients.is_empty() {
        return Err(Error::DegenerateInput);
    }
    Ok(SchmidtForm {
        coefficients,
        a_vectors,
        b_vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
        StateVector::new(
            (0..dim)
                .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn bell_state_has_two_equal_coefficients() {
        let shape = BipartiteShape::new(2, 2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let phi = StateVector::from_reals(&[s, 0.0, 0.0, s]).unwrap();
        let form = schmidt_decompose(&phi, &shape, 0.0).unwrap();
        assert_eq!(form.rank(), 2);
        assert!((form.coefficients()[0] - s).abs() < 1e-12);
        assert!((form.coefficients()[1] - s).abs() < 1e-12);
        // Degenerate spectrum: factor vectors are basis-dependent, so check the
        // reconstruction instead of individual vectors.
        let rec = form.reconstruct(&shape).unwrap();
        assert!(rec.sub(&phi).unwrap().norm() < 1e-12);
    }

    #[test]
    fn product_state_has_rank_one() {
        let shape = BipartiteShape::new(2, 2).unwrap();
        let psi = tensor_product(
            &StateVector::basis(2, 0).unwrap(),
            &StateVector::basis(2, 1).unwrap(),
            &shape,
        )
        .unwrap();
        let form = schmidt_decompose(&psi, &shape, 0.0).unwrap();
        assert_eq!(form.rank(), 1);
        assert!((form.coefficients()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_vector_is_rejected() {
        let shape = BipartiteShape::new(2, 2).unwrap();
        let zero = StateVector::zeros(4).unwrap();
        assert!(matches!(
            schmidt_decompose(&zero, &shape, 0.0),
            Err(Error::DegenerateInput)
        ));
    }

    proptest! {
        #[test]
        fn schmidt_is_complete_and_isometric(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4000));
            let da = 2 + (seed as usize) % 3;
            let db = 2 + (seed as usize / 3) % 3;
            let shape = BipartiteShape::new(da, db).unwrap();
            let psi = random_vector(&mut rng, shape.composite_dim());
            let form = schmidt_decompose(&psi, &shape, 0.0).unwrap();
            // Sum of squared coefficients equals the squared norm.
            let sum_sq: f64 = form.coefficients().iter().map(|s| s * s).sum();
            prop_assert!((sum_sq - psi.norm_sqr()).abs() < 1e-10);
            // Completeness.
            let rec = form.reconstruct(&shape).unwrap();
            prop_assert!(rec.sub(&psi).unwrap().norm() < 1e-10);
            // Descending order and positivity.
            for w in form.coefficients().windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
            prop_assert!(form.coefficients().iter().all(|&s| s > 0.0));
            // Orthonormal factors on both sides.
            for i in 0..form.rank() {
                for j in 0..form.rank() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    let ga = form.a_vectors()[i].inner(&form.a_vectors()[j]).unwrap();
                    let gb = form.b_vectors()[i].inner(&form.b_vectors()[j]).unwrap();
                    prop_assert!((ga - c(expected, 0.0)).norm() < 1e-9);
                    prop_assert!((gb - c(expected, 0.0)).norm() < 1e-9);
                }
            }
        }
    }
}
