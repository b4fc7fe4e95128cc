//! Shared generators for integration tests.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use twoscale_core::{tensor_product, BipartiteShape, StateVector};

/// Standard normal via Box-Muller.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn complex_gaussian_vector(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    StateVector::new(
        (0..dim)
            .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
            .collect(),
    )
    .unwrap()
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    complex_gaussian_vector(rng, dim).normalized().unwrap()
}

/// `count` orthonormal vectors in dimension `dim` by Gram-Schmidt on
/// Gaussian draws.
pub fn haar_orthonormal(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<StateVector> {
    assert!(count <= dim);
    let mut basis: Vec<StateVector> = Vec::with_capacity(count);
    while basis.len() < count {
        let mut v = complex_gaussian_vector(rng, dim);
        for b in &basis {
            let overlap = b.inner(&v).unwrap();
            v = v.sub(&b.scaled(overlap)).unwrap();
        }
        if v.norm() < 1e-6 {
            continue;
        }
        basis.push(v.normalized().unwrap());
    }
    basis
}

/// `r` positive integers summing to `total`.
pub fn random_composition(rng: &mut ChaCha8Rng, r: usize, total: usize) -> Vec<usize> {
    assert!(r >= 1 && total >= r);
    let mut counts = vec![1usize; r];
    for _ in 0..total - r {
        counts[rng.random_range(0..r)] += 1;
    }
    counts
}

/// Random bipartite state whose factor-weight fractions are exact multiples
/// of `1 / n_grid`, so an `n_grid`-point window resolves the partition
/// exactly. Factor families are orthonormal and fully complex.
pub fn lattice_state(
    rng: &mut ChaCha8Rng,
    shape: &BipartiteShape,
    rank: usize,
    n_grid: usize,
) -> StateVector {
    let counts = random_composition(rng, rank, n_grid);
    let norm = (counts.iter().map(|&c| (c * c) as f64).sum::<f64>()).sqrt();
    let u = haar_orthonormal(rng, shape.dim_a(), rank);
    let v = haar_orthonormal(rng, shape.dim_b(), rank);
    let mut psi = StateVector::zeros(shape.composite_dim()).unwrap();
    for ((&c, u_l), v_l) in counts.iter().zip(&u).zip(&v) {
        let s = c as f64 / norm;
        psi = psi
            .add(
                &tensor_product(u_l, v_l, shape)
                    .unwrap()
                    .scaled(Complex64::new(s, 0.0)),
            )
            .unwrap();
    }
    psi
}
