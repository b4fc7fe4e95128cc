//! Finite-dimensional complex Hilbert-space linear algebra.
//!
//! Composite indices follow the row-major pairing `(a, b) -> a * dim_b + b`,
//! which fixes the basis convention for the vectorization isomorphism between
//! `H_A (x) H_B` and the operators `H_B -> H_A`. All file formats and tests
//! rely on this pairing.

mod density;
mod eigen;
mod json;
mod operator;
mod schmidt;
mod state;

pub use density::{
    check_density, spectral_decompose, trace_distance, DensityCheck, DensityOperator,
};
pub use eigen::{hermitian_eigen, hermitian_trace_norm};
pub use json::MatrixJson;
pub use operator::{hs_inner, matricize, partial_trace_a, partial_trace_b, vectorize, Operator};
pub use schmidt::{schmidt_decompose, SchmidtForm};
pub use state::{tensor_product, BipartiteShape, StateVector};
