//! Centralized numerical tolerances.
//!
//! Everything here is an absolute f64 tolerance unless noted. Constants that
//! scale with matrix dimension say so at the use site.

/// Checks that hold exactly up to f64 rounding (sums of a few hundred terms).
pub const EXACT: f64 = 1e-12;

/// Hermiticity / positivity slack for accumulated macro covariances.
pub const MACRO_HERMITICITY: f64 = 1e-10;

/// Default density-operator validation tolerance (scaled by dimension at
/// construction time).
pub const DENSITY: f64 = 1e-9;

/// Schmidt coefficients at or below this are treated as numerically zero and
/// dropped, keeping interval partitions well-defined.
pub const SCHMIDT_CUTOFF: f64 = 1e-12;

/// Probability and weight vectors must sum to one within this.
pub const WEIGHT_SUM: f64 = 1e-12;

/// Near-zero trace floor for normalization (scaled by composite dimension);
/// separates genuinely degenerate data from rounding residue.
pub const TRACE_FLOOR: f64 = 1e-12;

/// Relative tolerance for "proportional to" membership tests.
pub const PROPORTIONALITY: f64 = 1e-9;

/// Gram-matrix defect allowed by the orthonormal-kernel hypothesis.
pub const ORTHONORMALITY: f64 = 1e-9;

/// Unit-norm requirement on pure-state generator inputs.
pub const STATE_NORM: f64 = 1e-9;
