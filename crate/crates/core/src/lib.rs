//! Simulation and verification laboratory for reconstructing quantum density
//! operators from classical two-scale stochastic processes.
//!
//! The pipeline has four stages, mirrored by the module layout:
//!
//! * [`hilbert`] — finite-dimensional complex linear algebra: tensor products,
//!   the vectorization isomorphism between composite vectors and operators,
//!   partial traces, Schmidt/spectral decompositions, distance metrics.
//! * [`processes`] — generators for paired sample paths `(X(t), Y(t))` on a
//!   micro-time grid inside macro windows: fixed Schmidt partitions, random
//!   mixtures, and Poisson jump schedules, plus pathwise consistency checks.
//! * [`estimator`] — the two-scale covariance estimator: per-window micro
//!   cross-covariance, centering, macro covariance, normalization to a density
//!   operator, the superoperator quadratic form, and CSV ingestion.
//! * [`marginals`] — subsystem states by stochastic marginalization: the
//!   reference Gram kernel, the kernel double-integral partial trace, the
//!   intrinsic autocorrelation state, and the block-kernel closed form.
//!
//! [`scenario`] and [`runner`] wrap the stages into reproducible, seeded
//! experiments consumed by the `twoscale` CLI.

pub mod error;
pub mod estimator;
pub mod hilbert;
pub mod marginals;
pub mod processes;
pub mod runner;
pub mod scenario;
pub mod tol;

pub use error::{Error, Result};
pub use estimator::{
    center, estimate, ingest_time_series, macro_covariance, micro_cross_covariance, normalize,
    superop_quadratic_form, CenteringMode, MacroEstimate, MicroWindowSample, TimeSeriesRecord,
};
pub use hilbert::{
    check_density, hermitian_eigen, hermitian_trace_norm, hs_inner, matricize, partial_trace_a,
    partial_trace_b, schmidt_decompose, spectral_decompose, tensor_product, trace_distance,
    vectorize, BipartiteShape, DensityCheck, DensityOperator, Operator, SchmidtForm, StateVector,
};
pub use marginals::{
    block_kernel_closed_form, block_kernel_closed_form_normalized, check_marginal_consistency,
    diagnostics, intrinsic_state, partial_trace_via_kernel, stochastic_kernel, DiagnosticsReport,
    MarginalAccumulator, MarginalReport, StochasticKernel,
};
pub use processes::{
    build_bell_schedule, build_pure_schedule, check_consistency, deterministic_trajectory,
    sample_jump_trajectory, sample_mixed_trajectory, sample_trajectory, BellState, CoefficientLaw,
    ConsistencyReport, ConsistencySet, JumpSchedule, MacroRandomizer, MicroGrid, SchmidtSchedule,
    TrajectoryPair,
};
pub use runner::{
    export_trajectories, ingest_run, run_scenario, sweep_scenario, RunOutcome, SweepRow,
};
pub use scenario::{RunReport, Scenario, SchemeSpec};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
