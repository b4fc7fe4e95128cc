//! Reproducible experiment descriptions and their JSON report schema.
//!
//! A scenario file is one self-contained experiment: the bipartite shape, the
//! generating scheme, grid and window counts, centering, and the master seed.
//! Reports are fully deterministic for a fixed scenario (timing lives only in
//! sweep CSVs), so byte-identical reruns are the expected behavior.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::CenteringMode;
use crate::hilbert::{BipartiteShape, DensityCheck, Operator, StateVector};
use crate::marginals::DiagnosticsReport;
use crate::processes::{BellState, CoefficientLaw, MicroGrid};

/// Generating scheme for the paired processes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SchemeSpec {
    /// Fixed two-interval partition generating a Bell state.
    Bell { which: BellState },
    /// Fixed partition derived from the factor decomposition of `psi`.
    Pure { psi: StateVector },
    /// Per-window random selection among component schemes.
    Mixed {
        lambdas: Vec<f64>,
        components: Vec<SchemeSpec>,
    },
    /// Poisson jump process over a fixed set of vector pairs.
    Jump {
        jump_rate: f64,
        selector_weights: Vec<f64>,
        coefficient_law: CoefficientLaw,
        a_vectors: Vec<StateVector>,
        b_vectors: Vec<StateVector>,
    },
}

/// One reproducible experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub shape: BipartiteShape,
    pub scheme: SchemeSpec,
    pub grid: MicroGrid,
    pub n_windows: usize,
    pub centering: CenteringMode,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Operator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_tolerance: Option<f64>,
}

impl Scenario {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let scenario: Scenario = serde_json::from_str(&text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_windows == 0 {
            return Err(Error::InvalidScenario {
                field: "n_windows".into(),
                message: "must be at least 1".into(),
            });
        }
        if let Some(target) = &self.target {
            if !target.is_square() || target.rows() != self.shape.composite_dim() {
                return Err(Error::InvalidScenario {
                    field: "target".into(),
                    message: format!("expected a {d}x{d} matrix", d = self.shape.composite_dim()),
                });
            }
        }
        if let Some(tol) = self.target_tolerance {
            if tol <= 0.0 || !tol.is_finite() {
                return Err(Error::InvalidScenario {
                    field: "target_tolerance".into(),
                    message: format!("must be positive and finite, got {tol}"),
                });
            }
        }
        if let CenteringMode::TrueMean { mean } = &self.centering {
            if mean.dim() != self.shape.composite_dim() {
                return Err(Error::InvalidScenario {
                    field: "centering.mean".into(),
                    message: format!(
                        "dimension {} does not match the composite dimension {}",
                        mean.dim(),
                        self.shape.composite_dim()
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Count of pathwise consistency checks across the run.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencySummary {
    pub checked_windows: usize,
    pub violations: usize,
}

/// Marginalization section of the run report.
#[derive(Debug, Clone, Serialize)]
pub struct MarginalSection {
    /// Trace distance between the intrinsic state and the B-partial trace of
    /// the normalized uncentered macro covariance.
    pub delta: f64,
    /// Trace of the intrinsic accumulation before normalization.
    pub intrinsic_trace: f64,
    /// Hilbert-Schmidt gap between the kernel double-sum route and the
    /// partial trace of the uncentered macro covariance.
    pub kernel_identity_defect: f64,
    #[serde(flatten)]
    pub diagnostics: DiagnosticsReport,
}

/// Pass/fail summary; `run` exits nonzero when any enabled check fails.
#[derive(Debug, Clone, Serialize)]
pub struct CheckSection {
    pub density_valid: bool,
    pub consistency_clean: Option<bool>,
    pub target_within_tolerance: Option<bool>,
}

/// Deterministic run report (serialized as `report.json`).
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub shape: BipartiteShape,
    pub seed: u64,
    pub n_windows: usize,
    pub centering: String,
    pub grid: Option<MicroGrid>,
    /// Resolved magnitude of the signed macro randomizer (absent for jump
    /// and ingested runs).
    pub randomizer_magnitude: Option<f64>,
    /// Grid points allocated to each interval, per component schedule.
    pub interval_allocation: Option<Vec<Vec<usize>>>,
    pub rho: Operator,
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub trace_distance_to_target: Option<f64>,
    pub selector_frequencies: Option<Vec<f64>>,
    pub consistency: Option<ConsistencySummary>,
    pub marginals: MarginalSection,
    pub density_check: DensityCheck,
    pub checks: CheckSection,
    pub passed: bool,
}
