//! Two-scale covariance estimation.
//!
//! Each macro window contributes one composite vector: the micro-time average
//! of `X(t)` paired against `conj(Y(t))`, flattened row-major. Centering and
//! the ensemble second moment of those vectors produce the macro covariance;
//! normalizing its trace yields the reconstructed density operator.

mod timeseries;

pub use timeseries::{
    ingest_time_series, partition_windows, read_time_series, IngestedWindow, TimeSeriesRecord,
    TrajectoryCsvWriter,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    hermitian_eigen, hs_inner, matricize, BipartiteShape, DensityOperator, Operator, StateVector,
};
use crate::processes::{MicroGrid, TrajectoryPair};
use crate::tol;

/// One window's micro cross-covariance, as a vector in the composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroWindowSample {
    window_index: usize,
    c_vector: StateVector,
}

impl MicroWindowSample {
    pub fn new(window_index: usize, c_vector: StateVector) -> Self {
        MicroWindowSample {
            window_index,
            c_vector,
        }
    }

    pub fn window_index(&self) -> usize {
        self.window_index
    }

    pub fn c_vector(&self) -> &StateVector {
        &self.c_vector
    }
}

/// How window samples are centered before the second moment is taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CenteringMode {
    /// Subtract a known mean vector.
    TrueMean { mean: StateVector },
    /// Subtract the empirical mean of the sample list.
    EmpiricalMean,
    /// No centering.
    None,
}

impl CenteringMode {
    /// Known-zero mean in the given composite dimension.
    pub fn true_zero(composite_dim: usize) -> Result<Self> {
        Ok(CenteringMode::TrueMean {
            mean: StateVector::zeros(composite_dim)?,
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            CenteringMode::TrueMean { .. } => "true_mean",
            CenteringMode::EmpiricalMean => "empirical_mean",
            CenteringMode::None => "none",
        }
    }
}

/// Macro covariance of the (centered) window samples.
#[derive(Debug, Clone)]
pub struct MacroEstimate {
    c_hat: Operator,
    n_windows: usize,
    centering: CenteringMode,
    trace: f64,
}

impl MacroEstimate {
    pub fn c_hat(&self) -> &Operator {
        &self.c_hat
    }

    pub fn n_windows(&self) -> usize {
        self.n_windows
    }

    pub fn centering(&self) -> &CenteringMode {
        &self.centering
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (values, _) = hermitian_eigen(&self.c_hat)?;
        Ok(values.last().copied().unwrap_or(0.0))
    }
}

/// Window average of the paired paths: `c_{ab} = (1/n) sum_t X_a(t) * conj(Y_b(t))`,
/// returned flattened row-major (index `a * dim_b + b`). Shared by the
/// simulated pipeline and CSV ingestion so the two routes agree bit for bit.
pub(crate) fn cross_covariance_of_paths(
    x_path: &[StateVector],
    y_path: &[StateVector],
) -> Result<StateVector> {
    if x_path.is_empty() || x_path.len() != y_path.len() {
        return Err(Error::EmptyInput("window paths"));
    }
    let da = x_path[0].dim();
    let db = y_path[0].dim();
    let mut acc = vec![Complex64::ZERO; da * db];
    for (x, y) in x_path.iter().zip(y_path) {
        if x.dim() != da || y.dim() != db {
            return Err(Error::shape(
                format!("({da}, {db})"),
                format!("({}, {})", x.dim(), y.dim()),
            ));
        }
        for a in 0..da {
            let xa = x.get(a);
            for b in 0..db {
                acc[a * db + b] += xa * y.get(b).conj();
            }
        }
    }
    let scale = Complex64::new(1.0 / x_path.len() as f64, 0.0);
    StateVector::new(acc.into_iter().map(|z| z * scale).collect())
}

/// Micro cross-covariance of one sampled window.
pub fn micro_cross_covariance(
    traj: &TrajectoryPair,
    grid: &MicroGrid,
    window_index: usize,
) -> Result<MicroWindowSample> {
    if traj.n_points() != grid.n_points() {
        return Err(Error::shape(
            format!("{} grid points", grid.n_points()),
            format!("{}", traj.n_points()),
        ));
    }
    let c_vector = cross_covariance_of_paths(traj.x_path(), traj.y_path())?;
    Ok(MicroWindowSample::new(window_index, c_vector))
}

/// Center window samples according to `mode`.
pub fn center(
    samples: &[MicroWindowSample],
    mode: &CenteringMode,
) -> Result<Vec<MicroWindowSample>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("window samples"));
    }
    let dim = samples[0].c_vector().dim();
    match mode {
        CenteringMode::None => Ok(samples.to_vec()),
        CenteringMode::TrueMean { mean } => {
            if mean.dim() != dim {
                return Err(Error::shape(
                    format!("dim {dim}"),
                    format!("{}", mean.dim()),
                ));
            }
            samples
                .iter()
                .map(|s| {
                    Ok(MicroWindowSample::new(
                        s.window_index(),
                        s.c_vector().sub(mean)?,
                    ))
                })
                .collect()
        }
        CenteringMode::EmpiricalMean => {
            let mut mean = StateVector::zeros(dim)?;
            for s in samples {
                mean = mean.add(s.c_vector())?;
            }
            let mean = mean.scaled(Complex64::new(1.0 / samples.len() as f64, 0.0));
            samples
                .iter()
                .map(|s| {
                    Ok(MicroWindowSample::new(
                        s.window_index(),
                        s.c_vector().sub(&mean)?,
                    ))
                })
                .collect()
        }
    }
}

/// Ensemble second moment `(1/N) sum_j |z_j><z_j|` of already-centered
/// samples, accumulated in list order. Hermitian and positive semi-definite
/// by construction.
pub fn macro_covariance(
    centered: &[MicroWindowSample],
    centering: CenteringMode,
) -> Result<MacroEstimate> {
    if centered.is_empty() {
        return Err(Error::EmptyInput("window samples"));
    }
    let dim = centered[0].c_vector().dim();
    let mut c_hat = Operator::zeros(dim, dim)?;
    for s in centered {
        let z = s.c_vector();
        if z.dim() != dim {
            return Err(Error::shape(format!("dim {dim}"), format!("{}", z.dim())));
        }
        for i in 0..dim {
            let zi = z.get(i);
            for j in 0..dim {
                c_hat.add_assign_at(i, j, zi * z.get(j).conj());
            }
        }
    }
    let c_hat = c_hat.scaled_real(1.0 / centered.len() as f64);
    let trace = c_hat.trace().re;
    Ok(MacroEstimate {
        c_hat,
        n_windows: centered.len(),
        centering,
        trace,
    })
}

/// Center then accumulate in one step.
pub fn estimate(samples: &[MicroWindowSample], mode: &CenteringMode) -> Result<MacroEstimate> {
    let centered = center(samples, mode)?;
    macro_covariance(&centered, mode.clone())
}

/// Normalize the macro covariance to unit trace.
pub fn normalize(est: &MacroEstimate) -> Result<DensityOperator> {
    let dim = est.c_hat().rows();
    let floor = tol::TRACE_FLOOR * dim as f64;
    if est.trace() <= floor {
        return Err(Error::DegenerateEstimate { trace: est.trace() });
    }
    DensityOperator::new(est.c_hat().scaled_real(1.0 / est.trace()))
}

/// Empirical quadratic form of the covariance superoperator:
/// `(1/N) sum_j <v1|Z_j><Z_j|v2>` with `Z_j` the operator reshape of sample
/// `j`. Coincides with the matrix quadratic form
/// `<vec(v1)| C_hat |vec(v2)>` because the reshape is unitary.
pub fn superop_quadratic_form(
    samples: &[MicroWindowSample],
    v1: &Operator,
    v2: &Operator,
) -> Result<Complex64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("window samples"));
    }
    if v1.rows() != v2.rows() || v1.cols() != v2.cols() {
        return Err(Error::shape(
            format!("{}x{}", v1.rows(), v1.cols()),
            format!("{}x{}", v2.rows(), v2.cols()),
        ));
    }
    let shape = BipartiteShape::new(v1.rows(), v1.cols())?;
    let mut acc = Complex64::ZERO;
    for s in samples {
        let z = matricize(s.c_vector(), &shape)?;
        acc += hs_inner(v1, &z)? * hs_inner(&z, v2)?;
    }
    Ok(acc / Complex64::new(samples.len() as f64, 0.0))
}
