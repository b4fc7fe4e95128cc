//! Subsystem states by stochastic marginalization.
//!
//! The B-side reference kernel is the per-window Gram function
//! `K(t, t') = <Y(t')|Y(t)>`. Averaging the double sum
//! `X_i(t) * conj(X_j(t')) * conj(K(t, t'))` over windows is an exact
//! rearrangement of the B-partial trace of the uncentered macro covariance;
//! the intrinsic route instead averages the instantaneous autocorrelation
//! `|X(t)><X(t)|`. For block kernels from orthonormal reference vectors the
//! double sum collapses to the closed form `sum_k w_k^2 |u_k><u_k|`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::{
    cross_covariance_of_paths, macro_covariance, normalize, CenteringMode, MicroWindowSample,
};
use crate::hilbert::{
    partial_trace_b, trace_distance, BipartiteShape, DensityOperator, Operator, StateVector,
};
use crate::processes::{SchmidtSchedule, TrajectoryPair};
use crate::tol;

/// Per-window Gram kernel of the B-side micro signal, `K[i][j] = <Y(t_j)|Y(t_i)>`.
#[derive(Debug, Clone)]
pub struct StochasticKernel {
    n: usize,
    values: Vec<Complex64>,
}

impl StochasticKernel {
    pub fn n_points(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.n + j]
    }

    /// Largest deviation from `K(i, j) = conj(K(j, i))`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                defect = defect.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        defect
    }
}

pub(crate) fn kernel_of_paths(y_path: &[StateVector]) -> Result<StochasticKernel> {
    if y_path.is_empty() {
        return Err(Error::EmptyInput("window paths"));
    }
    let n = y_path.len();
    let mut values = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            values[i * n + j] = y_path[j].inner(&y_path[i])?;
        }
    }
    Ok(StochasticKernel { n, values })
}

/// Gram kernel of one trajectory's B-side path.
pub fn stochastic_kernel(traj: &TrajectoryPair) -> Result<StochasticKernel> {
    kernel_of_paths(traj.y_path())
}

/// All per-window marginal statistics, ready for deterministic folding.
#[derive(Debug, Clone)]
pub(crate) struct WindowMarginals {
    pub kernel_pt: Operator,
    pub intrinsic: Operator,
    pub power_x: f64,
    pub power_y: f64,
    pub iso_xy: Operator,
    pub localization: Vec<f64>,
}

pub(crate) fn window_marginals(
    x_path: &[StateVector],
    y_path: &[StateVector],
) -> Result<WindowMarginals> {
    if x_path.is_empty() || x_path.len() != y_path.len() {
        return Err(Error::EmptyInput("window paths"));
    }
    let n = x_path.len();
    let da = x_path[0].dim();
    let kernel = kernel_of_paths(y_path)?;

    // Kernel double sum: (1/n^2) sum_{t,t'} X_i(t) conj(X_j(t')) conj(K(t,t')).
    let mut kernel_pt = Operator::zeros(da, da)?;
    for t in 0..n {
        for tp in 0..n {
            let k = kernel.get(t, tp).conj();
            if k == Complex64::ZERO {
                continue;
            }
            for i in 0..da {
                let xi = x_path[t].get(i);
                for j in 0..da {
                    kernel_pt.add_assign_at(i, j, xi * x_path[tp].get(j).conj() * k);
                }
            }
        }
    }
    let kernel_pt = kernel_pt.scaled_real(1.0 / (n * n) as f64);

    // Time averages along the window.
    let mut intrinsic = Operator::zeros(da, da)?;
    let mut iso_xy = Operator::zeros(da, da)?;
    let mut power_x = 0.0;
    let mut power_y = 0.0;
    for t in 0..n {
        let py = y_path[t].norm_sqr();
        power_x += x_path[t].norm_sqr();
        power_y += py;
        for i in 0..da {
            let xi = x_path[t].get(i);
            for j in 0..da {
                let dyad = xi * x_path[t].get(j).conj();
                intrinsic.add_assign_at(i, j, dyad);
                iso_xy.add_assign_at(i, j, dyad * Complex64::new(py, 0.0));
            }
        }
    }
    let scale = 1.0 / n as f64;
    let intrinsic = intrinsic.scaled_real(scale);
    let iso_xy = iso_xy.scaled_real(scale);
    power_x *= scale;
    power_y *= scale;

    // Off-diagonal kernel mass per lag.
    let mut localization = Vec::with_capacity(n);
    for lag in 0..n {
        let mut sum = 0.0;
        for t in 0..n - lag {
            sum += kernel.get(t, t + lag).norm();
        }
        localization.push(sum / (n - lag) as f64);
    }

    Ok(WindowMarginals {
        kernel_pt,
        intrinsic,
        power_x,
        power_y,
        iso_xy,
        localization,
    })
}

/// Deterministic fold of per-window marginal statistics.
#[derive(Debug, Clone)]
pub struct MarginalAccumulator {
    dim_a: usize,
    n_windows: usize,
    kernel_pt_sum: Operator,
    intrinsic_sum: Operator,
    iso_xy_sum: Operator,
    power_x_sum: f64,
    power_y_sum: f64,
    localization_sum: Vec<f64>,
    localization_count: Vec<usize>,
}

impl MarginalAccumulator {
    pub fn new(dim_a: usize) -> Result<Self> {
        Ok(MarginalAccumulator {
            dim_a,
            n_windows: 0,
            kernel_pt_sum: Operator::zeros(dim_a, dim_a)?,
            intrinsic_sum: Operator::zeros(dim_a, dim_a)?,
            iso_xy_sum: Operator::zeros(dim_a, dim_a)?,
            power_x_sum: 0.0,
            power_y_sum: 0.0,
            localization_sum: Vec::new(),
            localization_count: Vec::new(),
        })
    }

    pub fn add_window(&mut self, x_path: &[StateVector], y_path: &[StateVector]) -> Result<()> {
        let wm = window_marginals(x_path, y_path)?;
        self.fold(&wm)
    }

    pub(crate) fn fold(&mut self, wm: &WindowMarginals) -> Result<()> {
        self.kernel_pt_sum = self.kernel_pt_sum.add(&wm.kernel_pt)?;
        self.intrinsic_sum = self.intrinsic_sum.add(&wm.intrinsic)?;
        self.iso_xy_sum = self.iso_xy_sum.add(&wm.iso_xy)?;
        self.power_x_sum += wm.power_x;
        self.power_y_sum += wm.power_y;
        if wm.localization.len() > self.localization_sum.len() {
            self.localization_sum.resize(wm.localization.len(), 0.0);
            self.localization_count.resize(wm.localization.len(), 0);
        }
        for (lag, &v) in wm.localization.iter().enumerate() {
            self.localization_sum[lag] += v;
            self.localization_count[lag] += 1;
        }
        self.n_windows += 1;
        Ok(())
    }

    pub fn n_windows(&self) -> usize {
        self.n_windows
    }

    fn require_windows(&self) -> Result<f64> {
        if self.n_windows == 0 {
            return Err(Error::EmptyInput("windows"));
        }
        Ok(1.0 / self.n_windows as f64)
    }

    /// Window mean of the kernel double sum (un-normalized subsystem state).
    pub fn kernel_partial_trace(&self) -> Result<Operator> {
        let scale = self.require_windows()?;
        Ok(self.kernel_pt_sum.scaled_real(scale))
    }

    /// Window mean of the instantaneous autocorrelation, plus its trace
    /// (the empirical mean instantaneous A-side power).
    pub fn intrinsic_accumulation(&self) -> Result<(Operator, f64)> {
        let scale = self.require_windows()?;
        let acc = self.intrinsic_sum.scaled_real(scale);
        let trace = acc.trace().re;
        Ok((acc, trace))
    }

    /// Trace-normalized intrinsic state.
    pub fn intrinsic_state(&self) -> Result<DensityOperator> {
        let (acc, trace) = self.intrinsic_accumulation()?;
        if trace <= tol::TRACE_FLOOR * self.dim_a as f64 {
            return Err(Error::DegenerateEstimate { trace });
        }
        DensityOperator::new(acc.scaled_real(1.0 / trace))
    }

    pub fn diagnostics(&self) -> Result<DiagnosticsReport> {
        let scale = self.require_windows()?;
        let mean_power_x = self.power_x_sum * scale;
        let mean_power_y = self.power_y_sum * scale;
        let iso = self.iso_xy_sum.scaled_real(scale);
        let dyad = self.intrinsic_sum.scaled_real(scale);
        let defect = iso.sub(&dyad.scaled_real(mean_power_y))?.max_abs_entry();
        let localization_profile = self
            .localization_sum
            .iter()
            .zip(&self.localization_count)
            .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
            .collect();
        Ok(DiagnosticsReport {
            mean_power_x,
            mean_power_y,
            isotropy_defect: defect,
            localization_profile,
        })
    }
}

/// Empirical checks of the marginalization hypotheses: instantaneous powers,
/// decoupling of A-side dyads from B-side power, and kernel localization.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub mean_power_x: f64,
    pub mean_power_y: f64,
    pub isotropy_defect: f64,
    pub localization_profile: Vec<f64>,
}

/// Marginal consistency summary: `delta` is the trace distance between the
/// intrinsic state and the B-partial trace of the normalized (uncentered)
/// macro covariance.
#[derive(Debug, Clone, Serialize)]
pub struct MarginalReport {
    pub delta: f64,
    pub diagnostics: DiagnosticsReport,
}

fn accumulate_trajectories(trajs: &[TrajectoryPair]) -> Result<MarginalAccumulator> {
    if trajs.is_empty() {
        return Err(Error::EmptyInput("trajectories"));
    }
    let dim_a = trajs[0].x_path()[0].dim();
    let mut acc = MarginalAccumulator::new(dim_a)?;
    for traj in trajs {
        acc.add_window(traj.x_path(), traj.y_path())?;
    }
    Ok(acc)
}

/// Subsystem-A state through the kernel double integral, averaged over
/// windows. Un-normalized: for unit-power schemes the trace is already one.
pub fn partial_trace_via_kernel(trajs: &[TrajectoryPair]) -> Result<Operator> {
    accumulate_trajectories(trajs)?.kernel_partial_trace()
}

/// Trace-normalized window-and-time average of `|X(t)><X(t)|`.
pub fn intrinsic_state<'a, I>(x_paths: I) -> Result<DensityOperator>
where
    I: IntoIterator<Item = &'a [StateVector]>,
{
    let mut acc: Option<MarginalAccumulator> = Option::None;
    for x_path in x_paths {
        if x_path.is_empty() {
            return Err(Error::EmptyInput("window paths"));
        }
        if acc.is_none() {
            acc = Some(MarginalAccumulator::new(x_path[0].dim())?);
        }
        // A unit dummy B-path: only the X-side statistics are consumed.
        let dummy: Vec<StateVector> = vec![StateVector::basis(1, 0)?; x_path.len()];
        acc.as_mut()
            .expect("initialized")
            .add_window(x_path, &dummy)?;
    }
    acc.ok_or(Error::EmptyInput("windows"))?.intrinsic_state()
}

/// Compare the intrinsic state against the partial trace of the normalized
/// uncentered macro covariance built from the same trajectories.
pub fn check_marginal_consistency(trajs: &[TrajectoryPair]) -> Result<MarginalReport> {
    if trajs.is_empty() {
        return Err(Error::EmptyInput("trajectories"));
    }
    let shape = BipartiteShape::new(trajs[0].x_path()[0].dim(), trajs[0].y_path()[0].dim())?;
    let acc = accumulate_trajectories(trajs)?;
    let samples: Vec<MicroWindowSample> = trajs
        .iter()
        .enumerate()
        .map(|(j, t)| {
            Ok(MicroWindowSample::new(
                j,
                cross_covariance_of_paths(t.x_path(), t.y_path())?,
            ))
        })
        .collect::<Result<_>>()?;
    let est = macro_covariance(&samples, CenteringMode::None)?;
    let rho_ab = normalize(&est)?;
    let reduced = DensityOperator::new(partial_trace_b(rho_ab.matrix(), &shape)?)?;
    let intrinsic = acc.intrinsic_state()?;
    Ok(MarginalReport {
        delta: trace_distance(&intrinsic, &reduced)?,
        diagnostics: acc.diagnostics()?,
    })
}

/// Empirical marginalization diagnostics over a trajectory ensemble.
pub fn diagnostics(trajs: &[TrajectoryPair]) -> Result<DiagnosticsReport> {
    accumulate_trajectories(trajs)?.diagnostics()
}

/// Trace-normalized companion of [`block_kernel_closed_form`], for direct
/// comparison against reduced density operators.
pub fn block_kernel_closed_form_normalized(schedule: &SchmidtSchedule) -> Result<DensityOperator> {
    let raw = block_kernel_closed_form(schedule)?;
    let trace = raw.trace().re;
    if trace <= tol::TRACE_FLOOR * raw.rows() as f64 {
        return Err(Error::DegenerateEstimate { trace });
    }
    DensityOperator::new(raw.scaled_real(1.0 / trace))
}

/// Closed form of the kernel partial trace for a fixed-partition schedule
/// with orthonormal B-side vectors: `sum_k w_k^2 |u_k><u_k|` (un-normalized).
pub fn block_kernel_closed_form(schedule: &SchmidtSchedule) -> Result<Operator> {
    let b = schedule.b_vectors();
    let mut defect: f64 = 0.0;
    for i in 0..b.len() {
        for j in 0..b.len() {
            let g = b[i].inner(&b[j])?;
            let expected = if i == j {
                Complex64::ONE
            } else {
                Complex64::ZERO
            };
            defect = defect.max((g - expected).norm());
        }
    }
    if defect > tol::ORTHONORMALITY {
        return Err(Error::KernelHypothesis { defect });
    }
    let da = schedule.shape().dim_a();
    let mut out = Operator::zeros(da, da)?;
    for (w, u) in schedule.weights().iter().zip(schedule.a_vectors()) {
        out = out.add(&Operator::outer(u, u).scaled_real(w * w))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::streams::window_rng;
    use crate::processes::{
        build_bell_schedule, deterministic_trajectory, sample_trajectory, BellState,
        MacroRandomizer, MicroGrid,
    };
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
    fn bell_kernel_is_a_signed_block_matrix() {
        let schedule = build_bell_schedule(BellState::PhiPlus);
        let grid = MicroGrid::new(1.0, 8).unwrap();
        let traj = sample_trajectory(&schedule, &grid, &mut window_rng(7, 0)).unwrap();
        let kernel = stochastic_kernel(&traj).unwrap();
        let xi_b_sq = traj.xi_b() * traj.xi_b();
        for i in 0..8 {
            for j in 0..8 {
                let same_half = (i < 4) == (j < 4);
                let expected = if same_half {
                    c(xi_b_sq, 0.0)
                } else {
                    Complex64::ZERO
                };
                assert!((kernel.get(i, j) - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_unit_y_gives_all_ones_kernel() {
        let y: Vec<StateVector> = vec![StateVector::basis(2, 0).unwrap(); 4];
        let kernel = kernel_of_paths(&y).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((kernel.get(i, j) - Complex64::ONE).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn kernel_matches_elementwise_inner_product_oracle_and_is_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let y: Vec<StateVector> = (0..5).map(|_| random_vector(&mut rng, 3)).collect();
        let kernel = kernel_of_paths(&y).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let mut dot = Complex64::ZERO;
                for a in 0..3 {
                    dot += y[j].get(a).conj() * y[i].get(a);
                }
                assert!((kernel.get(i, j) - dot).norm() < 1e-14);
            }
        }
        assert!(kernel.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn bell_kernel_route_yields_maximally_mixed_marginal() {
        let schedule = build_bell_schedule(BellState::PhiPlus);
        let grid = MicroGrid::new(1.0, 8).unwrap();
        let trajs: Vec<TrajectoryPair> = (0..6)
            .map(|j| sample_trajectory(&schedule, &grid, &mut window_rng(55, j)).unwrap())
            .collect();
        let got = partial_trace_via_kernel(&trajs).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { c(0.5, 0.0) } else { Complex64::ZERO };
                assert!((got.get(i, j) - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_product_trajectory_marginal_is_projector() {
        let zero = StateVector::basis(2, 0).unwrap();
        let x = vec![zero.clone(); 4];
        let y = vec![zero.clone(); 4];
        let traj = TrajectoryPair::new(x, y, 1.0, 1.0, vec![0; 4]).unwrap();
        let got = partial_trace_via_kernel(&[traj]).unwrap();
        assert!((got.get(0, 0) - Complex64::ONE).norm() < 1e-14);
        assert!(got.get(1, 1).norm() < 1e-14);
    }

    #[test]
    fn kernel_route_equals_partial_trace_of_uncentered_covariance() {
        // Arbitrary messy paths, complex on both sides.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let shape = BipartiteShape::new(2, 3).unwrap();
        let trajs: Vec<TrajectoryPair> = (0..5)
            .map(|_| {
                let n = 6;
                let x: Vec<StateVector> = (0..n).map(|_| random_vector(&mut rng, 2)).collect();
                let y: Vec<StateVector> = (0..n).map(|_| random_vector(&mut rng, 3)).collect();
                TrajectoryPair::new(x, y, 1.0, 1.0, vec![0; n]).unwrap()
            })
            .collect();
        let kernel_route = partial_trace_via_kernel(&trajs).unwrap();
        let samples: Vec<MicroWindowSample> = trajs
            .iter()
            .enumerate()
            .map(|(j, t)| {
                MicroWindowSample::new(
                    j,
                    cross_covariance_of_paths(t.x_path(), t.y_path()).unwrap(),
                )
            })
            .collect();
        let est = macro_covariance(&samples, CenteringMode::None).unwrap();
        let direct = partial_trace_b(est.c_hat(), &shape).unwrap();
        assert!(kernel_route.sub(&direct).unwrap().hs_norm() < 1e-12);
    }

    #[test]
    fn bell_intrinsic_state_is_maximally_mixed() {
        let schedule = build_bell_schedule(BellState::PhiPlus);
        let grid = MicroGrid::new(1.0, 8).unwrap();
        let trajs: Vec<TrajectoryPair> = (0..4)
            .map(|j| sample_trajectory(&schedule, &grid, &mut window_rng(57, j)).unwrap())
            .collect();
        let rho = intrinsic_state(trajs.iter().map(|t| t.x_path())).unwrap();
        let mixed = DensityOperator::maximally_mixed(2).unwrap();
        assert!(trace_distance(&rho, &mixed).unwrap() < 1e-12);
    }

    #[test]
    fn intrinsic_accumulation_matches_elementwise_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let windows: Vec<Vec<StateVector>> = (0..3)
            .map(|_| (0..5).map(|_| random_vector(&mut rng, 3)).collect())
            .collect();
        let mut acc = MarginalAccumulator::new(3).unwrap();
        for w in &windows {
            let dummy = vec![StateVector::basis(1, 0).unwrap(); w.len()];
            acc.add_window(w, &dummy).unwrap();
        }
        let (got, _) = acc.intrinsic_accumulation().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut sum = Complex64::ZERO;
                for w in &windows {
                    let mut inner = Complex64::ZERO;
                    for x in w {
                        inner += x.get(i) * x.get(j).conj();
                    }
                    sum += inner / c(w.len() as f64, 0.0);
                }
                let want = sum / c(windows.len() as f64, 0.0);
                assert!((got.get(i, j) - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn separable_scheme_marginal_consistency_is_exact() {
        let shape = BipartiteShape::new(2, 2).unwrap();
        let schedule = SchmidtSchedule::new(
            shape,
            vec![1.0],
            vec![StateVector::basis(2, 0).unwrap()],
            vec![StateVector::basis(2, 1).unwrap()],
            MacroRandomizer::independent_signed(1.0).unwrap(),
        )
        .unwrap();
        let grid = MicroGrid::new(1.0, 4).unwrap();
        let trajs: Vec<TrajectoryPair> = (0..8)
            .map(|j| sample_trajectory(&schedule, &grid, &mut window_rng(59, j)).unwrap())
            .collect();
        let report = check_marginal_consistency(&trajs).unwrap();
        assert!(report.delta <= 1e-10, "delta = {}", report.delta);
    }

    #[test]
    fn intrinsic_accumulation_trace_matches_mean_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let mut acc = MarginalAccumulator::new(2).unwrap();
        let mut expected = 0.0;
        let windows = 3;
        for _ in 0..windows {
            let x: Vec<StateVector> = (0..4).map(|_| random_vector(&mut rng, 2)).collect();
            let y: Vec<StateVector> = (0..4).map(|_| random_vector(&mut rng, 2)).collect();
            expected += x.iter().map(|v| v.norm_sqr()).sum::<f64>() / 4.0;
            acc.add_window(&x, &y).unwrap();
        }
        let (_, trace) = acc.intrinsic_accumulation().unwrap();
        assert!((trace - expected / windows as f64).abs() < 1e-13);
    }

    #[test]
    fn bell_marginal_consistency_is_exact() {
        let schedule = build_bell_schedule(BellState::PhiPlus);
        let grid = MicroGrid::new(1.0, 8).unwrap();
        let trajs: Vec<TrajectoryPair> = (0..10)
            .map(|j| sample_trajectory(&schedule, &grid, &mut window_rng(58, j)).unwrap())
            .collect();
        let report = check_marginal_consistency(&trajs).unwrap();
        assert!(report.delta < 1e-12, "delta = {}", report.delta);
        // Signed magnitudes: instantaneous power is the squared magnitude.
        let m2 = 2f64.sqrt();
        assert!((report.diagnostics.mean_power_y - m2).abs() < 1e-12);
        assert!((report.diagnostics.mean_power_x - m2).abs() < 1e-12);
        // The exact-magnitude law has no power fluctuations at all.
        assert!(report.diagnostics.isotropy_defect < 1e-12);
    }

    #[test]
    fn independent_schemes_have_small_isotropy_defect() {
        // X and Y drawn independently: dyads and B-power decouple as 1/sqrt(N).
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        let n_windows = 2000;
        let mut acc = MarginalAccumulator::new(2).unwrap();
        for _ in 0..n_windows {
            let x = vec![random_vector(&mut rng, 2); 1];
            let y = vec![random_vector(&mut rng, 2); 1];
            acc.add_window(&x, &y).unwrap();
        }
        let d = acc.diagnostics().unwrap();
        assert!(d.isotropy_defect <= 4.0 / (n_windows as f64).sqrt());
    }

    #[test]
    fn unit_constant_y_has_unit_power_and_zero_defect() {
        let zero = StateVector::basis(2, 0).unwrap();
        let mut acc = MarginalAccumulator::new(2).unwrap();
        acc.add_window(&vec![zero.clone(); 4], &vec![zero.clone(); 4])
            .unwrap();
        let d = acc.diagnostics().unwrap();
        assert!((d.mean_power_y - 1.0).abs() < 1e-15);
        assert!(d.isotropy_defect < 1e-15);
    }

    #[test]
    fn block_kernel_closed_form_matches_hand_values() {
        let schedule = build_bell_schedule(BellState::PhiPlus);
        let out = block_kernel_closed_form(&schedule).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j {
                    c(0.25, 0.0)
                } else {
                    Complex64::ZERO
                };
                assert!((out.get(i, j) - expected).norm() < 1e-15);
            }
        }
        let normalized = block_kernel_closed_form_normalized(&schedule).unwrap();
        let mixed = DensityOperator::maximally_mixed(2).unwrap();
        assert!(trace_distance(&normalized, &mixed).unwrap() < 1e-14);
    }

    #[test]
    fn single_interval_closed_form_is_a_projector() {
        let shape = BipartiteShape::new(2, 2).unwrap();
        let u = StateVector::basis(2, 1).unwrap();
        let schedule = SchmidtSchedule::new(
            shape,
            vec![1.0],
            vec![u.clone()],
            vec![StateVector::basis(2, 0).unwrap()],
            MacroRandomizer::independent_signed(1.0).unwrap(),
        )
        .unwrap();
        let out = block_kernel_closed_form(&schedule).unwrap();
        assert!(out.sub(&Operator::outer(&u, &u)).unwrap().max_abs_entry() < 1e-15);
    }

    #[test]
    fn closed_form_matches_deterministic_kernel_route() {
        let shape = BipartiteShape::new(2, 2).unwrap();
        let schedule = SchmidtSchedule::new(
            shape,
            vec![0.6, 0.4],
            vec![
                StateVector::basis(2, 0).unwrap(),
                StateVector::basis(2, 1).unwrap(),
            ],
            vec![
                StateVector::basis(2, 0).unwrap(),
                StateVector::basis(2, 1).unwrap(),
            ],
            MacroRandomizer::independent_signed(1.0).unwrap(),
        )
        .unwrap();
        let closed = block_kernel_closed_form(&schedule).unwrap();
        assert!((closed.get(0, 0) - c(0.36, 0.0)).norm() < 1e-14);
        assert!((closed.get(1, 1) - c(0.16, 0.0)).norm() < 1e-14);
        let grid = MicroGrid::new(1.0, 5).unwrap();
        let traj = deterministic_trajectory(&schedule, &grid).unwrap();
        let numeric = partial_trace_via_kernel(&[traj]).unwrap();
        assert!(closed.sub(&numeric).unwrap().hs_norm() < 1e-12);
    }

    #[test]
    fn non_orthonormal_reference_vectors_violate_the_hypothesis() {
        let shape = BipartiteShape::new(2, 2).unwrap();
        let b0 = StateVector::basis(2, 0).unwrap();
        let skew = StateVector::from_reals(&[1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()]).unwrap();
        let schedule = SchmidtSchedule::new(
            shape,
            vec![0.5, 0.5],
            vec![
                StateVector::basis(2, 0).unwrap(),
                StateVector::basis(2, 1).unwrap(),
            ],
            vec![b0, skew],
            MacroRandomizer::independent_signed(1.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            block_kernel_closed_form(&schedule),
            Err(Error::KernelHypothesis { .. })
        ));
    }
}
