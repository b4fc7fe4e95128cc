//! Scenario execution: generate, estimate, normalize, marginalize, check.
//!
//! Window generation is embarrassingly parallel and deterministic: window `j`
//! draws only from its own named stream, mixture selection is pre-drawn from
//! a separate stream in window order, and all reductions fold per-window
//! results in window-index order. Reports are therefore independent of the
//! thread count.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::estimator::{
    center, cross_covariance_of_paths, macro_covariance, normalize, partition_windows,
    read_time_series, CenteringMode, MicroWindowSample, TrajectoryCsvWriter,
};
use crate::hilbert::{
    check_density, partial_trace_b, trace_distance, BipartiteShape, DensityOperator,
};
use crate::marginals::{window_marginals, MarginalAccumulator, WindowMarginals};
use crate::processes::streams;
use crate::processes::{
    build_bell_schedule, build_pure_schedule, check_consistency, draw_categorical,
    sample_jump_trajectory, sample_trajectory, ConsistencySet, JumpSchedule, SchmidtSchedule,
    TrajectoryPair,
};
use crate::scenario::{
    CheckSection, ConsistencySummary, MarginalSection, RunReport, Scenario, SchemeSpec,
};

/// Default tolerance for the target-distance check when a scenario provides a
/// target without a tolerance (sized for statistical, not exact, runs).
pub const DEFAULT_TARGET_TOLERANCE: f64 = 0.05;

/// A finished run: the deterministic report plus the reconstructed state.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub rho: DensityOperator,
}

/// One line of a sweep CSV.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n_windows: usize,
    pub trace_distance_to_target: Option<f64>,
    pub min_eigenvalue: f64,
    pub wallclock_ms: f64,
}

enum ResolvedScheme {
    Partition(SchmidtSchedule),
    Mixture {
        lambdas: Vec<f64>,
        schedules: Vec<SchmidtSchedule>,
    },
    Jump(JumpSchedule),
}

fn resolve_component(shape: &BipartiteShape, spec: &SchemeSpec) -> Result<SchmidtSchedule> {
    match spec {
        SchemeSpec::Bell { which } => {
            if shape.dim_a() != 2 || shape.dim_b() != 2 {
                return Err(Error::InvalidScenario {
                    field: "shape".into(),
                    message: "bell schemes require a (2, 2) shape".into(),
                });
            }
            Ok(build_bell_schedule(*which))
        }
        SchemeSpec::Pure { psi } => {
            if psi.dim() != shape.composite_dim() {
                return Err(Error::InvalidScenario {
                    field: "scheme.psi".into(),
                    message: format!(
                        "dimension {} does not match the composite dimension {}",
                        psi.dim(),
                        shape.composite_dim()
                    ),
                });
            }
            build_pure_schedule(psi, shape)
        }
        _ => Err(Error::InvalidScenario {
            field: "scheme.components".into(),
            message: "mixture components must be bell or pure schemes".into(),
        }),
    }
}

fn resolve_scheme(shape: &BipartiteShape, spec: &SchemeSpec) -> Result<ResolvedScheme> {
    match spec {
        SchemeSpec::Bell { .. } | SchemeSpec::Pure { .. } => {
            Ok(ResolvedScheme::Partition(resolve_component(shape, spec)?))
        }
        SchemeSpec::Mixed {
            lambdas,
            components,
        } => {
            if lambdas.len() != components.len() {
                return Err(Error::InvalidScenario {
                    field: "scheme.lambdas".into(),
                    message: format!(
                        "{} weights for {} components",
                        lambdas.len(),
                        components.len()
                    ),
                });
            }
            let schedules = components
                .iter()
                .map(|c| resolve_component(shape, c))
                .collect::<Result<Vec<_>>>()?;
            Ok(ResolvedScheme::Mixture {
                lambdas: lambdas.clone(),
                schedules,
            })
        }
        SchemeSpec::Jump {
            jump_rate,
            selector_weights,
            coefficient_law,
            a_vectors,
            b_vectors,
        } => Ok(ResolvedScheme::Jump(JumpSchedule::new(
            *shape,
            *jump_rate,
            selector_weights.clone(),
            *coefficient_law,
            a_vectors.clone(),
            b_vectors.clone(),
        )?)),
    }
}

impl ResolvedScheme {
    fn randomizer_magnitude(&self) -> Option<f64> {
        match self {
            ResolvedScheme::Partition(s) => Some(s.randomizer().magnitude()),
            ResolvedScheme::Mixture { schedules, .. } => {
                schedules.first().map(|s| s.randomizer().magnitude())
            }
            ResolvedScheme::Jump(_) => None,
        }
    }

    fn interval_allocation(&self, n_points: usize) -> Result<Option<Vec<Vec<usize>>>> {
        match self {
            ResolvedScheme::Partition(s) => Ok(Some(vec![s.allocation(n_points)?])),
            ResolvedScheme::Mixture { schedules, .. } => Ok(Some(
                schedules
                    .iter()
                    .map(|s| s.allocation(n_points))
                    .collect::<Result<Vec<_>>>()?,
            )),
            ResolvedScheme::Jump(_) => Ok(None),
        }
    }

    fn consistency_sets(&self) -> Vec<ConsistencySet> {
        match self {
            ResolvedScheme::Partition(s) => vec![s.consistency_set()],
            ResolvedScheme::Mixture { schedules, .. } => {
                schedules.iter().map(|s| s.consistency_set()).collect()
            }
            ResolvedScheme::Jump(s) => vec![s.consistency_set()],
        }
    }

    /// Pre-draw mixture selections (one per window, in window order) from the
    /// dedicated selector stream.
    fn draw_selections(&self, seed: u64, n_windows: usize) -> Option<Vec<usize>> {
        match self {
            ResolvedScheme::Mixture { lambdas, .. } => {
                let mut rng = streams::selector_rng(seed);
                Some(
                    (0..n_windows)
                        .map(|_| draw_categorical(lambdas, &mut rng))
                        .collect(),
                )
            }
            _ => None,
        }
    }
}

fn generate_window(
    resolved: &ResolvedScheme,
    selections: Option<&[usize]>,
    scenario: &Scenario,
    window: usize,
) -> Result<TrajectoryPair> {
    let mut rng = streams::window_rng(scenario.seed, window as u64);
    match resolved {
        ResolvedScheme::Partition(s) => sample_trajectory(s, &scenario.grid, &mut rng),
        ResolvedScheme::Mixture { schedules, .. } => {
            let k = selections.expect("mixture selections are pre-drawn")[window];
            sample_trajectory(&schedules[k], &scenario.grid, &mut rng)
        }
        ResolvedScheme::Jump(s) => sample_jump_trajectory(s, &scenario.grid, &mut rng),
    }
}

struct WindowOutcome {
    sample: MicroWindowSample,
    marginals: WindowMarginals,
    violations: usize,
}

/// Map `f` over `0..n` on up to `threads` workers, preserving index order.
fn parallel_map<T, F>(n: usize, threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let threads = threads.max(1).min(n.max(1));
    if threads == 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(threads);
    std::thread::scope(|scope| {
        let f = &f;
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let lo = t * chunk;
                let hi = ((t + 1) * chunk).min(n);
                scope.spawn(move || (lo..hi).map(f).collect::<Result<Vec<T>>>())
            })
            .collect();
        let mut out = Vec::with_capacity(n);
        for handle in handles {
            out.extend(handle.join().expect("window worker panicked")?);
        }
        Ok(out)
    })
}

/// Execute a scenario end to end.
pub fn run_scenario(scenario: &Scenario, threads: usize) -> Result<RunOutcome> {
    scenario.validate()?;
    let resolved = resolve_scheme(&scenario.shape, &scenario.scheme)?;
    let allocation = resolved.interval_allocation(scenario.grid.n_points())?;
    let selections = resolved.draw_selections(scenario.seed, scenario.n_windows);
    let sets = resolved.consistency_sets();

    let outcomes = parallel_map(scenario.n_windows, threads, |j| {
        let traj = generate_window(&resolved, selections.as_deref(), scenario, j)?;
        let sample =
            MicroWindowSample::new(j, cross_covariance_of_paths(traj.x_path(), traj.y_path())?);
        let marginals = window_marginals(traj.x_path(), traj.y_path())?;
        let set = match (&resolved, &selections) {
            (ResolvedScheme::Mixture { .. }, Some(sel)) => &sets[sel[j]],
            _ => &sets[0],
        };
        let violations = check_consistency(&traj, set).violating_indices.len();
        Ok(WindowOutcome {
            sample,
            marginals,
            violations,
        })
    })?;

    // Fixed-order reductions.
    let mut samples = Vec::with_capacity(outcomes.len());
    let mut acc = MarginalAccumulator::new(scenario.shape.dim_a())?;
    let mut violations = 0usize;
    for o in &outcomes {
        samples.push(o.sample.clone());
        acc.fold(&o.marginals)?;
        violations += o.violations;
    }

    let centered = center(&samples, &scenario.centering)?;
    let est = macro_covariance(&centered, scenario.centering.clone())?;
    let rho = normalize(&est)?;
    let min_eigenvalue = est.min_eigenvalue()? / est.trace();

    // Marginal identities are stated for the uncentered second moment.
    let raw_est = macro_covariance(&samples, CenteringMode::None)?;
    let rho_raw = normalize(&raw_est)?;
    let reduced = DensityOperator::new(partial_trace_b(rho_raw.matrix(), &scenario.shape)?)?;
    let intrinsic = acc.intrinsic_state()?;
    let (_, intrinsic_trace) = acc.intrinsic_accumulation()?;
    let delta = trace_distance(&intrinsic, &reduced)?;
    let kernel_identity_defect = acc
        .kernel_partial_trace()?
        .sub(&partial_trace_b(raw_est.c_hat(), &scenario.shape)?)?
        .hs_norm();

    let trace_distance_to_target = match &scenario.target {
        Some(target) => {
            let target_dm = DensityOperator::new(target.clone())?;
            Some(trace_distance(&rho, &target_dm)?)
        }
        Option::None => Option::None,
    };

    let selector_frequencies = selections.as_ref().map(|sel| {
        let k = match &resolved {
            ResolvedScheme::Mixture { lambdas, .. } => lambdas.len(),
            _ => 0,
        };
        let mut counts = vec![0usize; k];
        for &s in sel {
            counts[s] += 1;
        }
        counts
            .into_iter()
            .map(|c| c as f64 / sel.len() as f64)
            .collect::<Vec<f64>>()
    });

    let density_check = check_density(rho.matrix(), rho.tol())?;
    let density_valid = density_check.passes();
    let consistency_clean = violations == 0;
    let target_within_tolerance = trace_distance_to_target.map(|d| {
        d <= scenario
            .target_tolerance
            .unwrap_or(DEFAULT_TARGET_TOLERANCE)
    });
    let passed = density_valid && consistency_clean && target_within_tolerance.unwrap_or(true);

    let report = RunReport {
        scenario: scenario.name.clone(),
        shape: scenario.shape,
        seed: scenario.seed,
        n_windows: scenario.n_windows,
        centering: scenario.centering.label().to_string(),
        grid: Some(scenario.grid),
        randomizer_magnitude: resolved.randomizer_magnitude(),
        interval_allocation: allocation,
        rho: rho.matrix().clone(),
        trace: est.trace(),
        min_eigenvalue,
        trace_distance_to_target,
        selector_frequencies,
        consistency: Some(ConsistencySummary {
            checked_windows: scenario.n_windows,
            violations,
        }),
        marginals: MarginalSection {
            delta,
            intrinsic_trace,
            kernel_identity_defect,
            diagnostics: acc.diagnostics()?,
        },
        density_check,
        checks: CheckSection {
            density_valid,
            consistency_clean: Some(consistency_clean),
            target_within_tolerance,
        },
        passed,
    };
    Ok(RunOutcome { report, rho })
}

/// Re-run a scenario across window counts, sharing the master seed. Window
/// streams are indexed, so shorter runs are prefixes of longer ones.
pub fn sweep_scenario(
    scenario: &Scenario,
    n_list: &[usize],
    threads: usize,
) -> Result<Vec<SweepRow>> {
    if n_list.is_empty() {
        return Err(Error::EmptyInput("sweep sizes"));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut s = scenario.clone();
        s.n_windows = n;
        let started = Instant::now();
        let outcome = run_scenario(&s, threads)?;
        rows.push(SweepRow {
            n_windows: n,
            trace_distance_to_target: outcome.report.trace_distance_to_target,
            min_eigenvalue: outcome.report.min_eigenvalue,
            wallclock_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(rows)
}

/// Regenerate a scenario's trajectories (same streams as `run_scenario`) and
/// write them as CSV.
pub fn export_trajectories<W: Write>(scenario: &Scenario, writer: W) -> Result<()> {
    scenario.validate()?;
    let resolved = resolve_scheme(&scenario.shape, &scenario.scheme)?;
    let selections = resolved.draw_selections(scenario.seed, scenario.n_windows);
    let mut csv = TrajectoryCsvWriter::new(writer, scenario.shape)?;
    for j in 0..scenario.n_windows {
        let traj = generate_window(&resolved, selections.as_deref(), scenario, j)?;
        csv.write_window(j, &scenario.grid, &traj)?;
    }
    Ok(())
}

/// Run the estimator and marginal checks on an external time series.
pub fn ingest_run(
    path: &Path,
    shape: &BipartiteShape,
    window_length: f64,
    centering: &CenteringMode,
    name: &str,
) -> Result<RunOutcome> {
    let file = std::fs::File::open(path)?;
    let records = read_time_series(std::io::BufReader::new(file), shape)?;
    let windows = partition_windows(&records, window_length, Option::None)?;

    let mut samples = Vec::with_capacity(windows.len());
    let mut acc = MarginalAccumulator::new(shape.dim_a())?;
    for w in &windows {
        samples.push(MicroWindowSample::new(
            w.index,
            cross_covariance_of_paths(&w.x_path, &w.y_path)?,
        ));
        acc.add_window(&w.x_path, &w.y_path)?;
    }

    let centered = center(&samples, centering)?;
    let est = macro_covariance(&centered, centering.clone())?;
    let rho = normalize(&est)?;
    let min_eigenvalue = est.min_eigenvalue()? / est.trace();

    let raw_est = macro_covariance(&samples, CenteringMode::None)?;
    let rho_raw = normalize(&raw_est)?;
    let reduced = DensityOperator::new(partial_trace_b(rho_raw.matrix(), shape)?)?;
    let intrinsic = acc.intrinsic_state()?;
    let (_, intrinsic_trace) = acc.intrinsic_accumulation()?;
    let delta = trace_distance(&intrinsic, &reduced)?;
    let kernel_identity_defect = acc
        .kernel_partial_trace()?
        .sub(&partial_trace_b(raw_est.c_hat(), shape)?)?
        .hs_norm();

    let density_check = check_density(rho.matrix(), rho.tol())?;
    let density_valid = density_check.passes();

    let report = RunReport {
        scenario: name.to_string(),
        shape: *shape,
        seed: 0,
        n_windows: windows.len(),
        centering: centering.label().to_string(),
        grid: Option::None,
        randomizer_magnitude: Option::None,
        interval_allocation: Option::None,
        rho: rho.matrix().clone(),
        trace: est.trace(),
        min_eigenvalue,
        trace_distance_to_target: Option::None,
        selector_frequencies: Option::None,
        consistency: Option::None,
        marginals: MarginalSection {
            delta,
            intrinsic_trace,
            kernel_identity_defect,
            diagnostics: acc.diagnostics()?,
        },
        density_check,
        checks: CheckSection {
            density_valid,
            consistency_clean: Option::None,
            target_within_tolerance: Option::None,
        },
        passed: density_valid,
    };
    Ok(RunOutcome { report, rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Operator;
    use crate::processes::BellState;
    use crate::scenario::SchemeSpec;

    fn bell_scenario(n_windows: usize, centering: CenteringMode) -> Scenario {
        let target = BellState::PhiPlus.state_vector();
        Scenario {
            name: "bell-test".into(),
            shape: BellState::shape(),
            scheme: SchemeSpec::Bell {
                which: BellState::PhiPlus,
            },
            grid: crate::processes::MicroGrid::new(1.0, 8).unwrap(),
            n_windows,
            centering,
            seed: 424242,
            target: Some(Operator::outer(&target, &target)),
            target_tolerance: Some(1e-10),
        }
    }

    #[test]
    fn single_window_run_produces_a_rank_one_state() {
        let scenario = bell_scenario(1, CenteringMode::true_zero(4).unwrap());
        let outcome = run_scenario(&scenario, 1).unwrap();
        assert!(outcome.report.passed);
        assert!(outcome.report.trace_distance_to_target.unwrap() <= 1e-10);
        // Rank one: a single significant eigenvalue.
        let spec = crate::hilbert::spectral_decompose(&outcome.rho).unwrap();
        assert!((spec[0].0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reports_are_identical_across_thread_counts() {
        let scenario = bell_scenario(64, CenteringMode::EmpiricalMean);
        let a = run_scenario(&scenario, 1).unwrap();
        let b = run_scenario(&scenario, 3).unwrap();
        let ja = serde_json::to_string(&a.report).unwrap();
        let jb = serde_json::to_string(&b.report).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let scenario = bell_scenario(32, CenteringMode::EmpiricalMean);
        let a = run_scenario(&scenario, 2).unwrap();
        let b = run_scenario(&scenario, 2).unwrap();
        assert_eq!(
            serde_json::to_string(&a.report).unwrap(),
            serde_json::to_string(&b.report).unwrap()
        );
    }

    #[test]
    fn sweep_emits_one_row_per_size() {
        let scenario = bell_scenario(8, CenteringMode::EmpiricalMean);
        let rows = sweep_scenario(&scenario, &[4, 8, 16], 1).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].n_windows, 4);
        assert!(rows.iter().all(|r| r.min_eigenvalue.is_finite()));
        assert!(rows.iter().all(|r| r.wallclock_ms >= 0.0));
    }

    #[test]
    fn mixture_scenarios_report_selector_frequencies() {
        let scenario = Scenario {
            name: "mixture-test".into(),
            shape: BellState::shape(),
            scheme: SchemeSpec::Mixed {
                lambdas: vec![0.5, 0.5],
                components: vec![
                    SchemeSpec::Bell {
                        which: BellState::PhiPlus,
                    },
                    SchemeSpec::Bell {
                        which: BellState::PhiMinus,
                    },
                ],
            },
            grid: crate::processes::MicroGrid::new(1.0, 8).unwrap(),
            n_windows: 500,
            centering: CenteringMode::EmpiricalMean,
            seed: 99,
            target: Option::None,
            target_tolerance: Option::None,
        };
        let outcome = run_scenario(&scenario, 2).unwrap();
        let freqs = outcome.report.selector_frequencies.unwrap();
        assert_eq!(freqs.len(), 2);
        assert!((freqs[0] + freqs[1] - 1.0).abs() < 1e-12);
        assert!((freqs[0] - 0.5).abs() <= 4.0 / 500f64.sqrt());
    }

    #[test]
    fn nested_mixtures_are_rejected() {
        let scenario = Scenario {
            name: "bad".into(),
            shape: BellState::shape(),
            scheme: SchemeSpec::Mixed {
                lambdas: vec![1.0],
                components: vec![SchemeSpec::Mixed {
                    lambdas: vec![1.0],
                    components: vec![SchemeSpec::Bell {
                        which: BellState::PhiPlus,
                    }],
                }],
            },
            grid: crate::processes::MicroGrid::new(1.0, 8).unwrap(),
            n_windows: 4,
            centering: CenteringMode::EmpiricalMean,
            seed: 1,
            target: Option::None,
            target_tolerance: Option::None,
        };
        assert!(matches!(
            run_scenario(&scenario, 1),
            Err(Error::InvalidScenario { .. })
        ));
    }
}
