//! Sampled micro-grid paths over one macro window.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::processes::grid::MicroGrid;
use crate::processes::schedule::{
    validate_probability_vector, CoefficientLaw, JumpSchedule, SchmidtSchedule,
};

/// Paired sample paths `(X(t_i), Y(t_i))` over one window's micro grid,
/// together with the macro draws and the active pair index per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPair {
    x_path: Vec<StateVector>,
    y_path: Vec<StateVector>,
    xi_a: f64,
    xi_b: f64,
    segment_labels: Vec<usize>,
}

impl TrajectoryPair {
    pub fn new(
        x_path: Vec<StateVector>,
        y_path: Vec<StateVector>,
        xi_a: f64,
        xi_b: f64,
        segment_labels: Vec<usize>,
    ) -> Result<Self> {
        if x_path.is_empty() {
            return Err(Error::EmptyInput("trajectory paths"));
        }
        if x_path.len() != y_path.len() || x_path.len() != segment_labels.len() {
            return Err(Error::shape(
                format!("{} points", x_path.len()),
                format!("y: {}, labels: {}", y_path.len(), segment_labels.len()),
            ));
        }
        Ok(TrajectoryPair {
            x_path,
            y_path,
            xi_a,
            xi_b,
            segment_labels,
        })
    }

    pub fn n_points(&self) -> usize {
        self.x_path.len()
    }

    pub fn x_path(&self) -> &[StateVector] {
        &self.x_path
    }

    pub fn y_path(&self) -> &[StateVector] {
        &self.y_path
    }

    pub fn xi_a(&self) -> f64 {
        self.xi_a
    }

    pub fn xi_b(&self) -> f64 {
        self.xi_b
    }

    pub fn segment_labels(&self) -> &[usize] {
        &self.segment_labels
    }
}

fn layout_partition(
    schedule: &SchmidtSchedule,
    grid: &MicroGrid,
    xi_a: f64,
    xi_b: f64,
) -> Result<TrajectoryPair> {
    let counts = schedule.allocation(grid.n_points())?;
    let ca = Complex64::new(xi_a, 0.0);
    let cb = Complex64::new(xi_b, 0.0);
    let mut x_path = Vec::with_capacity(grid.n_points());
    let mut y_path = Vec::with_capacity(grid.n_points());
    let mut labels = Vec::with_capacity(grid.n_points());
    for (ell, &count) in counts.iter().enumerate() {
        let x = schedule.a_vectors()[ell].scaled(ca);
        let y = schedule.b_vectors()[ell].scaled(cb);
        for _ in 0..count {
            x_path.push(x.clone());
            y_path.push(y.clone());
            labels.push(ell);
        }
    }
    TrajectoryPair::new(x_path, y_path, xi_a, xi_b, labels)
}

/// Sample one window from a fixed-partition schedule: intervals are allocated
/// contiguously by largest remainder, and both paths are scaled by one
/// `(xi_a, xi_b)` draw.
pub fn sample_trajectory<R: Rng + ?Sized>(
    schedule: &SchmidtSchedule,
    grid: &MicroGrid,
    rng: &mut R,
) -> Result<TrajectoryPair> {
    let (xi_a, xi_b) = schedule.randomizer().draw(rng);
    layout_partition(schedule, grid, xi_a, xi_b)
}

/// The same layout with unit macro draws; used by the deterministic
/// closed-form checks of the kernel marginalization.
pub fn deterministic_trajectory(
    schedule: &SchmidtSchedule,
    grid: &MicroGrid,
) -> Result<TrajectoryPair> {
    layout_partition(schedule, grid, 1.0, 1.0)
}

pub(crate) fn draw_categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    weights.len() - 1
}

/// Pick schedule `k` with probability `lambdas[k]` from the selector stream,
/// then sample the window from that schedule using the path stream. The two
/// streams must be independent for the mixture to average correctly.
pub fn sample_mixed_trajectory<R: Rng + ?Sized, S: Rng + ?Sized>(
    lambdas: &[f64],
    schedules: &[SchmidtSchedule],
    grid: &MicroGrid,
    selector_rng: &mut S,
    path_rng: &mut R,
) -> Result<(usize, TrajectoryPair)> {
    validate_probability_vector(lambdas)?;
    if lambdas.len() != schedules.len() {
        return Err(Error::shape(
            format!("{} schedules", lambdas.len()),
            format!("{}", schedules.len()),
        ));
    }
    let k = draw_categorical(lambdas, selector_rng);
    let traj = sample_trajectory(&schedules[k], grid, path_rng)?;
    Ok((k, traj))
}

/// Sample one window from a jump schedule.
///
/// Transition times come from a Poisson process on `[0, window_length)` with
/// forced endpoints; on each inter-jump interval a single selector draw picks
/// the vector pair for both paths, and the coefficient law supplies the
/// per-interval amplitudes. Grid cells are attributed to the interval
/// containing their midpoint.
pub fn sample_jump_trajectory<R: Rng + ?Sized>(
    schedule: &JumpSchedule,
    grid: &MicroGrid,
    rng: &mut R,
) -> Result<TrajectoryPair> {
    let window = grid.window_length();
    let rate = schedule.jump_rate();
    let mut boundaries = vec![0.0];
    let mut t = 0.0;
    loop {
        let u: f64 = rng.random();
        let step = (-(1.0 - u).ln() / rate).max(f64::MIN_POSITIVE);
        t += step;
        if t >= window {
            break;
        }
        boundaries.push(t);
    }
    boundaries.push(window);

    let n_intervals = boundaries.len() - 1;
    let mut selected = Vec::with_capacity(n_intervals);
    let mut coeffs = Vec::with_capacity(n_intervals);
    for _ in 0..n_intervals {
        selected.push(draw_categorical(schedule.selector_weights(), rng));
        let (x, y) = match schedule.coefficient_law() {
            CoefficientLaw::ConstantOne => (Complex64::ONE, Complex64::ONE),
            CoefficientLaw::IndependentSigned => {
                let sign = |b: bool| Complex64::new(if b { 1.0 } else { -1.0 }, 0.0);
                (sign(rng.random::<bool>()), sign(rng.random::<bool>()))
            }
        };
        coeffs.push((x, y));
    }

    let mut x_path = Vec::with_capacity(grid.n_points());
    let mut y_path = Vec::with_capacity(grid.n_points());
    let mut labels = Vec::with_capacity(grid.n_points());
    let mut j = 0usize;
    for i in 0..grid.n_points() {
        let mid = grid.midpoint(i);
        while j + 1 < n_intervals && mid >= boundaries[j + 1] {
            j += 1;
        }
        let pair = selected[j];
        let (cx, cy) = coeffs[j];
        x_path.push(schedule.a_vectors()[pair].scaled(cx));
        y_path.push(schedule.b_vectors()[pair].scaled(cy));
        labels.push(pair);
    }
    TrajectoryPair::new(x_path, y_path, 1.0, 1.0, labels)
}
