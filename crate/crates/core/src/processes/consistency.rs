//! Pathwise consistency: the almost-sure constraint that at every micro
//! instant the pair `(X(t), Y(t))` lies in an allowed set.

use num_complex::Complex64;

use crate::hilbert::StateVector;
use crate::processes::trajectory::TrajectoryPair;

/// Membership test on pairs of vectors. The set contains every pair in which
/// both components are (complex) multiples of the same reference pair.
#[derive(Debug, Clone)]
pub struct ConsistencySet {
    pairs: Vec<(StateVector, StateVector)>,
    tol: f64,
    description: String,
}

impl ConsistencySet {
    pub fn same_pair(
        pairs: Vec<(StateVector, StateVector)>,
        tol: f64,
        description: String,
    ) -> Self {
        ConsistencySet {
            pairs,
            tol,
            description,
        }
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// True when some reference pair has both `x` and `y` proportional to it.
    /// The zero vector is proportional to everything.
    pub fn allows(&self, x: &StateVector, y: &StateVector) -> bool {
        self.pairs
            .iter()
            .any(|(a, b)| proportional(x, a, self.tol) && proportional(y, b, self.tol))
    }
}

fn proportional(x: &StateVector, reference: &StateVector, tol: f64) -> bool {
    if x.dim() != reference.dim() {
        return false;
    }
    let ref_norm_sqr = reference.norm_sqr();
    if ref_norm_sqr == 0.0 {
        return x.norm() <= tol;
    }
    let coeff = match reference.inner(x) {
        Ok(c) => c / Complex64::new(ref_norm_sqr, 0.0),
        Err(_) => return false,
    };
    let projected = reference.scaled(coeff);
    match x.sub(&projected) {
        Ok(residual) => residual.norm() <= tol * (x.norm() + 1.0),
        Err(_) => false,
    }
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub holds: bool,
    pub violating_indices: Vec<usize>,
}

/// Scan every grid point of `traj` against the set.
pub fn check_consistency(traj: &TrajectoryPair, set: &ConsistencySet) -> ConsistencyReport {
    let violating_indices: Vec<usize> = (0..traj.n_points())
        .filter(|&i| !set.allows(&traj.x_path()[i], &traj.y_path()[i]))
        .collect();
    ConsistencyReport {
        holds: violating_indices.is_empty(),
        violating_indices,
    }
}
