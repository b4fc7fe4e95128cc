//! Generator blueprints: fixed-partition schedules and jump schedules.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{schmidt_decompose, BipartiteShape, StateVector};
use crate::processes::consistency::ConsistencySet;
use crate::processes::randomizer::MacroRandomizer;
use crate::tol;

/// The four maximally entangled two-qubit states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub fn shape() -> BipartiteShape {
        BipartiteShape::new(2, 2).expect("2x2 is valid")
    }

    /// The normalized state vector in the composite 4-dimensional space.
    pub fn state_vector(&self) -> StateVector {
        let s = 1.0 / 2f64.sqrt();
        let amps = match self {
            BellState::PhiPlus => [s, 0.0, 0.0, s],
            BellState::PhiMinus => [s, 0.0, 0.0, -s],
            BellState::PsiPlus => [0.0, s, s, 0.0],
            BellState::PsiMinus => [0.0, s, -s, 0.0],
        };
        StateVector::from_reals(&amps).expect("valid amplitudes")
    }

    /// Basis-vector pairs assigned to the two subintervals. The relative sign
    /// distinguishing the minus states rides on the second pair's B-side.
    fn pairs(&self) -> (Vec<StateVector>, Vec<StateVector>) {
        let b = |k: usize| StateVector::basis(2, k).expect("qubit basis");
        let neg = |v: StateVector| v.scaled(Complex64::new(-1.0, 0.0));
        match self {
            BellState::PhiPlus => (vec![b(0), b(1)], vec![b(0), b(1)]),
            BellState::PhiMinus => (vec![b(0), b(1)], vec![b(0), neg(b(1))]),
            BellState::PsiPlus => (vec![b(0), b(1)], vec![b(1), b(0)]),
            BellState::PsiMinus => (vec![b(0), b(1)], vec![b(1), neg(b(0))]),
        }
    }
}

/// Interval fractions plus paired vectors: the blueprint for piecewise
/// constant paths on a fixed partition of the macro window.
#[derive(Debug, Clone, Serialize)]
pub struct SchmidtSchedule {
    shape: BipartiteShape,
    weights: Vec<f64>,
    a_vectors: Vec<StateVector>,
    b_vectors: Vec<StateVector>,
    randomizer: MacroRandomizer,
}

impl SchmidtSchedule {
    pub fn new(
        shape: BipartiteShape,
        weights: Vec<f64>,
        a_vectors: Vec<StateVector>,
        b_vectors: Vec<StateVector>,
        randomizer: MacroRandomizer,
    ) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput("schedule weights"));
        }
        if weights.len() != a_vectors.len() || weights.len() != b_vectors.len() {
            return Err(Error::shape(
                format!("{} vector pairs", weights.len()),
                format!("{} / {}", a_vectors.len(), b_vectors.len()),
            ));
        }
        if weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
            return Err(Error::InvalidProbabilityVector {
                reason: "weights must be positive and finite".into(),
            });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol::WEIGHT_SUM {
            return Err(Error::InvalidProbabilityVector {
                reason: format!("weights sum to {sum}, expected 1"),
            });
        }
        for v in &a_vectors {
            if v.dim() != shape.dim_a() {
                return Err(Error::shape(
                    format!("dim {}", shape.dim_a()),
                    format!("{}", v.dim()),
                ));
            }
        }
        for v in &b_vectors {
            if v.dim() != shape.dim_b() {
                return Err(Error::shape(
                    format!("dim {}", shape.dim_b()),
                    format!("{}", v.dim()),
                ));
            }
        }
        Ok(SchmidtSchedule {
            shape,
            weights,
            a_vectors,
            b_vectors,
            randomizer,
        })
    }

    pub fn shape(&self) -> &BipartiteShape {
        &self.shape
    }

    pub fn n_intervals(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn a_vectors(&self) -> &[StateVector] {
        &self.a_vectors
    }

    pub fn b_vectors(&self) -> &[StateVector] {
        &self.b_vectors
    }

    pub fn randomizer(&self) -> &MacroRandomizer {
        &self.randomizer
    }

    /// Grid-point counts per interval for a grid with `n_points` cells.
    pub fn allocation(&self, n_points: usize) -> Result<Vec<usize>> {
        largest_remainder_allocation(&self.weights, n_points)
    }

    /// The pathwise constraint this schedule induces: at every instant both
    /// components are proportional to the same vector pair.
    pub fn consistency_set(&self) -> ConsistencySet {
        ConsistencySet::same_pair(
            self.a_vectors
                .iter()
                .cloned()
                .zip(self.b_vectors.iter().cloned())
                .collect(),
            tol::PROPORTIONALITY,
            format!(
                "both components proportional to one of {} paired vectors",
                self.n_intervals()
            ),
        )
    }
}

/// Partition counts by largest remainder: floor each `w * n`, then hand the
/// leftover points to the largest fractional parts (lowest index on ties).
/// Errors if any interval ends up with zero points.
pub fn largest_remainder_allocation(weights: &[f64], n_points: usize) -> Result<Vec<usize>> {
    let n = n_points as f64;
    let mut counts: Vec<usize> = Vec::with_capacity(weights.len());
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(weights.len());
    let mut assigned = 0usize;
    for (idx, &w) in weights.iter().enumerate() {
        let exact = w * n;
        let floor = exact.floor() as usize;
        counts.push(floor);
        assigned += floor;
        remainders.push((idx, exact - floor as f64));
    }
    let leftover = n_points.saturating_sub(assigned);
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for k in 0..leftover {
        counts[remainders[k % remainders.len()].0] += 1;
    }
    if let Some(bad) = counts.iter().position(|&c| c == 0) {
        return Err(Error::UnresolvablePartition { interval: bad });
    }
    debug_assert_eq!(counts.iter().sum::<usize>(), n_points);
    Ok(counts)
}

/// Fixed-partition schedule generating a Bell state: equal halves, basis
/// pairs, fourth moment 2.
pub fn build_bell_schedule(which: BellState) -> SchmidtSchedule {
    let (a_vectors, b_vectors) = which.pairs();
    SchmidtSchedule::new(
        BellState::shape(),
        vec![0.5, 0.5],
        a_vectors,
        b_vectors,
        MacroRandomizer::independent_signed(2.0).expect("positive target"),
    )
    .expect("bell schedule is valid")
}

/// Fixed-partition schedule generating an arbitrary pure state: interval
/// fractions proportional to the Schmidt coefficients, fourth moment
/// `(sum_l s_l)^2`.
///
/// The window estimator pairs `X` against `conj(Y)`, so the stored B-side
/// vectors are the conjugated Schmidt factors; the window average then comes
/// out proportional to `psi` itself for complex factors too.
pub fn build_pure_schedule(psi: &StateVector, shape: &BipartiteShape) -> Result<SchmidtSchedule> {
    let norm = psi.norm();
    if norm <= 0.0 {
        return Err(Error::DegenerateInput);
    }
    if (norm - 1.0).abs() > tol::STATE_NORM {
        return Err(Error::NotNormalized { norm });
    }
    let form = schmidt_decompose(psi, shape, tol::SCHMIDT_CUTOFF)?;
    let total: f64 = form.coefficients().iter().sum();
    let weights: Vec<f64> = form.coefficients().iter().map(|s| s / total).collect();
    let b_vectors: Vec<StateVector> = form.b_vectors().iter().map(|v| v.conj()).collect();
    SchmidtSchedule::new(
        *shape,
        weights,
        form.a_vectors().to_vec(),
        b_vectors,
        MacroRandomizer::independent_signed(total * total)?,
    )
}

/// Per-interval coefficient law for jump schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientLaw {
    /// `x_j = y_j = 1` on every interval.
    ConstantOne,
    /// Independent signs: `x_j, y_j` drawn uniformly from `{+1, -1}`.
    IndependentSigned,
}

/// Blueprint for jump-process paths: Poisson transition times, a random
/// selector choosing one vector pair per inter-jump interval, and a
/// coefficient law for the per-interval amplitudes.
#[derive(Debug, Clone, Serialize)]
pub struct JumpSchedule {
    shape: BipartiteShape,
    jump_rate: f64,
    selector_weights: Vec<f64>,
    coefficient_law: CoefficientLaw,
    a_vectors: Vec<StateVector>,
    b_vectors: Vec<StateVector>,
}

impl JumpSchedule {
    pub fn new(
        shape: BipartiteShape,
        jump_rate: f64,
        selector_weights: Vec<f64>,
        coefficient_law: CoefficientLaw,
        a_vectors: Vec<StateVector>,
        b_vectors: Vec<StateVector>,
    ) -> Result<Self> {
        if jump_rate <= 0.0 || !jump_rate.is_finite() {
            return Err(Error::InvalidScenario {
                field: "jump_rate".into(),
                message: format!("must be positive and finite, got {jump_rate}"),
            });
        }
        validate_probability_vector(&selector_weights)?;
        if selector_weights.len() != a_vectors.len() || a_vectors.len() != b_vectors.len() {
            return Err(Error::shape(
                format!("{} vector pairs", selector_weights.len()),
                format!("{} / {}", a_vectors.len(), b_vectors.len()),
            ));
        }
        for v in &a_vectors {
            if v.dim() != shape.dim_a() {
                return Err(Error::shape(
                    format!("dim {}", shape.dim_a()),
                    format!("{}", v.dim()),
                ));
            }
        }
        for v in &b_vectors {
            if v.dim() != shape.dim_b() {
                return Err(Error::shape(
                    format!("dim {}", shape.dim_b()),
                    format!("{}", v.dim()),
                ));
            }
        }
        Ok(JumpSchedule {
            shape,
            jump_rate,
            selector_weights,
            coefficient_law,
            a_vectors,
            b_vectors,
        })
    }

    pub fn shape(&self) -> &BipartiteShape {
        &self.shape
    }

    pub fn jump_rate(&self) -> f64 {
        self.jump_rate
    }

    pub fn selector_weights(&self) -> &[f64] {
        &self.selector_weights
    }

    pub fn coefficient_law(&self) -> CoefficientLaw {
        self.coefficient_law
    }

    pub fn a_vectors(&self) -> &[StateVector] {
        &self.a_vectors
    }

    pub fn b_vectors(&self) -> &[StateVector] {
        &self.b_vectors
    }

    pub fn consistency_set(&self) -> ConsistencySet {
        ConsistencySet::same_pair(
            self.a_vectors
                .iter()
                .cloned()
                .zip(self.b_vectors.iter().cloned())
                .collect(),
            tol::PROPORTIONALITY,
            format!(
                "both components proportional to one of {} paired vectors",
                self.a_vectors.len()
            ),
        )
    }
}

pub(crate) fn validate_probability_vector(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidProbabilityVector {
            reason: "empty".into(),
        });
    }
    if p.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidProbabilityVector {
            reason: "entries must be nonnegative and finite".into(),
        });
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol::WEIGHT_SUM {
        return Err(Error::InvalidProbabilityVector {
            reason: format!("sums to {sum}, expected 1"),
        });
    }
    Ok(())
}
