//! Two-scale sample-path generators.
//!
//! A macro window of length `|Delta|` is resolved by a uniform micro grid;
//! within each window a pair of paths `(X(t), Y(t))` is laid out either on a
//! fixed partition (one subinterval per vector pair) or on random Poisson
//! jump intervals. Macro randomness enters through per-window scalar draws;
//! the pathwise pairing of the two components carries all cross-correlation.

mod consistency;
mod grid;
mod randomizer;
mod schedule;
pub mod streams;
mod trajectory;

pub use consistency::{check_consistency, ConsistencyReport, ConsistencySet};
pub use grid::MicroGrid;
pub use randomizer::{MacroRandomizer, RandomizerLaw};
pub use schedule::{
    build_bell_schedule, build_pure_schedule, largest_remainder_allocation, BellState,
    CoefficientLaw, JumpSchedule, SchmidtSchedule,
};
pub use trajectory::{
    deterministic_trajectory, sample_jump_trajectory, sample_mixed_trajectory, sample_trajectory,
    TrajectoryPair,
};

pub(crate) use trajectory::draw_categorical;
