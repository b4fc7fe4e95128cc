//! Uniform micro-time grid inside one macro window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n_points` sample instants covering `[0, window_length)`, placed at cell
/// midpoints `t_i = (i + 1/2) * window_length / n_points`. Midpoint placement
/// keeps sample instants away from interval boundaries and jump instants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridJson", into = "GridJson")]
pub struct MicroGrid {
    window_length: f64,
    n_points: usize,
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    window_length: f64,
    n_points: usize,
}

impl From<MicroGrid> for GridJson {
    fn from(g: MicroGrid) -> Self {
        GridJson {
            window_length: g.window_length,
            n_points: g.n_points,
        }
    }
}

impl TryFrom<GridJson> for MicroGrid {
    type Error = Error;

    fn try_from(g: GridJson) -> Result<Self> {
        MicroGrid::new(g.window_length, g.n_points)
    }
}

impl MicroGrid {
    pub fn new(window_length: f64, n_points: usize) -> Result<Self> {
        if window_length <= 0.0 || !window_length.is_finite() {
            return Err(Error::InvalidScenario {
                field: "grid.window_length".into(),
                message: format!("must be positive and finite, got {window_length}"),
            });
        }
        if n_points == 0 {
            return Err(Error::InvalidScenario {
                field: "grid.n_points".into(),
                message: "must be at least 1".into(),
            });
        }
        Ok(MicroGrid {
            window_length,
            n_points,
        })
    }

    pub fn window_length(&self) -> f64 {
        self.window_length
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Grid cell width.
    pub fn dt(&self) -> f64 {
        self.window_length / self.n_points as f64
    }

    /// Midpoint of cell `i`, relative to the window start.
    pub fn midpoint(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dt()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.midpoint(i))
    }
}
