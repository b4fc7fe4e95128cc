//! Per-window macro randomization.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Distribution family for the per-window scalar draws `(xi_a, xi_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum RandomizerLaw {
    /// Independent signs on a fixed magnitude: each component is drawn
    /// uniformly from `{+magnitude, -magnitude}`. Zero mean, zero
    /// cross-correlation, and `xi_a^2 * xi_b^2 = magnitude^4` holds exactly
    /// for every draw, not just in expectation.
    IndependentSigned { magnitude: f64 },
}

/// Macro-window randomizer with a prescribed fourth moment
/// `E[xi_a^2 * xi_b^2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MacroRandomizer {
    law: RandomizerLaw,
    target_fourth_moment: f64,
}

impl MacroRandomizer {
    /// Signed randomizer whose magnitude is chosen so the fourth-moment
    /// condition holds exactly per draw: `magnitude = target^(1/4)`.
    pub fn independent_signed(target_fourth_moment: f64) -> Result<Self> {
        if target_fourth_moment <= 0.0 || !target_fourth_moment.is_finite() {
            return Err(Error::InvalidScenario {
                field: "randomizer.target_fourth_moment".into(),
                message: format!("must be positive and finite, got {target_fourth_moment}"),
            });
        }
        Ok(MacroRandomizer {
            law: RandomizerLaw::IndependentSigned {
                magnitude: target_fourth_moment.powf(0.25),
            },
            target_fourth_moment,
        })
    }

    pub fn law(&self) -> RandomizerLaw {
        self.law
    }

    pub fn magnitude(&self) -> f64 {
        match self.law {
            RandomizerLaw::IndependentSigned { magnitude } => magnitude,
        }
    }

    pub fn target_fourth_moment(&self) -> f64 {
        self.target_fourth_moment
    }

    /// One `(xi_a, xi_b)` draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self.law {
            RandomizerLaw::IndependentSigned { magnitude } => {
                let sign = |b: bool| if b { 1.0 } else { -1.0 };
                (
                    sign(rng.random::<bool>()) * magnitude,
                    sign(rng.random::<bool>()) * magnitude,
                )
            }
        }
    }
}
