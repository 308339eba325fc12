//! The unit system fixing every scale of the problem.

use crate::error::{Error, Result};

/// The `(ħ, m, F)` triple.
///
/// All derived scales follow from it: the bouncer length
/// `ℓ = (ħ²/(2mF))^{1/3}`, the energy `ε = Fℓ` and the time `ħ/ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar: f64,
    pub mass: f64,
    pub force: f64,
}

impl UnitSystem {
    pub fn new(hbar: f64, mass: f64, force: f64) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("mass", mass), ("force", force)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        let units = Self { hbar, mass, force };
        let (l, e) = (units.length(), units.energy());
        if !(l.is_finite() && l > 0.0 && e.is_finite() && e > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "derived scales are degenerate (length {l}, energy {e})"
            )));
        }
        Ok(units)
    }

    /// `ħ = 1`, `2m = 1`, `F = 1`, so that `ℓ = ε = 1`.
    pub const fn natural() -> Self {
        Self {
            hbar: 1.0,
            mass: 0.5,
            force: 1.0,
        }
    }

    pub fn length(&self) -> f64 {
        (self.hbar * self.hbar / (2.0 * self.mass * self.force)).cbrt()
    }

    pub fn energy(&self) -> f64 {
        self.force * self.length()
    }

    pub fn time(&self) -> f64 {
        self.hbar / self.energy()
    }

    /// `2m/ħ²`, the factor turning `V − E` into the curvature of ψ.
    pub fn kinetic_factor(&self) -> f64 {
        2.0 * self.mass / (self.hbar * self.hbar)
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::natural()
    }
}
