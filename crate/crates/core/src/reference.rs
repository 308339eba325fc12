//! Closed-form Gaussian packets used as oracles for the spectral engine.

use crate::units::UnitSystem;

/// Mean and spread of position and momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_x: f64,
    pub sigma_x: f64,
    pub mean_p: f64,
    pub sigma_p: f64,
}

/// A free Gaussian packet under a uniform force.
///
/// `alpha` is the momentum-space width parameter, related to the initial
/// position spread by `Δx₀ = ħα/√2`. `force` is signed: a packet falling
/// toward the floor has `force = −F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceleratingPacket {
    pub x0: f64,
    pub p0: f64,
    pub alpha: f64,
    pub force: f64,
    pub units: UnitSystem,
}

impl AcceleratingPacket {
    /// Parametrized by the initial position spread instead of `α`.
    pub fn from_spread(x0: f64, p0: f64, dx0: f64, force: f64, units: UnitSystem) -> Self {
        Self {
            x0,
            p0,
            alpha: 2f64.sqrt() * dx0 / units.hbar,
            force,
            units,
        }
    }

    pub fn initial_spread(&self) -> f64 {
        self.units.hbar * self.alpha / 2f64.sqrt()
    }

    /// Spreading time `t₀ = mħα² = 2mΔx₀²/ħ`.
    pub fn spreading_time(&self) -> f64 {
        self.units.mass * self.units.hbar * self.alpha * self.alpha
    }
}

pub fn accelerating_observables(pkt: &AcceleratingPacket, t: f64) -> Moments {
    let m = pkt.units.mass;
    let t0 = pkt.spreading_time();
    Moments {
        mean_x: pkt.x0 + pkt.p0 * t / m + pkt.force * t * t / (2.0 * m),
        sigma_x: pkt.initial_spread() * (1.0 + (t / t0).powi(2)).sqrt(),
        mean_p: pkt.p0 + pkt.force * t,
        sigma_p: 1.0 / (pkt.alpha * 2f64.sqrt()),
    }
}

/// Gaussian packet in the oscillator `V = ½mω²x²`, released from rest at
/// `x0` with `ψ(x,0) ∝ exp(−(x−x₀)²/(2L²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShoPacket {
    pub x0: f64,
    pub l: f64,
    pub omega: f64,
    pub units: UnitSystem,
}

impl ShoPacket {
    /// The width `√(ħ/mω)` at which the packet is a coherent state.
    pub fn coherent_width(omega: f64, units: &UnitSystem) -> f64 {
        (units.hbar / (units.mass * omega)).sqrt()
    }

    pub fn potential(&self, x: f64) -> f64 {
        0.5 * self.units.mass * self.omega * self.omega * x * x
    }
}

/// `⟨x⟩ = x₀cos ωt`, `⟨p⟩ = −mωx₀ sin ωt`, `Δx = L(t)/√2`, `Δp = p_L(t)/√2` with
/// `L(t)² = L²cos²ωt + (ħ/mωL)²sin²ωt` and `p_L(t)² = (ħ/L)²cos²ωt + (mωL)²sin²ωt`.
pub fn sho_observables(pkt: &ShoPacket, t: f64) -> Moments {
    let (hbar, m, w, l) = (pkt.units.hbar, pkt.units.mass, pkt.omega, pkt.l);
    let (s, c) = (w * t).sin_cos();
    let width = (l * l * c * c + (hbar / (m * w * l)).powi(2) * s * s).sqrt();
    let p_width = ((hbar / l).powi(2) * c * c + (m * w * l).powi(2) * s * s).sqrt();
    Moments {
        mean_x: pkt.x0 * c,
        sigma_x: width / 2f64.sqrt(),
        mean_p: -m * w * pkt.x0 * s,
        sigma_p: p_width / 2f64.sqrt(),
    }
}

/// Free-fall spreading continued cyclically: `(Δz₀√(1+(τ/t₀)²), Δz₀√(1+((T_cl−τ)/t₀)²))`
/// with `τ = t mod T_cl`.
pub fn spread_envelope(dz0: f64, t_cl: f64, t0: f64, t: f64) -> (f64, f64) {
    let tau = t.rem_euclid(t_cl);
    (
        dz0 * (1.0 + (tau / t0).powi(2)).sqrt(),
        dz0 * (1.0 + ((t_cl - tau) / t0).powi(2)).sqrt(),
    )
}
