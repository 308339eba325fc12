//! The classical bouncer: trajectories, momentum bands, ensemble densities
//! and the characteristic timescales of the quantum motion.

use std::f64::consts::PI;
use std::io::Write;

use crate::quadrature::GaussLegendre;
use crate::units::UnitSystem;
use crate::wavepacket::PacketSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub z: f64,
    pub p: f64,
}

impl ClassicalState {
    pub fn energy(&self, units: &UnitSystem) -> f64 {
        self.p * self.p / (2.0 * units.mass) + units.force * self.z
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timescales {
    pub t_cl: f64,
    pub t_rev: f64,
    pub t_coll: f64,
}

impl Timescales {
    /// `[2 T_coll, T_rev − 2 T_coll]`, clear of both the initial collapse
    /// and the approach to the first revival.
    pub fn collapsed_window(&self) -> (f64, f64) {
        (2.0 * self.t_coll, self.t_rev - 2.0 * self.t_coll)
    }
}

/// Classical period, revival and collapse times for a packet released at `z₀`.
///
/// `T_cl = 2√(2m z₀/F)`, `T_rev = (4/π)(2m z₀²/ħ)` and
/// `T_coll = T_cl³ F/(16 m Δz₀)`, which reduces to `T_cl³/(8Δz₀)` when `2m = F = 1`.
pub fn timescales(spec: &PacketSpec, units: &UnitSystem) -> Timescales {
    let (m, f, hbar) = (units.mass, units.force, units.hbar);
    let t_cl = 2.0 * (2.0 * m * spec.z0 / f).sqrt();
    let t_rev = 4.0 / PI * (2.0 * m * spec.z0 * spec.z0 / hbar);
    let t_coll = t_cl.powi(3) * f / (16.0 * m * spec.dz0);
    Timescales {
        t_cl,
        t_rev,
        t_coll,
    }
}

/// State at time `t` of a ball started at `(z_init, p_init)` above an
/// elastic floor.
///
/// The first flight ends at the exact root of its parabola; after that the
/// motion repeats with period `2p_M/F`, so later times are reduced modulo
/// the period instead of stepping bounce by bounce. Negative times run the
/// reversed motion.
pub fn trajectory(z_init: f64, p_init: f64, units: &UnitSystem, t: f64) -> ClassicalState {
    debug_assert!(z_init >= 0.0);
    if t < 0.0 {
        let s = trajectory(z_init, -p_init, units, -t);
        return ClassicalState { z: s.z, p: -s.p };
    }
    let (m, f) = (units.mass, units.force);
    let g = f / m;
    let v = p_init / m;
    // speed on reaching the floor
    let v_floor = (v * v + 2.0 * g * z_init).sqrt();
    let t_bounce = (v + v_floor) / g;
    if t < t_bounce {
        return ClassicalState {
            z: z_init + v * t - 0.5 * g * t * t,
            p: p_init - f * t,
        };
    }
    let p_max = m * v_floor;
    if p_max == 0.0 {
        return ClassicalState { z: 0.0, p: 0.0 };
    }
    let period = 2.0 * p_max / f;
    let tau = (t - t_bounce) % period;
    ClassicalState {
        z: (v_floor - 0.5 * g * tau) * tau,
        p: p_max - f * tau,
    }
}

/// `p(t)` for each initial momentum in `p_offsets`, all released from `z_init`.
pub fn momentum_band(
    z_init: f64,
    p_offsets: &[f64],
    units: &UnitSystem,
    times: &[f64],
) -> Vec<Vec<f64>> {
    p_offsets
        .iter()
        .map(|&p| {
            times
                .iter()
                .map(|&t| trajectory(z_init, p, units, t).p)
                .collect()
        })
        .collect()
}

/// Offsets `{−2Δp, −Δp, 0, Δp, 2Δp}`.
pub fn band_offsets(dp: f64) -> [f64; 5] {
    [-2.0 * dp, -dp, 0.0, dp, 2.0 * dp]
}

/// Time-averaged position density `1/(2√(A(A−z)))` on `0 < z < A`.
pub fn classical_position_density(a: f64, z: f64) -> f64 {
    if z <= 0.0 || z >= a {
        return 0.0;
    }
    1.0 / (2.0 * (a * (a - z)).sqrt())
}

/// The uniform momentum density `1/(2p_M)` on `|p| ≤ p_M`.
pub fn classical_momentum_density(p_max: f64, p: f64) -> f64 {
    if p_max <= 0.0 || p.abs() > p_max {
        return 0.0;
    }
    0.5 / p_max
}

/// `∫₀^A f(z) P(z) dz` with `z = A(1−s²)`, under which `P dz = ds` and the
/// endpoint singularity disappears.
pub fn position_average<F: Fn(f64) -> f64>(a: f64, f: F) -> f64 {
    GaussLegendre::standard().integrate(0.0, 1.0, |s| f(a * (1.0 - s * s)))
}

/// Closed-form moments of the classical densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalMoments {
    pub mean_z: f64,
    pub mean_z2: f64,
    pub sigma_z: f64,
    pub mean_p: f64,
    pub mean_p2: f64,
    pub sigma_p: f64,
}

/// Moments for turning point `a` and maximum momentum `p_max`:
/// `⟨z⟩ = 2A/3`, `⟨z²⟩ = 8A²/15`, `Δz = 2A/√45`, `⟨p²⟩ = p_M²/3`.
pub fn classical_moments(a: f64, p_max: f64) -> ClassicalMoments {
    ClassicalMoments {
        mean_z: 2.0 * a / 3.0,
        mean_z2: 8.0 * a * a / 15.0,
        sigma_z: 2.0 * a / 45f64.sqrt(),
        mean_p: 0.0,
        mean_p2: p_max * p_max / 3.0,
        sigma_p: p_max / 3f64.sqrt(),
    }
}

/// `p_M = √(2mF z₀)`, the momentum at the floor after release from rest.
pub fn floor_momentum(z0: f64, units: &UnitSystem) -> f64 {
    (2.0 * units.mass * units.force * z0).sqrt()
}

/// Writes `t,z,p` rows.
pub fn write_trajectory_csv<W: Write>(
    mut w: W,
    z_init: f64,
    p_init: f64,
    units: &UnitSystem,
    times: &[f64],
) -> std::io::Result<()> {
    writeln!(w, "t,z,p")?;
    for &t in times {
        let s = trajectory(z_init, p_init, units, t);
        writeln!(w, "{t:.11e},{:.11e},{:.11e}", s.z, s.p)?;
    }
    Ok(())
}

/// Writes `t,p_offset_-2,…,p_offset_+2` rows.
pub fn write_band_csv<W: Write>(
    mut w: W,
    z_init: f64,
    dp: f64,
    units: &UnitSystem,
    times: &[f64],
) -> std::io::Result<()> {
    let band = momentum_band(z_init, &band_offsets(dp), units, times);
    writeln!(
        w,
        "t,p_offset_-2,p_offset_-1,p_offset_0,p_offset_+1,p_offset_+2"
    )?;
    for (i, t) in times.iter().enumerate() {
        write!(w, "{t:.11e}")?;
        for series in &band {
            write!(w, ",{:.11e}", series[i])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const U: UnitSystem = UnitSystem::natural();

    #[test]
    fn default_timescales() {
        let ts = timescales(&PacketSpec::released_from_rest(), &U);
        assert_eq!(ts.t_cl, 10.0);
        assert_eq!(ts.t_coll, 125.0);
        assert!((ts.t_rev - 795.7747).abs() < 1e-4);
        assert!(ts.t_cl < ts.t_coll && ts.t_coll < ts.t_rev);
    }

    #[test]
    fn bounce_and_return() {
        let s = trajectory(25.0, 0.0, &U, 5.0);
        assert!(s.z.abs() < 1e-12);
        assert!((s.p.abs() - 5.0).abs() < 1e-12);
        let s = trajectory(25.0, 0.0, &U, 10.0);
        assert!((s.z - 25.0).abs() < 1e-12);
        assert!(s.p.abs() < 1e-12);
        let back = trajectory(25.0, 0.0, &U, -3.0);
        let fwd = trajectory(25.0, 0.0, &U, 3.0);
        assert!((back.z - fwd.z).abs() < 1e-12);
        assert!((back.p + fwd.p).abs() < 1e-12);
    }

    #[test]
    fn pre_bounce_is_free_fall() {
        for &t in &[0.0, 1.0, 2.5, 4.9] {
            let s = trajectory(25.0, 0.0, &U, t);
            assert!((s.z - (25.0 - t * t)).abs() < 1e-12);
            assert!((s.p + t).abs() < 1e-12);
        }
    }

    #[test]
    fn upward_start_and_floor_start() {
        // thrown upward from the floor: apex after p/F, back at 2p/F
        let s = trajectory(0.0, 4.0, &U, 4.0);
        assert!((s.z - 16.0).abs() < 1e-12 && s.p.abs() < 1e-12);
        let s = trajectory(0.0, 0.0, &U, 7.0);
        assert_eq!(s, ClassicalState { z: 0.0, p: 0.0 });
    }

    #[test]
    fn band_starts_at_offsets_and_loses_symmetry() {
        let dp = 0.5;
        let offsets = band_offsets(dp);
        let band = momentum_band(25.0, &offsets, &U, &[0.0, 10.0]);
        for (k, series) in band.iter().enumerate() {
            assert_eq!(series[0], offsets[k]);
        }
        let at_period: Vec<f64> = band.iter().map(|s| s[1]).collect();
        assert!((at_period[0] + at_period[4]).abs() > 0.1);
        let single = momentum_band(25.0, &[0.0], &U, &[0.0, 1.0]);
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn classical_density_moments() {
        let a = 25.0;
        let norm = position_average(a, |_| 1.0);
        assert!((norm - 1.0).abs() < 1e-14);
        let m = classical_moments(a, 5.0);
        assert!((position_average(a, |z| z) - m.mean_z).abs() < 1e-8);
        assert!((position_average(a, |z| z * z) - m.mean_z2).abs() < 1e-8);
        assert!((m.mean_z2 - m.mean_z * m.mean_z - m.sigma_z * m.sigma_z).abs() < 1e-10);
        assert!((m.mean_z - 16.6667).abs() < 1e-4);
        assert!((m.sigma_z - 7.4536).abs() < 1e-4);
        assert!((m.sigma_p - 2.8868).abs() < 1e-4);
        let zero = classical_moments(0.0, 0.0);
        assert_eq!((zero.mean_z, zero.sigma_z, zero.sigma_p), (0.0, 0.0, 0.0));
    }

    #[test]
    fn momentum_density_is_uniform() {
        assert_eq!(classical_momentum_density(5.0, 3.0), 0.1);
        assert_eq!(classical_momentum_density(5.0, 6.0), 0.0);
        // ⟨p²⟩ = p_M²/3 by direct quadrature
        let p2 = GaussLegendre::standard()
            .integrate(-5.0, 5.0, |p| p * p * classical_momentum_density(5.0, p));
        assert!((p2 - 25.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn position_density_rises_toward_turning_point() {
        let a = 25.0;
        let d: Vec<f64> = (1..100)
            .map(|k| classical_position_density(a, 0.25 * k as f64))
            .collect();
        assert!(d.iter().all(|&v| v > 0.0));
        assert!(d.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(classical_position_density(a, 30.0), 0.0);
    }

    proptest! {
        #[test]
        fn energy_is_conserved(z in 0.0f64..50.0, p in -8.0f64..8.0, t in -500.0f64..500.0) {
            let e0 = ClassicalState { z, p }.energy(&U);
            let s = trajectory(z, p, &U, t);
            prop_assert!(s.z >= -1e-9);
            prop_assert!((s.energy(&U) - e0).abs() <= 1e-9 * e0.max(1.0));
        }

        #[test]
        fn released_ball_is_periodic(t in 0.0f64..200.0) {
            let a = trajectory(25.0, 0.0, &U, t);
            let b = trajectory(25.0, 0.0, &U, t + 10.0);
            prop_assert!((a.z - b.z).abs() <= 1e-12);
            prop_assert!((a.p - b.p).abs() <= 1e-12);
        }
    }
}
