use std::f64::consts::PI;

use quantum_bouncer::evolution::{time_grid, Evolution};
use quantum_bouncer::reference::{
    accelerating_observables, sho_observables, spread_envelope, AcceleratingPacket, ShoPacket,
};
use quantum_bouncer::spectrum::{numerov_eigenstates, NumerovGrid};
use quantum_bouncer::wavepacket::{project, project_auto, PacketSpec, DEFAULT_TOL};
use quantum_bouncer::UnitSystem;

/// Runs an oscillator packet through the full spectral pipeline and
/// compares with the closed forms over one period.
#[test]
fn spectral_oscillator_reproduces_closed_forms() {
    let units = UnitSystem::natural();
    let pkt = ShoPacket {
        x0: 3.0,
        l: 0.8,
        omega: 2.0,
        units,
    };
    // box walls at twelve classical turning points on either side
    let edge = 12.0 * pkt.x0;
    let grid = NumerovGrid::new(-edge, edge, 1e-3).unwrap();
    let basis = numerov_eigenstates(|x| pkt.potential(x), &units, 60, &grid).unwrap();
    for (k, s) in basis.states().iter().take(10).enumerate() {
        let exact = units.hbar * pkt.omega * (k as f64 + 0.5);
        assert!((s.energy() - exact).abs() < 1e-8);
    }

    let spec = PacketSpec::new(pkt.x0, pkt.l / 2f64.sqrt(), 0.0).unwrap();
    let cs = project(&spec, &basis, DEFAULT_TOL).unwrap();
    assert!((cs.norm() - 1.0).abs() < 1e-6);
    let evo = Evolution::new(&basis, &cs).unwrap();

    let period = 2.0 * PI / pkt.omega;
    let times = time_grid(0.0, period, period / 100.0);
    let series = evo.observable_series(&times).unwrap();
    let mut worst = 0.0f64;
    for i in 0..series.len() {
        let r = series.row(i);
        let m = sho_observables(&pkt, r.t);
        for (a, b) in [
            (r.mean_z, m.mean_x),
            (r.sigma_z, m.sigma_x),
            (r.mean_p, m.mean_p),
            (r.sigma_p, m.sigma_p),
        ] {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst <= 1e-4, "worst deviation {worst:e}");
}

#[test]
fn bouncer_spreads_like_a_falling_packet_before_the_bounce() {
    let units = UnitSystem::natural();
    let spec = PacketSpec::released_from_rest();
    let (basis, cs) = project_auto(&spec, &units, DEFAULT_TOL).unwrap();
    let evo = Evolution::new(&basis, &cs).unwrap();
    let pkt = AcceleratingPacket::from_spread(spec.z0, spec.p0, spec.dz0, -units.force, units);
    for &t in &[0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
        let (mz, sz) = evo.expect_position(t);
        let m = accelerating_observables(&pkt, t);
        assert!((mz - m.mean_x).abs() <= 0.01 * m.mean_x, "t = {t}");
        assert!(
            (sz - m.sigma_x).abs() <= 0.01 * m.sigma_x,
            "t = {t}: {sz} vs {}",
            m.sigma_x
        );
        let (rising, _) = spread_envelope(spec.dz0, 10.0, pkt.spreading_time(), t);
        assert!((rising - m.sigma_x).abs() < 1e-12);
    }
}
