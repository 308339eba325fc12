//! The `spectrum` command: energy table, basis table and a verification report.

use std::fmt::{self, Write as _};
use std::fs;

use anyhow::{Context, Result};
use quantum_bouncer::spectrum::{
    bouncer_basis, bouncer_numerov_grid, numerov_eigenstates, Basis, ORTHONORMALITY_TOL,
};
use quantum_bouncer::wavepacket::estimate_levels;
use quantum_bouncer::UnitSystem;

use crate::config::RunConfig;

/// Levels cross-checked against the Numerov route.
pub const CROSS_CHECK_LEVELS: usize = 50;
pub const CROSS_CHECK_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub levels: usize,
    pub ground: f64,
    pub orthonormality: f64,
    pub checked: usize,
    pub numerov_energy: f64,
    pub numerov_shape: f64,
}

impl SpectrumReport {
    pub fn passed(&self) -> bool {
        self.orthonormality <= ORTHONORMALITY_TOL
            && self.numerov_energy <= CROSS_CHECK_TOL
            && self.numerov_shape <= CROSS_CHECK_TOL
    }
}

impl fmt::Display for SpectrumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "ok" } else { "FAILED" };
        writeln!(f, "levels: {}", self.levels)?;
        writeln!(f, "E_1: {:.10}", self.ground)?;
        writeln!(
            f,
            "orthonormality residual: {:.3e} (limit {:e}) {}",
            self.orthonormality,
            ORTHONORMALITY_TOL,
            verdict(self.orthonormality <= ORTHONORMALITY_TOL)
        )?;
        writeln!(
            f,
            "numerov energies, n <= {}: max diff {:.3e} (limit {:e}) {}",
            self.checked,
            self.numerov_energy,
            CROSS_CHECK_TOL,
            verdict(self.numerov_energy <= CROSS_CHECK_TOL)
        )?;
        writeln!(
            f,
            "numerov eigenfunctions, n <= {}: max diff {:.3e} (limit {:e}) {}",
            self.checked,
            self.numerov_shape,
            CROSS_CHECK_TOL,
            verdict(self.numerov_shape <= CROSS_CHECK_TOL)
        )
    }
}

/// Largest energy and pointwise differences between two bases, after
/// matching the sign of each pair on its first lobe.
pub fn cross_check(airy: &Basis, other: &Basis) -> (f64, f64) {
    let mut de = 0.0f64;
    let mut dpsi = 0.0f64;
    let z_top = airy.z_max().min(other.z_max());
    for (a, b) in airy.states().iter().zip(other.states()) {
        de = de.max((a.energy() - b.energy()).abs());
        let probe = 0.5 * (a.energy() / airy.units().force) / a.n() as f64;
        let sign = (a.eval(probe) * b.eval(probe)).signum();
        let steps = (z_top / 0.05).ceil() as usize;
        for i in 0..=steps {
            let z = (i as f64 * 0.05).min(z_top);
            dpsi = dpsi.max((a.eval(z) - sign * b.eval(z)).abs());
        }
    }
    (de, dpsi)
}

pub fn run(config: &RunConfig) -> Result<SpectrumReport> {
    let units = UnitSystem::natural();
    let n_max = match config.n_max {
        Some(n) => n,
        None => estimate_levels(&config.spec()?, &units, config.tol),
    };
    let basis = bouncer_basis(&units, n_max)?;
    let checked = n_max.min(CROSS_CHECK_LEVELS);
    let grid = bouncer_numerov_grid(&units, checked)?;
    let numerov = numerov_eigenstates(|z| units.force * z, &units, checked, &grid)?;
    let (numerov_energy, numerov_shape) = cross_check(&basis, &numerov);
    let report = SpectrumReport {
        levels: n_max,
        ground: basis.states()[0].energy(),
        orthonormality: basis.orthonormality_residual(),
        checked,
        numerov_energy,
        numerov_shape,
    };

    let out = &config.out;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut csv = String::new();
    writeln!(csv, "# basis {}", basis.id())?;
    writeln!(csv, "n,energy")?;
    for s in basis.states() {
        writeln!(csv, "{},{:.15e}", s.n(), s.energy())?;
    }
    fs::write(out.join("energies.csv"), csv)?;
    basis.save(out.join("basis.txt"))?;
    fs::write(out.join("spectrum_report.txt"), report.to_string())?;
    Ok(report)
}
