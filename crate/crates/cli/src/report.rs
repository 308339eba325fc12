//! The `report` command: timescales, projection quality, collapsed-phase
//! plateaus and the first revival, each checked against its tolerance.

use std::fmt;

use anyhow::Result;
use quantum_bouncer::classical::{trajectory, Timescales};
use quantum_bouncer::evolution::time_grid;

use crate::figures::{classical_targets, phase_lag};
use crate::session::Session;

pub const NORM_TOL: f64 = 1e-6;
pub const PLATEAU_REL_TOL: f64 = 0.02;
pub const MEAN_P_TOL: f64 = 0.1;
pub const AUTOCORR_TOL: f64 = 1e-3;
pub const PROMINENCE: f64 = 5.0;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub expected: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub timescales: Timescales,
    pub levels: usize,
    pub peak: (usize, f64),
    pub mean_energy: f64,
    pub plateau_window: Option<(f64, f64)>,
    pub revival: (f64, f64),
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn within(name: &'static str, value: f64, target: f64, tol: f64) -> Check {
    Check {
        name,
        value,
        expected: format!("{target:.6} +- {tol:.4}"),
        pass: (value - target).abs() <= tol,
    }
}

pub fn run(s: &Session) -> Result<Report> {
    let ts = s.timescales();
    let evo = s.evolution()?;
    let cs = &s.coefficients;
    let mut checks = Vec::new();
    checks.push(within("norm", cs.norm(), 1.0, NORM_TOL));

    let (w0, w1) = ts.collapsed_window();
    let plateau_window = (w1 > w0).then_some((w0, w1));
    if let Some((w0, w1)) = plateau_window {
        let times = time_grid((w0 - ts.t_cl).max(0.0), w1 + ts.t_cl, ts.t_cl / 50.0);
        let series = evo.observable_series(&times)?;
        let avg = |col: &[f64]| series.mean_over(&series.smoothed(col, ts.t_cl), w0, w1);
        let target = classical_targets(s);
        let rel = |name, v, t: f64| within(name, v, t, PLATEAU_REL_TOL * t.abs());
        checks.push(rel("plateau mean_z", avg(&series.mean_z), target.mean_z));
        checks.push(within(
            "plateau mean_p",
            avg(&series.mean_p),
            target.mean_p,
            MEAN_P_TOL,
        ));
        checks.push(rel("plateau sigma_z", avg(&series.sigma_z), target.sigma_z));
        checks.push(rel("plateau sigma_p", avg(&series.sigma_p), target.sigma_p));
        checks.push(within(
            "plateau autocorr2",
            avg(&series.autocorr2),
            cs.collapsed_plateau(),
            AUTOCORR_TOL,
        ));
    }

    let times = time_grid(
        ts.t_rev - 5.0 * ts.t_cl,
        ts.t_rev + 5.0 * ts.t_cl,
        ts.t_cl / 200.0,
    );
    let revival =
        times
            .iter()
            .map(|&t| (t, evo.autocorr2(t)))
            .fold((0.0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
    checks.push(within("revival location", revival.0, ts.t_rev, ts.t_cl));
    let floor = PROMINENCE * cs.collapsed_plateau();
    checks.push(Check {
        name: "revival height",
        value: revival.1,
        expected: format!(">= {floor:.6}"),
        pass: revival.1 >= floor,
    });

    let window = time_grid(
        ts.t_rev - 4.0 * ts.t_cl,
        ts.t_rev + 4.0 * ts.t_cl,
        ts.t_cl / 200.0,
    );
    let series = evo.observable_series(&window)?;
    let zc: Vec<f64> = window
        .iter()
        .map(|&t| trajectory(s.spec.z0, s.spec.p0, &s.units, t).z)
        .collect();
    let lag = phase_lag(&window, &series.mean_z, &zc, ts.t_cl);
    checks.push(within(
        "revival phase lag",
        lag,
        ts.t_cl / 2.0,
        ts.t_cl / 10.0,
    ));

    Ok(Report {
        timescales: ts,
        levels: cs.len(),
        peak: cs.peak(),
        mean_energy: cs.mean_energy(),
        plateau_window,
        revival,
        checks,
    })
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ts = &self.timescales;
        writeln!(
            f,
            "T_cl = {:.2}  T_rev = {:.2}  T_coll = {:.2}",
            ts.t_cl, ts.t_rev, ts.t_coll
        )?;
        writeln!(f, "levels retained: {}", self.levels)?;
        writeln!(
            f,
            "largest coefficient: |c_{}| = {:.4}",
            self.peak.0, self.peak.1
        )?;
        writeln!(f, "mean energy: {:.4}", self.mean_energy)?;
        match self.plateau_window {
            Some((a, b)) => writeln!(f, "collapsed window: [{a:.2}, {b:.2}]")?,
            None => writeln!(f, "collapsed window: empty, plateau checks skipped")?,
        }
        writeln!(
            f,
            "revival peak: |A|^2 = {:.4} at t = {:.2}",
            self.revival.1, self.revival.0
        )?;
        for c in &self.checks {
            let mark = if c.pass { "ok" } else { "FAILED" };
            writeln!(
                f,
                "{:<20} {:>14.6}  expected {}  {}",
                c.name, c.value, c.expected, mark
            )?;
        }
        Ok(())
    }
}
