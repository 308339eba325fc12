//! CSV bundles for the seven figures.

use std::path::PathBuf;

use anyhow::{bail, Result};
use quantum_bouncer::classical::{
    band_offsets, classical_moments, floor_momentum, trajectory, write_band_csv,
    write_trajectory_csv, ClassicalMoments,
};
use quantum_bouncer::evolution::{
    lag_of_max_correlation, linspace, time_grid, Evolution, ObservableSeries,
};
use quantum_bouncer::reference::spread_envelope;

use crate::bundle::{write_columns, Bundle};
use crate::session::Session;

const SERIES_COLUMNS: &str = "t: time
mean_z: <z>
sigma_z: position spread
mean_p: <p>
sigma_p: momentum spread
autocorr2: |A(t)|^2, squared overlap with the initial state";

/// Highest point of the classical orbit, `z₀ + p₀²/2mF`.
pub fn turning_point(s: &Session) -> f64 {
    let u = &s.units;
    s.spec.z0 + s.spec.p0 * s.spec.p0 / (2.0 * u.mass * u.force)
}

/// Classical ensemble averages for the orbit through the packet centre.
pub fn classical_targets(s: &Session) -> ClassicalMoments {
    let a = turning_point(s);
    classical_moments(a, floor_momentum(a, &s.units))
}

pub fn render(s: &Session, figure: u8) -> Result<PathBuf> {
    let dir = s.config.out.join(format!("fig{figure}"));
    let mut b = Bundle::create(&dir, &format!("fig{figure}"))?;
    let ts = s.timescales();
    b.note("t_cl", ts.t_cl);
    b.note("t_rev", ts.t_rev);
    b.note("t_coll", ts.t_coll);
    let evo = s.evolution()?;
    match figure {
        1 => snapshots(s, &evo, &mut b)?,
        2 => band(s, &mut b)?,
        3 | 4 => periods(s, &evo, &mut b, figure)?,
        5 | 6 => long_run(s, &evo, &mut b)?,
        7 => revival_window(s, &evo, &mut b)?,
        _ => bail!("no figure {figure}; expected 1 to 7"),
    }
    b.finish(s)
}

fn label(t: f64) -> String {
    format!("{}", (t * 1000.0).round() / 1000.0)
}

fn snapshots(s: &Session, evo: &Evolution, b: &mut Bundle) -> Result<()> {
    let ts = s.timescales();
    let a = turning_point(s);
    let p_m = floor_momentum(a, &s.units);
    let z_top = (a + 10.0 * s.spec.dz0).min(evo.z_range().1);
    let z = linspace(0.0, z_top, 1001);
    let p_edge = p_m + 8.0 * s.units.hbar / s.spec.dz0;
    let p = linspace(-p_edge, p_edge, 1001);
    let transform = evo.momentum_transform(&p);
    let last = ts.t_cl.round().max(1.0) as usize;
    let mut slices = Vec::new();
    for k in 0..=last {
        let t = k as f64;
        let rho = evo.position_density(t, &z);
        let phi = transform.density(evo, t);
        let state = trajectory(s.spec.z0, s.spec.p0, &s.units, t);
        let comments = vec![
            format!("t = {t}"),
            format!("classical z = {:.11e}, p = {:.11e}", state.z, state.p),
        ];
        let name = format!("psi_t{}.csv", label(t));
        b.file(&name, "z: height\ndensity: |psi(z,t)|^2", |w| {
            write_columns(w, &comments, &["z", "density"], &[&z, &rho])
        })?;
        let name = format!("phi_t{}.csv", label(t));
        b.file(&name, "p: momentum\ndensity: |phi(p,t)|^2", |w| {
            write_columns(w, &comments, &["p", "density"], &[&p, &phi.density])
        })?;
        slices.push(label(t));
    }
    b.note("slices", slices.join(" "));
    b.note("marker.p", format!("0 {:e} {:e}", -p_m, p_m));

    let times = time_grid(0.0, ts.t_cl, ts.t_cl / 200.0);
    let series = evo.observable_series(&times)?;
    let (zc, pc): (Vec<f64>, Vec<f64>) = times
        .iter()
        .map(|&t| {
            let c = trajectory(s.spec.z0, s.spec.p0, &s.units, t);
            (c.z, c.p)
        })
        .unzip();
    b.file(
        "tracks.csv",
        "t: time\nmean_z: <z>\nmean_p: <p>\nz_classical: classical height\np_classical: classical momentum",
        |w| {
            write_columns(
                w,
                &[],
                &["t", "mean_z", "mean_p", "z_classical", "p_classical"],
                &[&times, &series.mean_z, &series.mean_p, &zc, &pc],
            )
        },
    )
}

fn band(s: &Session, b: &mut Bundle) -> Result<()> {
    let ts = s.timescales();
    let dp = s.spec.momentum_spread(&s.units);
    let times = time_grid(0.0, 2.0 * ts.t_cl, ts.t_cl / 200.0);
    b.note("delta_p", dp);
    b.note("offsets", format!("{:?}", band_offsets(dp)));
    b.file(
        "band.csv",
        "t: time\np_offset_k: classical momentum of the orbit started with p0 + k*delta_p",
        |w| write_band_csv(w, s.spec.z0, dp, &s.units, &times),
    )?;
    b.file("classical.csv", "t: time\nz: height\np: momentum", |w| {
        write_trajectory_csv(w, s.spec.z0, s.spec.p0, &s.units, &times)
    })
}

fn write_series(b: &mut Bundle, series: &ObservableSeries, comments: &[String]) -> Result<()> {
    b.file("series.csv", SERIES_COLUMNS, |w| {
        series.write_csv(w, comments)
    })
}

fn periods(s: &Session, evo: &Evolution, b: &mut Bundle, figure: u8) -> Result<()> {
    let ts = s.timescales();
    let times = time_grid(0.0, s.config.periods * ts.t_cl, ts.t_cl / 200.0);
    let series = evo.observable_series(&times)?;
    write_series(
        b,
        &series,
        &[format!("{} classical periods", s.config.periods)],
    )?;
    let t0 = 2.0 * s.units.mass * s.spec.dz0 * s.spec.dz0 / s.units.hbar;
    b.note("spreading_time", t0);
    let mut zc = Vec::with_capacity(times.len());
    let mut pc = Vec::with_capacity(times.len());
    let mut rising = Vec::with_capacity(times.len());
    let mut falling = Vec::with_capacity(times.len());
    for &t in &times {
        let c = trajectory(s.spec.z0, s.spec.p0, &s.units, t);
        let (r, f) = spread_envelope(s.spec.dz0, ts.t_cl, t0, t);
        zc.push(c.z);
        pc.push(c.p);
        rising.push(r);
        falling.push(f);
    }
    let focus = if figure == 3 {
        "mean_z mean_p"
    } else {
        "sigma_z sigma_p"
    };
    b.note("focus", focus);
    b.file(
        "overlays.csv",
        "t: time
z_classical: classical height
p_classical: classical momentum
envelope_rising: free-fall spread since the last bounce
envelope_falling: free-fall spread until the next bounce",
        |w| {
            write_columns(
                w,
                &[],
                &[
                    "t",
                    "z_classical",
                    "p_classical",
                    "envelope_rising",
                    "envelope_falling",
                ],
                &[&times, &zc, &pc, &rising, &falling],
            )
        },
    )
}

fn long_run(s: &Session, evo: &Evolution, b: &mut Bundle) -> Result<()> {
    let ts = s.timescales();
    let end = s.config.long_span * ts.t_rev;
    let times = time_grid(0.0, end, ts.t_cl / 10.0);
    let series = evo.observable_series(&times)?;
    write_series(
        b,
        &series,
        &[format!("0 to {} revival times", s.config.long_span)],
    )?;
    let cols = [
        &series.mean_z,
        &series.sigma_z,
        &series.mean_p,
        &series.sigma_p,
        &series.autocorr2,
    ];
    let smooth: Vec<Vec<f64>> = cols.iter().map(|c| series.smoothed(c, ts.t_cl)).collect();
    b.note("smoothing_window", ts.t_cl);
    b.file(
        "smoothed.csv",
        "t: time\nother columns: series.csv columns averaged over a centred window of one classical period",
        |w| {
            write_columns(
                w,
                &[],
                &["t", "mean_z", "sigma_z", "mean_p", "sigma_p", "autocorr2"],
                &[&times, &smooth[0], &smooth[1], &smooth[2], &smooth[3], &smooth[4]],
            )
        },
    )?;
    let target = classical_targets(s);
    b.note("plateau.mean_z", target.mean_z);
    b.note("plateau.mean_p", target.mean_p);
    b.note("plateau.sigma_z", target.sigma_z);
    b.note("plateau.sigma_p", target.sigma_p);
    b.note("plateau.autocorr2", s.coefficients.collapsed_plateau());
    let mut k = 0.0;
    let mut markers = Vec::new();
    while k * ts.t_rev <= end {
        let c = k * ts.t_rev;
        markers.push(format!("{:e}:{:e}:{:e}", c - ts.t_coll, c, c + ts.t_coll));
        k += 1.0;
    }
    b.note("markers", markers.join(" "));
    Ok(())
}

/// Lag of `⟨z⟩` behind the classical height, folded into `[0, T_cl)`.
pub fn phase_lag(times: &[f64], quantum: &[f64], classical: &[f64], t_cl: f64) -> f64 {
    let step = times[1] - times[0];
    lag_of_max_correlation(quantum, classical, step, t_cl).rem_euclid(t_cl)
}

fn revival_window(s: &Session, evo: &Evolution, b: &mut Bundle) -> Result<()> {
    let ts = s.timescales();
    let start = ts.t_rev - 4.0 * ts.t_cl;
    let times = time_grid(start, ts.t_rev + 4.0 * ts.t_cl, ts.t_cl / 200.0);
    let series = evo.observable_series(&times)?;
    write_series(
        b,
        &series,
        &["eight classical periods centred on the revival".into()],
    )?;
    let mut zc = Vec::with_capacity(times.len());
    let mut pc = Vec::with_capacity(times.len());
    let mut early = Vec::with_capacity(times.len());
    for &t in &times {
        let c = trajectory(s.spec.z0, s.spec.p0, &s.units, t);
        zc.push(c.z);
        pc.push(c.p);
        early.push(evo.autocorr2(t - start));
    }
    b.note("window_start", start);
    b.note("lag_z", phase_lag(&times, &series.mean_z, &zc, ts.t_cl));
    b.file(
        "overlays.csv",
        "t: time
z_classical: classical height
p_classical: classical momentum
autocorr2_early: |A|^2 at t - window_start, the first eight periods for comparison",
        |w| {
            write_columns(
                w,
                &[],
                &["t", "z_classical", "p_classical", "autocorr2_early"],
                &[&times, &zc, &pc, &early],
            )
        },
    )
}
