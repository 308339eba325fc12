//! Exact spectral time evolution and the observables built on it.
//!
//! With `a_n(t) = c_n e^{-iE_n t/ħ}` every quadratic observable is a
//! Hermitian form `a† M a` in the retained coefficients, so the matrices
//! `⟨u_n|z|u_m⟩`, `⟨u_n|z²|u_m⟩`, `⟨u_n|u_m′⟩` and `⟨u_n′|u_m′⟩` are
//! computed once and every time sample costs `O(N²)`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureGrid;
use crate::spectrum::{Basis, Eigenstate};
use crate::units::UnitSystem;
use crate::wavepacket::CoefficientSet;

/// Imaginary residue of `⟨p⟩` silently dropped below this.
const RESIDUE_QUIET: f64 = 1e-8;
/// Imaginary residue of `⟨p⟩` treated as an integration failure above this.
const RESIDUE_FATAL: f64 = 1e-6;

type Matrix = Vec<Vec<f64>>;

/// `A(t) = Σ|c_n|² e^{iE_n t/ħ}`.
pub fn autocorrelation(cs: &CoefficientSet, t: f64) -> Complex64 {
    let hbar = cs.hbar();
    cs.coeffs()
        .iter()
        .zip(cs.energies())
        .map(|(c, e)| c.norm_sqr() * Complex64::cis(e * t / hbar))
        .sum()
}

/// Everything measured at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub mean_z: f64,
    pub sigma_z: f64,
    pub mean_p: f64,
    pub sigma_p: f64,
    pub autocorr2: f64,
    /// `∫|ψ|²` by quadrature on the evolution grid.
    pub norm: f64,
}

impl Snapshot {
    pub fn mean_p2(&self) -> f64 {
        self.sigma_p * self.sigma_p + self.mean_p * self.mean_p
    }

    /// `⟨p²⟩/2m + F⟨z⟩`, the bouncer energy from position and momentum moments.
    pub fn bouncer_energy(&self, units: &UnitSystem) -> f64 {
        self.mean_p2() / (2.0 * units.mass) + units.force * self.mean_z
    }
}

/// The time evolution of one coefficient set in its basis.
#[derive(Debug, Clone)]
pub struct Evolution {
    units: UnitSystem,
    cs: CoefficientSet,
    states: Vec<Eigenstate>,
    z_range: (f64, f64),
    grid: QuadratureGrid,
    /// `u_n` at the grid nodes, one row per retained state.
    values: Matrix,
    overlap: Matrix,
    z1: Matrix,
    z2: Matrix,
    deriv: Matrix,
    kinetic: Matrix,
}

fn form(m: &Matrix, a: &[Complex64]) -> Complex64 {
    m.iter()
        .zip(a)
        .map(|(row, an)| {
            let inner: Complex64 = row.iter().zip(a).map(|(v, am)| am * v).sum();
            an.conj() * inner
        })
        .sum()
}

fn gram<F>(rows_a: &Matrix, rows_b: &Matrix, weights: &[f64], factor: F) -> Matrix
where
    F: Fn(usize) -> f64 + Sync,
{
    rows_a
        .par_iter()
        .map(|ra| {
            rows_b
                .iter()
                .map(|rb| {
                    ra.iter()
                        .zip(rb)
                        .zip(weights)
                        .enumerate()
                        .map(|(j, ((x, y), w))| x * y * w * factor(j))
                        .sum()
                })
                .collect()
        })
        .collect()
}

impl Evolution {
    pub fn new(basis: &Basis, cs: &CoefficientSet) -> Result<Self> {
        if cs.basis_id() != basis.id() {
            return Err(Error::InvalidParameter(format!(
                "coefficients belong to basis `{}`, not `{}`",
                cs.basis_id(),
                basis.id()
            )));
        }
        if cs.len() > basis.len() {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients for a {}-state basis",
                cs.len(),
                basis.len()
            )));
        }
        let states = basis.states()[..cs.len()].to_vec();
        let grid = basis.quadrature_grid();
        let sampled: Vec<(Vec<f64>, Vec<f64>)> = states
            .par_iter()
            .map(|s| grid.nodes.iter().map(|&z| s.eval_with_slope(z)).unzip())
            .collect();
        let (values, slopes): (Matrix, Matrix) = sampled.into_iter().unzip();
        let z = &grid.nodes;
        let w = &grid.weights;
        let overlap = gram(&values, &values, w, |_| 1.0);
        let z1 = gram(&values, &values, w, |j| z[j]);
        let z2 = gram(&values, &values, w, |j| z[j] * z[j]);
        let deriv = gram(&values, &slopes, w, |_| 1.0);
        let kinetic = gram(&slopes, &slopes, w, |_| 1.0);
        Ok(Self {
            units: *basis.units(),
            cs: cs.clone(),
            states,
            z_range: (basis.z_min(), basis.z_max()),
            grid,
            values,
            overlap,
            z1,
            z2,
            deriv,
            kinetic,
        })
    }

    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    pub fn coefficients(&self) -> &CoefficientSet {
        &self.cs
    }

    pub fn z_range(&self) -> (f64, f64) {
        self.z_range
    }

    /// `⟨u_n|z|u_m⟩` over the retained states.
    pub fn position_matrix(&self) -> &[Vec<f64>] {
        &self.z1
    }

    /// `⟨u_n|u_m′⟩` over the retained states.
    pub fn derivative_matrix(&self) -> &[Vec<f64>] {
        &self.deriv
    }

    /// `⟨u_n′|u_m′⟩` over the retained states.
    pub fn kinetic_matrix(&self) -> &[Vec<f64>] {
        &self.kinetic
    }

    /// `c_n e^{-iE_n t/ħ}`.
    pub fn amplitudes(&self, t: f64) -> Vec<Complex64> {
        let hbar = self.units.hbar;
        self.cs
            .coeffs()
            .iter()
            .zip(self.cs.energies())
            .map(|(c, e)| c * Complex64::cis(-e * t / hbar))
            .collect()
    }

    /// `ψ(z, t)` at arbitrary heights; zero outside the basis domain.
    pub fn wavefunction_at(&self, t: f64, z: &[f64]) -> Vec<Complex64> {
        let a = self.amplitudes(t);
        z.par_iter()
            .map(|&z| {
                self.states
                    .iter()
                    .zip(&a)
                    .map(|(s, an)| an * s.eval(z))
                    .sum()
            })
            .collect()
    }

    /// `ψ` on the nodes of the evolution grid.
    fn on_grid(&self, a: &[Complex64]) -> Vec<Complex64> {
        let mut psi = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (row, an) in self.values.iter().zip(a) {
            for (p, v) in psi.iter_mut().zip(row) {
                *p += an * v;
            }
        }
        psi
    }

    /// `∫|ψ|²` by quadrature on the evolution grid.
    pub fn norm(&self, t: f64) -> f64 {
        form(&self.overlap, &self.amplitudes(t)).re
    }

    /// `(⟨z⟩, Δz)` from the precomputed matrix elements.
    pub fn expect_position(&self, t: f64) -> (f64, f64) {
        let a = self.amplitudes(t);
        let m1 = form(&self.z1, &a).re;
        let m2 = form(&self.z2, &a).re;
        (m1, (m2 - m1 * m1).max(0.0).sqrt())
    }

    /// `(⟨z⟩, Δz)` by direct quadrature of `z|ψ|²` on an independent grid of
    /// panel width `panel`.
    pub fn expect_position_on_grid(&self, t: f64, panel: f64) -> (f64, f64) {
        let grid = QuadratureGrid::composite(self.z_range.0, self.z_range.1, panel);
        let psi = self.wavefunction_at(t, &grid.nodes);
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for ((z, w), p) in grid.nodes.iter().zip(&grid.weights).zip(&psi) {
            let d = w * p.norm_sqr();
            m0 += d;
            m1 += d * z;
            m2 += d * z * z;
        }
        let mean = m1 / m0;
        (mean, (m2 / m0 - mean * mean).max(0.0).sqrt())
    }

    /// `(⟨p⟩, Δp)` from analytic derivatives of the basis functions.
    pub fn expect_momentum(&self, t: f64) -> Result<(f64, f64)> {
        let a = self.amplitudes(t);
        self.momentum_moments(&a)
    }

    fn momentum_moments(&self, a: &[Complex64]) -> Result<(f64, f64)> {
        let hbar = self.units.hbar;
        // ⟨p⟩ = -iħ Σ a_n* a_m ⟨u_n|u_m′⟩
        let s = form(&self.deriv, a);
        let p = Complex64::new(0.0, -hbar) * s;
        let residue = p.im.abs();
        if residue > RESIDUE_FATAL {
            return Err(Error::IntegrationFailure { residue });
        }
        if residue > RESIDUE_QUIET {
            log::warn!("⟨p⟩ carries imaginary residue {residue:e}");
        }
        let p2 = hbar * hbar * form(&self.kinetic, a).re;
        Ok((p.re, (p2 - p.re * p.re).max(0.0).sqrt()))
    }

    /// `|A(t)|²`.
    pub fn autocorr2(&self, t: f64) -> f64 {
        autocorrelation(&self.cs, t).norm_sqr()
    }

    pub fn snapshot(&self, t: f64) -> Result<Snapshot> {
        let a = self.amplitudes(t);
        let m1 = form(&self.z1, &a).re;
        let m2 = form(&self.z2, &a).re;
        let (mean_p, sigma_p) = self.momentum_moments(&a)?;
        Ok(Snapshot {
            t,
            mean_z: m1,
            sigma_z: (m2 - m1 * m1).max(0.0).sqrt(),
            mean_p,
            sigma_p,
            autocorr2: self.autocorr2(t),
            norm: form(&self.overlap, &a).re,
        })
    }

    /// Probability of finding the particle below `depth`.
    pub fn wall_overlap(&self, t: f64, depth: f64) -> f64 {
        let hi = depth.min(self.z_range.1);
        if hi <= self.z_range.0 {
            return 0.0;
        }
        let grid = QuadratureGrid::composite(self.z_range.0, hi, self.grid_panel());
        let psi = self.wavefunction_at(t, &grid.nodes);
        psi.iter()
            .zip(&grid.weights)
            .map(|(p, w)| w * p.norm_sqr())
            .sum()
    }

    fn grid_panel(&self) -> f64 {
        let order = crate::quadrature::PANEL_ORDER;
        (self.z_range.1 - self.z_range.0) / (self.grid.len() / order) as f64
    }

    /// `|ψ(z,t)|²` on the given heights.
    pub fn position_density(&self, t: f64, z: &[f64]) -> Vec<f64> {
        self.wavefunction_at(t, z)
            .iter()
            .map(|p| p.norm_sqr())
            .collect()
    }

    /// `φ(p,t) = (2πħ)^{-1/2} ∫ψ(z,t) e^{-ipz/ħ} dz` by direct quadrature.
    pub fn momentum_density(&self, t: f64, p_grid: &[f64]) -> MomentumDensity {
        let psi = self.on_grid(&self.amplitudes(t));
        let hbar = self.units.hbar;
        let pref = 1.0 / (2.0 * PI * hbar);
        let weighted: Vec<Complex64> = psi
            .iter()
            .zip(&self.grid.weights)
            .map(|(p, w)| p * w)
            .collect();
        let density = p_grid
            .par_iter()
            .map(|&p| {
                let phi: Complex64 = weighted
                    .iter()
                    .zip(&self.grid.nodes)
                    .map(|(v, &z)| v * Complex64::cis(-p * z / hbar))
                    .sum();
                pref * phi.norm_sqr()
            })
            .collect();
        MomentumDensity {
            time: t,
            p_grid: p_grid.to_vec(),
            density,
        }
    }

    /// Transforms of the individual eigenstates on `p_grid`, for repeated
    /// momentum densities at many times.
    pub fn momentum_transform(&self, p_grid: &[f64]) -> MomentumTransform {
        let hbar = self.units.hbar;
        let norm = (2.0 * PI * hbar).sqrt().recip();
        let kernels: Vec<Vec<Complex64>> = p_grid
            .par_iter()
            .map(|&p| {
                self.grid
                    .nodes
                    .iter()
                    .zip(&self.grid.weights)
                    .map(|(&z, &w)| norm * w * Complex64::cis(-p * z / hbar))
                    .collect()
            })
            .collect();
        let phi = self
            .values
            .par_iter()
            .map(|row| {
                kernels
                    .iter()
                    .map(|k| k.iter().zip(row).map(|(k, v)| k * v).sum())
                    .collect()
            })
            .collect();
        MomentumTransform {
            p_grid: p_grid.to_vec(),
            phi,
        }
    }

    /// Evaluates every time sample independently; rows come back in the
    /// order of `times` regardless of scheduling.
    pub fn observable_series(&self, times: &[f64]) -> Result<ObservableSeries> {
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("time grid must be sorted".into()));
        }
        let rows = times
            .par_iter()
            .map(|&t| self.snapshot(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(ObservableSeries::from_snapshots(&rows))
    }
}

/// Per-state momentum transforms `Φ_n(p)` on a fixed grid.
#[derive(Debug, Clone)]
pub struct MomentumTransform {
    p_grid: Vec<f64>,
    phi: Vec<Vec<Complex64>>,
}

impl MomentumTransform {
    pub fn p_grid(&self) -> &[f64] {
        &self.p_grid
    }

    pub fn density(&self, evo: &Evolution, t: f64) -> MomentumDensity {
        let a = evo.amplitudes(t);
        let mut phi = vec![Complex64::new(0.0, 0.0); self.p_grid.len()];
        for (row, an) in self.phi.iter().zip(&a) {
            for (out, v) in phi.iter_mut().zip(row) {
                *out += an * v;
            }
        }
        MomentumDensity {
            time: t,
            p_grid: self.p_grid.clone(),
            density: phi.iter().map(|v| v.norm_sqr()).collect(),
        }
    }
}

/// `|φ(p,t)|²` sampled on a momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumDensity {
    pub time: f64,
    pub p_grid: Vec<f64>,
    pub density: Vec<f64>,
}

impl MomentumDensity {
    /// Trapezoid integral over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.p_grid, &self.density)
    }

    pub fn mean(&self) -> f64 {
        let w: Vec<f64> = self
            .p_grid
            .iter()
            .zip(&self.density)
            .map(|(p, d)| p * d)
            .collect();
        trapezoid(&self.p_grid, &w) / self.integral()
    }

    pub fn spread(&self) -> f64 {
        let m = self.mean();
        let w: Vec<f64> = self
            .p_grid
            .iter()
            .zip(&self.density)
            .map(|(p, d)| (p - m).powi(2) * d)
            .collect();
        (trapezoid(&self.p_grid, &w) / self.integral()).sqrt()
    }

    /// Linear interpolation; zero outside the grid.
    pub fn at(&self, p: f64) -> f64 {
        let g = &self.p_grid;
        if g.is_empty() || p < g[0] || p > g[g.len() - 1] {
            return 0.0;
        }
        let i = g.partition_point(|&x| x <= p).min(g.len() - 1).max(1);
        let (x0, x1) = (g[i - 1], g[i]);
        let s = if x1 > x0 { (p - x0) / (x1 - x0) } else { 0.0 };
        self.density[i - 1] * (1.0 - s) + self.density[i] * s
    }
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Samples `start, start + step, …` up to `end` (inclusive within rounding).
pub fn time_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

/// The sampled columns of the observables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub mean_z: Vec<f64>,
    pub sigma_z: Vec<f64>,
    pub mean_p: Vec<f64>,
    pub sigma_p: Vec<f64>,
    pub autocorr2: Vec<f64>,
    pub norm: Vec<f64>,
}

pub const SERIES_HEADER: &str = "t,mean_z,sigma_z,mean_p,sigma_p,autocorr2";

impl ObservableSeries {
    pub fn from_snapshots(rows: &[Snapshot]) -> Self {
        let col = |f: fn(&Snapshot) -> f64| rows.iter().map(f).collect();
        Self {
            times: col(|s| s.t),
            mean_z: col(|s| s.mean_z),
            sigma_z: col(|s| s.sigma_z),
            mean_p: col(|s| s.mean_p),
            sigma_p: col(|s| s.sigma_p),
            autocorr2: col(|s| s.autocorr2),
            norm: col(|s| s.norm),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn row(&self, i: usize) -> Snapshot {
        Snapshot {
            t: self.times[i],
            mean_z: self.mean_z[i],
            sigma_z: self.sigma_z[i],
            mean_p: self.mean_p[i],
            sigma_p: self.sigma_p[i],
            autocorr2: self.autocorr2[i],
            norm: self.norm[i],
        }
    }

    /// Writes `# `-prefixed comments, the header, then one row per sample
    /// with 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{SERIES_HEADER}")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                self.times[i],
                self.mean_z[i],
                self.sigma_z[i],
                self.mean_p[i],
                self.sigma_p[i],
                self.autocorr2[i]
            )?;
        }
        Ok(())
    }

    /// Centered moving average of width `window` applied to one column.
    pub fn smoothed(&self, column: &[f64], window: f64) -> Vec<f64> {
        moving_average(&self.times, column, window)
    }

    /// Mean of `column` over samples with `t ∈ [a, b]`.
    pub fn mean_over(&self, column: &[f64], a: f64, b: f64) -> f64 {
        let (sum, n) = self
            .times
            .iter()
            .zip(column)
            .filter(|(t, _)| (a..=b).contains(*t))
            .fold((0.0, 0usize), |(s, n), (_, v)| (s + v, n + 1));
        sum / n as f64
    }
}

/// Centered moving average: each sample is replaced by the mean of the
/// samples within `window/2` of it (fewer at the ends of the series).
pub fn moving_average(times: &[f64], values: &[f64], window: f64) -> Vec<f64> {
    let mut prefix = Vec::with_capacity(values.len() + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().unwrap() + v);
    }
    let half = 0.5 * window;
    times
        .iter()
        .map(|&t| {
            let lo = times.partition_point(|&x| x < t - half - 1e-12);
            let hi = times.partition_point(|&x| x <= t + half + 1e-12);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// The shift `τ ∈ [0, max_lag]` maximizing the correlation between `a(t)`
/// and `b(t − τ)` on a uniform grid of spacing `step`.
pub fn lag_of_max_correlation(a: &[f64], b: &[f64], step: f64, max_lag: f64) -> f64 {
    let n = a.len().min(b.len());
    let max_k = ((max_lag / step).round() as usize).min(n.saturating_sub(2));
    let pearson = |x: &[f64], y: &[f64]| {
        let m = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (u, v) in x.iter().zip(y) {
            sxy += (u - mx) * (v - my);
            sxx += (u - mx) * (u - mx);
            syy += (v - my) * (v - my);
        }
        sxy / (sxx * syy).sqrt()
    };
    let best = (0..=max_k)
        .map(|k| (k, pearson(&a[k..n], &b[..n - k])))
        .fold((0, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    best.0 as f64 * step
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moving_average_of_constant_and_line() {
        let t = linspace(0.0, 10.0, 101);
        let c = vec![2.0; t.len()];
        assert!(moving_average(&t, &c, 1.0)
            .iter()
            .all(|v| (v - 2.0).abs() < 1e-15));
        let m = moving_average(&t, &t, 2.0);
        assert!((m[50] - 5.0).abs() < 1e-12);
        // truncated window at the edge
        assert!((m[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lag_recovers_a_shift() {
        let step = 0.01;
        let t = time_grid(0.0, 40.0, step);
        let a: Vec<f64> = t.iter().map(|t| (t - 3.0).sin()).collect();
        let b: Vec<f64> = t.iter().map(|t| t.sin()).collect();
        let lag = lag_of_max_correlation(&a, &b, step, 2.0 * PI);
        assert!((lag - 3.0).abs() < 1e-9, "{lag}");
    }

    #[test]
    fn time_grid_is_inclusive() {
        let g = time_grid(0.0, 1.0, 0.1);
        assert_eq!(g.len(), 11);
        assert!((g[10] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_is_exact_for_lines() {
        let x = linspace(-1.0, 3.0, 7);
        let y: Vec<f64> = x.iter().map(|x| 2.0 * x + 1.0).collect();
        assert!((trapezoid(&x, &y) - 12.0).abs() < 1e-13);
    }

    #[test]
    fn density_interpolation() {
        let d = MomentumDensity {
            time: 0.0,
            p_grid: vec![-1.0, 0.0, 1.0],
            density: vec![0.0, 1.0, 0.0],
        };
        assert_eq!(d.at(0.5), 0.5);
        assert_eq!(d.at(2.0), 0.0);
        assert_eq!(d.at(-1.0), 0.0);
    }
}
