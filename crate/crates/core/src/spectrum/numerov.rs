//! Bound states of `-(ħ²/2m)ψ″ + V(z)ψ = Eψ` on a box with Dirichlet ends.
//!
//! Eigenvalues come from bisection on the node count of the outward
//! Numerov solution (Sturm oscillation: the count equals the number of
//! levels below `E`). Eigenfunctions are stitched from an outward and an
//! inward integration that meet at the outermost classical turning point,
//! so neither tail is contaminated by the growing solution.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::units::UnitSystem;

/// Uniform grid `lower, lower + step, …, upper` with `ψ = 0` at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumerovGrid {
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
}

impl NumerovGrid {
    pub fn new(lower: f64, upper: f64, step: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && step.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Numerov grid".into()));
        }
        if upper <= lower || step <= 0.0 || step > upper - lower {
            return Err(Error::InvalidParameter(format!(
                "bad Numerov grid [{lower}, {upper}] step {step}"
            )));
        }
        Ok(Self { lower, upper, step })
    }

    /// Number of intervals, rounded up to an even count so Simpson's rule applies.
    pub fn intervals(&self) -> usize {
        let n = ((self.upper - self.lower) / self.step).ceil() as usize;
        n + n % 2
    }

    pub fn spacing(&self) -> f64 {
        (self.upper - self.lower) / self.intervals() as f64
    }
}

/// A level found by the solver, sampled on the grid.
#[derive(Debug, Clone)]
pub struct GridLevel {
    pub energy: f64,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

struct Shooter {
    h: f64,
    /// `(2m/ħ²)·V(z_i)` on the grid.
    scaled_potential: Vec<f64>,
    kinetic: f64,
}

const RESCALE_ABOVE: f64 = 1e150;

impl Shooter {
    fn points(&self) -> usize {
        self.scaled_potential.len()
    }

    fn weights(&self, energy: f64) -> impl Fn(usize) -> f64 + '_ {
        let e = self.kinetic * energy;
        let c = self.h * self.h / 12.0;
        move |i| 1.0 - c * (self.scaled_potential[i] - e)
    }

    /// Sign changes of the outward solution over the whole grid.
    fn node_count(&self, energy: f64) -> usize {
        let w = self.weights(energy);
        let n = self.points();
        let (mut y0, mut y1) = (0.0, self.h);
        let (mut w0, mut w1) = (w(0), w(1));
        let mut nodes = 0;
        for i in 1..n - 1 {
            let w2 = w(i + 1);
            let mut y2 = ((12.0 - 10.0 * w1) * y1 - w0 * y0) / w2;
            if y2.abs() > RESCALE_ABOVE {
                y1 /= RESCALE_ABOVE;
                y2 /= RESCALE_ABOVE;
            }
            if y2 == 0.0 || y1 * y2 < 0.0 {
                // a node landing on the final point is the Dirichlet condition
                if i + 1 < n - 1 || y2 != 0.0 {
                    nodes += 1;
                }
            }
            y0 = y1;
            y1 = y2;
            w0 = w1;
            w1 = w2;
        }
        nodes
    }

    fn integrate(&self, energy: f64, from_left: bool, stop: usize) -> Vec<f64> {
        let w = self.weights(energy);
        let n = self.points();
        let mut y = vec![0.0; n];
        if from_left {
            y[1] = self.h;
            for i in 1..stop {
                y[i + 1] = ((12.0 - 10.0 * w(i)) * y[i] - w(i - 1) * y[i - 1]) / w(i + 1);
                if y[i + 1].abs() > RESCALE_ABOVE {
                    y[..=i + 1].iter_mut().for_each(|v| *v /= RESCALE_ABOVE);
                }
            }
        } else {
            y[n - 2] = self.h;
            for i in (stop + 1..n - 1).rev() {
                y[i - 1] = ((12.0 - 10.0 * w(i)) * y[i] - w(i + 1) * y[i + 1]) / w(i - 1);
                if y[i - 1].abs() > RESCALE_ABOVE {
                    y[i - 1..].iter_mut().for_each(|v| *v /= RESCALE_ABOVE);
                }
            }
        }
        y
    }

    fn eigenvalue(&self, n: usize, mut lo: f64, mut hi: f64) -> f64 {
        // invariant: node_count(lo) < n ≤ node_count(hi)
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.node_count(mid) >= n {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-14 * hi.abs().max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn eigenfunction(&self, energy: f64) -> Vec<f64> {
        let n = self.points();
        let e = self.kinetic * energy;
        // outermost classically allowed point, kept away from the ends
        let turning = (0..n)
            .rev()
            .find(|&i| self.scaled_potential[i] <= e)
            .unwrap_or(n / 2);
        let mut m = turning.clamp(4, n - 5);
        let left = self.integrate(energy, true, m + 2);
        // avoid matching at an accidental node
        let peak = left[..=m].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        while left[m].abs() < 1e-3 * peak && m > 4 {
            m -= 1;
        }
        let right = self.integrate(energy, false, m.saturating_sub(2));
        let scale = left[m] / right[m];
        let mut psi: Vec<f64> = (0..n)
            .map(|i| if i <= m { left[i] } else { scale * right[i] })
            .collect();
        let norm = simpson(&psi.iter().map(|v| v * v).collect::<Vec<_>>(), self.h).sqrt();
        // first lobe positive
        let sign = psi
            .iter()
            .find(|v| v.abs() > 1e-8 * peak.max(1e-300))
            .map_or(1.0, |v| v.signum());
        psi.iter_mut().for_each(|v| *v *= sign / norm);
        psi
    }
}

fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    debug_assert!(n % 2 == 0);
    let mut s = values[0] + values[n];
    for (i, v) in values.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

/// Fourth-order finite-difference slopes.
fn slopes(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut d = vec![0.0; n];
    for i in 0..n {
        d[i] = if i >= 2 && i + 2 < n {
            (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2]) / (12.0 * h)
        } else if i < 2 {
            (-25.0 * values[i] + 48.0 * values[i + 1] - 36.0 * values[i + 2] + 16.0 * values[i + 3]
                - 3.0 * values[i + 4])
                / (12.0 * h)
        } else {
            (25.0 * values[i] - 48.0 * values[i - 1] + 36.0 * values[i - 2] - 16.0 * values[i - 3]
                + 3.0 * values[i - 4])
                / (12.0 * h)
        };
    }
    d
}

/// The lowest `n_max` levels of `potential` on `grid`.
pub fn solve<V>(
    potential: V,
    units: &UnitSystem,
    n_max: usize,
    grid: &NumerovGrid,
) -> Result<Vec<GridLevel>>
where
    V: Fn(f64) -> f64 + Sync,
{
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let intervals = grid.intervals();
    if intervals < 16 {
        return Err(Error::InvalidParameter("Numerov grid too coarse".into()));
    }
    let h = grid.spacing();
    let kinetic = units.kinetic_factor();
    let scaled_potential: Vec<f64> = (0..=intervals)
        .map(|i| kinetic * potential(grid.lower + i as f64 * h))
        .collect();
    if scaled_potential.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "potential is not finite on the grid".into(),
        ));
    }
    let shooter = Shooter {
        h,
        scaled_potential,
        kinetic,
    };

    let floor = shooter
        .scaled_potential
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
        / kinetic;
    let edge = |i: usize| shooter.scaled_potential[i] / kinetic;
    // The lower end is the physical wall; the upper end is an artificial box,
    // so a bound level must sit below the potential there.
    let ceiling = edge(intervals - 1);
    if ceiling <= floor {
        return Err(Error::NotConfining {
            wanted: n_max,
            found: 0,
            ceiling,
        });
    }
    let found = shooter.node_count(ceiling);
    if found < n_max {
        return Err(Error::NotConfining {
            wanted: n_max,
            found,
            ceiling,
        });
    }
    // tighten the upper bracket
    let mut hi = ceiling;
    loop {
        let trial = floor + 0.5 * (hi - floor);
        if shooter.node_count(trial) >= n_max {
            hi = trial;
        } else {
            break;
        }
    }

    let levels = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let energy = shooter.eigenvalue(n, floor, hi);
            let values = shooter.eigenfunction(energy);
            let slopes = slopes(&values, h);
            GridLevel {
                energy,
                values,
                slopes,
            }
        })
        .collect();
    Ok(levels)
}
