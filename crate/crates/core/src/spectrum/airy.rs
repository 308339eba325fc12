//! Airy function of the first kind and its zeros.
//!
//! `Ai` is evaluated in three regimes:
//!
//! * `|x| ≤ 4.5`: Maclaurin series `Ai = c₁f(x) − c₂g(x)`.
//! * `|x| ≥ 9`: the asymptotic expansions (exponential for `x > 0`,
//!   oscillatory phase form for `x < 0`), truncated at their smallest term.
//! * in between: a Taylor step of the Airy equation `y″ = xy` from the
//!   nearest point of a tabulated anchor grid.
//!
//! The anchor grid is built once. Negative anchors are propagated outward
//! from the exact values at the origin, where the equation is oscillatory
//! and propagation is stable. Positive anchors are propagated inward from
//! the asymptotic expansion at `x = 10`, the direction in which `Ai`
//! dominates the growing companion solution.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// `Ai(0) = 3^{-2/3}/Γ(2/3)`.
pub const AI_ZERO: f64 = 0.355_028_053_887_817_2;
/// `-Ai′(0) = 3^{-1/3}/Γ(1/3)`.
pub const AIP_ZERO_NEG: f64 = 0.258_819_403_792_806_8;

const SERIES_LIMIT: f64 = 4.5;
const ASYMPTOTIC_LIMIT: f64 = 9.0;
const ANCHOR_STEP: f64 = 0.5;
const POSITIVE_SEED: f64 = 10.0;
const EVAL_TERMS: usize = 34;
const PROPAGATE_TERMS: usize = 56;

/// `Ai(x)` and `Ai′(x)`.
///
/// Absolute error is below `1e-12` on `|x| ≤ 60`; for large positive `x`
/// both values underflow gracefully to zero.
pub fn airy_ai(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Domain {
            what: "Airy argument",
            value: x,
        });
    }
    Ok(ai(x))
}

/// Unchecked evaluation for hot loops; `x` must be finite.
#[inline]
pub(crate) fn ai(x: f64) -> (f64, f64) {
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        maclaurin(x)
    } else if ax >= ASYMPTOTIC_LIMIT {
        if x > 0.0 {
            asymptotic_positive(x)
        } else {
            asymptotic_negative(-x)
        }
    } else {
        anchors().eval(x)
    }
}

fn maclaurin(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (AI_ZERO, -AIP_ZERO_NEG);
    }
    // f = Σ a_k x^{3k},   a_k = a_{k-1} / ((3k-1)·3k)
    // g = Σ b_k x^{3k+1}, b_k = b_{k-1} / (3k·(3k+1))
    let x3 = x * x * x;
    let (mut f, mut g) = (1.0, x);
    let (mut fp, mut gp) = (0.0, 1.0);
    let mut tf = 1.0; // a_k x^{3k}
    let mut tg = x; // b_k x^{3k+1}
    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        tf *= x3 / ((k3 - 1.0) * k3);
        tg *= x3 / (k3 * (k3 + 1.0));
        f += tf;
        g += tg;
        fp += k3 * tf / x;
        gp += (k3 + 1.0) * tg / x;
        if tf.abs() + tg.abs() < 1e-18 * (f.abs() + g.abs()) && k > 2 {
            break;
        }
    }
    (
        AI_ZERO * f - AIP_ZERO_NEG * g,
        AI_ZERO * fp - AIP_ZERO_NEG * gp,
    )
}

/// Coefficients `u_k` of the asymptotic expansions, with
/// `u_k = u_{k-1}·(6k-5)(6k-3)(6k-1) / ((2k-1)·216·k)`.
fn u_coefficients() -> &'static [f64] {
    static U: OnceLock<Vec<f64>> = OnceLock::new();
    U.get_or_init(|| {
        let mut u = vec![1.0];
        for k in 1..64usize {
            let kf = k as f64;
            let prev = u[k - 1];
            u.push(
                prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                    / ((2.0 * kf - 1.0) * 216.0 * kf),
            );
        }
        u
    })
}

fn v_coefficient(k: usize) -> f64 {
    let kf = k as f64;
    -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u_coefficients()[k]
}

/// Sums `Σ (-1)^k c_k / ζ^k` (for `stride = 1`) or the even/odd
/// sub-series used in the oscillatory form, stopping at the smallest term.
fn asymptotic_sum(zeta: f64, coeff: impl Fn(usize) -> f64, start: usize, stride: usize) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut sign = 1.0;
    let mut k = start;
    while k < 60 {
        let term = coeff(k) / zeta.powi(k as i32);
        if term.abs() >= last {
            break;
        }
        sum += sign * term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        last = term.abs();
        sign = -sign;
        k += stride;
    }
    sum
}

fn asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let e = (-zeta).exp();
    if e == 0.0 {
        return (0.0, 0.0);
    }
    let q = x.sqrt().sqrt();
    let root_pi = PI.sqrt();
    let u = asymptotic_sum(zeta, |k| u_coefficients()[k], 0, 1);
    let v = asymptotic_sum(zeta, v_coefficient, 0, 1);
    (e / (2.0 * root_pi * q) * u, -q * e / (2.0 * root_pi) * v)
}

fn asymptotic_negative(y: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * y * y.sqrt();
    let q = y.sqrt().sqrt();
    let root_pi = PI.sqrt();
    let u = |k| u_coefficients()[k];
    let p = asymptotic_sum(zeta, u, 0, 2);
    let qq = asymptotic_sum(zeta, u, 1, 2);
    let r = asymptotic_sum(zeta, v_coefficient, 0, 2);
    let s = asymptotic_sum(zeta, v_coefficient, 1, 2);
    let phase = zeta - FRAC_PI_4;
    let (sn, cs) = phase.sin_cos();
    (
        (cs * p + sn * qq) / (root_pi * q),
        q / root_pi * (sn * r - cs * s),
    )
}

/// One Taylor step of `y″ = x y` from `(x0, y, y′)` by `h`.
fn taylor_step(x0: f64, y: f64, yp: f64, h: f64, terms: usize) -> (f64, f64) {
    // d_{k+2} = (x0·d_k + d_{k-1}) / ((k+2)(k+1))
    let (mut d_prev, mut d0, mut d1) = (0.0, y, yp);
    let mut value = y + yp * h;
    let mut deriv = yp;
    let mut hk = h; // h^{k+1} for the term d_{k+2}
    for k in 0..terms {
        let kf = k as f64;
        let d2 = (x0 * d0 + d_prev) / ((kf + 2.0) * (kf + 1.0));
        deriv += (kf + 2.0) * d2 * hk;
        hk *= h;
        value += d2 * hk;
        d_prev = d0;
        d0 = d1;
        d1 = d2;
    }
    (value, deriv)
}

struct AnchorTable {
    negative: Vec<(f64, f64)>,
    positive: Vec<(f64, f64)>,
}

impl AnchorTable {
    fn build() -> Self {
        let steps = (ASYMPTOTIC_LIMIT / ANCHOR_STEP).round() as usize;

        let mut negative = Vec::with_capacity(steps + 1);
        let mut state = (AI_ZERO, -AIP_ZERO_NEG);
        negative.push(state);
        for k in 0..steps {
            let x0 = -(k as f64) * ANCHOR_STEP;
            state = taylor_step(x0, state.0, state.1, -ANCHOR_STEP, PROPAGATE_TERMS);
            negative.push(state);
        }

        let seed_steps = (POSITIVE_SEED / ANCHOR_STEP).round() as usize;
        let mut positive = vec![(0.0, 0.0); seed_steps + 1];
        let mut state = asymptotic_positive(POSITIVE_SEED);
        positive[seed_steps] = state;
        for k in (1..=seed_steps).rev() {
            let x0 = k as f64 * ANCHOR_STEP;
            state = taylor_step(x0, state.0, state.1, -ANCHOR_STEP, PROPAGATE_TERMS);
            positive[k - 1] = state;
        }
        Self { negative, positive }
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let k = (x.abs() / ANCHOR_STEP).round() as usize;
        let x0 = (k as f64 * ANCHOR_STEP).copysign(x);
        let (y, yp) = if x < 0.0 {
            self.negative[k]
        } else {
            self.positive[k]
        };
        taylor_step(x0, y, yp, x - x0, EVAL_TERMS)
    }
}

fn anchors() -> &'static AnchorTable {
    static TABLE: OnceLock<AnchorTable> = OnceLock::new();
    TABLE.get_or_init(AnchorTable::build)
}

/// Leading-order estimate `-(3π(4n−1)/8)^{2/3}` of the `n`-th zero.
pub fn airy_zero_seed(n: usize) -> f64 {
    let t = 3.0 * PI * (4.0 * n as f64 - 1.0) / 8.0;
    -t.powf(2.0 / 3.0)
}

/// The `n`-th zero `a_n < 0` of `Ai`, counting from `n = 1`.
///
/// Newton's method from the asymptotic seed, safeguarded by a bracket that
/// is bisected whenever a Newton step would leave it.
pub fn airy_zero(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "Airy zeros are indexed from 1".into(),
        ));
    }
    let seed = airy_zero_seed(n);
    // Consecutive zeros sit about π/√|a| apart.
    let spacing = PI / seed.abs().sqrt();
    let (mut lo, mut hi) = (seed - 0.3 * spacing, seed + 0.3 * spacing);
    let (mut f_lo, _) = ai(lo);
    let (f_hi, _) = ai(hi);
    if f_lo * f_hi > 0.0 {
        return Err(Error::NoConvergence { n });
    }
    let mut x = seed;
    for _ in 0..200 {
        let (f, fp) = ai(x);
        if f == 0.0 {
            return Ok(x);
        }
        if f * f_lo < 0.0 {
            hi = x;
        } else {
            lo = x;
            f_lo = f;
        }
        let mut next = x - f / fp;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let dx = next - x;
        x = next;
        if dx.abs() <= 1e-12 {
            // one more Newton polish for full precision
            let (f, fp) = ai(x);
            return Ok(x - f / fp);
        }
    }
    Err(Error::NoConvergence { n })
}
