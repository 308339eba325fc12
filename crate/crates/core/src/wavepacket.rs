//! Gaussian initial states and their projection onto the eigenbasis.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureGrid;
use crate::spectrum::{airy_zero_seed, bouncer_basis, Basis};
use crate::units::UnitSystem;

/// Default truncation threshold for expansion coefficients.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Half-width of the projection window, in units of `Δz₀`.
const WINDOW_SPREADS: f64 = 12.0;
/// Below this `z₀/Δz₀` the wall clips a visible part of the Gaussian.
const CLIPPING_RATIO: f64 = 5.0;

/// A Gaussian packet centred at `z0` with position spread `dz0` and mean momentum `p0`.
///
/// The momentum-width parametrization `α` maps onto this one through `Δz₀ = ħα/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    pub z0: f64,
    pub dz0: f64,
    pub p0: f64,
}

impl PacketSpec {
    pub fn new(z0: f64, dz0: f64, p0: f64) -> Result<Self> {
        if !(z0.is_finite() && z0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "z0 must be positive, got {z0}"
            )));
        }
        if !(dz0.is_finite() && dz0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dz0 must be positive, got {dz0}"
            )));
        }
        if !p0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "p0 must be finite, got {p0}"
            )));
        }
        if z0 / dz0 < CLIPPING_RATIO {
            log::warn!(
                "z0/dz0 = {:.3} < {CLIPPING_RATIO}: the wall clips the packet",
                z0 / dz0
            );
        }
        Ok(Self { z0, dz0, p0 })
    }

    /// Release from rest at `z₀ = 25` with `Δz₀ = 1`.
    pub const fn released_from_rest() -> Self {
        Self {
            z0: 25.0,
            dz0: 1.0,
            p0: 0.0,
        }
    }

    /// Momentum spread `ħ/(2Δz₀)` of the minimum-uncertainty packet.
    pub fn momentum_spread(&self, units: &UnitSystem) -> f64 {
        units.hbar / (2.0 * self.dz0)
    }
}

impl Default for PacketSpec {
    fn default() -> Self {
        Self::released_from_rest()
    }
}

/// `(2πΔz₀²)^{-1/4} exp(-(z-z₀)²/(4Δz₀²)) exp(i p₀ z/ħ)`.
pub fn gaussian_amplitude(spec: &PacketSpec, units: &UnitSystem, z: f64) -> Complex64 {
    let s2 = spec.dz0 * spec.dz0;
    let norm = (2.0 * std::f64::consts::PI * s2).powf(-0.25);
    let d = z - spec.z0;
    let envelope = norm * (-d * d / (4.0 * s2)).exp();
    Complex64::from_polar(envelope, spec.p0 * z / units.hbar)
}

/// Truncated expansion coefficients `c_n = ⟨u_n|ψ₀⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    coeffs: Vec<Complex64>,
    energies: Vec<f64>,
    hbar: f64,
    tol: f64,
    basis_id: String,
}

impl CoefficientSet {
    /// Builds a set from raw parts; `energies[k]` belongs to `coeffs[k]`.
    pub fn from_parts(
        coeffs: Vec<Complex64>,
        energies: Vec<f64>,
        hbar: f64,
        tol: f64,
        basis_id: impl Into<String>,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        if coeffs.len() != energies.len() {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients but {} energies",
                coeffs.len(),
                energies.len()
            )));
        }
        Ok(Self {
            coeffs,
            energies,
            hbar,
            tol,
            basis_id: basis_id.into(),
        })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn basis_id(&self) -> &str {
        &self.basis_id
    }

    /// `Σ|c_n|²`.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `1 − Σ|c_n|²`; not renormalized away.
    pub fn norm_deficit(&self) -> f64 {
        1.0 - self.norm()
    }

    /// `Σ|c_n|⁴`, the level `|A(t)|²` hovers around once the packet has collapsed.
    pub fn collapsed_plateau(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr().powi(2)).sum()
    }

    /// `Σ|c_n|² E_n`.
    pub fn mean_energy(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.energies)
            .map(|(c, e)| c.norm_sqr() * e)
            .sum()
    }

    /// Quantum number and magnitude of the largest coefficient.
    pub fn peak(&self) -> (usize, f64) {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (k + 1, c.norm()))
            .fold(
                (0, 0.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            )
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# basis {}", self.basis_id)?;
        writeln!(w, "# tol {:e}", self.tol)?;
        writeln!(w, "# n re im")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            writeln!(w, "{} {:e} {:e}", k + 1, c.re, c.im)?;
        }
        Ok(())
    }

    /// Reads a cache written by [`CoefficientSet::write`], refusing one built
    /// on a different basis.
    pub fn read<R: BufRead>(r: R, basis: &Basis) -> Result<Self> {
        let mut id = None;
        let mut tol = None;
        let mut coeffs = Vec::new();
        for (k, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = k + 1;
            let bad = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("basis ") {
                    id = Some(v.trim().to_string());
                } else if let Some(v) = rest.strip_prefix("tol ") {
                    tol = Some(
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| bad(format!("bad tol `{v}`")))?,
                    );
                }
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 3 {
                return Err(bad(format!("expected 3 columns, found {}", cols.len())));
            }
            let n: usize = cols[0]
                .parse()
                .map_err(|_| bad(format!("bad index `{}`", cols[0])))?;
            if n != coeffs.len() + 1 {
                return Err(bad(format!("expected n = {}, found {n}", coeffs.len() + 1)));
            }
            let re: f64 = cols[1]
                .parse()
                .map_err(|_| bad(format!("bad value `{}`", cols[1])))?;
            let im: f64 = cols[2]
                .parse()
                .map_err(|_| bad(format!("bad value `{}`", cols[2])))?;
            coeffs.push(Complex64::new(re, im));
        }
        let found = id.ok_or(Error::Parse {
            line: 0,
            message: "missing `# basis` header".into(),
        })?;
        if found != basis.id() {
            return Err(Error::StaleCache {
                path: PathBuf::new(),
                expected: basis.id().to_string(),
                found,
            });
        }
        if coeffs.len() > basis.len() {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients exceed the {}-state basis",
                coeffs.len(),
                basis.len()
            )));
        }
        let energies = basis.energies()[..coeffs.len()].to_vec();
        Self::from_parts(
            coeffs,
            energies,
            basis.units().hbar,
            tol.unwrap_or(DEFAULT_TOL),
            found,
        )
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        if self.coeffs.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        let mut w = BufWriter::new(File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>, basis: &Basis) -> Result<Self> {
        let path = path.as_ref();
        Self::read(BufReader::new(File::open(path)?), basis).map_err(|e| match e {
            Error::StaleCache {
                expected, found, ..
            } => Error::StaleCache {
                path: path.to_path_buf(),
                expected,
                found,
            },
            e => e,
        })
    }
}

/// Quadrature grid for the overlap integrals: panels no wider than
/// `min(Δz₀, ℓ)/8` over `z₀ ± 12Δz₀`, clipped to the basis domain.
pub fn projection_grid(spec: &PacketSpec, basis: &Basis) -> QuadratureGrid {
    let panel = spec.dz0.min(basis.units().length()) / 8.0;
    projection_grid_with_panel(spec, basis, panel)
}

fn projection_grid_with_panel(spec: &PacketSpec, basis: &Basis, panel: f64) -> QuadratureGrid {
    let lo = (spec.z0 - WINDOW_SPREADS * spec.dz0).max(basis.z_min());
    let hi = (spec.z0 + WINDOW_SPREADS * spec.dz0).min(basis.z_max());
    QuadratureGrid::composite(lo, hi, panel)
}

/// Overlaps with every state of `basis`, untruncated.
pub fn overlaps(spec: &PacketSpec, basis: &Basis, grid: &QuadratureGrid) -> Vec<Complex64> {
    let amp: Vec<Complex64> = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .map(|(&z, &w)| w * gaussian_amplitude(spec, basis.units(), z))
        .collect();
    basis
        .states()
        .par_iter()
        .map(|s| {
            grid.nodes
                .iter()
                .zip(&amp)
                .map(|(&z, a)| a * s.eval(z))
                .sum()
        })
        .collect()
}

/// Projects the packet and truncates: coefficients are kept up to and
/// including the first one at or below `tol` after the last one above it.
pub fn project(spec: &PacketSpec, basis: &Basis, tol: f64) -> Result<CoefficientSet> {
    project_on(spec, basis, tol, &projection_grid(spec, basis))
}

/// As [`project`] with a caller-chosen panel width.
pub fn project_with_panel(
    spec: &PacketSpec,
    basis: &Basis,
    tol: f64,
    panel: f64,
) -> Result<CoefficientSet> {
    project_on(
        spec,
        basis,
        tol,
        &projection_grid_with_panel(spec, basis, panel),
    )
}

fn project_on(
    spec: &PacketSpec,
    basis: &Basis,
    tol: f64,
    grid: &QuadratureGrid,
) -> Result<CoefficientSet> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must lie in (0, 1), got {tol}"
        )));
    }
    if basis.is_empty() {
        return Err(Error::EmptyCoefficients);
    }
    let mut coeffs = overlaps(spec, basis, grid);
    let n_max = coeffs.len();
    let last = coeffs
        .iter()
        .rposition(|c| c.norm() > tol)
        .ok_or(Error::EmptyCoefficients)?;
    if last + 1 >= n_max {
        return Err(Error::InsufficientBasis {
            n_max,
            last: coeffs[n_max - 1].norm(),
            needed: estimate_levels(spec, basis.units(), tol).max(n_max + n_max / 2),
        });
    }
    coeffs.truncate(last + 2);
    let energies = basis.energies()[..coeffs.len()].to_vec();
    let cs = CoefficientSet::from_parts(coeffs, energies, basis.units().hbar, tol, basis.id())?;
    log::debug!(
        "projected onto {} states, norm deficit {:.3e}",
        cs.len(),
        cs.norm_deficit()
    );
    Ok(cs)
}

/// Rough number of bouncer levels needed before coefficients fall below `tol`.
///
/// The spectral weight is Gaussian in energy about `F z₀ + p₀²/2m`; the
/// reach beyond it is set by the larger of the position and momentum
/// widths, with a safety margin on top.
pub fn estimate_levels(spec: &PacketSpec, units: &UnitSystem, tol: f64) -> usize {
    let decades = (1.0 / tol).ln().max(1.0);
    let centre = units.force * spec.z0 + spec.p0 * spec.p0 / (2.0 * units.mass);
    let from_position = 2.0 * units.force * spec.dz0 * decades.sqrt();
    let from_momentum =
        units.hbar * units.hbar / (2.0 * units.mass * spec.dz0 * spec.dz0) * decades;
    let top = 1.3 * (centre + from_position.max(from_momentum));
    level_below(top / units.energy())
}

/// Smallest `n` whose Airy zero magnitude reaches `x`.
fn level_below(x: f64) -> usize {
    let mut n = ((x.powf(1.5) * 8.0 / (3.0 * std::f64::consts::PI) + 1.0) / 4.0).ceil() as usize;
    n = n.max(1);
    while airy_zero_seed(n).abs() < x {
        n += 1;
    }
    n
}

/// Builds a bouncer basis large enough for `spec` and projects onto it,
/// growing the basis if the first guess turns out too small.
pub fn project_auto(
    spec: &PacketSpec,
    units: &UnitSystem,
    tol: f64,
) -> Result<(Basis, CoefficientSet)> {
    let mut n_max = estimate_levels(spec, units, tol);
    for _ in 0..8 {
        let basis = bouncer_basis(units, n_max)?;
        match project(spec, &basis, tol) {
            Ok(cs) => return Ok((basis, cs)),
            Err(Error::InsufficientBasis { needed, .. }) => {
                log::info!("basis of {n_max} states too small, retrying with {needed}");
                n_max = needed;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoConvergence { n: n_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn released() -> (PacketSpec, UnitSystem) {
        (PacketSpec::released_from_rest(), UnitSystem::natural())
    }

    #[test]
    fn amplitude_peaks_at_centre() {
        let (spec, units) = released();
        let a = gaussian_amplitude(&spec, &units, spec.z0);
        assert_eq!(a.im, 0.0);
        let peak = (2.0 * std::f64::consts::PI).powf(-0.25);
        assert!((a.re - peak).abs() < 1e-15);
        assert!(gaussian_amplitude(&spec, &units, 24.0).re < a.re);
    }

    #[test]
    fn spec_validation() {
        assert!(PacketSpec::new(0.0, 1.0, 0.0).is_err());
        assert!(PacketSpec::new(25.0, -1.0, 0.0).is_err());
        assert!(PacketSpec::new(25.0, 1.0, f64::NAN).is_err());
        assert!(PacketSpec::new(3.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn level_estimate_covers_released_packet() {
        let (spec, units) = released();
        let n = estimate_levels(&spec, &units, DEFAULT_TOL);
        assert!(airy_zero_seed(n).abs() > 40.0);
        assert!(n < 150);
    }

    #[test]
    fn small_basis_is_rejected_with_a_suggestion() {
        let (spec, units) = released();
        let basis = bouncer_basis(&units, 30).unwrap();
        match project(&spec, &basis, DEFAULT_TOL) {
            Err(Error::InsufficientBasis {
                n_max,
                needed,
                last,
            }) => {
                assert_eq!(n_max, 30);
                assert!(needed > 30);
                assert!(last > DEFAULT_TOL);
            }
            other => panic!("expected insufficient basis, got {other:?}"),
        }
    }

    #[test]
    fn bad_tolerance_is_rejected() {
        let (spec, units) = released();
        let basis = bouncer_basis(&units, 5).unwrap();
        assert!(project(&spec, &basis, 0.0).is_err());
        assert!(project(&spec, &basis, 2.0).is_err());
    }

    #[test]
    fn empty_set_is_rejected() {
        assert!(matches!(
            CoefficientSet::from_parts(vec![], vec![], 1.0, 1e-6, "x"),
            Err(Error::EmptyCoefficients)
        ));
    }
}
