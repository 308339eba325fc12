//! Bouncer eigenbasis: Airy-function eigenstates, with a Numerov solver for
//! general confining potentials as an independent route.

pub mod airy;
pub mod numerov;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureGrid;
use crate::units::UnitSystem;

pub use airy::{airy_ai, airy_zero, airy_zero_seed};
pub use numerov::NumerovGrid;

/// Extra room above the highest turning point, in units of `ℓ`.
pub const DEFAULT_TAIL_LENGTHS: f64 = 15.0;
/// Default Numerov step, in units of `ℓ`.
pub const DEFAULT_NUMEROV_STEP: f64 = 1e-3;
/// Tolerance for normalization and orthogonality checks.
pub const ORTHONORMALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
enum Profile {
    /// `u(z) = norm · Ai(z/ℓ − shift)`.
    Airy {
        shift: f64,
        norm: f64,
        length: f64,
    },
    Grid(GridProfile),
}

#[derive(Debug, Clone)]
struct GridProfile {
    lower: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl GridProfile {
    /// Cubic Hermite interpolation of the sampled values and slopes.
    fn eval(&self, z: f64) -> (f64, f64) {
        let last = self.values.len() - 1;
        let upper = self.lower + last as f64 * self.step;
        if z < self.lower || z > upper {
            return (0.0, 0.0);
        }
        let s = (z - self.lower) / self.step;
        let i = (s.floor() as usize).min(last - 1);
        let t = s - i as f64;
        let h = self.step;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let slope = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        (value, slope)
    }
}

/// One normalized, real energy eigenstate.
#[derive(Debug, Clone)]
pub struct Eigenstate {
    n: usize,
    energy: f64,
    profile: Profile,
}

impl Eigenstate {
    /// Quantum number, starting at 1 for the ground state.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Closed-form normalization constant, for Airy eigenstates.
    pub fn norm_const(&self) -> Option<f64> {
        match self.profile {
            Profile::Airy { norm, .. } => Some(norm),
            Profile::Grid(_) => None,
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.eval_with_slope(z).0
    }

    /// `(u(z), u′(z))`; both vanish outside the basis domain.
    pub fn eval_with_slope(&self, z: f64) -> (f64, f64) {
        match &self.profile {
            Profile::Airy {
                shift,
                norm,
                length,
            } => {
                if z < 0.0 {
                    return (0.0, 0.0);
                }
                let (a, ap) = airy::ai(z / length - shift);
                (norm * a, norm * ap / length)
            }
            Profile::Grid(g) => g.eval(z),
        }
    }
}

/// An ordered set of eigenstates on `[z_min, z_max]`.
#[derive(Debug, Clone)]
pub struct Basis {
    units: UnitSystem,
    states: Vec<Eigenstate>,
    z_min: f64,
    z_max: f64,
    panel: f64,
    id: String,
}

impl Basis {
    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    pub fn states(&self) -> &[Eigenstate] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    /// Identifier recorded in coefficient caches built on this basis.
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }

    /// Panel width of the quadrature grid, fine enough for the fastest
    /// oscillation of the highest state.
    pub fn panel_width(&self) -> f64 {
        self.panel
    }

    /// Composite 32-point Gauss–Legendre grid spanning the whole domain.
    pub fn quadrature_grid(&self) -> QuadratureGrid {
        QuadratureGrid::composite(self.z_min, self.z_max, self.panel)
    }

    /// `⟨u_n|u_m⟩` for all pairs, by quadrature.
    pub fn overlap_matrix(&self) -> Vec<Vec<f64>> {
        let grid = self.quadrature_grid();
        let samples: Vec<Vec<f64>> = self
            .states
            .par_iter()
            .map(|s| grid.nodes.iter().map(|&z| s.eval(z)).collect())
            .collect();
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                (0..self.len())
                    .map(|j| {
                        samples[i]
                            .iter()
                            .zip(&samples[j])
                            .zip(&grid.weights)
                            .map(|((a, b), w)| a * b * w)
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// Max-norm deviation of the overlap matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        self.overlap_matrix()
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(j, v)| (v - if i == j { 1.0 } else { 0.0 }).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Writes the columnar table: `# units …` header, then `n energy norm_const`.
    ///
    /// Only Airy bases can be tabulated; their wavefunctions are recomputed
    /// on load.
    pub fn write_table<W: Write>(&self, mut w: W) -> Result<()> {
        if self.states.iter().any(|s| s.norm_const().is_none()) {
            return Err(Error::InvalidParameter(
                "only Airy bases can be exported as tables".into(),
            ));
        }
        let u = &self.units;
        writeln!(
            w,
            "# units hbar={} mass={} force={}",
            u.hbar, u.mass, u.force
        )?;
        writeln!(w, "# z_max={}", self.z_max)?;
        writeln!(w, "# basis {}", self.id)?;
        writeln!(w, "# n energy norm_const")?;
        for s in &self.states {
            writeln!(w, "{} {:e} {:e}", s.n, s.energy, s.norm_const().unwrap())?;
        }
        Ok(())
    }

    pub fn read_table<R: BufRead>(r: R) -> Result<Self> {
        let mut units = None;
        let mut z_max = None;
        let mut rows = Vec::new();
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
                if let Some(fields) = rest.strip_prefix("units") {
                    let mut vals = [None; 3];
                    for kv in fields.split_whitespace() {
                        let (key, val) = kv
                            .split_once('=')
                            .ok_or_else(|| bad(format!("malformed `{kv}`")))?;
                        let v: f64 = val
                            .parse()
                            .map_err(|_| bad(format!("bad number `{val}`")))?;
                        match key {
                            "hbar" => vals[0] = Some(v),
                            "mass" => vals[1] = Some(v),
                            "force" => vals[2] = Some(v),
                            _ => return Err(bad(format!("unknown unit `{key}`"))),
                        }
                    }
                    match vals {
                        [Some(h), Some(m), Some(f)] => units = Some(UnitSystem::new(h, m, f)?),
                        _ => return Err(bad("units line needs hbar, mass and force".into())),
                    }
                } else if let Some(v) = rest.strip_prefix("z_max=") {
                    z_max = Some(
                        v.parse::<f64>()
                            .map_err(|_| bad(format!("bad z_max `{v}`")))?,
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
            let energy: f64 = cols[1]
                .parse()
                .map_err(|_| bad(format!("bad energy `{}`", cols[1])))?;
            let norm: f64 = cols[2]
                .parse()
                .map_err(|_| bad(format!("bad norm `{}`", cols[2])))?;
            if n != rows.len() + 1 {
                return Err(bad(format!("expected level {}, found {n}", rows.len() + 1)));
            }
            rows.push((energy, norm));
        }
        let units = units.ok_or(Error::Parse {
            line: 0,
            message: "missing `# units` header".into(),
        })?;
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no levels".into(),
            });
        }
        let (eps, length) = (units.energy(), units.length());
        let states = rows
            .into_iter()
            .enumerate()
            .map(|(k, (energy, norm))| Eigenstate {
                n: k + 1,
                energy,
                profile: Profile::Airy {
                    shift: energy / eps,
                    norm,
                    length,
                },
            })
            .collect::<Vec<_>>();
        let z_max = z_max.unwrap_or_else(|| default_z_max(&units, states.last().unwrap().energy));
        Ok(airy_basis_from_states(units, states, z_max))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_table(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_table(BufReader::new(File::open(path)?))
    }
}

fn default_z_max(units: &UnitSystem, top_energy: f64) -> f64 {
    top_energy / units.force + DEFAULT_TAIL_LENGTHS * units.length()
}

fn panel_for(units: &UnitSystem, energy_span: f64) -> f64 {
    let k_max = (units.kinetic_factor() * energy_span.max(0.0)).sqrt();
    let l = units.length();
    if k_max > 0.0 {
        (0.5 * l).min(2.0 / k_max)
    } else {
        0.5 * l
    }
}

fn airy_basis_from_states(units: UnitSystem, states: Vec<Eigenstate>, z_max: f64) -> Basis {
    let top = states.last().map_or(0.0, |s| s.energy);
    let id = format!(
        "airy:hbar={}:mass={}:force={}:n_max={}:z_max={}",
        units.hbar,
        units.mass,
        units.force,
        states.len(),
        z_max
    );
    Basis {
        units,
        panel: panel_for(&units, top),
        states,
        z_min: 0.0,
        z_max,
        id,
    }
}

/// The lowest `n_max` bouncer eigenstates, `u_n(z) = N_n Ai(z/ℓ − |a_n|)`
/// with `E_n = ε|a_n|`, on `[0, E_{n_max}/F + 15ℓ]`.
pub fn bouncer_basis(units: &UnitSystem, n_max: usize) -> Result<Basis> {
    bouncer_basis_on(units, n_max, None)
}

/// As [`bouncer_basis`] with an explicit domain height.
pub fn bouncer_basis_on(units: &UnitSystem, n_max: usize, z_max: Option<f64>) -> Result<Basis> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let (eps, length) = (units.energy(), units.length());
    let states = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let zero = airy_zero(n)?;
            let (_, slope) = airy::ai(zero);
            Ok(Eigenstate {
                n,
                energy: eps * zero.abs(),
                profile: Profile::Airy {
                    shift: zero.abs(),
                    norm: 1.0 / (length.sqrt() * slope.abs()),
                    length,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let top = states.last().unwrap().energy;
    let z_max = z_max.unwrap_or_else(|| default_z_max(units, top));
    if z_max <= top / units.force {
        return Err(Error::InvalidParameter(format!(
            "z_max = {z_max} does not clear the top turning point {}",
            top / units.force
        )));
    }
    let basis = airy_basis_from_states(*units, states, z_max);

    // The closed-form constant is cross-checked by quadrature.
    let grid = basis.quadrature_grid();
    for s in &basis.states {
        let norm = grid.integrate(|z| s.eval(z).powi(2));
        let residual = (norm - 1.0).abs();
        if residual > ORTHONORMALITY_TOL {
            return Err(Error::Normalization { n: s.n, residual });
        }
    }
    Ok(basis)
}

/// The lowest `n_max` states of an arbitrary confining potential, by
/// Numerov shooting on `grid` (Dirichlet at both ends).
pub fn numerov_eigenstates<V>(
    potential: V,
    units: &UnitSystem,
    n_max: usize,
    grid: &NumerovGrid,
) -> Result<Basis>
where
    V: Fn(f64) -> f64 + Sync,
{
    let floor = {
        let h = grid.spacing();
        (0..=grid.intervals())
            .map(|i| potential(grid.lower + i as f64 * h))
            .fold(f64::INFINITY, f64::min)
    };
    let levels = numerov::solve(&potential, units, n_max, grid)?;
    let step = grid.spacing();
    let top = levels.last().unwrap().energy;
    let states = levels
        .into_iter()
        .enumerate()
        .map(|(k, lvl)| Eigenstate {
            n: k + 1,
            energy: lvl.energy,
            profile: Profile::Grid(GridProfile {
                lower: grid.lower,
                step,
                values: lvl.values,
                slopes: lvl.slopes,
            }),
        })
        .collect();
    let id = format!(
        "numerov:hbar={}:mass={}:n_max={}:grid={}..{}/{}",
        units.hbar, units.mass, n_max, grid.lower, grid.upper, grid.step
    );
    Ok(Basis {
        units: *units,
        states,
        z_min: grid.lower,
        z_max: grid.upper,
        panel: panel_for(units, top - floor),
        id,
    })
}

/// The default Numerov grid for the bouncer: `[0, E_top/F + 15ℓ]` with step `10⁻³ℓ`.
pub fn bouncer_numerov_grid(units: &UnitSystem, n_max: usize) -> Result<NumerovGrid> {
    let top = units.energy() * airy_zero(n_max)?.abs();
    NumerovGrid::new(
        0.0,
        default_z_max(units, top),
        DEFAULT_NUMEROV_STEP * units.length(),
    )
}
