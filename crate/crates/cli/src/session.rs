//! Basis and coefficients for one run, computed or read back from the cache.
//!
//! The cache is two files: the coefficient list at the configured path and
//! the basis table beside it with a `.basis` extension. The coefficient file
//! also records the packet it was projected from, so a cache left behind by
//! a different configuration is never reused silently.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use quantum_bouncer::classical::{timescales, Timescales};
use quantum_bouncer::evolution::Evolution;
use quantum_bouncer::spectrum::{bouncer_basis, Basis};
use quantum_bouncer::wavepacket::{project, project_auto, CoefficientSet, PacketSpec};
use quantum_bouncer::UnitSystem;

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Cache,
    Computed,
}

pub struct Session {
    pub config: RunConfig,
    pub units: UnitSystem,
    pub spec: PacketSpec,
    pub basis: Basis,
    pub coefficients: CoefficientSet,
    pub source: Source,
}

pub fn basis_path(cache: &Path) -> PathBuf {
    cache.with_extension("basis")
}

fn packet_line(spec: &PacketSpec) -> String {
    format!("# packet z0={} dz0={} p0={}", spec.z0, spec.dz0, spec.p0)
}

impl Session {
    /// Reuses a matching cache when there is one. With `no_compute` a missing
    /// or mismatched cache is an error instead of a reason to recompute.
    pub fn open(config: &RunConfig, no_compute: bool) -> Result<Self> {
        let units = UnitSystem::natural();
        let spec = config.spec()?;
        let cache = config.cache_path();
        match read_cache(&cache, config, &spec) {
            Ok(Some((basis, coefficients))) => {
                log::info!("using cached coefficients from {}", cache.display());
                return Ok(Self {
                    config: config.clone(),
                    units,
                    spec,
                    basis,
                    coefficients,
                    source: Source::Cache,
                });
            }
            Ok(None) if no_compute => {
                bail!("cache miss: no coefficients at {}", cache.display())
            }
            Ok(None) => {}
            Err(e) if no_compute => return Err(e),
            Err(e) => log::warn!("ignoring cache: {e:#}"),
        }
        let (basis, coefficients) = match config.n_max {
            Some(n) => {
                let basis = bouncer_basis(&units, n)?;
                let cs = project(&spec, &basis, config.tol)?;
                (basis, cs)
            }
            None => project_auto(&spec, &units, config.tol)?,
        };
        write_cache(&cache, &spec, &basis, &coefficients)?;
        Ok(Self {
            config: config.clone(),
            units,
            spec,
            basis,
            coefficients,
            source: Source::Computed,
        })
    }

    pub fn evolution(&self) -> Result<Evolution> {
        Ok(Evolution::new(&self.basis, &self.coefficients)?)
    }

    pub fn timescales(&self) -> Timescales {
        timescales(&self.spec, &self.units)
    }
}

fn read_cache(
    cache: &Path,
    config: &RunConfig,
    spec: &PacketSpec,
) -> Result<Option<(Basis, CoefficientSet)>> {
    let table = basis_path(cache);
    if !cache.exists() || !table.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(cache).with_context(|| format!("reading {}", cache.display()))?;
    let wanted = packet_line(spec);
    if !text.lines().any(|l| l.trim() == wanted) {
        bail!(
            "stale cache {}: packet differs from `{}`",
            cache.display(),
            &wanted[2..]
        );
    }
    let basis = Basis::load(&table)?;
    if let Some(n) = config.n_max {
        if basis.len() != n {
            bail!(
                "stale cache {}: basis has {} states, {n} requested",
                cache.display(),
                basis.len()
            );
        }
    }
    let cs =
        CoefficientSet::read(BufReader::new(text.as_bytes()), &basis).map_err(|e| match e {
            quantum_bouncer::Error::StaleCache {
                expected, found, ..
            } => quantum_bouncer::Error::StaleCache {
                path: cache.to_path_buf(),
                expected,
                found,
            },
            e => e,
        })?;
    if cs.tol() != config.tol {
        bail!(
            "stale cache {}: truncated at tol {:e}, {:e} requested",
            cache.display(),
            cs.tol(),
            config.tol
        );
    }
    Ok(Some((basis, cs)))
}

fn write_cache(cache: &Path, spec: &PacketSpec, basis: &Basis, cs: &CoefficientSet) -> Result<()> {
    if let Some(dir) = cache.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    basis.save(basis_path(cache))?;
    let mut buf = Vec::new();
    writeln!(buf, "{}", packet_line(spec))?;
    cs.write(&mut buf)?;
    fs::write(cache, buf).with_context(|| format!("writing {}", cache.display()))?;
    Ok(())
}
