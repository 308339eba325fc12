//! Run configuration: built-in defaults, an optional `key = value` file,
//! the `BOUNCER_OUT` environment variable and command-line flags.
//!
//! Precedence, highest first: flag, config file, environment, default.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use quantum_bouncer::wavepacket::{PacketSpec, DEFAULT_TOL};
use sha2::{Digest, Sha256};

pub const OUT_ENV: &str = "BOUNCER_OUT";
pub const DEFAULT_OUT: &str = "bouncer-out";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub z0: f64,
    pub dz0: f64,
    pub p0: f64,
    /// Basis size; `None` picks one from the packet.
    pub n_max: Option<usize>,
    pub tol: f64,
    /// Classical periods covered by figures 3 and 4.
    pub periods: f64,
    /// Span of figures 5 and 6, in revival times.
    pub long_span: f64,
    pub out: PathBuf,
    pub cache: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            z0: 25.0,
            dz0: 1.0,
            p0: 0.0,
            n_max: None,
            tol: DEFAULT_TOL,
            periods: 8.0,
            long_span: 2.2,
            out: PathBuf::from(DEFAULT_OUT),
            cache: None,
        }
    }
}

/// A partial configuration from one source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub z0: Option<f64>,
    pub dz0: Option<f64>,
    pub p0: Option<f64>,
    pub n_max: Option<usize>,
    pub tol: Option<f64>,
    pub periods: Option<f64>,
    pub long_span: Option<f64>,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = &self.$f { cfg.$f = v.clone(); } )* };
        }
        take!(z0, dz0, p0, tol, periods, long_span, out);
        if self.n_max.is_some() {
            cfg.n_max = self.n_max;
        }
        if self.cache.is_some() {
            cfg.cache = self.cache.clone();
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Overrides> {
    let mut o = Overrides::default();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = k + 1;
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {lineno}: expected `key = value`, got `{line}`");
        };
        let (key, value) = (key.trim(), value.trim());
        let num = || -> Result<f64> {
            value
                .parse()
                .with_context(|| format!("config line {lineno}: `{value}` is not a number"))
        };
        match key {
            "z0" => o.z0 = Some(num()?),
            "dz0" => o.dz0 = Some(num()?),
            "p0" => o.p0 = Some(num()?),
            "tol" => o.tol = Some(num()?),
            "periods" => o.periods = Some(num()?),
            "long_span" => o.long_span = Some(num()?),
            "nmax" | "n_max" => {
                o.n_max = Some(if value == "auto" {
                    0
                } else {
                    value.parse().with_context(|| {
                        format!("config line {lineno}: `{value}` is not a level count")
                    })?
                })
            }
            "out" => o.out = Some(PathBuf::from(value)),
            "cache" => o.cache = Some(PathBuf::from(value)),
            _ => bail!("config line {lineno}: unknown key `{key}`"),
        }
    }
    Ok(o)
}

impl RunConfig {
    /// Layers the sources in precedence order and validates the result.
    pub fn resolve(
        flags: &Overrides,
        file: Option<&Overrides>,
        env_out: Option<PathBuf>,
    ) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(out) = env_out {
            cfg.out = out;
        }
        if let Some(f) = file {
            f.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        // `nmax = auto` in a file is stored as zero
        if cfg.n_max == Some(0) {
            cfg.n_max = None;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads the optional config file and `BOUNCER_OUT`, then resolves.
    pub fn load(flags: &Overrides, file: Option<&Path>) -> Result<Self> {
        let file = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                Some(parse_config(&text).with_context(|| format!("in {}", p.display()))?)
            }
            None => None,
        };
        let env_out = std::env::var_os(OUT_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from);
        Self::resolve(flags, file.as_ref(), env_out)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec()?;
        if !(self.tol > 0.0 && self.tol < 1.0) {
            bail!("tol must lie in (0, 1), got {}", self.tol);
        }
        if !(self.periods > 0.0 && self.periods.is_finite()) {
            bail!("periods must be positive, got {}", self.periods);
        }
        if !(self.long_span > 0.0 && self.long_span.is_finite()) {
            bail!("long_span must be positive, got {}", self.long_span);
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<PacketSpec> {
        Ok(PacketSpec::new(self.z0, self.dz0, self.p0)?)
    }

    pub fn cache_path(&self) -> PathBuf {
        self.cache
            .clone()
            .unwrap_or_else(|| self.out.join("coefficients.txt"))
    }

    /// The physics-relevant settings as stable `key=value` text. Output
    /// locations are left out so that moving a run does not change its hash.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let n = self.n_max.map_or("auto".to_string(), |n| n.to_string());
        writeln!(s, "z0={}", self.z0).unwrap();
        writeln!(s, "dz0={}", self.dz0).unwrap();
        writeln!(s, "p0={}", self.p0).unwrap();
        writeln!(s, "nmax={n}").unwrap();
        writeln!(s, "tol={:e}", self.tol).unwrap();
        writeln!(s, "periods={}", self.periods).unwrap();
        writeln!(s, "long_span={}", self.long_span).unwrap();
        s
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
