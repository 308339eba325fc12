use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use bouncer_cli::config::Overrides;
use bouncer_cli::{figures, report, spectrum, RunConfig, Session};
use clap::{Args, Parser, Subcommand};

/// Quantum bouncer: wave packets above a hard floor in uniform gravity.
#[derive(Parser)]
#[command(name = "bouncer", version)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Initial packet height.
    #[arg(long, global = true)]
    z0: Option<f64>,
    /// Initial position spread.
    #[arg(long, global = true)]
    dz0: Option<f64>,
    /// Initial mean momentum.
    #[arg(long, global = true)]
    p0: Option<f64>,
    /// Number of energy levels; chosen from the packet when omitted.
    #[arg(long, global = true)]
    nmax: Option<usize>,
    /// Coefficient truncation tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output directory [env: BOUNCER_OUT].
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Coefficient cache file [default: <out>/coefficients.txt].
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,
    /// key = value configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Fail instead of computing when the cache is missing or stale.
    #[arg(long, global = true)]
    no_compute: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Energy table and basis verification.
    Spectrum,
    /// Project the packet and cache the coefficients.
    Project,
    /// Write the CSV bundle for one figure.
    Fig {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=7))]
        figure: u8,
    },
    /// Timescales, plateaus and revival checked against tolerances.
    Report,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let o = &cli.opts;
    let flags = Overrides {
        z0: o.z0,
        dz0: o.dz0,
        p0: o.p0,
        n_max: o.nmax,
        tol: o.tol,
        out: o.out.clone(),
        cache: o.cache.clone(),
        ..Overrides::default()
    };
    let config = RunConfig::load(&flags, o.config.as_deref())?;
    match cli.command {
        Command::Spectrum => {
            let r = spectrum::run(&config)?;
            print!("{r}");
            Ok(verdict(r.passed()))
        }
        Command::Project => {
            let s = Session::open(&config, o.no_compute)?;
            let cs = &s.coefficients;
            let mut csv = format!("# basis {}\nn,energy,re,im,abs\n", cs.basis_id());
            for (k, (c, e)) in cs.coeffs().iter().zip(cs.energies()).enumerate() {
                writeln!(
                    csv,
                    "{},{e:.15e},{:.15e},{:.15e},{:.15e}",
                    k + 1,
                    c.re,
                    c.im,
                    c.norm()
                )?;
            }
            fs::create_dir_all(&config.out)?;
            let path = config.out.join("coefficients.csv");
            fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            let (n, peak) = cs.peak();
            println!("levels retained: {}", cs.len());
            println!("norm: {:.12}", cs.norm());
            println!("largest coefficient: |c_{n}| = {peak:.6}");
            println!("cache: {}", config.cache_path().display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Fig { figure } => {
            let s = Session::open(&config, o.no_compute)?;
            let dir = figures::render(&s, figure)?;
            println!("{}", dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Report => {
            let s = Session::open(&config, o.no_compute)?;
            let r = report::run(&s)?;
            fs::create_dir_all(&config.out)?;
            fs::write(config.out.join("report.txt"), r.to_string())?;
            print!("{r}");
            Ok(verdict(r.passed()))
        }
    }
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
