//! `kharper`: butterflies, diffusion runs, phase portraits, fractal
//! dimensions and symmetry checks from one JSON configuration.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 configuration error,
//! 3 resource exhaustion, 4 numerical failure, 5 a symmetry check failed.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};

use config::{Command, Hbar, Kind, ModelConfig, RunConfig, WORKERS_ENV};

#[derive(Parser)]
#[command(name = "kharper", version, about = "Kicked Harper and resonant double kicked rotor runs")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Quasi-energy butterfly over rational ħ̃ at fixed kick-to-ħ̃ ratios.
    Butterfly(Overrides),
    /// Momentum-variance growth from a delta state.
    Evolve(Overrides),
    /// Classical phase portrait.
    Classical(Overrides),
    /// Box-counting dimension of the spectrum at one rational ħ̃.
    Fractal(Overrides),
    /// Periodicity, reflection and swap checks on spectra.
    CheckSymmetries(Overrides),
    /// Run whichever command the config file names.
    Run(Overrides),
}

/// Flags overriding top-level config fields.
#[derive(Args, Default)]
struct Overrides {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path prefix.
    #[arg(long)]
    output: Option<String>,
    /// Worker threads (overrides the KHARPER_WORKERS environment variable).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    k2: Option<f64>,
    /// A real, or "2pi*num/den" for an exact rational.
    #[arg(long)]
    hbar: Option<String>,
    #[arg(long)]
    nu: Option<u32>,
    #[arg(long)]
    mu: Option<u32>,
    #[arg(long)]
    ratio1: Option<f64>,
    #[arg(long)]
    ratio2: Option<f64>,
    #[arg(long)]
    s_max: Option<u64>,
    #[arg(long)]
    theta_count: Option<usize>,
    #[arg(long)]
    n_steps: Option<u64>,
    #[arg(long)]
    record_every: Option<u64>,
    #[arg(long)]
    lattice_cap: Option<usize>,
}

/// Marks an error as a configuration problem (exit code 2).
#[derive(Debug)]
pub struct ConfigError(anyhow::Error);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {:#}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(e: anyhow::Error) -> anyhow::Error {
    ConfigError(e).into()
}

/// Some symmetry checks did not hold (exit code 5).
#[derive(Debug)]
pub struct CheckFailed(pub usize);

impl fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} symmetry check(s) failed", self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() || cause.is::<serde_json::Error>() {
            return 2;
        }
        if cause.is::<CheckFailed>() {
            return 5;
        }
        if let Some(e) = cause.downcast_ref::<kharper::Error>() {
            return match e {
                kharper::Error::InvalidArgument(_) => 2,
                kharper::Error::ResourceExhausted(_) | kharper::Error::LatticeOverflow { .. } => 3,
                kharper::Error::NumericalFailure(_) | kharper::Error::Internal(_) => 4,
            };
        }
    }
    1
}

fn apply_overrides(cfg: &mut RunConfig, o: &Overrides) -> Result<()> {
    if let Some(kind) = o.kind {
        match &mut cfg.model {
            Some(m) => m.kind = kind,
            None => cfg.model = Some(ModelConfig { kind, k1: None, k2: None, hbar: None, nu: None, mu: None }),
        }
    }
    let model_flags = o.k1.is_some() || o.k2.is_some() || o.hbar.is_some() || o.nu.is_some() || o.mu.is_some();
    if model_flags {
        let m = cfg.model.as_mut().ok_or_else(|| anyhow!("--k1/--k2/--hbar/--nu/--mu need a model kind"))?;
        if let Some(v) = o.k1 {
            m.k1 = Some(v);
        }
        if let Some(v) = o.k2 {
            m.k2 = Some(v);
        }
        if let Some(h) = &o.hbar {
            m.hbar = Some(h.parse::<Hbar>()?);
        }
        if let Some(v) = o.nu {
            m.nu = Some(v);
        }
        if let Some(v) = o.mu {
            m.mu = Some(v);
        }
    }
    macro_rules! take {
        ($($field:ident),*) => {
            $(if o.$field.is_some() {
                cfg.$field = o.$field.clone();
            })*
        };
    }
    take!(output, ratio1, ratio2, s_max, theta_count, n_steps, record_every, lattice_cap);
    Ok(())
}

/// `--workers` beats the environment variable, which beats the config.
fn resolve_workers(flag: Option<usize>, cfg: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| anyhow!("{WORKERS_ENV} must be a positive integer, got {v:?}"))?;
        if n == 0 {
            return Err(anyhow!("{WORKERS_ENV} must be >= 1"));
        }
        return Ok(Some(n));
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let (requested, o) = match cli.command {
        Sub::Butterfly(o) => (Some(Command::Butterfly), o),
        Sub::Evolve(o) => (Some(Command::Evolve), o),
        Sub::Classical(o) => (Some(Command::Classical), o),
        Sub::Fractal(o) => (Some(Command::Fractal), o),
        Sub::CheckSymmetries(o) => (Some(Command::CheckSymmetries), o),
        Sub::Run(o) => (None, o),
    };
    let (cfg, command) = (|| -> Result<_> {
        let mut cfg = match &o.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let command = match (requested, cfg.command) {
            (Some(a), Some(b)) if a != b => return Err(anyhow!("config names command {b} but {a} was requested")),
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(anyhow!("`run` needs a config with a command field")),
        };
        apply_overrides(&mut cfg, &o)?;
        cfg.validate()?;
        if let Some(n) = resolve_workers(o.workers, cfg.workers)? {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        }
        Ok((cfg, command))
    })()
    .map_err(config_error)?;

    match command {
        Command::Butterfly => commands::butterfly(&cfg),
        Command::Evolve => commands::evolve(&cfg),
        Command::Classical => commands::classical(&cfg),
        Command::Fractal => commands::fractal(&cfg),
        Command::CheckSymmetries => commands::check_symmetries(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
