//! JSON run configuration.
//!
//! One document describes a run; command-line flags override its top-level
//! fields. Unknown keys are rejected at every level.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use kharper::lattice::{reduce_rational, EffPlanck, Rational};
use kharper::model::{ModelKind, ModelSpec};
use kharper::symmetry::SymmetryClaim;
use serde::{de, Deserialize, Deserializer, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Butterfly,
    Evolve,
    Classical,
    Fractal,
    CheckSymmetries,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Butterfly => "butterfly",
            Command::Evolve => "evolve",
            Command::Classical => "classical",
            Command::Fractal => "fractal",
            Command::CheckSymmetries => "check-symmetries",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Khm,
    ResonantDkrm,
    GeneralResonanceDkrm,
}

/// Effective Planck constant: a raw real, or `"2pi*num/den"` which also
/// carries the exact rational needed for spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hbar {
    Real(f64),
    TwoPiRational(Rational),
}

impl Hbar {
    pub fn to_eff(self) -> Result<EffPlanck> {
        Ok(match self {
            Hbar::Real(v) => EffPlanck::new(v)?,
            Hbar::TwoPiRational(r) => EffPlanck::two_pi_times(r)?,
        })
    }
}

impl FromStr for Hbar {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(rest) = t.strip_prefix("2pi*").or_else(|| t.strip_prefix("2π*")) {
            return Ok(Hbar::TwoPiRational(parse_rational(rest)?));
        }
        if t == "2pi" || t == "2π" {
            return Ok(Hbar::TwoPiRational(reduce_rational(1, 1)?));
        }
        let v: f64 = t.parse().map_err(|_| anyhow!("bad hbar {s:?}: expected a number or \"2pi*num/den\""))?;
        Ok(Hbar::Real(v))
    }
}

impl<'de> Deserialize<'de> for Hbar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Hbar::Real(v)),
            Raw::Text(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

/// `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: i64 = n.parse().with_context(|| format!("bad rational numerator in {s:?}"))?;
    let d: i64 = d.parse().with_context(|| format!("bad rational denominator in {s:?}"))?;
    Ok(reduce_rational(n, d)?)
}

fn deserialize_rational<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse_rational(&s).map_err(de::Error::custom)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: Kind,
    #[serde(default)]
    pub k1: Option<f64>,
    #[serde(default)]
    pub k2: Option<f64>,
    #[serde(default)]
    pub hbar: Option<Hbar>,
    #[serde(default)]
    pub nu: Option<u32>,
    #[serde(default)]
    pub mu: Option<u32>,
}

impl ModelConfig {
    pub fn model_kind(&self) -> Result<ModelKind> {
        Ok(match self.kind {
            Kind::Khm => ModelKind::Khm,
            Kind::ResonantDkrm => ModelKind::ResonantDkrm,
            Kind::GeneralResonanceDkrm => {
                let (Some(nu), Some(mu)) = (self.nu, self.mu) else {
                    bail!("general-resonance-dkrm needs nu and mu");
                };
                ModelKind::GeneralResonanceDkrm { nu, mu }
            }
        })
    }

    pub fn to_spec(&self) -> Result<ModelSpec> {
        let kind = self.model_kind()?;
        let k1 = self.k1.ok_or_else(|| anyhow!("model.k1 is required"))?;
        let k2 = self.k2.ok_or_else(|| anyhow!("model.k2 is required"))?;
        let hbar = self.hbar.ok_or_else(|| anyhow!("model.hbar is required"))?.to_eff()?;
        Ok(ModelSpec::new(kind, k1, k2, hbar)?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimConfig {
    pub claim: SymmetryClaim,
    /// `ħ̃/2π` as `"num/den"`.
    #[serde(deserialize_with = "deserialize_rational")]
    pub rational: Rational,
    #[serde(default)]
    pub kind: Option<Kind>,
    #[serde(default)]
    pub ratio1: Option<f64>,
    #[serde(default)]
    pub ratio2: Option<f64>,
    #[serde(default)]
    pub theta_count: Option<usize>,
    #[serde(default)]
    pub perturbation: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub model: Option<ModelConfig>,
    /// Kick-to-ħ̃ ratios for butterflies and default ratios for symmetry claims.
    pub ratio1: Option<f64>,
    pub ratio2: Option<f64>,
    pub s_max: Option<u64>,
    pub theta_count: Option<usize>,
    pub hbar_window: Option<[f64; 2]>,
    pub n_steps: Option<u64>,
    pub record_every: Option<u64>,
    pub fit_window: Option<[u64; 2]>,
    pub lattice_cap: Option<usize>,
    pub scales: Option<Vec<usize>>,
    pub n_orbits: Option<usize>,
    pub n_iter: Option<usize>,
    pub claims: Option<Vec<ClaimConfig>>,
    pub tolerance: Option<f64>,
    pub output: Option<String>,
    pub workers: Option<usize>,
}

pub const DEFAULT_S_MAX: u64 = 50;
pub const DEFAULT_BUTTERFLY_THETAS: usize = 32;
pub const DEFAULT_FRACTAL_THETAS: usize = 64;
pub const DEFAULT_OUTPUT: &str = "kharper";
pub const WORKERS_ENV: &str = "KHARPER_WORKERS";

/// Documented knob ranges.
pub const MAX_S: u64 = 2000;
pub const MAX_THETAS: usize = 4096;
pub const MAX_STEPS: u64 = 100_000_000;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn output_prefix(&self) -> &str {
        self.output.as_deref().unwrap_or(DEFAULT_OUTPUT)
    }

    pub fn model(&self) -> Result<&ModelConfig> {
        self.model.as_ref().ok_or_else(|| anyhow!("a model section is required"))
    }

    /// Range checks shared by all commands.
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = self.s_max {
            if !(1..=MAX_S).contains(&s) {
                bail!("s_max must lie in [1, {MAX_S}], got {s}");
            }
        }
        if let Some(t) = self.theta_count {
            if !(1..=MAX_THETAS).contains(&t) {
                bail!("theta_count must lie in [1, {MAX_THETAS}], got {t}");
            }
        }
        if let Some(n) = self.n_steps {
            if !(1..=MAX_STEPS).contains(&n) {
                bail!("n_steps must lie in [1, {MAX_STEPS}], got {n}");
            }
        }
        if self.record_every == Some(0) {
            bail!("record_every must be >= 1");
        }
        if let Some([lo, hi]) = self.fit_window {
            if !(lo >= 1 && hi > lo) {
                bail!("fit_window must satisfy 1 <= lo < hi, got [{lo}, {hi}]");
            }
        }
        if let Some([lo, hi]) = self.hbar_window {
            if !(lo >= 0.0 && hi > lo && hi <= 8.0 * PI) {
                bail!("hbar_window must satisfy 0 <= lo < hi <= 8π, got [{lo}, {hi}]");
            }
        }
        if let Some(scales) = &self.scales {
            if scales.len() < 4 || scales.iter().any(|&s| s < 2) {
                bail!("scales needs at least four entries >= 2");
            }
        }
        if self.workers == Some(0) {
            bail!("workers must be >= 1");
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                bail!("tolerance must be > 0");
            }
        }
        if self.n_orbits == Some(0) || self.n_iter == Some(0) {
            bail!("n_orbits and n_iter must be >= 1");
        }
        Ok(())
    }
}
