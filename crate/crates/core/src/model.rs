//! Model descriptions shared by the dynamics and spectrum code.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::lattice::EffPlanck;
use crate::{Error, Result};

/// Which one-period Floquet operator to compose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelKind {
    /// `exp(-i L cos(p)/ħ) exp(-i K cos(q)/ħ)`.
    Khm,
    /// Double kicked rotor on the main resonance `Tħ = 4π`.
    ResonantDkrm,
    /// Double kicked rotor on the resonance `Tħ = 4πν/μ`.
    GeneralResonanceDkrm { nu: u32, mu: u32 },
}

impl ModelKind {
    /// `ν/μ` of the resonance, `None` for the KHM.
    pub fn resonance(&self) -> Option<(u32, u32)> {
        match *self {
            ModelKind::Khm => None,
            ModelKind::ResonantDkrm => Some((1, 1)),
            ModelKind::GeneralResonanceDkrm { nu, mu } => Some((nu, mu)),
        }
    }

    /// Period of the spectrum in the effective Planck constant at fixed
    /// kick-to-ħ ratios: 2π for the KHM, 4π for the kicked rotors.
    pub fn hbar_period(&self) -> f64 {
        match self {
            ModelKind::Khm => 2.0 * PI,
            _ => 4.0 * PI,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::Khm => "khm",
            ModelKind::ResonantDkrm => "resonant-dkrm",
            ModelKind::GeneralResonanceDkrm { .. } => "general-resonance-dkrm",
        }
    }
}

/// A Floquet model with its kick strengths and effective Planck constant.
///
/// For the KHM `k1 = K` and `k2 = L`; for the double kicked rotor they are
/// the rescaled kick strengths `K̃₁ = ηK₁`, `K̃₂ = ηK₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    kind: ModelKind,
    k1: f64,
    k2: f64,
    hbar_eff: EffPlanck,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ModelSpec {
    pub fn new(kind: ModelKind, k1: f64, k2: f64, hbar_eff: EffPlanck) -> Result<Self> {
        if !(k1.is_finite() && k2.is_finite() && k1 >= 0.0 && k2 >= 0.0) {
            return Err(Error::invalid(format!("kick strengths must be finite and >= 0, got ({k1}, {k2})")));
        }
        if let ModelKind::GeneralResonanceDkrm { nu, mu } = kind {
            if nu == 0 || mu == 0 || gcd(nu, mu) != 1 {
                return Err(Error::invalid(format!("resonance order {nu}/{mu} must be coprime positive integers")));
            }
        }
        Ok(ModelSpec { kind, k1, k2, hbar_eff })
    }

    pub fn khm(k: f64, l: f64, hbar: EffPlanck) -> Result<Self> {
        Self::new(ModelKind::Khm, k, l, hbar)
    }

    pub fn resonant_dkrm(k1: f64, k2: f64, hbar: EffPlanck) -> Result<Self> {
        Self::new(ModelKind::ResonantDkrm, k1, k2, hbar)
    }

    pub fn general_resonance_dkrm(k1: f64, k2: f64, hbar: EffPlanck, nu: u32, mu: u32) -> Result<Self> {
        Self::new(ModelKind::GeneralResonanceDkrm { nu, mu }, k1, k2, hbar)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn hbar_eff(&self) -> EffPlanck {
        self.hbar_eff
    }

    /// Same model with the two kick strengths exchanged.
    pub fn swapped(&self) -> Self {
        ModelSpec { k1: self.k2, k2: self.k1, ..*self }
    }

    /// Kick strengths `ratio · ħ̃` at a new effective Planck constant.
    pub fn at_ratios(kind: ModelKind, ratio1: f64, ratio2: f64, hbar: EffPlanck) -> Result<Self> {
        let h = hbar.value();
        Self::new(kind, ratio1 * h, ratio2 * h, hbar)
    }
}

/// Laboratory-frame double kicked rotor parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabParams {
    pub k1: f64,
    pub k2: f64,
    /// Kick period.
    pub period: f64,
    /// Delay between the two kick sequences.
    pub eta: f64,
    pub hbar: f64,
    pub nu: u32,
    pub mu: u32,
}

impl LabParams {
    /// Checks the resonance condition `T·ħ = 4πν/μ` and rescales to
    /// `K̃ = ηK`, `ħ̃ = ηħ`.
    pub fn to_model(&self) -> Result<ModelSpec> {
        if !(self.period > 0.0 && self.eta > 0.0 && self.eta < self.period && self.hbar > 0.0) {
            return Err(Error::invalid("lab parameters need T > 0, 0 < η < T, ħ > 0"));
        }
        let target = 4.0 * PI * self.nu as f64 / self.mu.max(1) as f64;
        if ((self.period * self.hbar - target) / target).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "off resonance: T·ħ = {} but 4πν/μ = {target}",
                self.period * self.hbar
            )));
        }
        let hbar = EffPlanck::new(self.eta * self.hbar)?;
        let kind = if (self.nu, self.mu) == (1, 1) {
            ModelKind::ResonantDkrm
        } else {
            ModelKind::GeneralResonanceDkrm { nu: self.nu, mu: self.mu }
        };
        ModelSpec::new(kind, self.eta * self.k1, self.eta * self.k2, hbar)
    }
}
