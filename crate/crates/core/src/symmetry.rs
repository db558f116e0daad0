//! Spectral symmetries of the butterflies, as computable comparisons.
//!
//! Each claim pairs the θ-aggregated quasi-energy multiset at one rational
//! `ħ̃/2π` with the multiset of a partner configuration and reports the
//! circular multiset distance between the two.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::spectrum_set_distance;
use crate::bloch::spectrum_over_theta;
use crate::lattice::{gcd, EffPlanck, Rational};
use crate::model::{ModelKind, ModelSpec};
use crate::{Error, Result};

/// Default agreement tolerance for spectrum comparisons.
pub const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryClaim {
    /// KHM spectrum at `ħ` equals the spectrum at `ħ + 2π`.
    KhmPeriod,
    /// KHM spectrum at `ħ` equals the spectrum at `2π − ħ`.
    KhmReflection,
    /// Resonant DKRM spectrum at `ħ̃` equals the spectrum at `ħ̃ + 4π`.
    DkrmPeriod,
    /// Resonant DKRM spectrum at `ħ̃` equals the spectrum at `4π − ħ̃`.
    DkrmReflection,
    /// Spectrum unchanged when the two kick strengths are exchanged.
    Swap,
}

impl SymmetryClaim {
    pub const ALL: [SymmetryClaim; 5] = [
        SymmetryClaim::KhmPeriod,
        SymmetryClaim::KhmReflection,
        SymmetryClaim::DkrmPeriod,
        SymmetryClaim::DkrmReflection,
        SymmetryClaim::Swap,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SymmetryClaim::KhmPeriod => "khm-period",
            SymmetryClaim::KhmReflection => "khm-reflection",
            SymmetryClaim::DkrmPeriod => "dkrm-period",
            SymmetryClaim::DkrmReflection => "dkrm-reflection",
            SymmetryClaim::Swap => "swap",
        }
    }
}

impl fmt::Display for SymmetryClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One symmetry comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryRequest {
    pub claim: SymmetryClaim,
    /// Model family for [`SymmetryClaim::Swap`]; the other claims fix it.
    pub kind: ModelKind,
    pub ratio1: f64,
    pub ratio2: f64,
    /// `ħ̃/2π` of the reference spectrum.
    pub rational: Rational,
    pub theta_count: usize,
    /// Relative change applied to the partner's second kick ratio; zero for
    /// a genuine check, non-zero for negative controls.
    pub perturbation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryCheck {
    pub request: SymmetryRequest,
    /// `ħ̃/2π` of the partner spectrum.
    pub partner: Rational,
    pub distance: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn rational_sum(a: Rational, b: Rational) -> Rational {
    let (n, d) = (a.num() * b.den() + b.num() * a.den(), a.den() * b.den());
    let g = gcd(n, d);
    Rational::from_coprime(n / g, d / g)
}

/// `k - r` for a whole number `k > r`.
fn rational_reflect(k: u64, r: Rational) -> Result<Rational> {
    let n = (k * r.den()).checked_sub(r.num()).filter(|&n| n > 0);
    n.map(|n| Rational::from_coprime(n, r.den()))
        .ok_or_else(|| Error::invalid(format!("reflection partner of {r} about {k}/2 is not positive")))
}

/// `(ratio1, ratio2, ħ̃/2π)` of one side of a claim.
type Side = (f64, f64, Rational);

/// Model family, original side and partner side of a claim.
fn partner_of(req: &SymmetryRequest) -> Result<(ModelKind, Side, Side)> {
    let one = Rational::from_coprime(1, 1);
    let two = Rational::from_coprime(2, 1);
    let (r1, r2, r) = (req.ratio1, req.ratio2, req.rational);
    let (kind, partner) = match req.claim {
        SymmetryClaim::KhmPeriod => (ModelKind::Khm, (r1, r2, rational_sum(r, one))),
        SymmetryClaim::KhmReflection => (ModelKind::Khm, (r1, r2, rational_reflect(1, r)?)),
        SymmetryClaim::DkrmPeriod => (ModelKind::ResonantDkrm, (r1, r2, rational_sum(r, two))),
        SymmetryClaim::DkrmReflection => (ModelKind::ResonantDkrm, (r1, r2, rational_reflect(2, r)?)),
        SymmetryClaim::Swap => (req.kind, (r2, r1, r)),
    };
    let partner = (partner.0, partner.1 * (1.0 + req.perturbation), partner.2);
    Ok((kind, (r1, r2, r), partner))
}

/// Computes both spectra of a claim and compares them.
pub fn check_symmetry(req: &SymmetryRequest) -> Result<SymmetryCheck> {
    check_symmetry_with_tol(req, SYMMETRY_TOL)
}

pub fn check_symmetry_with_tol(req: &SymmetryRequest, tolerance: f64) -> Result<SymmetryCheck> {
    if req.theta_count == 0 {
        return Err(Error::invalid("theta_count must be >= 1"));
    }
    if req.rational.num() == 0 {
        return Err(Error::invalid("ħ̃/2π must be positive"));
    }
    let (kind, base, partner) = partner_of(req)?;
    let spectrum = |(a, b, r): (f64, f64, Rational)| -> Result<Vec<f64>> {
        let model = ModelSpec::at_ratios(kind, a, b, EffPlanck::two_pi_times(r)?)?;
        spectrum_over_theta(&model, req.theta_count)
    };
    let a = spectrum(base)?;
    let b = spectrum(partner)?;
    let distance = if a.len() == b.len() { spectrum_set_distance(&a, &b)? } else { f64::INFINITY };
    Ok(SymmetryCheck { request: *req, partner: partner.2, distance, tolerance, passed: distance < tolerance })
}
