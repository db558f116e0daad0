//! Quasi-energy spectra at rational `ħ̃/2π = r/s`.
//!
//! At rational ħ̃ every diagonal factor of the Floquet map is periodic in
//! the momentum index with some period `P`, while the kicks are translation
//! invariant. Bloch states `ψ_{l+P} = e^{-iθ} ψ_l` then reduce the map to a
//! `P×P` unitary for each `θ`.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::floquet::{floquet_factors, Factor};
use crate::kick::{kick_coefficients, DEFAULT_KICK_TOL};
use crate::lattice::{farey_sequence, lcm, EffPlanck, Rational};
use crate::model::{ModelKind, ModelSpec};
use crate::{Error, Result};

/// Tolerance on `‖U†U − I‖_max` for a reduced Floquet matrix.
pub const UNITARITY_TOL: f64 = 1e-8;

/// Tolerance on `| |λ| − 1 |` for eigenvalues of a reduced Floquet matrix.
pub const MODULUS_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct BlochMatrix {
    pub period: usize,
    pub theta: f64,
    pub entries: Mat<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub hbar_eff: EffPlanck,
    pub theta: f64,
    /// Quasi-energy in `(-π, π]`.
    pub eps: f64,
}

/// Spectrum points collected over a scan in ħ̃ at fixed kick ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSet {
    pub kind: ModelKind,
    pub ratio1: f64,
    pub ratio2: f64,
    pub points: Vec<SpectrumPoint>,
}

fn rational_tag(model: &ModelSpec) -> Result<Rational> {
    model
        .hbar_eff()
        .rational()
        .ok_or_else(|| Error::invalid("Bloch reduction needs ħ̃ = 2π·r/s with an exact rational tag"))
}

fn period_candidates(kind: ModelKind, s: u64) -> Vec<u64> {
    match kind {
        ModelKind::Khm | ModelKind::ResonantDkrm => vec![s, 2 * s],
        ModelKind::GeneralResonanceDkrm { mu, .. } => {
            let base = lcm(s, mu as u64);
            vec![base, 2 * base, 4 * base]
        }
    }
}

/// Smallest candidate period of the diagonal factors, each candidate checked
/// site by site over a window of `4P`.
pub fn lattice_period(model: &ModelSpec) -> Result<usize> {
    let r = rational_tag(model)?;
    let diagonals: Vec<Factor> =
        floquet_factors(model).into_iter().filter(|f| !matches!(f, Factor::Kick { .. })).collect();
    for cand in period_candidates(model.kind(), r.den()) {
        let p = cand as i64;
        let periodic =
            diagonals.iter().all(|f| (0..4 * p).all(|l| f.diagonal(l + p) == f.diagonal(l)));
        if periodic {
            return Ok(cand as usize);
        }
    }
    Err(Error::Internal(format!(
        "no candidate lattice period verified for {} at ħ̃/2π = {r}",
        model.kind().label()
    )))
}

/// `g(d) = Σ_n c_{d+nP} e^{inθ}` for `d ∈ (-P, P)`, indexed by `d + P - 1`.
fn folded_kick(x: f64, period: usize, theta: f64) -> Result<Vec<Complex64>> {
    let c = kick_coefficients(x, DEFAULT_KICK_TOL)?;
    let m = c.cutoff() as i64;
    let p = period as i64;
    let folded = (1 - p..p)
        .map(|d| {
            // n such that |d + nP| <= M
            let n_lo = (-m - d).div_euclid(p) - 1;
            let n_hi = (m - d).div_euclid(p) + 1;
            (n_lo..=n_hi)
                .map(|n| c.get(d + n * p) * Complex64::from_polar(1.0, n as f64 * theta))
                .sum()
        })
        .collect();
    Ok(folded)
}

/// Reduced Floquet matrix at Bloch phase `theta`.
pub fn build_bloch_matrix(model: &ModelSpec, theta: f64) -> Result<BlochMatrix> {
    let period = lattice_period(model)?;
    let mut u: Option<Mat<Complex64>> = None;
    for f in floquet_factors(model) {
        u = Some(match f {
            Factor::Kick { x } => {
                let g = folded_kick(x, period, theta)?;
                let k = Mat::from_fn(period, period, |a, b| g[a + period - 1 - b]);
                match u {
                    Some(prev) => &k * &prev,
                    None => k,
                }
            }
            diag => {
                let d: Vec<Complex64> = (0..period).map(|l| diag.diagonal(l as i64).unwrap()).collect();
                match u {
                    Some(prev) => Mat::from_fn(period, period, |a, b| d[a] * prev[(a, b)]),
                    None => Mat::from_fn(period, period, |a, b| if a == b { d[a] } else { Complex64::new(0.0, 0.0) }),
                }
            }
        });
    }
    let entries = u.unwrap_or_else(|| Mat::identity(period, period));

    let gram = entries.adjoint() * &entries;
    let mut dev: f64 = 0.0;
    for a in 0..period {
        for b in 0..period {
            let target = if a == b { 1.0 } else { 0.0 };
            dev = dev.max((gram[(a, b)] - Complex64::new(target, 0.0)).norm());
        }
    }
    if !(dev < UNITARITY_TOL) {
        return Err(Error::NumericalFailure(format!(
            "reduced Floquet matrix not unitary: max |U†U - I| = {dev:e} (P = {period}, θ = {theta})"
        )));
    }
    Ok(BlochMatrix { period, theta, entries })
}

/// `ε = -arg λ` in `(-π, π]`.
pub fn quasienergy_of(lambda: Complex64) -> f64 {
    let e = -lambda.arg();
    if e <= -PI {
        e + 2.0 * PI
    } else {
        e
    }
}

/// Sorted quasi-energies of a reduced Floquet matrix.
pub fn quasienergies(m: &BlochMatrix) -> Result<Vec<f64>> {
    let eig = m
        .entries
        .eigenvalues()
        .map_err(|e| Error::NumericalFailure(format!("eigensolver failed: {e:?} (θ = {})", m.theta)))?;
    let mut out = Vec::with_capacity(eig.len());
    for lambda in eig {
        let r = lambda.norm();
        if !((r - 1.0).abs() <= MODULUS_TOL) {
            return Err(Error::NumericalFailure(format!("eigenvalue modulus {r} off the unit circle (θ = {})", m.theta)));
        }
        out.push(quasienergy_of(lambda));
    }
    out.sort_by(|a, b| a.total_cmp(b));
    Ok(out)
}

/// `θ_j = 2πj/n`, `j = 0..n`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

/// Quasi-energies aggregated over the uniform θ grid, sorted.
pub fn spectrum_over_theta(model: &ModelSpec, theta_count: usize) -> Result<Vec<f64>> {
    let per_theta = map_tasks(theta_grid(theta_count), |theta| {
        build_bloch_matrix(model, theta).and_then(|m| quasienergies(&m))
    })?;
    let mut all: Vec<f64> = per_theta.into_iter().flatten().collect();
    all.sort_by(|a, b| a.total_cmp(b));
    Ok(all)
}

#[cfg(feature = "parallel")]
fn map_tasks<T, R, F>(tasks: Vec<T>, f: F) -> Result<Vec<R>>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R> + Sync + Send,
{
    use rayon::prelude::*;
    tasks.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_tasks<T, R, F>(tasks: Vec<T>, f: F) -> Result<Vec<R>>
where
    F: Fn(T) -> Result<R>,
{
    tasks.into_iter().map(f).collect()
}

/// Rationals `r` with denominator at most `s_max` and `2πr` in `(lo, hi]`.
pub fn scan_rationals(s_max: u64, window: (f64, f64)) -> Vec<Rational> {
    let (lo, hi) = (window.0 / (2.0 * PI), window.1 / (2.0 * PI));
    let base = farey_sequence(s_max);
    let k_lo = lo.floor().max(0.0) as u64;
    let k_hi = hi.ceil().max(0.0) as u64;
    let mut out = Vec::new();
    for k in k_lo..=k_hi {
        for q in &base {
            let r = Rational::from_coprime(q.num() + k * q.den(), q.den());
            let v = r.to_f64();
            if v > lo && v <= hi {
                out.push(r);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Default ħ̃ window: one period of the spectrum.
pub fn default_window(kind: ModelKind) -> (f64, f64) {
    (0.0, kind.hbar_period())
}

/// Quasi-energies over rational ħ̃ in `hbar_window` at fixed kick-to-ħ̃
/// ratios, for each θ of a uniform grid.
pub fn butterfly_scan(
    kind: ModelKind,
    ratio1: f64,
    ratio2: f64,
    s_max: u64,
    theta_count: usize,
    hbar_window: (f64, f64),
) -> Result<SpectrumSet> {
    if s_max == 0 || theta_count == 0 {
        return Err(Error::invalid("s_max and theta_count must be >= 1"));
    }
    if !(hbar_window.0 >= 0.0 && hbar_window.1 > hbar_window.0) {
        return Err(Error::invalid(format!("bad ħ̃ window {hbar_window:?}")));
    }
    let thetas = theta_grid(theta_count);
    let mut tasks = Vec::new();
    for r in scan_rationals(s_max, hbar_window) {
        let hbar = EffPlanck::two_pi_times(r)?;
        let model = ModelSpec::at_ratios(kind, ratio1, ratio2, hbar)?;
        for &theta in &thetas {
            tasks.push((model, theta));
        }
    }
    let chunks = map_tasks(tasks, |(model, theta)| {
        let hbar = model.hbar_eff();
        build_bloch_matrix(&model, theta)
            .and_then(|m| quasienergies(&m))
            .map(|eps| eps.into_iter().map(|e| SpectrumPoint { hbar_eff: hbar, theta, eps: e }).collect::<Vec<_>>())
            .map_err(|e| match e {
                Error::NumericalFailure(msg) => {
                    Error::NumericalFailure(format!("{msg} at ħ̃ = {} (2π·{}), θ = {theta}", hbar.value(), hbar.rational().unwrap()))
                }
                other => other,
            })
    })?;
    let mut points: Vec<SpectrumPoint> = chunks.into_iter().flatten().collect();
    points.sort_by(|a, b| {
        let ra = a.hbar_eff.rational().unwrap();
        let rb = b.hbar_eff.rational().unwrap();
        ra.cmp(&rb).then(a.theta.total_cmp(&b.theta)).then(a.eps.total_cmp(&b.eps))
    });
    Ok(SpectrumSet { kind, ratio1, ratio2, points })
}
