//! One-period Floquet maps and long-time evolution.
//!
//! Factors are listed in application order (the rightmost operator of the
//! one-period map comes first):
//!
//! | model | factors |
//! |---|---|
//! | KHM | kick `K/ħ`, diagonal `exp(-i (L/ħ) cos(ħ l))` |
//! | resonant DKRM | kick `K̃₁/ħ̃`, phase `τ = ħ̃`, kick `K̃₂/ħ̃`, phase `τ = -ħ̃` |
//! | DKRM on `Tħ = 4πν/μ` | kick `K̃₁/ħ̃`, phase `τ = ħ̃`, kick `K̃₂/ħ̃`, phase `τ = 4πν/μ - ħ̃` |
//!
//! where a quadratic phase multiplies site `l` by `exp(-i τ l²/2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::analysis::DiffusionSeries;
use crate::kick::{kick_coefficients, KickOperator, DEFAULT_KICK_TOL};
use crate::lattice::{edge_mass_of, momentum_variance, EffPlanck, Wavepacket};
use crate::model::{ModelKind, ModelSpec};
use crate::{Error, Result};

/// Edge mass above which a step is considered to have overflowed.
pub const LEAK_THRESHOLD: f64 = 1e-10;

/// Default hard cap on the lattice size during evolution.
pub const DEFAULT_LATTICE_CAP: usize = 1 << 22;

/// Diagonal phase `exp(-i τ l²/2)` on momentum site `l`.
///
/// When `τ` is a rational multiple of π the phase is reduced with integer
/// arithmetic, so it is exactly periodic in `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticPhase {
    /// `τ`.
    pub coeff: f64,
    /// `(n, d)` with `τ = π n / d`.
    pub exact: Option<(i64, i64)>,
    pub description: &'static str,
}

impl QuadraticPhase {
    pub fn new(coeff: f64, description: &'static str) -> Self {
        QuadraticPhase { coeff, exact: None, description }
    }

    /// `τ = π n / d`.
    pub fn pi_rational(n: i64, d: i64, description: &'static str) -> Self {
        assert!(d > 0);
        QuadraticPhase { coeff: PI * n as f64 / d as f64, exact: Some((n, d)), description }
    }

    pub fn site_phase(&self, l: i64) -> Complex64 {
        let angle = match self.exact {
            Some((n, d)) => {
                // -π n l² / (2d), with n l² reduced mod 4d
                let m = (n as i128 * (l as i128) * (l as i128)).rem_euclid(4 * d as i128);
                -PI * m as f64 / (2 * d) as f64
            }
            None => -0.5 * self.coeff * (l as f64) * (l as f64),
        };
        Complex64::from_polar(1.0, angle)
    }
}

/// `exp(-i x cos(ħ l))`, the KHM momentum-space factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarperPhase {
    pub x: f64,
    pub hbar: EffPlanck,
}

impl HarperPhase {
    pub fn site_phase(&self, l: i64) -> Complex64 {
        let c = match self.hbar.rational() {
            Some(r) => {
                let (num, den) = (r.num() as i128, r.den() as i128);
                let m = (num * l as i128).rem_euclid(den);
                (2.0 * PI * m as f64 / den as f64).cos()
            }
            None => (self.hbar.value() * l as f64).cos(),
        };
        Complex64::from_polar(1.0, -self.x * c)
    }
}

/// One factor of a Floquet map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    /// `exp(-i x cos q)`.
    Kick { x: f64 },
    Quadratic(QuadraticPhase),
    Harper(HarperPhase),
}

impl Factor {
    /// Site phase of a diagonal factor, `None` for kicks.
    pub fn diagonal(&self, l: i64) -> Option<Complex64> {
        match self {
            Factor::Kick { .. } => None,
            Factor::Quadratic(p) => Some(p.site_phase(l)),
            Factor::Harper(h) => Some(h.site_phase(l)),
        }
    }
}

/// Factors of the one-period map of `model`, in application order.
pub fn floquet_factors(model: &ModelSpec) -> Vec<Factor> {
    let hbar = model.hbar_eff();
    let h = hbar.value();
    let x1 = model.k1() / h;
    let x2 = model.k2() / h;
    match model.kind() {
        ModelKind::Khm => vec![Factor::Kick { x: x1 }, Factor::Harper(HarperPhase { x: x2, hbar })],
        ModelKind::ResonantDkrm | ModelKind::GeneralResonanceDkrm { .. } => {
            let (nu, mu) = model.kind().resonance().unwrap_or((1, 1));
            let (first, second) = match hbar.rational() {
                Some(r) => {
                    // ħ̃ = π·2r/s and 4πν/μ - ħ̃ = π·(4νs - 2rμ)/(μs)
                    let (r, s) = (r.num() as i64, r.den() as i64);
                    let (nu, mu) = (nu as i64, mu as i64);
                    (
                        QuadraticPhase::pi_rational(2 * r, s, "first free evolution"),
                        QuadraticPhase::pi_rational(4 * nu * s - 2 * r * mu, mu * s, "second free evolution"),
                    )
                }
                None => (
                    QuadraticPhase::new(h, "first free evolution"),
                    QuadraticPhase::new(4.0 * PI * nu as f64 / mu as f64 - h, "second free evolution"),
                ),
            };
            let second = if model.kind() == ModelKind::ResonantDkrm && hbar.rational().is_none() {
                // e^{-i 4π l²/2} = 1 exactly, drop the 4π
                QuadraticPhase::new(-h, "second free evolution")
            } else {
                second
            };
            vec![
                Factor::Kick { x: x1 },
                Factor::Quadratic(first),
                Factor::Kick { x: x2 },
                Factor::Quadratic(second),
            ]
        }
    }
}

/// Returns `exp(-i τ l²/2) ψ_l`.
pub fn apply_quadratic_phase(psi: &Wavepacket, tau: f64) -> Wavepacket {
    let phase = QuadraticPhase::new(tau, "free evolution");
    let mut out = psi.clone();
    let l_min = psi.l_min();
    for (k, a) in out.amps_mut().iter_mut().enumerate() {
        *a *= phase.site_phase(l_min + k as i64);
    }
    out
}

enum Step {
    Kick(KickOperator),
    Diagonal(Vec<Complex64>),
}

/// A Floquet map prepared for a fixed lattice.
pub struct Propagator {
    l_min: i64,
    len: usize,
    steps: Vec<Step>,
    reach: usize,
}

impl Propagator {
    pub fn new(model: &ModelSpec, l_min: i64, len: usize) -> Result<Self> {
        Self::build(floquet_factors(model), false, l_min, len)
    }

    /// Propagator for `U⁻¹`: factors in reverse order, each one inverted.
    pub fn new_inverse(model: &ModelSpec, l_min: i64, len: usize) -> Result<Self> {
        let mut factors = floquet_factors(model);
        factors.reverse();
        Self::build(factors, true, l_min, len)
    }

    fn build(factors: Vec<Factor>, invert: bool, l_min: i64, len: usize) -> Result<Self> {
        let mut planner = FftPlanner::new();
        let mut steps = Vec::new();
        let mut reach = 0;
        for f in factors {
            match f {
                Factor::Kick { x } => {
                    if x == 0.0 {
                        continue;
                    }
                    reach = reach.max(kick_coefficients(x, DEFAULT_KICK_TOL)?.cutoff());
                    let x = if invert { -x } else { x };
                    steps.push(Step::Kick(KickOperator::new(len, x, &mut planner)));
                }
                diag => {
                    let d = (0..len)
                        .map(|k| {
                            let p = diag.diagonal(l_min + k as i64).unwrap();
                            if invert {
                                p.conj()
                            } else {
                                p
                            }
                        })
                        .collect();
                    steps.push(Step::Diagonal(d));
                }
            }
        }
        Ok(Propagator { l_min, len, steps, reach })
    }

    pub fn l_min(&self) -> i64 {
        self.l_min
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Largest kick coupling range in sites.
    pub fn reach(&self) -> usize {
        self.reach
    }

    /// Sites at each edge that count towards the overflow check.
    pub fn edge_margin(&self) -> usize {
        edge_margin(self.len, self.reach)
    }

    pub fn apply(&mut self, amps: &mut [Complex64]) {
        for s in &mut self.steps {
            match s {
                Step::Kick(k) => k.apply(amps),
                Step::Diagonal(d) => {
                    for (a, p) in amps.iter_mut().zip(d.iter()) {
                        *a *= p;
                    }
                }
            }
        }
    }
}

fn edge_margin(len: usize, reach: usize) -> usize {
    (len / 8).max(2 * reach + 1).min(len / 2)
}

/// Applies one period of `model`.
///
/// Fails with [`Error::LatticeOverflow`] when the result has more than
/// [`LEAK_THRESHOLD`] probability near the lattice edges; the caller should
/// grow the lattice and retry.
pub fn apply_floquet(model: &ModelSpec, psi: &Wavepacket) -> Result<Wavepacket> {
    let mut prop = Propagator::new(model, psi.l_min(), psi.len())?;
    let mut out = psi.clone();
    prop.apply(out.amps_mut());
    let edge = edge_mass_of(out.amps(), prop.edge_margin());
    if edge > LEAK_THRESHOLD {
        return Err(Error::LatticeOverflow { edge_mass: edge, threshold: LEAK_THRESHOLD });
    }
    Ok(out)
}

/// Knobs for [`evolve_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub lattice_cap: usize,
    pub leak_threshold: f64,
    /// Reference site for the variance; defaults to the most populated site
    /// of the initial state.
    pub l0: Option<i64>,
    /// Evolve with `U⁻¹` instead of `U`.
    pub backward: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { lattice_cap: DEFAULT_LATTICE_CAP, leak_threshold: LEAK_THRESHOLD, l0: None, backward: false }
    }
}

/// Lattice size that comfortably holds a delta state for `model`.
pub fn initial_lattice_len(model: &ModelSpec) -> Result<usize> {
    let h = model.hbar_eff().value();
    let reach = [model.k1() / h, model.k2() / h]
        .iter()
        .map(|&x| kick_coefficients(x, DEFAULT_KICK_TOL).map(|c| c.cutoff()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    Ok((16 * (reach + 1)).max(64).next_power_of_two())
}

pub fn evolve(model: &ModelSpec, psi0: &Wavepacket, n_steps: u64, record_every: u64) -> Result<DiffusionSeries> {
    evolve_with(model, psi0, n_steps, record_every, &EvolveOptions::default())
}

/// Runs `n_steps` periods, recording `(step, σ², edge mass)` every
/// `record_every` steps. The lattice is doubled symmetrically and the step
/// retried whenever the edge mass exceeds the leak threshold.
pub fn evolve_with(
    model: &ModelSpec,
    psi0: &Wavepacket,
    n_steps: u64,
    record_every: u64,
    opts: &EvolveOptions,
) -> Result<DiffusionSeries> {
    if n_steps == 0 || record_every == 0 {
        return Err(Error::invalid("n_steps and record_every must be >= 1"));
    }
    if psi0.len() > opts.lattice_cap {
        return Err(Error::ResourceExhausted(format!(
            "initial lattice of {} sites exceeds cap {}",
            psi0.len(),
            opts.lattice_cap
        )));
    }
    let l0 = opts.l0.unwrap_or_else(|| {
        psi0.sites()
            .fold((psi0.l_min(), -1.0), |best, (l, a)| if a.norm_sqr() > best.1 { (l, a.norm_sqr()) } else { best })
            .0
    });

    let hbar = psi0.hbar_eff();
    let mut state = psi0.clone();
    let build = |l_min, len| {
        if opts.backward {
            Propagator::new_inverse(model, l_min, len)
        } else {
            Propagator::new(model, l_min, len)
        }
    };
    let mut prop = build(state.l_min(), state.len())?;
    let mut backup = state.amps().to_vec();

    let capacity = (n_steps / record_every) as usize;
    let mut steps = Vec::with_capacity(capacity);
    let mut variance = Vec::with_capacity(capacity);
    let mut leak = Vec::with_capacity(capacity);

    for step in 1..=n_steps {
        backup.copy_from_slice(state.amps());
        loop {
            prop.apply(state.amps_mut());
            let edge = edge_mass_of(state.amps(), prop.edge_margin());
            if edge <= opts.leak_threshold {
                if step % record_every == 0 {
                    steps.push(step);
                    variance.push(momentum_variance(&state, l0));
                    leak.push(edge);
                }
                break;
            }
            let new_len = state.len() * 2;
            if new_len > opts.lattice_cap {
                return Err(Error::ResourceExhausted(format!(
                    "lattice would grow to {new_len} sites at step {step}, cap is {}",
                    opts.lattice_cap
                )));
            }
            let previous = Wavepacket::from_parts(state.l_min(), std::mem::take(&mut backup), hbar);
            state = previous.padded(new_len);
            backup = state.amps().to_vec();
            prop = build(state.l_min(), state.len())?;
        }
    }

    let final_norm = state.norm_sqr();
    if (final_norm - 1.0).abs() > 1e-8 {
        return Err(Error::NumericalFailure(format!("norm drifted to {final_norm} after {n_steps} steps")));
    }
    DiffusionSeries::new(steps, variance, leak, *model, final_norm, state.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kick::apply_kick;
    use crate::lattice::Rational;

    fn h(v: f64) -> EffPlanck {
        EffPlanck::new(v).unwrap()
    }

    fn random_state(len: usize, seed: u64, hbar: EffPlanck) -> Wavepacket {
        // small LCG keeps the unit tests free of extra deps
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut amps: Vec<Complex64> = (0..len).map(|_| Complex64::new(next(), next())).collect();
        // keep the edges empty
        for a in amps.iter_mut().take(len / 4) {
            *a = Complex64::new(0.0, 0.0);
        }
        for a in amps.iter_mut().skip(3 * len / 4) {
            *a = Complex64::new(0.0, 0.0);
        }
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= n);
        Wavepacket::new(-(len as i64) / 2, amps, hbar).unwrap()
    }

    #[test]
    fn full_resonance_phase_is_identity() {
        let psi = random_state(64, 7, h(1.0));
        for k in [1.0, 2.0, -3.0] {
            let out = apply_quadratic_phase(&psi, 4.0 * PI * k);
            for (a, b) in out.amps().iter().zip(psi.amps()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn anti_resonance_phase_is_parity() {
        let psi = random_state(64, 3, h(1.0));
        let out = apply_quadratic_phase(&psi, 2.0 * PI);
        for (l, a) in out.sites() {
            let sign = if l.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert!((a - psi.amp(l) * sign).norm() < 1e-12);
        }
    }

    #[test]
    fn site_zero_untouched() {
        let psi = Wavepacket::centered_delta(0, 16, h(1.0)).unwrap();
        for tau in [0.3, 1.7, 100.0] {
            assert_eq!(apply_quadratic_phase(&psi, tau).amp(0), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn exact_phase_matches_float() {
        let p = QuadraticPhase::pi_rational(6, 19, "t");
        let q = QuadraticPhase::new(6.0 * PI / 19.0, "t");
        for l in -40..40 {
            assert!((p.site_phase(l) - q.site_phase(l)).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_kicks_resonant_is_identity() {
        let psi = random_state(64, 11, h(0.7));
        let m = ModelSpec::resonant_dkrm(0.0, 0.0, h(0.7)).unwrap();
        let mut prop = Propagator::new(&m, psi.l_min(), psi.len()).unwrap();
        let mut a = psi.amps().to_vec();
        prop.apply(&mut a);
        for (x, y) in a.iter().zip(psi.amps()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn single_kick_rotor_on_resonance() {
        // K₂ = 0 with Tħ = 4π: one kick then e^{-iħ̃l²/2} e^{-i(4π-ħ̃)l²/2} = 1
        let hb = h(1.3);
        let psi = Wavepacket::centered_delta(0, 256, hb).unwrap();
        let m = ModelSpec::general_resonance_dkrm(1.3 * 2.0, 0.0, hb, 1, 1).unwrap();
        let out = apply_floquet(&m, &psi).unwrap();
        let expected = apply_kick(&psi, 2.0);
        for (a, b) in out.amps().iter().zip(expected.amps()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn khm_at_two_pi_is_kick_times_global_phase() {
        let hb = EffPlanck::two_pi_times(Rational::from_coprime(1, 1)).unwrap();
        let (k, l) = (0.8 * hb.value(), 0.5 * hb.value());
        let m = ModelSpec::khm(k, l, hb).unwrap();
        let psi = Wavepacket::centered_delta(0, 128, hb).unwrap();
        let out = apply_floquet(&m, &psi).unwrap();
        let phase = Complex64::from_polar(1.0, -l / hb.value());
        let kicked = apply_kick(&psi, k / hb.value());
        for (a, b) in out.amps().iter().zip(kicked.amps()) {
            assert!((a - b * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn floquet_is_unitary() {
        let models = [
            ModelSpec::khm(1.0, 1.5, h(0.9)).unwrap(),
            ModelSpec::resonant_dkrm(2.0, 1.0, h(1.0)).unwrap(),
            ModelSpec::general_resonance_dkrm(1.0, 2.0, h(0.6), 1, 2).unwrap(),
        ];
        for m in &models {
            let psi = random_state(512, 5, m.hbar_eff());
            let out = apply_floquet(m, &psi).unwrap();
            assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn overflow_detected() {
        let m = ModelSpec::resonant_dkrm(10.0, 10.0, h(1.0)).unwrap();
        let psi = Wavepacket::centered_delta(0, 32, h(1.0)).unwrap();
        assert!(matches!(apply_floquet(&m, &psi), Err(Error::LatticeOverflow { .. })));
    }

    #[test]
    fn evolve_zero_kicks() {
        let m = ModelSpec::resonant_dkrm(0.0, 0.0, h(1.0)).unwrap();
        let psi = Wavepacket::centered_delta(0, 64, h(1.0)).unwrap();
        let s = evolve(&m, &psi, 50, 5).unwrap();
        assert_eq!(s.steps().len(), 10);
        assert!(s.variance().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn evolve_grows_lattice() {
        let m = ModelSpec::resonant_dkrm(4.0, 0.4, h(1.0)).unwrap();
        let psi = Wavepacket::centered_delta(0, 64, h(1.0)).unwrap();
        let s = evolve(&m, &psi, 400, 1).unwrap();
        assert!(s.lattice_len() > 64);
        assert!((s.final_norm() - 1.0).abs() < 1e-8);
        assert!(s.leak().iter().all(|&e| e <= LEAK_THRESHOLD));
    }

    #[test]
    fn evolve_respects_cap() {
        let m = ModelSpec::resonant_dkrm(4.0, 0.4, h(1.0)).unwrap();
        let psi = Wavepacket::centered_delta(0, 64, h(1.0)).unwrap();
        let opts = EvolveOptions { lattice_cap: 128, ..Default::default() };
        assert!(matches!(evolve_with(&m, &psi, 2000, 1, &opts), Err(Error::ResourceExhausted(_))));
    }

    #[test]
    fn evolve_rejects_zero_steps() {
        let m = ModelSpec::resonant_dkrm(1.0, 1.0, h(1.0)).unwrap();
        let psi = Wavepacket::centered_delta(0, 64, h(1.0)).unwrap();
        assert!(evolve(&m, &psi, 0, 1).is_err());
        assert!(evolve(&m, &psi, 10, 0).is_err());
    }
}
