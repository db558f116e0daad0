//! The kick operator `exp(-i x cos q)` in the momentum basis.
//!
//! Its matrix elements are `⟨l+m| e^{-ix cos q} |l⟩ = c_m = (-i)^m J_m(x)`.
//! They are obtained here by sampling the kick on a uniform position grid
//! and transforming, which avoids any Bessel-function evaluation.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::lattice::Wavepacket;
use crate::{Error, Result};

/// Default truncation tolerance for kick coefficients.
pub const DEFAULT_KICK_TOL: f64 = 1e-14;

/// Momentum-basis coefficients `c_m`, `m = -cutoff..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct KickCoefficients {
    x: f64,
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

impl KickCoefficients {
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Coefficients ordered from `m = -cutoff` to `m = cutoff`.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_m`, zero beyond the cutoff.
    pub fn get(&self, m: i64) -> Complex64 {
        let c = self.cutoff as i64;
        if m.abs() > c {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(m + c) as usize]
        }
    }
}

fn kick_grid_size(x: f64) -> usize {
    (8 * (x.ceil() as usize + 64)).next_power_of_two()
}

/// Coefficients of `exp(-i x cos q)`, truncated at the smallest `M` with
/// `|c_m| < tol` for every `|m| > M`.
pub fn kick_coefficients(x: f64, tol: f64) -> Result<KickCoefficients> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid(format!("kick tolerance must lie in (0, 1), got {tol}")));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::invalid(format!("kick strength ratio must be finite and >= 0, got {x}")));
    }
    let n = kick_grid_size(x);
    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| {
            let q = 2.0 * PI * j as f64 / n as f64;
            Complex64::from_polar(1.0, -x * q.cos())
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let at = |m: i64| buf[m.rem_euclid(n as i64) as usize] * scale;

    let half = (n / 2 - 1) as i64;
    let cutoff = (0..=half)
        .rev()
        .find(|&m| at(m).norm() >= tol || at(-m).norm() >= tol)
        .unwrap_or(0);
    let coeffs = (-cutoff..=cutoff).map(at).collect();
    Ok(KickCoefficients { x, cutoff: cutoff as usize, coeffs })
}

/// A kick prepared for repeated application on a lattice of fixed size.
///
/// Application goes to the position grid `q_j = 2πj/N`, multiplies by
/// `exp(-i x cos q_j)` and comes back. On the lattice this is a cyclic
/// convolution with the kick coefficients.
pub struct KickOperator {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    multiplier: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for KickOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KickOperator").field("len", &self.len).finish()
    }
}

impl KickOperator {
    /// `x` may be negative, which gives the inverse kick.
    pub fn new(len: usize, x: f64, planner: &mut FftPlanner<f64>) -> Self {
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let scale = 1.0 / len as f64;
        let multiplier = (0..len)
            .map(|j| {
                let q = 2.0 * PI * j as f64 / len as f64;
                Complex64::from_polar(scale, -x * q.cos())
            })
            .collect();
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        KickOperator {
            len,
            forward,
            inverse,
            multiplier,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Applies the kick to lattice amplitudes in place.
    pub fn apply(&mut self, amps: &mut [Complex64]) {
        assert_eq!(amps.len(), self.len);
        // amplitudes -> ψ(q_j) = Σ_k a_k e^{i k q_j}; the e^{i l_min q} offset cancels on the way back
        self.inverse.process_with_scratch(amps, &mut self.scratch);
        for (a, m) in amps.iter_mut().zip(&self.multiplier) {
            *a *= m;
        }
        self.forward.process_with_scratch(amps, &mut self.scratch);
    }
}

/// Returns `exp(-i x cos q) ψ`. Negative `x` applies the inverse kick.
pub fn apply_kick(psi: &Wavepacket, x: f64) -> Wavepacket {
    let mut out = psi.clone();
    if x == 0.0 {
        return out;
    }
    let mut op = KickOperator::new(psi.len(), x, &mut FftPlanner::new());
    op.apply(out.amps_mut());
    out
}
