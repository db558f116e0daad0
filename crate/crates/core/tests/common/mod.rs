//! Reference routines shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use kharper::bloch::{build_bloch_matrix, theta_grid};
use kharper::kick::{apply_kick, kick_coefficients, DEFAULT_KICK_TOL};
use kharper::lattice::{reduce_rational, EffPlanck, Wavepacket};
use kharper::model::ModelSpec;
use kharper::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `J_m(x) = (1/π) ∫_0^π cos(mτ - x sin τ) dτ` by composite Simpson.
pub fn bessel_quadrature(m: i64, x: f64) -> f64 {
    let n = 20_000;
    let h = PI / n as f64;
    let f = |t: f64| (m as f64 * t - x * t.sin()).cos();
    let mut acc = f(0.0) + f(PI);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(k as f64 * h);
    }
    acc * h / 3.0 / PI
}

/// Power series of `J_m(x)` for `m >= 0`; only accurate for modest `x`.
pub fn bessel_series(m: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = half.powi(m as i32) / (1..=m).map(|k| k as f64).product::<f64>();
    let mut acc = term;
    for k in 1..200 {
        term *= -half * half / (k as f64 * (k + m) as f64);
        acc += term;
        if term.abs() < 1e-300 {
            break;
        }
    }
    acc
}

/// `(-i)^m`.
pub fn minus_i_pow(m: i64) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

pub fn random_state(rng: &mut ChaCha8Rng, l_min: i64, len: usize, occupied: std::ops::Range<usize>, h: EffPlanck) -> Wavepacket {
    let mut amps = vec![Complex64::new(0.0, 0.0); len];
    for a in &mut amps[occupied] {
        *a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    Wavepacket::new(l_min, amps, h).unwrap()
}

/// Largest `|c_m - (-i)^m J_m(x)|` over every retained index, with `J_m`
/// from quadrature.
pub fn kick_quadrature_error(xs: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &x in xs {
        let c = kick_coefficients(x, DEFAULT_KICK_TOL).unwrap();
        let m_max = c.cutoff() as i64 + 5;
        for m in -m_max..=m_max {
            let want = minus_i_pow(m) * bessel_quadrature(m, x);
            worst = worst.max((c.get(m) - want).norm());
        }
    }
    worst
}

/// Largest difference between the grid-transform kick and the explicit
/// banded convolution `ψ'_l = Σ_m c_m ψ_{l-m}` on random states.
pub fn banded_kick_error(xs: &[f64], seed: u64) -> f64 {
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let h = EffPlanck::new(1.0).unwrap();
    let mut worst: f64 = 0.0;
    for &x in xs {
        let c = kick_coefficients(x, DEFAULT_KICK_TOL).unwrap();
        let m = c.cutoff() as i64;
        let psi = random_state(&mut rng, -256, 512, 200..312, h);
        let got = apply_kick(&psi, x);
        for l in psi.l_min()..=psi.l_max() {
            let mut want = Complex64::new(0.0, 0.0);
            for k in -m..=m {
                want += c.get(k) * psi.amp(l - k);
            }
            worst = worst.max((got.amp(l) - want).norm());
        }
    }
    worst
}

/// Largest deviation of the `ħ = 2π` KHM reduced matrix from its closed
/// form `e^{-i L/ħ} e^{-i (K/ħ) cos θ}`.
pub fn one_site_bloch_error(k: f64, l: f64, theta_count: usize) -> f64 {
    let hbar = EffPlanck::two_pi_times(reduce_rational(1, 1).unwrap()).unwrap();
    let model = ModelSpec::khm(k, l, hbar).unwrap();
    let h = 2.0 * PI;
    let mut worst: f64 = 0.0;
    for theta in theta_grid(theta_count) {
        let m = build_bloch_matrix(&model, theta).unwrap();
        assert_eq!(m.period, 1);
        let want = Complex64::from_polar(1.0, -(l / h) - (k / h) * theta.cos());
        worst = worst.max((m.entries[(0, 0)] - want).norm());
    }
    worst
}
