//! Number-theoretic helpers and momentum-lattice states.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on the norm of a freshly constructed [`Wavepacket`].
pub const NORM_TOL: f64 = 1e-10;

/// Reduced non-negative fraction `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    num: u64,
    den: u64,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl Rational {
    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Builds from parts that are already known to be coprime.
    pub(crate) fn from_coprime(num: u64, den: u64) -> Self {
        debug_assert!(den >= 1 && gcd(num, den) == 1);
        Rational { num, den }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Reduces `num/den` to lowest terms with a positive denominator.
pub fn reduce_rational(num: i64, den: i64) -> Result<Rational> {
    if den == 0 {
        return Err(Error::invalid("zero denominator"));
    }
    let (num, den) = if den < 0 { (-(num as i128), -(den as i128)) } else { (num as i128, den as i128) };
    if num < 0 {
        return Err(Error::invalid(format!("negative rational {num}/{den}")));
    }
    let (num, den) = (num as u64, den as u64);
    let g = gcd(num, den);
    Ok(Rational { num: num / g, den: den / g })
}

/// Closest fraction to `x` among all reduced fractions with denominator at
/// most `s_max`, found from the continued-fraction convergents and the
/// largest admissible semiconvergent.
pub fn best_rational_approx(x: f64, s_max: u64) -> Rational {
    assert!(x.is_finite() && x > 0.0 && x < 1.0, "x must lie in (0, 1), got {x}");
    let s_max = s_max.max(1);

    // (h_{n-2}, k_{n-2}), (h_{n-1}, k_{n-1})
    let (mut h0, mut k0, mut h1, mut k1) = (0u64, 1u64, 1u64, 0u64);
    let mut y = x;
    loop {
        let a_f = y.floor();
        let next = if a_f > s_max as f64 {
            None
        } else {
            let a = a_f as u64;
            let k2 = a * k1 + k0;
            (k2 <= s_max).then(|| (a * h1 + h0, k2))
        };
        match next {
            Some((h2, k2)) => {
                h0 = h1;
                k0 = k1;
                h1 = h2;
                k1 = k2;
            }
            None => {
                // k1 >= 1 here: the first convergent always has denominator 1.
                let t = (s_max - k0) / k1;
                let (hs, ks) = (t * h1 + h0, t * k1 + k0);
                let d_conv = (x - h1 as f64 / k1 as f64).abs();
                let d_semi = (x - hs as f64 / ks as f64).abs();
                return if d_semi < d_conv {
                    reduce_pair(hs, ks)
                } else {
                    reduce_pair(h1, k1)
                };
            }
        }
        let frac = y - a_f;
        if frac < 1e-15 {
            return reduce_pair(h1, k1);
        }
        y = 1.0 / frac;
    }
}

fn reduce_pair(num: u64, den: u64) -> Rational {
    let g = gcd(num, den);
    Rational { num: num / g, den: den / g }
}

/// Farey sequence of order `s_max`, restricted to `(0, 1]`, ascending.
pub fn farey_sequence(s_max: u64) -> Vec<Rational> {
    let n = s_max.max(1);
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, n);
    let mut out = vec![Rational { num: c, den: d }];
    while !(c == 1 && d == 1) {
        let k = (n + b) / d;
        let (nc, nd) = (k * c - a, k * d - b);
        a = c;
        b = d;
        c = nc;
        d = nd;
        out.push(Rational { num: c, den: d });
    }
    out
}

/// Dimensionless effective Planck constant, optionally tagged with the exact
/// rational `value / 2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffPlanck {
    value: f64,
    rational: Option<Rational>,
}

impl EffPlanck {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::invalid(format!("effective Planck constant must be > 0, got {value}")));
        }
        Ok(EffPlanck { value, rational: None })
    }

    /// `2π · r`, carrying `r` as the exact tag.
    pub fn two_pi_times(r: Rational) -> Result<Self> {
        if r.num == 0 {
            return Err(Error::invalid("effective Planck constant must be > 0, got 2π·0"));
        }
        Ok(EffPlanck { value: 2.0 * PI * r.to_f64(), rational: Some(r) })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn rational(&self) -> Option<Rational> {
        self.rational
    }
}

/// Complex amplitudes on the momentum sites `l_min..=l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavepacket {
    l_min: i64,
    amps: Vec<Complex64>,
    hbar_eff: EffPlanck,
}

impl Wavepacket {
    /// Wraps amplitudes starting at site `l_min`; the state must be normalized.
    pub fn new(l_min: i64, amps: Vec<Complex64>, hbar_eff: EffPlanck) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::invalid("a lattice needs at least two sites"));
        }
        let psi = Wavepacket { l_min, amps, hbar_eff };
        let norm = psi.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("wavepacket not normalized: norm² = {norm}")));
        }
        Ok(psi)
    }

    /// Momentum eigenstate `|l0⟩` on the lattice `l_min..=l_max`.
    pub fn delta(l0: i64, l_min: i64, l_max: i64, hbar_eff: EffPlanck) -> Result<Self> {
        if l_min >= l_max || l0 < l_min || l0 > l_max {
            return Err(Error::invalid(format!("site {l0} outside lattice [{l_min}, {l_max}]")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); (l_max - l_min + 1) as usize];
        amps[(l0 - l_min) as usize] = Complex64::new(1.0, 0.0);
        Ok(Wavepacket { l_min, amps, hbar_eff })
    }

    /// Momentum eigenstate `|l0⟩` centred on a lattice of `size` sites.
    pub fn centered_delta(l0: i64, size: usize, hbar_eff: EffPlanck) -> Result<Self> {
        let l_min = l0 - (size / 2) as i64;
        Self::delta(l0, l_min, l_min + size as i64 - 1, hbar_eff)
    }

    pub(crate) fn from_parts(l_min: i64, amps: Vec<Complex64>, hbar_eff: EffPlanck) -> Self {
        Wavepacket { l_min, amps, hbar_eff }
    }

    pub fn l_min(&self) -> i64 {
        self.l_min
    }

    pub fn l_max(&self) -> i64 {
        self.l_min + self.amps.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn hbar_eff(&self) -> EffPlanck {
        self.hbar_eff
    }

    /// Amplitude at site `l`, zero outside the lattice.
    pub fn amp(&self, l: i64) -> Complex64 {
        if l < self.l_min || l > self.l_max() {
            return Complex64::new(0.0, 0.0);
        }
        self.amps[(l - self.l_min) as usize]
    }

    /// `(l, amplitude)` pairs in ascending `l`.
    pub fn sites(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.amps.iter().enumerate().map(move |(k, a)| (self.l_min + k as i64, *a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Symmetric zero-padding to `new_len` sites (same centre).
    pub fn padded(&self, new_len: usize) -> Wavepacket {
        assert!(new_len >= self.len());
        let extra = new_len - self.len();
        let left = extra / 2;
        let mut amps = vec![Complex64::new(0.0, 0.0); new_len];
        amps[left..left + self.len()].copy_from_slice(&self.amps);
        Wavepacket { l_min: self.l_min - left as i64, amps, hbar_eff: self.hbar_eff }
    }
}

/// `ħ̃² Σ_l (l − l0)² |ψ_l|²`.
pub fn momentum_variance(psi: &Wavepacket, l0: i64) -> f64 {
    let h = psi.hbar_eff.value;
    let s: f64 = psi
        .sites()
        .map(|(l, a)| {
            let d = (l - l0) as f64;
            d * d * a.norm_sqr()
        })
        .sum();
    h * h * s
}

/// Probability within `margin` sites of either lattice edge. `margin` is
/// clamped to `[1, len/2]`.
pub fn edge_mass(psi: &Wavepacket, margin: usize) -> f64 {
    edge_mass_of(&psi.amps, margin)
}

pub(crate) fn edge_mass_of(amps: &[Complex64], margin: usize) -> f64 {
    let n = amps.len();
    let m = margin.clamp(1, n / 2);
    let left: f64 = amps[..m].iter().map(|a| a.norm_sqr()).sum();
    let right: f64 = amps[n - m..].iter().map(|a| a.norm_sqr()).sum();
    left + right
}
