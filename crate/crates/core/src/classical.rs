//! Classical maps: the kicked Harper map, the ħ̃ → 0 limit of the resonant
//! double kicked rotor, and the canonical transformation `P = p + q` that
//! conjugates the latter onto the former.
//!
//! Coordinates are kept unwrapped. The transformation mixes `q` into the
//! momentum, so `q` is only reduced mod 2π when points are compared or
//! reported.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analysis::circular_distance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Self {
        PhasePoint { q, p }
    }

    /// Same point with `q` reduced to `[0, 2π)`.
    pub fn wrapped(&self) -> Self {
        PhasePoint { q: self.q.rem_euclid(2.0 * PI), p: self.p }
    }

    /// `max(circular |Δq|, |Δp|)`.
    pub fn distance(&self, other: &PhasePoint) -> f64 {
        circular_distance(self.q, other.q).max((self.p - other.p).abs())
    }
}

/// `p' = p + K sin q`, `q' = q - L sin p'`.
pub fn khm_map(pt: PhasePoint, k: f64, l: f64) -> PhasePoint {
    let p = pt.p + k * pt.q.sin();
    PhasePoint { q: pt.q - l * p.sin(), p }
}

pub fn khm_inverse(pt: PhasePoint, k: f64, l: f64) -> PhasePoint {
    let q = pt.q + l * pt.p.sin();
    PhasePoint { q, p: pt.p - k * q.sin() }
}

/// The one-period classical map of the resonant DKRM in closed form.
pub fn dkrm_resonant_map(pt: PhasePoint, k1: f64, k2: f64) -> PhasePoint {
    let (q, p) = (pt.q, pt.p);
    let kick1 = k1 * q.sin();
    let s = (q + p + kick1).sin();
    PhasePoint { q: q - k2 * s, p: p + k2 * s + kick1 }
}

/// The same map as two kick-plus-free-flight steps: the first free flight
/// runs forward, the second backward.
pub fn dkrm_half_steps(pt: PhasePoint, k1: f64, k2: f64) -> PhasePoint {
    let p1 = pt.p + k1 * pt.q.sin();
    let q1 = pt.q + p1;
    let p2 = p1 + k2 * q1.sin();
    PhasePoint { q: q1 - p2, p: p2 }
}

pub fn dkrm_inverse(pt: PhasePoint, k1: f64, k2: f64) -> PhasePoint {
    let q1 = pt.q + pt.p;
    let p1 = pt.p - k2 * q1.sin();
    let q0 = q1 - p1;
    PhasePoint { q: q0, p: p1 - k1 * q0.sin() }
}

/// `(q, p) ↦ (q, p + q)`.
pub fn canonical_transform(pt: PhasePoint) -> PhasePoint {
    PhasePoint { q: pt.q, p: pt.p + pt.q }
}

/// `(Q, P) ↦ (Q, P - Q)`.
pub fn canonical_transform_inverse(pt: PhasePoint) -> PhasePoint {
    PhasePoint { q: pt.q, p: pt.p - pt.q }
}

/// Distance between `T(DKRM(pt))` and `KHM(T(pt))` with `K = k1`, `L = k2`,
/// where `T` is the canonical transformation.
pub fn equivalence_residual(pt: PhasePoint, k1: f64, k2: f64) -> f64 {
    let lhs = canonical_transform(dkrm_resonant_map(pt, k1, k2));
    let rhs = khm_map(canonical_transform(pt), k1, k2);
    lhs.distance(&rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "kebab-case")]
pub enum ClassicalMap {
    Khm { k: f64, l: f64 },
    DkrmResonant { k1: f64, k2: f64 },
}

impl ClassicalMap {
    pub fn apply(&self, pt: PhasePoint) -> PhasePoint {
        match *self {
            ClassicalMap::Khm { k, l } => khm_map(pt, k, l),
            ClassicalMap::DkrmResonant { k1, k2 } => dkrm_resonant_map(pt, k1, k2),
        }
    }

    pub fn inverse(&self, pt: PhasePoint) -> PhasePoint {
        match *self {
            ClassicalMap::Khm { k, l } => khm_inverse(pt, k, l),
            ClassicalMap::DkrmResonant { k1, k2 } => dkrm_inverse(pt, k1, k2),
        }
    }

    /// Analytic Jacobian `[[∂q'/∂q, ∂q'/∂p], [∂p'/∂q, ∂p'/∂p]]`.
    pub fn jacobian(&self, pt: PhasePoint) -> [[f64; 2]; 2] {
        match *self {
            ClassicalMap::Khm { k, l } => {
                let p1 = pt.p + k * pt.q.sin();
                let (kc, lc) = (k * pt.q.cos(), l * p1.cos());
                [[1.0 - lc * kc, -lc], [kc, 1.0]]
            }
            ClassicalMap::DkrmResonant { k1, k2 } => {
                // product of the two half-step Jacobians
                let kc1 = k1 * pt.q.cos();
                let q1 = pt.q + pt.p + k1 * pt.q.sin();
                let kc2 = k2 * q1.cos();
                let first = [[1.0 + kc1, 1.0], [kc1, 1.0]];
                let second = [[1.0 - kc2, -1.0], [kc2, 1.0]];
                mat_mul(second, first)
            }
        }
    }
}

fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// `n` iterates of `map` from `pt0` (excluding `pt0`), `q` wrapped to `[0, 2π)`.
pub fn trajectory(map: ClassicalMap, pt0: PhasePoint, n: usize) -> Vec<PhasePoint> {
    let mut pt = pt0;
    (0..n)
        .map(|_| {
            pt = map.apply(pt);
            pt.wrapped()
        })
        .collect()
}
