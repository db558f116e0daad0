//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a flat `Float64Array`; the page reads it in pairs.
//! The plain-Rust functions behind the exports are public so they can be
//! tested natively.

use std::f64::consts::PI;

use kharper::bloch::{butterfly_scan, default_window};
use kharper::classical::{trajectory, ClassicalMap, PhasePoint};
use kharper::floquet::{evolve_with, initial_lattice_len, EvolveOptions};
use kharper::lattice::{EffPlanck, Wavepacket};
use kharper::model::{ModelKind, ModelSpec};
use wasm_bindgen::prelude::*;

/// Keeps a single request within what a browser tab can hold.
pub const MAX_S: u64 = 120;
pub const MAX_THETAS: usize = 64;
pub const MAX_STEPS: u64 = 20_000;
pub const MAX_ORBIT_POINTS: usize = 400_000;
const LATTICE_CAP: usize = 1 << 18;

fn kind_from(name: &str) -> Result<ModelKind, String> {
    match name {
        "khm" => Ok(ModelKind::Khm),
        "resonant-dkrm" => Ok(ModelKind::ResonantDkrm),
        other => Err(format!("unknown model {other:?}")),
    }
}

/// `[ħ̃, ε, ħ̃, ε, …]` over one period of ħ̃.
pub fn butterfly_pairs(kind: &str, ratio1: f64, ratio2: f64, s_max: u64, theta_count: usize) -> Result<Vec<f64>, String> {
    let kind = kind_from(kind)?;
    if !(1..=MAX_S).contains(&s_max) || !(1..=MAX_THETAS).contains(&theta_count) {
        return Err(format!("need 1 <= s_max <= {MAX_S} and 1 <= theta_count <= {MAX_THETAS}"));
    }
    let set = butterfly_scan(kind, ratio1, ratio2, s_max, theta_count, default_window(kind)).map_err(|e| e.to_string())?;
    Ok(set.points.iter().flat_map(|p| [p.hbar_eff.value(), p.eps]).collect())
}

/// `[step, σ², step, σ², …]` from a delta state at the origin.
pub fn diffusion_pairs(kind: &str, k1: f64, k2: f64, hbar: f64, n_steps: u64) -> Result<Vec<f64>, String> {
    if !(1..=MAX_STEPS).contains(&n_steps) {
        return Err(format!("need 1 <= n_steps <= {MAX_STEPS}"));
    }
    let model = ModelSpec::new(kind_from(kind)?, k1, k2, EffPlanck::new(hbar).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let len = initial_lattice_len(&model).map_err(|e| e.to_string())?;
    let psi0 = Wavepacket::centered_delta(0, len, model.hbar_eff()).map_err(|e| e.to_string())?;
    let opts = EvolveOptions { lattice_cap: LATTICE_CAP, ..EvolveOptions::default() };
    let series = evolve_with(&model, &psi0, n_steps, 1, &opts).map_err(|e| e.to_string())?;
    Ok(series.steps().iter().zip(series.variance()).flat_map(|(&s, &v)| [s as f64, v]).collect())
}

/// `[q, p, q, p, …]` for `n_orbits` orbits started along the diagonal of the
/// unit cell, each contributing its start and `n_iter` iterates.
pub fn portrait_pairs(kind: &str, k1: f64, k2: f64, n_orbits: usize, n_iter: usize) -> Result<Vec<f64>, String> {
    let map = match kind_from(kind)? {
        ModelKind::Khm => ClassicalMap::Khm { k: k1, l: k2 },
        _ => ClassicalMap::DkrmResonant { k1, k2 },
    };
    if n_orbits == 0 || n_orbits.saturating_mul(n_iter + 1) > MAX_ORBIT_POINTS {
        return Err(format!("need n_orbits >= 1 and at most {MAX_ORBIT_POINTS} points"));
    }
    if !(k1.is_finite() && k2.is_finite()) {
        return Err("kicks must be finite".into());
    }
    let mut out = Vec::with_capacity(2 * n_orbits * (n_iter + 1));
    for i in 0..n_orbits {
        let u = (i as f64 + 0.5) / n_orbits as f64;
        let pt0 = PhasePoint::new(2.0 * PI * u, -PI + 2.0 * PI * u);
        let start = pt0.wrapped();
        out.extend([start.q, start.p]);
        for pt in trajectory(map, pt0, n_iter) {
            out.extend([pt.q, pt.p]);
        }
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn butterfly(kind: &str, ratio1: f64, ratio2: f64, s_max: u32, theta_count: u32) -> Result<Vec<f64>, JsValue> {
    butterfly_pairs(kind, ratio1, ratio2, s_max.into(), theta_count as usize).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn diffusion(kind: &str, k1: f64, k2: f64, hbar: f64, n_steps: u32) -> Result<Vec<f64>, JsValue> {
    diffusion_pairs(kind, k1, k2, hbar, n_steps.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn portrait(kind: &str, k1: f64, k2: f64, n_orbits: u32, n_iter: u32) -> Result<Vec<f64>, JsValue> {
    portrait_pairs(kind, k1, k2, n_orbits as usize, n_iter as usize).map_err(|e| JsValue::from_str(&e))
}
