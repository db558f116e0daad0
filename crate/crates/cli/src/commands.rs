//! The five run commands.

use std::f64::consts::PI;

use anyhow::{anyhow, Result};
use kharper::analysis::{box_counting_dimension, classify_transport, default_scales, fit_power_law};
use kharper::bloch::{build_bloch_matrix, butterfly_scan, default_window, quasienergies, theta_grid};
use kharper::classical::{trajectory, ClassicalMap, PhasePoint};
use kharper::floquet::{evolve_with, initial_lattice_len, EvolveOptions, DEFAULT_LATTICE_CAP};
use kharper::lattice::Wavepacket;
use kharper::model::ModelKind;
use kharper::symmetry::{check_symmetry_with_tol, SymmetryClaim, SymmetryRequest, SYMMETRY_TOL};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    Kind, RunConfig, DEFAULT_BUTTERFLY_THETAS, DEFAULT_FRACTAL_THETAS, DEFAULT_S_MAX,
};
use crate::output::{self, num, path_for, Csv};
use crate::{config_error, CheckFailed};

const SPECTRUM_HEADER: [&str; 5] = ["hbar_num", "hbar_den", "hbar", "theta", "quasienergy"];

pub fn butterfly(cfg: &RunConfig) -> Result<()> {
    let (kind, ratio1, ratio2, s_max, thetas, window) = (|| -> Result<_> {
        let kind = cfg.model()?.model_kind()?;
        let ratio1 = cfg.ratio1.ok_or_else(|| anyhow!("ratio1 is required for butterfly"))?;
        let ratio2 = cfg.ratio2.ok_or_else(|| anyhow!("ratio2 is required for butterfly"))?;
        if !(ratio1 >= 0.0 && ratio2 >= 0.0) {
            return Err(anyhow!("kick ratios must be >= 0"));
        }
        let window = cfg.hbar_window.map(|[a, b]| (a, b)).unwrap_or_else(|| default_window(kind));
        Ok((
            kind,
            ratio1,
            ratio2,
            cfg.s_max.unwrap_or(DEFAULT_S_MAX),
            cfg.theta_count.unwrap_or(DEFAULT_BUTTERFLY_THETAS),
            window,
        ))
    })()
    .map_err(config_error)?;

    let set = butterfly_scan(kind, ratio1, ratio2, s_max, thetas, window)?;
    let mut csv = Csv::new(&SPECTRUM_HEADER);
    for p in &set.points {
        let r = p.hbar_eff.rational().expect("scan points carry their rational");
        csv.row(&[r.num().to_string(), r.den().to_string(), num(p.hbar_eff.value()), num(p.theta), num(p.eps)]);
    }
    let prefix = cfg.output_prefix();
    let csv_path = path_for(prefix, "_spectrum.csv")?;
    csv.write(&csv_path)?;
    let png = path_for(prefix, "_spectrum.png")?;
    let title = format!("{} butterfly, ratios {ratio1}/{ratio2}", kind.label());
    output::write_text(&path_for(prefix, "_spectrum_plot.py")?, &output::butterfly_script(&csv_path, &png, &title))?;
    println!("{} points over {} θ values -> {}", set.points.len(), thetas, csv_path.display());
    Ok(())
}

#[derive(Serialize)]
struct EvolveSummary {
    alpha: Option<f64>,
    classification: &'static str,
    window: [u64; 2],
    final_norm: f64,
}

pub fn evolve(cfg: &RunConfig) -> Result<()> {
    let (model, n_steps, every, window, cap) = (|| -> Result<_> {
        let model = cfg.model()?.to_spec()?;
        let n_steps = cfg.n_steps.unwrap_or(1000);
        let window = cfg.fit_window.unwrap_or([(n_steps / 100).max(1), n_steps]);
        Ok((model, n_steps, cfg.record_every.unwrap_or(1), window, cfg.lattice_cap.unwrap_or(DEFAULT_LATTICE_CAP)))
    })()
    .map_err(config_error)?;

    let psi = Wavepacket::centered_delta(0, initial_lattice_len(&model)?, model.hbar_eff())?;
    let opts = EvolveOptions { lattice_cap: cap, ..Default::default() };
    let series = evolve_with(&model, &psi, n_steps, every, &opts)?;

    let mut csv = Csv::new(&["step", "variance", "edge_mass"]);
    for ((t, v), e) in series.steps().iter().zip(series.variance()).zip(series.leak()) {
        csv.row(&[t.to_string(), num(*v), num(*e)]);
    }
    let (alpha, classification) = match fit_power_law(&series, (window[0], window[1])) {
        Ok(fit) => (Some(fit.alpha), classify_transport(&fit, &series).as_str()),
        // no positive variance to fit: the state never left its site
        Err(_) if series.variance().iter().all(|&v| v == 0.0) => (None, "localized"),
        Err(_) => (None, "undetermined"),
    };
    let summary = EvolveSummary { alpha, classification, window, final_norm: series.final_norm() };

    let prefix = cfg.output_prefix();
    let csv_path = path_for(prefix, "_diffusion.csv")?;
    csv.write(&csv_path)?;
    output::write_json(&path_for(prefix, "_summary.json")?, &summary)?;
    let png = path_for(prefix, "_diffusion.png")?;
    let title = format!("{} k1={} k2={} hbar={}", model.kind().label(), model.k1(), model.k2(), model.hbar_eff().value());
    output::write_text(&path_for(prefix, "_diffusion_plot.py")?, &output::diffusion_script(&csv_path, &png, &title))?;
    match alpha {
        Some(a) => println!("alpha = {a:.4} ({classification}), final norm {:.12}", series.final_norm()),
        None => println!("no power-law fit ({classification}), final norm {:.12}", series.final_norm()),
    }
    Ok(())
}

pub fn classical(cfg: &RunConfig) -> Result<()> {
    let (map, n_orbits, n_iter) = (|| -> Result<_> {
        let m = cfg.model()?;
        let k1 = m.k1.ok_or_else(|| anyhow!("model.k1 is required"))?;
        let k2 = m.k2.ok_or_else(|| anyhow!("model.k2 is required"))?;
        let map = match m.kind {
            Kind::Khm => ClassicalMap::Khm { k: k1, l: k2 },
            Kind::ResonantDkrm => ClassicalMap::DkrmResonant { k1, k2 },
            Kind::GeneralResonanceDkrm => return Err(anyhow!("classical maps exist for khm and resonant-dkrm only")),
        };
        Ok((map, cfg.n_orbits.unwrap_or(24), cfg.n_iter.unwrap_or(500)))
    })()
    .map_err(config_error)?;

    let mut csv = Csv::new(&["orbit", "step", "q", "p"]);
    for i in 0..n_orbits {
        // starts spread along the diagonal of the unit cell
        let u = (i as f64 + 0.5) / n_orbits as f64;
        let pt0 = PhasePoint::new(2.0 * PI * u, -PI + 2.0 * PI * u);
        let start = pt0.wrapped();
        csv.row(&[i.to_string(), "0".into(), num(start.q), num(start.p)]);
        for (k, pt) in trajectory(map, pt0, n_iter).into_iter().enumerate() {
            csv.row(&[i.to_string(), (k + 1).to_string(), num(pt.q), num(pt.p)]);
        }
    }
    let prefix = cfg.output_prefix();
    let csv_path = path_for(prefix, "_orbits.csv")?;
    csv.write(&csv_path)?;
    let png = path_for(prefix, "_orbits.png")?;
    output::write_text(&path_for(prefix, "_orbits_plot.py")?, &output::orbits_script(&csv_path, &png, &format!("{map:?}")))?;
    println!("{n_orbits} orbits x {n_iter} iterates -> {}", csv_path.display());
    Ok(())
}

#[derive(Serialize)]
struct FractalSummary {
    d0: f64,
    residual: f64,
    points: usize,
    fitted_scales: Vec<usize>,
    hbar_num: u64,
    hbar_den: u64,
}

pub fn fractal(cfg: &RunConfig) -> Result<()> {
    let (model, thetas, scales) = (|| -> Result<_> {
        let model = cfg.model()?.to_spec()?;
        if model.hbar_eff().rational().is_none() {
            return Err(anyhow!("fractal needs hbar given as \"2pi*num/den\""));
        }
        Ok((
            model,
            cfg.theta_count.unwrap_or(DEFAULT_FRACTAL_THETAS),
            cfg.scales.clone().unwrap_or_else(default_scales),
        ))
    })()
    .map_err(config_error)?;

    let r = model.hbar_eff().rational().unwrap();
    let mut csv = Csv::new(&SPECTRUM_HEADER);
    let per_theta = theta_grid(thetas)
        .into_par_iter()
        .map(|theta| build_bloch_matrix(&model, theta).and_then(|m| quasienergies(&m)).map(|eps| (theta, eps)))
        .collect::<kharper::Result<Vec<_>>>()?;
    let mut all = Vec::new();
    for (theta, eps) in per_theta {
        for e in eps {
            csv.row(&[r.num().to_string(), r.den().to_string(), num(model.hbar_eff().value()), num(theta), num(e)]);
            all.push(e);
        }
    }
    let bc = box_counting_dimension(&all, &scales)?;

    let mut boxes = Csv::new(&["boxes", "occupied", "fitted"]);
    for &(n, occ) in &bc.counts {
        let fitted = if bc.fitted.contains(&n) { "1" } else { "0" };
        boxes.row(&[n.to_string(), occ.to_string(), fitted.into()]);
    }
    let summary = FractalSummary {
        d0: bc.d0,
        residual: bc.residual,
        points: all.len(),
        fitted_scales: bc.fitted.clone(),
        hbar_num: r.num(),
        hbar_den: r.den(),
    };
    let prefix = cfg.output_prefix();
    csv.write(&path_for(prefix, "_spectrum.csv")?)?;
    let box_path = path_for(prefix, "_boxcount.csv")?;
    boxes.write(&box_path)?;
    output::write_json(&path_for(prefix, "_fractal.json")?, &summary)?;
    let png = path_for(prefix, "_boxcount.png")?;
    let title = format!("{} at hbar = 2pi*{r}: D0 = {:.3}", model.kind().label(), bc.d0);
    output::write_text(&path_for(prefix, "_boxcount_plot.py")?, &output::boxcount_script(&box_path, &png, &title))?;
    println!("D0 = {:.4} from {} quasi-energies", bc.d0, all.len());
    Ok(())
}

#[derive(Serialize)]
struct CheckEntry {
    claim: SymmetryClaim,
    kind: &'static str,
    ratio1: f64,
    ratio2: f64,
    rational: String,
    partner: String,
    theta_count: usize,
    perturbation: f64,
    distance: Option<f64>,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct SymmetryReport {
    all_passed: bool,
    checks: Vec<CheckEntry>,
}

pub fn check_symmetries(cfg: &RunConfig) -> Result<()> {
    let (requests, tol) = (|| -> Result<_> {
        let ratio1 = cfg.ratio1.unwrap_or(2.0);
        let ratio2 = cfg.ratio2.unwrap_or(1.3);
        let thetas = cfg.theta_count.unwrap_or(16);
        let default_kind = match &cfg.model {
            Some(m) => m.model_kind()?,
            None => ModelKind::ResonantDkrm,
        };
        let claims = cfg.claims.as_ref().ok_or_else(|| anyhow!("check-symmetries needs a claims list"))?;
        if claims.is_empty() {
            return Err(anyhow!("claims list is empty"));
        }
        let mut requests = Vec::new();
        for c in claims {
            let kind = match c.kind {
                Some(Kind::Khm) => ModelKind::Khm,
                Some(Kind::ResonantDkrm) => ModelKind::ResonantDkrm,
                Some(Kind::GeneralResonanceDkrm) => {
                    return Err(anyhow!("claims on general-resonance-dkrm take the kind from the model section"))
                }
                None => default_kind,
            };
            requests.push(SymmetryRequest {
                claim: c.claim,
                kind,
                ratio1: c.ratio1.unwrap_or(ratio1),
                ratio2: c.ratio2.unwrap_or(ratio2),
                rational: c.rational,
                theta_count: c.theta_count.unwrap_or(thetas),
                perturbation: c.perturbation,
            });
        }
        Ok((requests, cfg.tolerance.unwrap_or(SYMMETRY_TOL)))
    })()
    .map_err(config_error)?;

    let mut checks = Vec::new();
    for req in &requests {
        let c = check_symmetry_with_tol(req, tol).map_err(|e| match e {
            kharper::Error::InvalidArgument(_) => config_error(e.into()),
            other => other.into(),
        })?;
        let kind = match req.claim {
            SymmetryClaim::KhmPeriod | SymmetryClaim::KhmReflection => ModelKind::Khm.label(),
            SymmetryClaim::DkrmPeriod | SymmetryClaim::DkrmReflection => ModelKind::ResonantDkrm.label(),
            SymmetryClaim::Swap => req.kind.label(),
        };
        println!(
            "{} {} at 2pi*{} vs 2pi*{}: distance {:.3e} (tol {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            req.claim,
            req.rational,
            c.partner,
            c.distance,
            tol
        );
        checks.push(CheckEntry {
            claim: req.claim,
            kind,
            ratio1: req.ratio1,
            ratio2: req.ratio2,
            rational: req.rational.to_string(),
            partner: c.partner.to_string(),
            theta_count: req.theta_count,
            perturbation: req.perturbation,
            distance: c.distance.is_finite().then_some(c.distance),
            tolerance: tol,
            passed: c.passed,
        });
    }
    let all_passed = checks.iter().all(|c| c.passed);
    let failed = checks.iter().filter(|c| !c.passed).count();
    output::write_json(&path_for(cfg.output_prefix(), "_symmetries.json")?, &SymmetryReport { all_passed, checks })?;
    if all_passed {
        Ok(())
    } else {
        Err(CheckFailed(failed).into())
    }
}
