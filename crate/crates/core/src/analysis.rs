//! Transport exponents, box counting and circular multiset comparison.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::model::ModelSpec;
use crate::{Error, Result};

/// Momentum variance recorded along an evolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSeries {
    steps: Vec<u64>,
    variance: Vec<f64>,
    leak: Vec<f64>,
    model: ModelSpec,
    final_norm: f64,
    lattice_len: usize,
}

impl DiffusionSeries {
    pub fn new(
        steps: Vec<u64>,
        variance: Vec<f64>,
        leak: Vec<f64>,
        model: ModelSpec,
        final_norm: f64,
        lattice_len: usize,
    ) -> Result<Self> {
        if steps.len() != variance.len() || steps.len() != leak.len() {
            return Err(Error::invalid("series arrays differ in length"));
        }
        if steps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("steps must be strictly increasing"));
        }
        if variance.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::invalid("variance must be >= 0"));
        }
        Ok(DiffusionSeries { steps, variance, leak, model, final_norm, lattice_len })
    }

    pub fn steps(&self) -> &[u64] {
        &self.steps
    }

    pub fn variance(&self) -> &[f64] {
        &self.variance
    }

    pub fn leak(&self) -> &[f64] {
        &self.leak
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn final_norm(&self) -> f64 {
        self.final_norm
    }

    /// Lattice size at the end of the run.
    pub fn lattice_len(&self) -> usize {
        self.lattice_len
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// `σ² ≈ exp(log_prefactor) · t^alpha` over `window`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub log_prefactor: f64,
    pub window: (u64, u64),
    /// RMS residual of the fit in `(ln t, ln σ²)`.
    pub rms_residual: f64,
    pub samples: usize,
}

/// Least-squares line through `(ln t, ln σ²)` for samples with
/// `t_lo <= t <= t_hi` and `σ² > 0`.
pub fn fit_power_law(series: &DiffusionSeries, window: (u64, u64)) -> Result<PowerLawFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = series
        .steps
        .iter()
        .zip(&series.variance)
        .filter(|(&t, &v)| t >= window.0 && t <= window.1 && v > 0.0)
        .map(|(&t, &v)| ((t as f64).ln(), v.ln()))
        .unzip();
    if xs.len() < 10 {
        return Err(Error::invalid(format!(
            "power-law fit needs >= 10 positive samples in [{}, {}], found {}",
            window.0,
            window.1,
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::invalid("fit window contains a single time"));
    }
    let alpha = sxy / sxx;
    let icept = my - alpha * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - icept - alpha * x).powi(2)).sum();
    Ok(PowerLawFit { alpha, log_prefactor: icept, window, rms_residual: (rss / n).sqrt(), samples: xs.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transport {
    Localized,
    Subdiffusive,
    Diffusive,
    Ballistic,
}

impl Transport {
    pub fn as_str(&self) -> &'static str {
        match self {
            Transport::Localized => "localized",
            Transport::Subdiffusive => "subdiffusive",
            Transport::Diffusive => "diffusive",
            Transport::Ballistic => "ballistic",
        }
    }
}

pub const BALLISTIC_ALPHA: f64 = 1.8;

/// True when the maximum over the last decade of recorded time stays below
/// twice the maximum over the decade before it. A power law `t^α` gives a
/// ratio of `10^α`, a bounded series a ratio near one however strongly it
/// oscillates.
pub fn has_plateau(series: &DiffusionSeries) -> bool {
    let Some(&t_end) = series.steps.last() else {
        return false;
    };
    let last_lo = t_end as f64 / 10.0;
    let prev_lo = t_end as f64 / 100.0;
    let (mut last_max, mut prev_max) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (&t, &v) in series.steps.iter().zip(&series.variance) {
        let t = t as f64;
        if t > last_lo {
            last_max = last_max.max(v);
        } else if t > prev_lo {
            prev_max = prev_max.max(v);
        }
    }
    if last_max == f64::NEG_INFINITY || prev_max == f64::NEG_INFINITY {
        return false;
    }
    last_max < 2.0 * prev_max
}

/// Localized when the variance plateaus; otherwise by exponent:
/// ballistic for `alpha >= 1.8`, diffusive for `0.9 <= alpha < 1.1`,
/// subdiffusive for everything else.
pub fn classify_transport(fit: &PowerLawFit, series: &DiffusionSeries) -> Transport {
    if has_plateau(series) {
        Transport::Localized
    } else if fit.alpha >= BALLISTIC_ALPHA {
        Transport::Ballistic
    } else if (0.9..1.1).contains(&fit.alpha) {
        Transport::Diffusive
    } else {
        Transport::Subdiffusive
    }
}

/// Hausdorff dimension of the spectrum inferred from the diffusion exponent,
/// `D_H = alpha / 2`.
pub fn hausdorff_from_alpha(alpha: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 2], got {alpha}")));
    }
    Ok(alpha / 2.0)
}

/// Default box-count ladder `2^4 ..= 2^12`.
pub fn default_scales() -> Vec<usize> {
    (4..=12).map(|k| 1usize << k).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCounting {
    pub d0: f64,
    /// RMS residual of the `ln N_occ` vs `ln N_boxes` fit.
    pub residual: f64,
    /// `(N_boxes, N_occupied)` for every requested scale.
    pub counts: Vec<(usize, usize)>,
    /// Scales kept for the fit.
    pub fitted: Vec<usize>,
}

/// Maps a quasi-energy in `(-π, π]` to its box among `n` equal arcs.
fn box_index(eps: f64, n: usize) -> usize {
    let u = (eps + PI).rem_euclid(2.0 * PI) / (2.0 * PI);
    ((u * n as f64) as usize).min(n - 1)
}

/// Box-counting dimension of a point set on the circle.
///
/// Scales where the count saturates are dropped: a scale whose count
/// reaches the number of distinct points carries no further information, and
/// leading (coarse) scales with every box occupied are skipped unless no
/// finer scale has a gap.
pub fn box_counting_dimension(points: &[f64], scales: &[usize]) -> Result<BoxCounting> {
    if points.len() < 100 {
        return Err(Error::invalid(format!("box counting needs >= 100 points, got {}", points.len())));
    }
    if scales.len() < 4 || scales.contains(&0) {
        return Err(Error::invalid("box counting needs >= 4 positive scales"));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    sorted.dedup();
    let distinct = sorted.len();

    let mut scales = scales.to_vec();
    scales.sort_unstable();
    scales.dedup();

    let counts: Vec<(usize, usize)> = scales
        .iter()
        .map(|&n| {
            let mut occupied = vec![false; n];
            for &p in &sorted {
                occupied[box_index(p, n)] = true;
            }
            (n, occupied.iter().filter(|&&o| o).count())
        })
        .collect();

    if distinct == 1 {
        return Ok(BoxCounting { d0: 0.0, residual: 0.0, counts, fitted: Vec::new() });
    }

    let unsaturated: Vec<(usize, usize)> = counts.iter().copied().filter(|&(_, occ)| occ < distinct).collect();
    let first_gap = unsaturated.iter().position(|&(n, occ)| occ < n);
    let kept: Vec<(usize, usize)> = match first_gap {
        Some(k) => unsaturated[k..].to_vec(),
        None => unsaturated.clone(),
    };
    if kept.len() < 2 {
        return Err(Error::invalid("fewer than two usable scales after saturation filtering"));
    }

    let xs: Vec<f64> = kept.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|&(_, o)| (o as f64).ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let d0 = sxy / sxx;
    let c = my - d0 * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - c - d0 * x).powi(2)).sum::<f64>() / m).sqrt();
    Ok(BoxCounting { d0, residual, counts, fitted: kept.iter().map(|&(n, _)| n).collect() })
}

/// Shortest arc between two angles, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Length of the empty arc between the two consecutive points (in circular
/// order) that enclose `angle`. A point exactly at `angle` counts as the
/// upper end.
pub fn gap_across(points: &[f64], angle: f64) -> f64 {
    if points.is_empty() {
        return 2.0 * PI;
    }
    // offsets measured counter-clockwise from `angle`
    let offsets = points.iter().map(|&p| (p - angle).rem_euclid(2.0 * PI));
    let (mut ahead, mut behind) = (f64::INFINITY, f64::INFINITY);
    for o in offsets {
        ahead = ahead.min(o);
        if o > 0.0 {
            behind = behind.min(2.0 * PI - o);
        }
    }
    if behind == f64::INFINITY {
        // every point sits at `angle`
        return 2.0 * PI;
    }
    ahead + behind
}

/// Bottleneck distance between two equal-size multisets of angles.
///
/// Both sets are sorted around the circle and every cyclic alignment is
/// tried; the result is the smallest achievable maximum circular distance
/// between matched points.
pub fn spectrum_set_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("multiset sizes differ: {} vs {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let norm = |v: &[f64]| {
        let mut w: Vec<f64> = v.iter().map(|x| x.rem_euclid(2.0 * PI)).collect();
        w.sort_by(|x, y| x.total_cmp(y));
        w
    };
    let (a, b) = (norm(a), norm(b));
    let n = a.len();
    let mut best = f64::INFINITY;
    for shift in 0..n {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            worst = worst.max(circular_distance(a[i], b[(i + shift) % n]));
            if worst >= best {
                break;
            }
        }
        best = best.min(worst);
        if best == 0.0 {
            break;
        }
    }
    Ok(best)
}
