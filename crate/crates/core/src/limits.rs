//! Desk-scale empirical verification of the limit theorems: normal
//! convergence of X_t / sqrt(t/mu) and its decay rate, concentration of the
//! renewal count in the sub-diffusive regime, and the heavy-tail scaling of
//! X_t / t^{alpha/2}.

use serde::Serialize;

use crate::dist::{ExtendedReal, TrappingDistribution};
use crate::error::{Error, Result};
use crate::montecarlo::ensemble_samples;

/// Standard normal CDF. libm's erfc is accurate to a few ulp, far inside the
/// 1e-12 budget.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Exact Kolmogorov sup-distance between the empirical CDF of `samples` and
/// a continuous CDF.
pub fn kolmogorov_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("no NaN samples"));
    let n = xs.len() as f64;
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == v {
            j += 1;
        }
        let f = cdf(v);
        let below = i as f64 / n;
        let above = j as f64 / n;
        sup = sup.max((f - below).abs()).max((above - f).abs());
        i = j;
    }
    sup
}

/// Two-sample Kolmogorov sup-distance.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable_by(|p, q| p.partial_cmp(q).expect("no NaN samples"));
    ys.sort_unstable_by(|p, q| p.partial_cmp(q).expect("no NaN samples"));
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < xs.len() || j < ys.len() {
        let v = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        while j < ys.len() && ys[j] == v {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    sup
}

/// max_x |F(x) + F(-x) - P(X = -x) - 1| over the sample lattice; zero for a
/// law symmetric about the origin.
fn symmetry_defect(samples: &[i64]) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_unstable();
    let n = xs.len() as f64;
    // distinct values with cumulative counts
    let mut values = Vec::new();
    let mut cums = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == v {
            j += 1;
        }
        values.push(v);
        cums.push(j as f64);
        i = j;
    }
    let cdf_at = |x: i64| -> f64 {
        match values.binary_search(&x) {
            Ok(k) => cums[k] / n,
            Err(0) => 0.0,
            Err(k) => cums[k - 1] / n,
        }
    };
    let mass_at = |x: i64| -> f64 {
        match values.binary_search(&x) {
            Ok(k) => (cums[k] - if k == 0 { 0.0 } else { cums[k - 1] }) / n,
            Err(_) => 0.0,
        }
    };
    values
        .iter()
        .map(|&v| (cdf_at(v) + cdf_at(-v) - mass_at(-v) - 1.0).abs())
        .fold(0.0, f64::max)
}

fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Normal-convergence report for X_t / sqrt(t/mu).
#[derive(Debug, Clone, Serialize)]
pub struct CltReport {
    pub checkpoints: Vec<usize>,
    /// Kolmogorov distance to the standard normal per checkpoint.
    pub sup_distance: Vec<f64>,
    /// OLS slope of log sup_distance against log t.
    pub rate_fit: f64,
    /// (1 - alpha) / (1 + alpha) when alpha was declared.
    pub theoretical_rate: Option<f64>,
    /// C_T = E|T - E(T)|^alpha when alpha was declared.
    pub c_t: Option<ExtendedReal>,
    /// mu = E(T) + 1.
    pub mu: f64,
}

/// Samples X_t at the checkpoints and measures the Kolmogorov distance of
/// X_t / sqrt(t/mu) to the standard normal, plus the empirical decay rate.
pub fn clt_check(
    dist: &TrappingDistribution,
    checkpoints: &[usize],
    m: usize,
    seed: u64,
    alpha: Option<f64>,
) -> Result<CltReport> {
    let mean = match dist.mean() {
        ExtendedReal::Finite(v) => v,
        ExtendedReal::Infinite => return Err(Error::InfiniteMean),
    };
    let mu = mean + 1.0;
    let samples = ensemble_samples(dist, checkpoints, m, seed);
    let mut sup_distance = Vec::with_capacity(checkpoints.len());
    for (ci, &t) in checkpoints.iter().enumerate() {
        let scale = (t as f64 / mu).sqrt();
        let scaled: Vec<f64> = samples.samples[ci]
            .iter()
            .map(|&(x, _)| x as f64 / scale)
            .collect();
        sup_distance.push(kolmogorov_distance(&scaled, normal_cdf));
    }
    let xs: Vec<f64> = checkpoints.iter().map(|&t| (t as f64).ln()).collect();
    let ys: Vec<f64> = sup_distance.iter().map(|&d| d.max(1e-300).ln()).collect();
    let rate_fit = ols_slope(&xs, &ys);
    let c_t = match alpha {
        Some(a) => Some(dist.centered_abs_moment(a)?),
        None => None,
    };
    Ok(CltReport {
        checkpoints: checkpoints.to_vec(),
        sup_distance,
        rate_fit,
        theoretical_rate: alpha.map(|a| (1.0 - a) / (1.0 + a)),
        c_t,
        mu,
    })
}

/// Concentration report for N_t in the sub-diffusive regime.
#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub alpha: f64,
    pub checkpoints: Vec<usize>,
    /// h(t) = P(T >= t) (t+1)^alpha.
    pub h: Vec<f64>,
    /// Empirical P(N_t outside t^alpha [h, h^{-2}]); None when the interval
    /// is ill-formed (h >= 1) and the checkpoint was skipped.
    pub violation_freq: Vec<Option<f64>>,
    /// violation_freq / h.
    pub ratio: Vec<Option<f64>>,
}

/// Estimates P(N_t outside t^alpha [h(t), h(t)^{-2}]) by simulation, with
/// h computed exactly from the trapping law.
pub fn concentration_check(
    dist: &TrappingDistribution,
    alpha: f64,
    checkpoints: &[usize],
    m: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "concentration check needs alpha in (0,1), got {alpha}"
        )));
    }
    if let TrappingDistribution::PowerLawZeta { q } = dist {
        if (alpha - (q - 1.0)).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "for the power law with q={q} the moment boundary is alpha = {}, got {alpha}",
                q - 1.0
            )));
        }
    }
    let samples = ensemble_samples(dist, checkpoints, m, seed);
    let mut h_values = Vec::with_capacity(checkpoints.len());
    let mut violation_freq = Vec::with_capacity(checkpoints.len());
    let mut ratio = Vec::with_capacity(checkpoints.len());
    for (ci, &t) in checkpoints.iter().enumerate() {
        let h = dist.tail(t as u64) * ((t + 1) as f64).powf(alpha);
        h_values.push(h);
        if h >= 1.0 {
            violation_freq.push(None);
            ratio.push(None);
            continue;
        }
        let ta = (t as f64).powf(alpha);
        let lo = ta * h;
        let hi = ta / (h * h);
        let violations = samples.samples[ci]
            .iter()
            .filter(|&&(_, n)| (n as f64) < lo || (n as f64) > hi)
            .count();
        let freq = violations as f64 / m as f64;
        violation_freq.push(Some(freq));
        ratio.push(Some(freq / h));
    }
    Ok(ConcentrationReport {
        alpha,
        checkpoints: checkpoints.to_vec(),
        h: h_values,
        violation_freq,
        ratio,
    })
}

/// Convergence diagnostics for the heavy-tail scaling X_t / t^{alpha/2}.
#[derive(Debug, Clone, Serialize)]
pub struct HeavyTailReport {
    pub alpha: f64,
    pub checkpoints: Vec<usize>,
    /// Two-sample sup-distance between consecutive checkpoints (a Cauchy
    /// convergence proxy; shrinking values indicate convergence in law).
    pub pairwise_sup: Vec<f64>,
    /// max_x |F(x) + F(-x) - P(X=-x) - 1| per checkpoint.
    pub symmetry_defect: Vec<f64>,
    /// Sample E (X_t / t^{alpha/2})^2 per checkpoint; reported, not asserted.
    pub scaled_second_moment: Vec<f64>,
}

/// Empirical-law self-consistency across checkpoints under the heavy-tail
/// scaling. alpha = 1 is the degenerate diffusive boundary and is allowed.
pub fn heavy_tail_scaling_check(
    dist: &TrappingDistribution,
    alpha: f64,
    checkpoints: &[usize],
    m: usize,
    seed: u64,
) -> Result<HeavyTailReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "heavy-tail scaling needs alpha in (0,1], got {alpha}"
        )));
    }
    let samples = ensemble_samples(dist, checkpoints, m, seed);
    let scaled: Vec<Vec<f64>> = checkpoints
        .iter()
        .enumerate()
        .map(|(ci, &t)| {
            let scale = (t as f64).powf(alpha / 2.0);
            samples.samples[ci]
                .iter()
                .map(|&(x, _)| x as f64 / scale)
                .collect()
        })
        .collect();
    let pairwise_sup: Vec<f64> = scaled
        .windows(2)
        .map(|w| two_sample_ks(&w[0], &w[1]))
        .collect();
    let symmetry: Vec<f64> = (0..checkpoints.len())
        .map(|ci| {
            let raw: Vec<i64> = samples.samples[ci].iter().map(|&(x, _)| x).collect();
            symmetry_defect(&raw)
        })
        .collect();
    let second: Vec<f64> = scaled
        .iter()
        .map(|v| v.iter().map(|&x| x * x).sum::<f64>() / v.len() as f64)
        .collect();
    Ok(HeavyTailReport {
        alpha,
        checkpoints: checkpoints.to_vec(),
        pairwise_sup,
        symmetry_defect: symmetry,
        scaled_second_moment: second,
    })
}
