//! Power-law exponent fits of MSD series, the finite-observation beta sweep,
//! sigmoidal meta-fits of beta(q), and the slow-variation diagnostic
//! h(t) = sigma^2_t / t^beta.

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::TrappingDistribution;
use crate::error::{Error, Result};
use crate::msd::{msd_series_with_limit, MsdSeries};

/// Result of an ordinary least-squares power-law fit in log-log space.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    pub beta: f64,
    pub log_intercept: f64,
    pub t_min: usize,
    pub t_max: usize,
    /// RMS of log-space residuals.
    pub rms_residual: f64,
}

/// One row of a beta sweep table.
#[derive(Debug, Clone, Serialize)]
pub struct BetaSweepRow {
    pub q: f64,
    pub n: usize,
    pub beta: f64,
    pub rms_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SigmoidModel {
    /// beta(q) = 2 / (1 + exp(r |q-3|^eta))
    TwoParam,
    /// beta(q) = c + 2(1-c) / (1 + exp(r |q-3|^eta))
    ThreeParam,
}

/// Sigmoidal meta-fit of a beta(q) curve.
#[derive(Debug, Clone, Serialize)]
pub struct SigmoidFit {
    pub model: SigmoidModel,
    pub r: f64,
    pub eta: f64,
    /// Present for the three-parameter model only.
    pub c: Option<f64>,
    pub rms_residual: f64,
}

impl SigmoidFit {
    pub fn eval(&self, q: f64) -> f64 {
        sigmoid_value(q, self.r, self.eta, self.c.unwrap_or(0.0))
    }
}

fn sigmoid_value(q: f64, r: f64, eta: f64, c: f64) -> f64 {
    c + 2.0 * (1.0 - c) / (1.0 + (r * (q - 3.0).abs().powf(eta)).exp())
}

/// Unweighted OLS of log sigma^2 against log t over every integer t in
/// [t_min, t_max].
pub fn powerlaw_fit(series: &MsdSeries, t_min: usize, t_max: usize) -> Result<ExponentFit> {
    if t_min < 1 || t_min >= t_max || t_max > series.horizon {
        return Err(Error::Window(format!(
            "need 1 <= t_min < t_max <= {}, got [{t_min}, {t_max}]",
            series.horizon
        )));
    }
    if series.sigma2[t_min..=t_max].iter().any(|&v| v <= 0.0) {
        return Err(Error::Window(
            "sigma^2 must be positive on the fit window".into(),
        ));
    }
    let n = (t_max - t_min + 1) as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for t in t_min..=t_max {
        sx += (t as f64).ln();
        sy += series.sigma2[t].ln();
    }
    let (mx, my) = (sx / n, sy / n);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for t in t_min..=t_max {
        let dx = (t as f64).ln() - mx;
        let dy = series.sigma2[t].ln() - my;
        sxx += dx * dx;
        sxy += dx * dy;
    }
    let beta = sxy / sxx;
    let log_intercept = my - beta * mx;
    let mut rss = 0.0;
    for t in t_min..=t_max {
        let resid = series.sigma2[t].ln() - (log_intercept + beta * (t as f64).ln());
        rss += resid * resid;
    }
    Ok(ExponentFit {
        beta,
        log_intercept,
        t_min,
        t_max,
        rms_residual: (rss / n).sqrt(),
    })
}

/// Power-law trapping law restricted to the observation horizon `m` and
/// renormalized: the law a finite observation window actually exposes.
pub fn horizon_truncated_zeta(q: f64, m: usize) -> Result<TrappingDistribution> {
    if q.is_nan() || q <= 1.0 {
        return Err(Error::Validation(format!("need q > 1, got {q}")));
    }
    let mut pmf: Vec<f64> = (0..=m).map(|tau| ((tau + 1) as f64).powf(-q)).collect();
    let norm = crate::dist::kahan_sum(pmf.iter().copied());
    for p in &mut pmf {
        *p /= norm;
    }
    Ok(TrappingDistribution::Custom { pmf })
}

/// Computes the beta_N(q) exponent table.
///
/// For each q the MSD recurrence runs once to max(n_list) under the
/// finite-observation law of [`horizon_truncated_zeta`], and each window
/// [t_min, N] is fitted by [`powerlaw_fit`]. Rows come out ordered by (q, N).
pub fn beta_sweep(q_grid: &[f64], n_list: &[usize], t_min: usize) -> Result<Vec<BetaSweepRow>> {
    if q_grid.is_empty() || n_list.is_empty() {
        return Err(Error::Window("empty q grid or horizon list".into()));
    }
    let n_max = *n_list.iter().max().expect("non-empty");
    let mut per_q: Vec<Vec<BetaSweepRow>> = q_grid
        .par_iter()
        .map(|&q| -> Result<Vec<BetaSweepRow>> {
            let dist = horizon_truncated_zeta(q, n_max)?;
            let series = msd_series_with_limit(&dist, n_max, n_max)?;
            let mut out = Vec::with_capacity(n_list.len());
            for &n in n_list {
                let fit = powerlaw_fit(&series, t_min, n)?;
                out.push(BetaSweepRow {
                    q,
                    n,
                    beta: fit.beta,
                    rms_residual: fit.rms_residual,
                });
            }
            out.sort_by_key(|row| row.n);
            Ok(out)
        })
        .collect::<Result<_>>()?;
    per_q.sort_by(|a, b| a[0].q.partial_cmp(&b[0].q).expect("finite q"));
    Ok(per_q.into_iter().flatten().collect())
}

/// Fits the sigmoidal model to (q, beta) points: a coarse log-spaced grid
/// over (r, eta[, c]) followed by a derivative-free pattern search.
/// Deterministic, and invariant to the order of the input points.
pub fn sigmoid_fit(points: &[(f64, f64)], model: SigmoidModel) -> Result<SigmoidFit> {
    let min_points = match model {
        SigmoidModel::TwoParam => 4,
        SigmoidModel::ThreeParam => 5,
    };
    if points.len() < min_points {
        return Err(Error::Window(format!(
            "sigmoid fit needs at least {min_points} points, got {}",
            points.len()
        )));
    }
    // canonical order makes the residual sums, and hence the whole fit,
    // independent of how the caller ordered the points
    let mut points = points.to_vec();
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    let rms = |r: f64, eta: f64, c: f64| -> f64 {
        let ss: f64 = points
            .iter()
            .map(|&(q, beta)| {
                let e = sigmoid_value(q, r, eta, c) - beta;
                e * e
            })
            .sum();
        (ss / points.len() as f64).sqrt()
    };
    let log_space = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
            .collect()
    };
    let r_grid = log_space(1e-2, 1e2, 32);
    let eta_grid = log_space(1e-1, 1e1, 32);
    let c_grid: Vec<f64> = match model {
        SigmoidModel::TwoParam => vec![0.0],
        SigmoidModel::ThreeParam => log_space(1e-3, 1.0, 16),
    };
    let mut best = (f64::INFINITY, 0.0, 0.0, 0.0);
    for &r in &r_grid {
        for &eta in &eta_grid {
            for &c in &c_grid {
                let v = rms(r, eta, c);
                if v < best.0 {
                    best = (v, r, eta, c);
                }
            }
        }
    }
    let grid_best = best.0;
    // pattern search on (ln r, ln eta, c) with shrinking steps
    let (mut r, mut eta, mut c) = (best.1, best.2, best.3);
    let mut value = best.0;
    let mut step = 0.5f64;
    for _ in 0..200 {
        let mut improved = false;
        let up = step.exp();
        let down = (-step).exp();
        let dc = 0.25 * step;
        let c_moves: &[f64] = match model {
            SigmoidModel::TwoParam => &[0.0],
            SigmoidModel::ThreeParam => &[0.0, dc, -dc],
        };
        // full 3^k - 1 stencil: multiplicative in (r, eta), additive in c
        let mut candidates = Vec::with_capacity(26);
        for rm in [1.0, up, down] {
            for em in [1.0, up, down] {
                for &cm in c_moves {
                    if rm == 1.0 && em == 1.0 && cm == 0.0 {
                        continue;
                    }
                    candidates.push((r * rm, eta * em, (c + cm).clamp(0.0, 1.0 - 1e-9)));
                }
            }
        }
        for (rr, ee, cc) in candidates {
            let v = rms(rr, ee, cc);
            if v < value {
                value = v;
                r = rr;
                eta = ee;
                c = cc;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    if value > grid_best {
        return Err(Error::FitDiverged);
    }
    Ok(SigmoidFit {
        model,
        r,
        eta,
        c: match model {
            SigmoidModel::TwoParam => None,
            SigmoidModel::ThreeParam => Some(c),
        },
        rms_residual: value,
    })
}

/// Slow-variation diagnostic of a series against exponent `beta`.
#[derive(Debug, Clone, Serialize)]
pub struct SlowVariationProfile {
    pub beta: f64,
    /// h(t) = sigma^2_t / t^beta for t = 1..=N (index 0 is t = 1).
    pub h: Vec<f64>,
    /// (k, local log-log slope of h over [2^k, 2^{k+1}]).
    pub window_slopes: Vec<(u32, f64)>,
    /// max |slope| over the dyadic windows; drifts toward 0 when h varies
    /// slower than any power law.
    pub score: f64,
}

/// Computes h(t) = sigma^2_t / t^beta and its dyadic-window log-log slopes.
pub fn slow_variation_profile(series: &MsdSeries, beta: f64) -> SlowVariationProfile {
    assert!(beta > 0.0 && beta <= 1.0, "beta must lie in (0, 1]");
    let n = series.horizon;
    let h: Vec<f64> = (1..=n)
        .map(|t| series.sigma2[t] / (t as f64).powf(beta))
        .collect();
    let mut window_slopes = Vec::new();
    let mut k = 0u32;
    while (2usize << k) <= n {
        let lo = 1usize << k;
        let hi = 2usize << k;
        let m = (hi - lo + 1) as f64;
        let (mut sx, mut sy) = (0.0, 0.0);
        for t in lo..=hi {
            sx += (t as f64).ln();
            sy += h[t - 1].max(1e-300).ln();
        }
        let (mx, my) = (sx / m, sy / m);
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for t in lo..=hi {
            let dx = (t as f64).ln() - mx;
            sxx += dx * dx;
            sxy += dx * (h[t - 1].max(1e-300).ln() - my);
        }
        if sxx > 0.0 {
            window_slopes.push((k, sxy / sxx));
        }
        k += 1;
    }
    let score = window_slopes
        .iter()
        .map(|&(_, s)| s.abs())
        .fold(0.0, f64::max);
    SlowVariationProfile {
        beta,
        h,
        window_slopes,
        score,
    }
}
