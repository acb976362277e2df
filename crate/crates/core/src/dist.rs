//! Trapping-time distributions on the non-negative integers.
//!
//! Every law exposes its pmf, upper tail, fractional moments (with certified
//! truncation error), the stationary companion law of the trap-countdown
//! chain, and an exact sampler. Values that can diverge are reported as
//! [`ExtendedReal`] rather than floating-point infinities so callers can
//! branch on finiteness.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::zeta::{hurwitz_zeta, zeta};

/// A non-negative quantity that may be infinite (diverging moments).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(*v),
            ExtendedReal::Infinite => None,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use ExtendedReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (Finite(_), Infinite) => Some(std::cmp::Ordering::Less),
            (Infinite, Finite(_)) => Some(std::cmp::Ordering::Greater),
            (Infinite, Infinite) => Some(std::cmp::Ordering::Equal),
        }
    }
}

impl std::fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

/// Distribution of the per-site trapping time `T`.
#[derive(Debug, Clone, PartialEq)]
pub enum TrappingDistribution {
    /// p(tau) = (1 - lambda) * lambda^tau, lambda in (0, 1).
    Exponential { lambda: f64 },
    /// p(tau) = (tau + 1)^{-q} / zeta(q), q > 1.
    PowerLawZeta { q: f64 },
    /// Unit mass at tau0.
    Deterministic { tau0: u64 },
    /// Dense finite-support pmf over tau = 0..len-1, summing to 1.
    Custom { pmf: Vec<f64> },
}

/// Largest accepted support for custom distributions.
const CUSTOM_SUPPORT_LIMIT: u64 = 1 << 24;

impl TrappingDistribution {
    pub fn exponential(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Validation(format!(
                "exponential trapping needs lambda in (0,1), got {lambda}"
            )));
        }
        Ok(TrappingDistribution::Exponential { lambda })
    }

    pub fn power_law_zeta(q: f64) -> Result<Self> {
        if q.is_nan() || q <= 1.0 {
            return Err(Error::Validation(format!(
                "power-law trapping needs q > 1, got {q}"
            )));
        }
        Ok(TrappingDistribution::PowerLawZeta { q })
    }

    pub fn deterministic(tau0: u64) -> Self {
        TrappingDistribution::Deterministic { tau0 }
    }

    /// Builds a custom law from `(tau, prob)` atoms sorted by `tau`.
    ///
    /// When the listed mass falls short of 1, the remainder must be declared
    /// explicitly via `tail_atom`; it is placed as a single atom one past the
    /// largest listed `tau`.
    pub fn custom(entries: &[(u64, f64)], tail_atom: Option<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation("custom pmf has no entries".into()));
        }
        let mut max_tau = 0u64;
        let mut prev: Option<u64> = None;
        let mut total = 0.0f64;
        for &(tau, prob) in entries {
            if let Some(p) = prev {
                if tau <= p {
                    return Err(Error::Validation(format!(
                        "custom pmf rows must be strictly increasing in tau (saw {tau} after {p})"
                    )));
                }
            }
            if !(prob >= 0.0 && prob.is_finite()) {
                return Err(Error::Validation(format!(
                    "custom pmf value for tau={tau} must be a finite non-negative probability"
                )));
            }
            total += prob;
            if total > 1.0 + 1e-12 {
                return Err(Error::Validation(format!(
                    "custom pmf mass exceeds 1 at tau={tau} (cumulative {total})"
                )));
            }
            prev = Some(tau);
            max_tau = tau;
        }
        let remainder = 1.0 - total;
        let support = match tail_atom {
            Some(t) => {
                if (t - remainder).abs() > 1e-9 {
                    return Err(Error::Validation(format!(
                        "tail row declares {t} but the unassigned mass is {remainder}"
                    )));
                }
                max_tau + 2
            }
            None => {
                if remainder.abs() > 1e-12 {
                    return Err(Error::Validation(format!(
                        "custom pmf mass is {total}; add a final tail row or make it sum to 1"
                    )));
                }
                max_tau + 1
            }
        };
        if support > CUSTOM_SUPPORT_LIMIT {
            return Err(Error::Validation(format!(
                "custom pmf support {support} exceeds the {CUSTOM_SUPPORT_LIMIT} limit"
            )));
        }
        let mut pmf = vec![0.0; support as usize];
        for &(tau, prob) in entries {
            pmf[tau as usize] = prob;
        }
        if tail_atom.is_some() {
            pmf[(max_tau + 1) as usize] = remainder;
        }
        // remove rounding drift so the mass is exactly 1 in f64
        let sum: f64 = kahan_sum(pmf.iter().copied());
        if sum > 0.0 && (sum - 1.0).abs() > 0.0 {
            for v in &mut pmf {
                *v /= sum;
            }
        }
        Ok(TrappingDistribution::Custom { pmf })
    }

    /// Canonical spec string (`exp:<l>`, `zeta:<q>`, `det:<tau0>`, `custom`).
    pub fn spec_string(&self) -> String {
        match self {
            TrappingDistribution::Exponential { lambda } => format!("exp:{lambda}"),
            TrappingDistribution::PowerLawZeta { q } => format!("zeta:{q}"),
            TrappingDistribution::Deterministic { tau0 } => format!("det:{tau0}"),
            TrappingDistribution::Custom { .. } => "custom".to_string(),
        }
    }

    /// P(T = tau).
    pub fn pmf(&self, tau: u64) -> f64 {
        match self {
            TrappingDistribution::Exponential { lambda } => {
                (1.0 - lambda) * lambda.powf(tau as f64)
            }
            TrappingDistribution::PowerLawZeta { q } => {
                ((tau + 1) as f64).powf(-q) / zeta(*q).expect("validated q > 1")
            }
            TrappingDistribution::Deterministic { tau0 } => {
                if tau == *tau0 {
                    1.0
                } else {
                    0.0
                }
            }
            TrappingDistribution::Custom { pmf } => pmf.get(tau as usize).copied().unwrap_or(0.0),
        }
    }

    /// Upper tail P(T >= tau).
    pub fn tail(&self, tau: u64) -> f64 {
        if tau == 0 {
            return 1.0;
        }
        match self {
            TrappingDistribution::Exponential { lambda } => lambda.powf(tau as f64),
            TrappingDistribution::PowerLawZeta { q } => {
                hurwitz_zeta(*q, (tau + 1) as f64).expect("validated q > 1")
                    / zeta(*q).expect("validated q > 1")
            }
            TrappingDistribution::Deterministic { tau0 } => {
                if tau <= *tau0 {
                    1.0
                } else {
                    0.0
                }
            }
            TrappingDistribution::Custom { pmf } => {
                if tau as usize >= pmf.len() {
                    0.0
                } else {
                    kahan_sum(pmf[tau as usize..].iter().copied())
                }
            }
        }
    }

    /// E(T^alpha) for alpha > 0, reported as infinite exactly when divergent.
    pub fn moment(&self, alpha: f64) -> ExtendedReal {
        assert!(alpha > 0.0, "moment order must be positive");
        match self {
            TrappingDistribution::Deterministic { tau0 } => {
                ExtendedReal::Finite((*tau0 as f64).powf(alpha))
            }
            TrappingDistribution::Custom { pmf } => {
                let s = kahan_sum(
                    pmf.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(tau, p)| (tau as f64).powf(alpha) * p),
                );
                ExtendedReal::Finite(s)
            }
            TrappingDistribution::Exponential { lambda } => {
                ExtendedReal::Finite(geometric_series_moment(*lambda, alpha, 0.0))
            }
            TrappingDistribution::PowerLawZeta { q } => {
                if alpha >= q - 1.0 {
                    return ExtendedReal::Infinite;
                }
                let norm = zeta(*q).expect("validated q > 1");
                let cut = 1024u64;
                let mut head = 0.0;
                let mut comp = 0.0;
                for tau in 1..cut {
                    let term = (tau as f64).powf(alpha) * ((tau + 1) as f64).powf(-q);
                    let y = term - comp;
                    let t = head + y;
                    comp = (t - head) - y;
                    head = t;
                }
                let tail = power_tail_shifted_moment(*q, alpha, 0.0, cut);
                ExtendedReal::Finite((head + tail) / norm)
            }
        }
    }

    /// E(T) as an extended real.
    pub fn mean(&self) -> ExtendedReal {
        self.moment(1.0)
    }

    /// Centered absolute moment E(|T - E(T)|^alpha) for alpha in (1, 2].
    pub fn centered_abs_moment(&self, alpha: f64) -> Result<ExtendedReal> {
        assert!(
            alpha > 1.0 && alpha <= 2.0,
            "centered moment order must lie in (1, 2]"
        );
        let mean = match self.mean() {
            ExtendedReal::Finite(m) => m,
            ExtendedReal::Infinite => return Err(Error::InfiniteMean),
        };
        let value = match self {
            TrappingDistribution::Deterministic { .. } => ExtendedReal::Finite(0.0),
            TrappingDistribution::Custom { pmf } => {
                let s = kahan_sum(
                    pmf.iter()
                        .enumerate()
                        .map(|(tau, p)| (tau as f64 - mean).abs().powf(alpha) * p),
                );
                ExtendedReal::Finite(s)
            }
            TrappingDistribution::Exponential { lambda } => {
                ExtendedReal::Finite(geometric_series_moment(*lambda, alpha, mean))
            }
            TrappingDistribution::PowerLawZeta { q } => {
                if alpha >= q - 1.0 {
                    ExtendedReal::Infinite
                } else {
                    let norm = zeta(*q).expect("validated q > 1");
                    let cut = 1024u64.max(8 * (mean.ceil() as u64 + 2));
                    let mut head = 0.0;
                    let mut comp = 0.0;
                    for tau in 0..cut {
                        let term =
                            (tau as f64 - mean).abs().powf(alpha) * ((tau + 1) as f64).powf(-q);
                        let y = term - comp;
                        let t = head + y;
                        comp = (t - head) - y;
                        head = t;
                    }
                    let tail = power_tail_shifted_moment(*q, alpha, mean, cut);
                    ExtendedReal::Finite((head + tail) / norm)
                }
            }
        };
        Ok(value)
    }

    /// D = 1 / (E(T) + 1), the asymptotic MSD slope in the diffusive regime.
    pub fn diffusion_coefficient(&self) -> Result<f64> {
        match self.mean() {
            ExtendedReal::Finite(m) => Ok(1.0 / (m + 1.0)),
            ExtendedReal::Infinite => Err(Error::InfiniteMean),
        }
    }

    /// Stationary law pi(tau) = D * P(T >= tau) of the trap-countdown chain.
    pub fn stationary(&self, tau: u64) -> Result<f64> {
        let d = self.diffusion_coefficient()?;
        Ok(d * self.tail(tau))
    }

    /// E(T * 1{T >= k}), finite-mean laws only.
    pub(crate) fn mean_tail(&self, k: u64) -> Result<f64> {
        match self {
            TrappingDistribution::Exponential { lambda } => {
                let l = *lambda;
                Ok(l.powf(k as f64) * (k as f64 * (1.0 - l) + l) / (1.0 - l))
            }
            TrappingDistribution::PowerLawZeta { q } => {
                if *q <= 2.0 {
                    return Err(Error::InfiniteMean);
                }
                let norm = zeta(*q).expect("validated q > 1");
                let a = (k + 1) as f64;
                Ok((hurwitz_zeta(q - 1.0, a)? - hurwitz_zeta(*q, a)?) / norm)
            }
            TrappingDistribution::Deterministic { tau0 } => {
                Ok(if *tau0 >= k { *tau0 as f64 } else { 0.0 })
            }
            TrappingDistribution::Custom { pmf } => {
                let start = (k as usize).min(pmf.len());
                Ok(kahan_sum(
                    pmf[start..]
                        .iter()
                        .enumerate()
                        .map(|(i, p)| (start + i) as f64 * p),
                ))
            }
        }
    }

    /// Dense pmf table for tau = 0..len-1 (amortizes the normalizer).
    pub(crate) fn pmf_table(&self, len: usize) -> Vec<f64> {
        match self {
            TrappingDistribution::Exponential { lambda } => {
                // powf per entry: each value is accurate to a couple of ulp
                // and underflows to an exact zero, unlike a running product
                // which drifts systematically and lingers in subnormals
                (0..len)
                    .map(|tau| (1.0 - lambda) * lambda.powf(tau as f64))
                    .collect()
            }
            TrappingDistribution::PowerLawZeta { q } => {
                let norm = zeta(*q).expect("validated q > 1");
                (0..len)
                    .map(|tau| ((tau + 1) as f64).powf(-q) / norm)
                    .collect()
            }
            TrappingDistribution::Deterministic { tau0 } => {
                let mut out = vec![0.0; len];
                if (*tau0 as usize) < len {
                    out[*tau0 as usize] = 1.0;
                }
                out
            }
            TrappingDistribution::Custom { pmf } => {
                let mut out = pmf.clone();
                out.resize(len.max(out.len()), 0.0);
                out.truncate(len);
                out
            }
        }
    }
}

/// Compensated sum.
pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// sum_{tau >= 0} |tau - shift|^alpha (1-lambda) lambda^tau with a certified
/// geometric remainder bound.
fn geometric_series_moment(lambda: f64, alpha: f64, shift: f64) -> f64 {
    let mut acc = 0.0;
    let mut comp = 0.0;
    let mut weight = 1.0 - lambda;
    let mut tau = 0u64;
    loop {
        let term = (tau as f64 - shift).abs().powf(alpha) * weight;
        let y = term - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        weight *= lambda;
        tau += 1;
        if tau > 16 && tau as f64 > 2.0 * (shift + 1.0) {
            // remaining mass <= tau^alpha w / (1 - lambda e^{alpha/tau})
            let growth = lambda * (alpha / tau as f64).exp();
            if growth < 1.0 {
                let bound = (tau as f64).powf(alpha) * weight / (1.0 - growth);
                if bound <= 1e-13 * acc.max(1e-300) {
                    return acc;
                }
            }
        }
    }
}

/// sum_{tau >= cut} (tau - shift)^alpha (tau+1)^{-q}, requiring cut > shift.
///
/// Expands (tau - shift)^alpha = (tau+1)^alpha (1 - v)^alpha with
/// v = (shift+1)/(tau+1) < 1 into a binomial series whose terms are Hurwitz
/// zeta values; the series converges at least geometrically with ratio
/// (shift+1)/(cut+1).
fn power_tail_shifted_moment(q: f64, alpha: f64, shift: f64, cut: u64) -> f64 {
    let a = (cut + 1) as f64;
    debug_assert!(shift + 1.0 < a);
    let mut coeff = 1.0;
    let mut acc = 0.0;
    let mut shift_pow = 1.0;
    for j in 0..200u32 {
        let term = coeff * shift_pow * hurwitz_zeta(q - alpha + j as f64, a).expect("s > 1");
        acc += term;
        if j > 2 && term.abs() <= 1e-16 * acc.abs().max(1e-300) {
            break;
        }
        coeff *= (j as f64 - alpha) / (j as f64 + 1.0);
        shift_pow *= shift + 1.0;
    }
    acc
}
