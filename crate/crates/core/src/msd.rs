//! Exact mean-squared-displacement series by the convolution recurrence
//!
//!   sigma^2_{t+1} = sum_{0 <= tau <= t} p(tau) (sigma^2_{t-tau} + 1),
//!
//! plus the renewal mass sequence and the finite-time linear-growth envelope
//! for finite-mean trapping.
//!
//! The recurrence is a convolution of non-negative terms, so there is no
//! cancellation; every inner sum uses compensated (Kahan) accumulation in a
//! fixed left-to-right order, which keeps the accumulated error near one ulp
//! per step instead of the O(N ulp) of plain summation and makes results
//! bit-stable across runs.

use serde::Serialize;

use crate::dist::{ExtendedReal, TrappingDistribution};
use crate::error::{Error, Result};

/// Default horizon budget (about 1 MB of series data, ~9e9 multiply-adds).
pub const DEFAULT_MAX_HORIZON: usize = 1 << 17;

/// Exact MSD sequence for one trapping law.
#[derive(Debug, Clone, Serialize)]
pub struct MsdSeries {
    pub dist_spec: String,
    pub horizon: usize,
    /// sigma^2_t for t = 0..=horizon.
    pub sigma2: Vec<f64>,
    /// D = 1/(E(T)+1) when the mean trapping time is finite.
    pub diffusion: Option<f64>,
}

/// Finite-time envelope of the diffusive deviation: for finite-mean trapping,
/// `lower[t] <= sigma^2_t - D t <= upper[t]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEnvelope {
    /// R_t, the upper deviation bound.
    pub r: Vec<f64>,
    /// exp(-kappa E(T)) R_t - E(T).
    pub lower: Vec<f64>,
    /// Equal to `r`.
    pub upper: Vec<f64>,
    pub kappa: f64,
}

/// Computes sigma^2_t for t = 0..=n under the default horizon budget.
pub fn msd_series(dist: &TrappingDistribution, n: usize) -> Result<MsdSeries> {
    msd_series_with_limit(dist, n, DEFAULT_MAX_HORIZON)
}

/// Same as [`msd_series`] with an explicit horizon budget.
pub fn msd_series_with_limit(
    dist: &TrappingDistribution,
    n: usize,
    limit: usize,
) -> Result<MsdSeries> {
    if n < 1 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    if n > limit {
        return Err(Error::HorizonTooLarge {
            requested: n,
            limit,
        });
    }
    let pmf = dist.pmf_table(n);
    let support = effective_support(&pmf);
    let mut cdf = Vec::with_capacity(n);
    {
        let mut acc = 0.0;
        let mut comp = 0.0;
        for &p in &pmf {
            let y = p - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
            cdf.push(acc.min(1.0));
        }
    }
    let mut sigma2 = vec![0.0; n + 1];
    for t in 0..n {
        let hi = t.min(support - 1);
        let mut sum = 0.0;
        let mut comp = 0.0;
        for tau in 0..=hi {
            let term = pmf[tau] * sigma2[t - tau];
            let y = term - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        sigma2[t + 1] = sum + cdf[hi];
    }
    Ok(MsdSeries {
        dist_spec: dist.spec_string(),
        horizon: n,
        sigma2,
        diffusion: dist.diffusion_coefficient().ok(),
    })
}

/// Renewal mass Q_0..Q_n with Q_0 = 1 and Q_{t+1} = sum p(tau) Q_{t-tau}.
pub fn renewal_mass(dist: &TrappingDistribution, n: usize) -> Vec<f64> {
    let pmf = dist.pmf_table(n);
    let support = effective_support(&pmf);
    let mut q = vec![0.0; n + 1];
    q[0] = 1.0;
    for t in 0..n {
        let hi = t.min(support - 1);
        let mut sum = 0.0;
        let mut comp = 0.0;
        for tau in 0..=hi {
            let term = pmf[tau] * q[t - tau];
            let y = term - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        q[t + 1] = sum;
    }
    q
}

/// Envelope of the deviation sigma^2_t - D t for finite-mean trapping, with
/// kappa = -log(p(0)) / (1 - p(0)) (1 by continuity at p(0) = 1).
pub fn linear_bounds(dist: &TrappingDistribution, n: usize) -> Result<BoundEnvelope> {
    let mean = match dist.mean() {
        ExtendedReal::Finite(m) => m,
        ExtendedReal::Infinite => return Err(Error::InfiniteMean),
    };
    let d = 1.0 / (mean + 1.0);
    let p0 = dist.pmf(0);
    if p0 <= 0.0 {
        return Err(Error::ZeroEscape);
    }
    let kappa = if p0 >= 1.0 {
        1.0
    } else {
        -p0.ln() / (1.0 - p0)
    };
    let damping = (-kappa * mean).exp();

    // R_t regrouped as a prefix sum plus an explicit tail:
    //   R_t = D sum_{tau <= t+1} p(tau) tau(tau+1)/2
    //       + (t+1) D sum_{tau > t+1} (tau - t/2) p(tau)
    let pmf = dist.pmf_table(n + 2);
    let mut r = Vec::with_capacity(n + 1);
    let mut prefix = pmf[1] * 1.0; // tau = 1 term of p(tau) tau(tau+1)/2
    let mut comp = 0.0;
    for t in 0..=n {
        let tau = (t + 1) as f64;
        let term = pmf[t + 1] * tau * (tau + 1.0) / 2.0;
        if t > 0 {
            let y = term - comp;
            let s = prefix + y;
            comp = (s - prefix) - y;
            prefix = s;
        }
        let k = (t + 2) as u64;
        let tail_first_moment = dist.mean_tail(k)?;
        let tail_mass = dist.tail(k);
        let tail_part = (t as f64 + 1.0) * (tail_first_moment - (t as f64 / 2.0) * tail_mass);
        r.push(d * (prefix + tail_part));
    }
    let lower: Vec<f64> = r.iter().map(|&v| damping * v - mean).collect();
    Ok(BoundEnvelope {
        upper: r.clone(),
        lower,
        r,
        kappa,
    })
}

fn effective_support(pmf: &[f64]) -> usize {
    pmf.iter()
        .rposition(|&p| p > 0.0)
        .map(|i| i + 1)
        .unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(lambda: f64) -> TrappingDistribution {
        TrappingDistribution::exponential(lambda).unwrap()
    }

    fn zeta_q(q: f64) -> TrappingDistribution {
        TrappingDistribution::power_law_zeta(q).unwrap()
    }

    #[test]
    fn exponential_is_exactly_linear() {
        let s = msd_series(&exp(0.5), 1024).unwrap();
        for t in 0..=1024 {
            assert!(
                (s.sigma2[t] - 0.5 * t as f64).abs() <= 1e-12,
                "t={t}: {}",
                s.sigma2[t]
            );
        }
        assert!((s.diffusion.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn first_step_is_escape_probability() {
        for d in [
            exp(0.3),
            zeta_q(1.5),
            TrappingDistribution::deterministic(2),
        ] {
            let s = msd_series(&d, 4).unwrap();
            assert_eq!(s.sigma2[0], 0.0);
            assert!((s.sigma2[1] - d.pmf(0)).abs() < 1e-15);
        }
    }

    #[test]
    fn simple_walk_grows_linearly() {
        let s = msd_series(&TrappingDistribution::deterministic(0), 100).unwrap();
        for t in 0..=100 {
            assert_eq!(s.sigma2[t], t as f64);
        }
    }

    #[test]
    fn series_is_monotone_and_bounded_by_t() {
        for d in [
            exp(0.9),
            zeta_q(1.2),
            zeta_q(2.5),
            TrappingDistribution::deterministic(3),
        ] {
            let s = msd_series(&d, 2048).unwrap();
            for t in 1..=2048usize {
                assert!(
                    s.sigma2[t] + 1e-12 >= s.sigma2[t - 1],
                    "{} t={t}",
                    d.spec_string()
                );
                assert!(s.sigma2[t] <= t as f64 + 1e-12, "{} t={t}", d.spec_string());
            }
        }
    }

    #[test]
    fn increment_recurrence_holds() {
        // Delta sigma^2_{t+1} = p(t) + sum_{tau<=t} p(tau) Delta sigma^2_{t-tau}
        for d in [exp(0.5), zeta_q(2.5)] {
            let n = 512;
            let s = msd_series(&d, n).unwrap();
            let delta: Vec<f64> = (1..=n).map(|t| s.sigma2[t] - s.sigma2[t - 1]).collect();
            for t in 0..n - 1 {
                let mut conv = d.pmf(t as u64);
                for tau in 0..=t {
                    // delta[i] holds Delta sigma^2_{i+1}
                    if t > tau {
                        conv += d.pmf(tau as u64) * delta[t - tau - 1];
                    }
                }
                assert!(
                    (delta[t] - conv).abs() <= 1e-10,
                    "{} t={t}: {} vs {conv}",
                    d.spec_string(),
                    delta[t]
                );
            }
        }
    }

    #[test]
    fn horizon_budget_is_enforced() {
        match msd_series(&exp(0.5), DEFAULT_MAX_HORIZON + 1) {
            Err(Error::HorizonTooLarge { requested, limit }) => {
                assert_eq!(requested, DEFAULT_MAX_HORIZON + 1);
                assert_eq!(limit, DEFAULT_MAX_HORIZON);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(msd_series_with_limit(&exp(0.5), 8, 8).is_ok());
    }

    #[test]
    fn renewal_mass_basics() {
        for d in [exp(0.5), zeta_q(2.5)] {
            let q = renewal_mass(&d, 64);
            assert_eq!(q[0], 1.0);
            assert!((q[1] - d.pmf(0)).abs() < 1e-15);
        }
        let det1 = renewal_mass(&TrappingDistribution::deterministic(1), 64);
        for (t, &v) in det1.iter().enumerate() {
            assert_eq!(v, if t % 2 == 0 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn renewal_mass_stays_in_band_for_finite_mean() {
        for d in [exp(0.5), exp(0.9), zeta_q(2.5), zeta_q(3.5)] {
            let mean = d.mean().finite().unwrap();
            let p0 = d.pmf(0);
            let kappa = -p0.ln() / (1.0 - p0);
            let floor = (-kappa * mean).exp();
            let q = renewal_mass(&d, 4096);
            for (t, &v) in q.iter().enumerate() {
                assert!(
                    v >= floor - 1e-12 && v <= 1.0 + 1e-12,
                    "{} t={t}: Q={v} floor={floor}",
                    d.spec_string()
                );
            }
        }
    }

    #[test]
    fn bounds_regrouping_matches_double_sum() {
        // brute-force R_t = D sum_{tau<=t} sum_{tau'>tau} (tau'-tau) p(tau')
        let d = TrappingDistribution::custom(
            &[(0, 0.3), (1, 0.2), (3, 0.25), (7, 0.15), (12, 0.1)],
            None,
        )
        .unwrap();
        let n = 50;
        let env = linear_bounds(&d, n).unwrap();
        let diff = d.diffusion_coefficient().unwrap();
        for t in 0..=n {
            let mut brute = 0.0;
            for tau in 0..=t as u64 {
                for tau_p in tau + 1..=20 {
                    brute += (tau_p - tau) as f64 * d.pmf(tau_p);
                }
            }
            brute *= diff;
            assert!(
                (env.r[t] - brute).abs() <= 1e-12,
                "t={t}: {} vs {brute}",
                env.r[t]
            );
        }
    }

    #[test]
    fn envelope_contains_deviation() {
        for d in [exp(0.5), exp(0.9), zeta_q(3.5), zeta_q(2.5)] {
            let n = 4096;
            let s = msd_series(&d, n).unwrap();
            let env = linear_bounds(&d, n).unwrap();
            let diff = s.diffusion.unwrap();
            for t in 0..=n {
                let dev = s.sigma2[t] - diff * t as f64;
                assert!(
                    dev >= env.lower[t] - 1e-9 && dev <= env.upper[t] + 1e-9,
                    "{} t={t}: dev={dev} in [{}, {}]",
                    d.spec_string(),
                    env.lower[t],
                    env.upper[t]
                );
                assert!(env.lower[t] <= env.upper[t] + 1e-12);
                if t > 0 {
                    assert!(
                        env.r[t] + 1e-12 >= env.r[t - 1],
                        "R_t must be non-decreasing"
                    );
                }
            }
        }
    }

    #[test]
    fn deterministic_zero_has_null_envelope() {
        let env = linear_bounds(&TrappingDistribution::deterministic(0), 32).unwrap();
        assert_eq!(env.kappa, 1.0);
        for t in 0..=32 {
            assert_eq!(env.r[t], 0.0);
            assert_eq!(env.upper[t], 0.0);
            assert_eq!(env.lower[t], 0.0);
        }
    }

    #[test]
    fn bounds_error_contract() {
        assert_eq!(linear_bounds(&zeta_q(1.5), 16), Err(Error::InfiniteMean));
        let no_escape = TrappingDistribution::custom(&[(1, 0.5), (2, 0.5)], None).unwrap();
        assert_eq!(linear_bounds(&no_escape, 16), Err(Error::ZeroEscape));
    }
}
