//! Exact laws of the renewal count N_t and the walker position X_t.
//!
//! The count law comes from convolving the law of (T + 1) and reading off
//! survival probabilities of the renewal times; the position law mixes exact
//! binomial rows against the count law (the subordination identity). An
//! independent full-state dynamic program over (position, release time) is
//! kept as an oracle for both.

use serde::Serialize;

use crate::dist::TrappingDistribution;
use crate::error::{Error, Result};

/// Default ceiling for exact-law horizons (the DP is O(t^3)).
pub const EXACT_MAX_T: usize = 4096;
/// Ceiling for the brute-force oracle.
pub const ORACLE_MAX_T: usize = 512;

/// Law of N_t, the number of visits to the escape level up to time t.
///
/// `probs[n] = P(N_t = n)` for n = 0..=t+1; every one of the t+1 time points
/// 0..=t can be a visit, so the support reaches t+1.
#[derive(Debug, Clone, Serialize)]
pub struct CountDistribution {
    pub t: usize,
    pub probs: Vec<f64>,
}

impl CountDistribution {
    pub fn mean(&self) -> f64 {
        crate::dist::kahan_sum(self.probs.iter().enumerate().map(|(n, &p)| n as f64 * p))
    }

    pub fn total_mass(&self) -> f64 {
        crate::dist::kahan_sum(self.probs.iter().copied())
    }
}

/// Law of X_t over z = -t..=t.
#[derive(Debug, Clone, Serialize)]
pub struct PositionDistribution {
    pub t: usize,
    /// probs[(z + t) as usize] = P(X_t = z).
    pub probs: Vec<f64>,
}

impl PositionDistribution {
    pub fn prob(&self, z: i64) -> f64 {
        let idx = z + self.t as i64;
        if idx < 0 || idx >= self.probs.len() as i64 {
            0.0
        } else {
            self.probs[idx as usize]
        }
    }

    pub fn total_mass(&self) -> f64 {
        crate::dist::kahan_sum(self.probs.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        let t = self.t as i64;
        crate::dist::kahan_sum(
            self.probs
                .iter()
                .enumerate()
                .map(|(i, &p)| (i as i64 - t) as f64 * p),
        )
    }

    pub fn second_moment(&self) -> f64 {
        let t = self.t as i64;
        crate::dist::kahan_sum(
            self.probs
                .iter()
                .enumerate()
                .map(|(i, &p)| ((i as i64 - t) as f64).powi(2) * p),
        )
    }
}

/// Survival table: row k holds P(s_k <= t') for t' = 0..=t, where s_k is the
/// time of the (k+1)-th visit to the escape level (s_0 = T_0, gaps 1 + T).
fn count_survivals(dist: &TrappingDistribution, t: usize) -> Vec<Vec<f64>> {
    let pmf = dist.pmf_table(t + 1);
    let support = pmf
        .iter()
        .rposition(|&p| p > 0.0)
        .map(|i| i + 1)
        .unwrap_or(1);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    // u[s] = P(s_k = s), folded to s <= t
    let mut u: Vec<f64> = pmf[..=t].to_vec();
    loop {
        let mut cum = Vec::with_capacity(t + 1);
        let mut acc = 0.0;
        let mut comp = 0.0;
        for &v in &u {
            let y = v - comp;
            let s = acc + y;
            comp = (s - acc) - y;
            acc = s;
            cum.push(acc);
        }
        let total = *cum.last().unwrap_or(&0.0);
        let k = rows.len();
        rows.push(cum);
        if total <= 0.0 || k > t {
            break;
        }
        // next visit: convolve with the law of T + 1
        let mut next = vec![0.0; t + 1];
        for (s, slot) in next.iter_mut().enumerate().skip(k + 1) {
            let hi = (s - 1).min(support - 1);
            let lo = (k.max(1)) - 1; // u is supported on [k, t]
            if s < lo + 1 {
                continue;
            }
            let mut sum = 0.0;
            let mut comp = 0.0;
            for tau in 0..=hi.min(s - 1 - k) {
                let term = u[s - 1 - tau] * pmf[tau];
                let y = term - comp;
                let sm = sum + y;
                comp = (sm - sum) - y;
                sum = sm;
            }
            *slot = sum;
        }
        u = next;
    }
    rows
}

/// Exact law of N_t.
pub fn count_distribution(dist: &TrappingDistribution, t: usize) -> Result<CountDistribution> {
    count_distribution_with_limit(dist, t, EXACT_MAX_T)
}

pub fn count_distribution_with_limit(
    dist: &TrappingDistribution,
    t: usize,
    limit: usize,
) -> Result<CountDistribution> {
    if t > limit {
        return Err(Error::HorizonTooLarge {
            requested: t,
            limit,
        });
    }
    let rows = count_survivals(dist, t);
    // P(N_t >= k + 1) = P(s_k <= t)
    let mut ge = vec![0.0; t + 3];
    ge[0] = 1.0;
    for (k, row) in rows.iter().enumerate() {
        ge[k + 1] = row[t];
    }
    let probs: Vec<f64> = (0..=t + 1).map(|n| (ge[n] - ge[n + 1]).max(0.0)).collect();
    Ok(CountDistribution { t, probs })
}

/// E(N_t) for every t = 0..=t_max from a single survival-table pass.
pub fn count_mean_series(dist: &TrappingDistribution, t_max: usize) -> Result<Vec<f64>> {
    if t_max > EXACT_MAX_T {
        return Err(Error::HorizonTooLarge {
            requested: t_max,
            limit: EXACT_MAX_T,
        });
    }
    let rows = count_survivals(dist, t_max);
    let mut means = vec![0.0; t_max + 1];
    for row in &rows {
        for (t, m) in means.iter_mut().enumerate() {
            *m += row[t];
        }
    }
    Ok(means)
}

/// Exact law of X_t via subordination: mix binomial rows with the law of
/// N_{t-1} (the number of moves performed by time t).
pub fn position_distribution(
    dist: &TrappingDistribution,
    t: usize,
) -> Result<PositionDistribution> {
    position_distribution_with_limit(dist, t, EXACT_MAX_T)
}

pub fn position_distribution_with_limit(
    dist: &TrappingDistribution,
    t: usize,
    limit: usize,
) -> Result<PositionDistribution> {
    if t > limit {
        return Err(Error::HorizonTooLarge {
            requested: t,
            limit,
        });
    }
    let mut probs = vec![0.0; 2 * t + 1];
    if t == 0 {
        probs[0] = 1.0;
        return Ok(PositionDistribution { t, probs });
    }
    let count = count_distribution_with_limit(dist, t - 1, limit)?;
    // binomial rows by neighbor averaging: row n holds P(S_n = z) at z = -n..=n
    // (every entry an exact dyadic rational)
    let mut row = vec![1.0f64];
    for (n, &w) in count.probs.iter().enumerate() {
        if w > 0.0 {
            for (j, &b) in row.iter().enumerate() {
                let z = 2 * j as i64 - n as i64; // entries step by 2
                probs[(z + t as i64) as usize] += w * b;
            }
        }
        if n == count.probs.len() - 1 {
            break;
        }
        let mut next = vec![0.0f64; row.len() + 1];
        for (j, &b) in row.iter().enumerate() {
            next[j] += 0.5 * b;
            next[j + 1] += 0.5 * b;
        }
        row = next;
    }
    Ok(PositionDistribution { t, probs })
}

/// Full-state oracle: dynamic program over (release time, position).
///
/// A walker whose pending trap reaches past the horizon can never move again
/// before t, so it is folded into a frozen bucket immediately; the folding is
/// exact, not an approximation.
pub fn brute_force_distribution(
    dist: &TrappingDistribution,
    t: usize,
) -> Result<PositionDistribution> {
    if t > ORACLE_MAX_T {
        return Err(Error::HorizonTooLarge {
            requested: t,
            limit: ORACLE_MAX_T,
        });
    }
    let width = 2 * t + 1;
    let mut probs = vec![0.0; width];
    if t == 0 {
        probs[0] = 1.0;
        return Ok(PositionDistribution { t, probs });
    }
    let pmf = dist.pmf_table(t + 1);
    let support = pmf
        .iter()
        .rposition(|&p| p > 0.0)
        .map(|i| i + 1)
        .unwrap_or(1);
    // active[r][z + t]: P(walker sits at z and leaves its trap at time r < t)
    let mut active = vec![vec![0.0f64; width]; t];
    let mut frozen = vec![0.0f64; width];
    for (tau, &p) in pmf.iter().enumerate().take(t) {
        active[tau][t] = p;
    }
    frozen[t] += dist.tail(t as u64);
    for r in 0..t {
        // moving at time r lands at z' and redraws; a fresh trap tau' with
        // r + 1 + tau' > t - 1 freezes the walker at z'
        let max_tau = t.checked_sub(r + 2);
        let freeze_mass = dist.tail((t - r - 1) as u64);
        for zi in 0..width {
            let m = active[r][zi];
            if m == 0.0 {
                continue;
            }
            let half = 0.5 * m;
            for zt in [zi - 1, zi + 1] {
                if let Some(hi) = max_tau {
                    for (tau, &p) in pmf.iter().enumerate().take(hi.min(support - 1) + 1) {
                        active[r + 1 + tau][zt] += half * p;
                    }
                }
                frozen[zt] += half * freeze_mass;
            }
        }
    }
    Ok(PositionDistribution { t, probs: frozen })
}
