//! Exact samplers for the trapping-time laws.
//!
//! The power-law family uses a prefix inverse-CDF table plus an exact
//! accept-reject step for the tail, so a draw costs O(log cut) worst case and
//! the law is reproduced exactly rather than through a truncated table.

use rand::Rng;

use crate::dist::TrappingDistribution;

/// Prefix-table length for the power-law sampler.
const ZETA_TABLE_CUT: usize = 1 << 20;
/// The table stops early once the remaining tail is unreachable for a
/// uniform f64 draw.
const NEGLIGIBLE_TAIL: f64 = 1e-18;

/// Stateful exact sampler for one [`TrappingDistribution`].
///
/// Immutable after construction; share it freely across threads and pass each
/// thread its own random stream.
#[derive(Debug, Clone)]
pub struct Sampler {
    inner: SamplerImpl,
}

#[derive(Debug, Clone)]
enum SamplerImpl {
    Exponential { inv_ln_lambda: f64 },
    Deterministic { tau0: u64 },
    Table { cdf: Vec<f64> },
    ZetaTail { q: f64, cdf: Vec<f64> },
}

impl Sampler {
    pub fn new(dist: &TrappingDistribution) -> Self {
        let inner = match dist {
            TrappingDistribution::Exponential { lambda } => SamplerImpl::Exponential {
                inv_ln_lambda: 1.0 / lambda.ln(),
            },
            TrappingDistribution::Deterministic { tau0 } => {
                SamplerImpl::Deterministic { tau0: *tau0 }
            }
            TrappingDistribution::Custom { pmf } => {
                let mut cdf = Vec::with_capacity(pmf.len());
                let mut acc = 0.0;
                let mut comp = 0.0;
                for &p in pmf {
                    let y = p - comp;
                    let t = acc + y;
                    comp = (t - acc) - y;
                    acc = t;
                    cdf.push(acc.min(1.0));
                }
                if let Some(last) = cdf.last_mut() {
                    *last = 1.0;
                }
                SamplerImpl::Table { cdf }
            }
            TrappingDistribution::PowerLawZeta { q } => {
                let mut cdf = Vec::with_capacity(ZETA_TABLE_CUT);
                let norm = crate::zeta::zeta(*q).expect("validated q > 1");
                let mut acc = 0.0;
                let mut comp = 0.0;
                for tau in 0..ZETA_TABLE_CUT {
                    let p = ((tau + 1) as f64).powf(-q) / norm;
                    let y = p - comp;
                    let t = acc + y;
                    comp = (t - acc) - y;
                    acc = t;
                    cdf.push(acc);
                    if 1.0 - acc <= NEGLIGIBLE_TAIL {
                        break;
                    }
                }
                SamplerImpl::ZetaTail { q: *q, cdf }
            }
        };
        Sampler { inner }
    }

    /// Draws one trapping time.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.inner {
            SamplerImpl::Deterministic { tau0 } => *tau0,
            SamplerImpl::Exponential { inv_ln_lambda } => {
                // inverse CDF of the geometric law on {0, 1, ...}
                let u: f64 = rng.random();
                let x = (1.0 - u).ln() * inv_ln_lambda;
                if x >= u64::MAX as f64 {
                    u64::MAX
                } else {
                    x as u64
                }
            }
            SamplerImpl::Table { cdf } => {
                let u: f64 = rng.random();
                cdf.partition_point(|&c| c <= u) as u64
            }
            SamplerImpl::ZetaTail { q, cdf } => {
                let u: f64 = rng.random();
                let last = *cdf.last().expect("non-empty table");
                if u < last {
                    return cdf.partition_point(|&c| c <= u) as u64;
                }
                // Tail draw for tau > cut: invert the continuous Pareto tail
                // with index q-1, floor it, then accept against the exact pmf
                // ratio. Acceptance is at least (tau/(tau+1))^q.
                let cut = (cdf.len() - 1) as u64;
                let y0 = (cut + 1) as f64;
                loop {
                    let v: f64 = rng.random();
                    let y = y0 * (1.0 - v).powf(-1.0 / (q - 1.0));
                    let tau = if y >= u64::MAX as f64 {
                        u64::MAX
                    } else {
                        y as u64
                    };
                    let tf = tau as f64;
                    // accept = (q-1) (tau+1)^{-q} / (tau^{1-q} - (tau+1)^{1-q}),
                    // evaluated cancellation-free via expm1/ln_1p.
                    let e = -libm::expm1((1.0 - q) * libm::log1p(1.0 / tf));
                    let r = (-q * libm::log1p(1.0 / tf)).exp();
                    let accept = (q - 1.0) * r / (tf * e);
                    let w: f64 = rng.random();
                    if w < accept {
                        return tau;
                    }
                }
            }
        }
    }
}
