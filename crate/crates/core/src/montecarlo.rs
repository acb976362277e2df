//! Ensemble simulation of the trapped walk.
//!
//! Every walker owns a private ChaCha8 stream keyed by (seed, walker index),
//! so results are independent of scheduling and worker count. Walkers are
//! processed in fixed blocks and block results are folded in index order,
//! which keeps floating-point merges bit-stable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::TrappingDistribution;
use crate::sample::Sampler;

const WALKER_BLOCK: usize = 1024;

/// One realization of the chain: positions X_0..=X_N and traps T_0..=T_N.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub positions: Vec<i64>,
    pub traps: Vec<u64>,
}

/// Empirical MSD curve with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub horizon: usize,
    pub walkers: usize,
    pub seed: u64,
    /// (1/M) sum X_t^2
    pub msd_hat: Vec<f64>,
    /// sample std of X_t^2 over walkers, divided by sqrt(M)
    pub msd_se: Vec<f64>,
}

/// Per-checkpoint retained samples of (X_t, N_t), in walker order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointSamples {
    pub checkpoints: Vec<usize>,
    pub seed: u64,
    /// samples[i] holds (X_t, N_t) for checkpoint checkpoints[i], one entry
    /// per walker.
    pub samples: Vec<Vec<(i64, u64)>>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Private stream for one walker, derived from (seed, walker index) by a
/// splitmix64 key expansion.
pub fn walker_rng(seed: u64, walker: u64) -> ChaCha8Rng {
    let mut state = seed ^ walker.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Simulates the chain exactly: draw T_0, then at each step either decrement
/// the trap or (at the escape level) move +-1 and redraw. The move draw is
/// consumed before the fresh trap draw.
pub fn simulate_walker<R: Rng + ?Sized>(
    dist: &TrappingDistribution,
    n: usize,
    rng: &mut R,
) -> Trajectory {
    let sampler = Sampler::new(dist);
    simulate_walker_with(&sampler, n, rng)
}

/// Like [`simulate_walker`] but reuses a prebuilt sampler; prefer this when
/// generating many trajectories (the power-law sampler owns a large table).
pub fn simulate_walker_with<R: Rng + ?Sized>(
    sampler: &Sampler,
    n: usize,
    rng: &mut R,
) -> Trajectory {
    let mut positions = Vec::with_capacity(n + 1);
    let mut traps = Vec::with_capacity(n + 1);
    let mut x = 0i64;
    let mut trap = sampler.draw(rng);
    positions.push(x);
    traps.push(trap);
    for _ in 0..n {
        if trap == 0 {
            x += if rng.random::<f64>() < 0.5 { 1 } else { -1 };
            trap = sampler.draw(rng);
        } else {
            trap -= 1;
        }
        positions.push(x);
        traps.push(trap);
    }
    Trajectory { positions, traps }
}

/// Empirical MSD over `m` independent walkers.
pub fn ensemble_msd(dist: &TrappingDistribution, n: usize, m: usize, seed: u64) -> EnsembleStats {
    assert!(m >= 2, "need at least two walkers for standard errors");
    let sampler = Sampler::new(dist);
    let blocks: Vec<(usize, usize)> = (0..m)
        .step_by(WALKER_BLOCK)
        .map(|lo| (lo, (lo + WALKER_BLOCK).min(m)))
        .collect();
    let partials: Vec<(Vec<f64>, Vec<f64>)> = blocks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut sum2 = vec![0.0f64; n + 1];
            let mut sum4 = vec![0.0f64; n + 1];
            for walker in lo..hi {
                let mut rng = walker_rng(seed, walker as u64);
                let mut x = 0i64;
                let mut trap = sampler.draw(&mut rng);
                for t in 1..=n {
                    if trap == 0 {
                        x += if rng.random::<f64>() < 0.5 { 1 } else { -1 };
                        trap = sampler.draw(&mut rng);
                    } else {
                        trap -= 1;
                    }
                    let x2 = (x * x) as f64;
                    sum2[t] += x2;
                    sum4[t] += x2 * x2;
                }
            }
            (sum2, sum4)
        })
        .collect();
    let mut sum2 = vec![0.0f64; n + 1];
    let mut sum4 = vec![0.0f64; n + 1];
    for (s2, s4) in &partials {
        for t in 0..=n {
            sum2[t] += s2[t];
            sum4[t] += s4[t];
        }
    }
    let mf = m as f64;
    let msd_hat: Vec<f64> = sum2.iter().map(|&s| s / mf).collect();
    let msd_se: Vec<f64> = sum2
        .iter()
        .zip(&sum4)
        .map(|(&s2, &s4)| {
            let var = ((s4 - s2 * s2 / mf) / (mf - 1.0)).max(0.0);
            (var / mf).sqrt()
        })
        .collect();
    EnsembleStats {
        horizon: n,
        walkers: m,
        seed,
        msd_hat,
        msd_se,
    }
}

/// Records (X_t, N_t) for every walker at each checkpoint.
///
/// Walks renewal to renewal instead of step by step, consuming the random
/// stream in exactly the same order as [`simulate_walker`].
pub fn ensemble_samples(
    dist: &TrappingDistribution,
    checkpoints: &[usize],
    m: usize,
    seed: u64,
) -> CheckpointSamples {
    assert!(
        checkpoints.windows(2).all(|w| w[0] < w[1]),
        "checkpoints must be sorted ascending"
    );
    assert!(!checkpoints.is_empty(), "need at least one checkpoint");
    let sampler = Sampler::new(dist);
    let blocks: Vec<(usize, usize)> = (0..m)
        .step_by(WALKER_BLOCK)
        .map(|lo| (lo, (lo + WALKER_BLOCK).min(m)))
        .collect();
    let partials: Vec<Vec<Vec<(i64, u64)>>> = blocks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut block = vec![Vec::with_capacity(hi - lo); checkpoints.len()];
            for walker in lo..hi {
                let mut rng = walker_rng(seed, walker as u64);
                walk_checkpoints(&sampler, checkpoints, &mut rng, |ci, x, n_count| {
                    block[ci].push((x, n_count))
                });
            }
            block
        })
        .collect();
    let mut samples = vec![Vec::with_capacity(m); checkpoints.len()];
    for block in partials {
        for (ci, mut rows) in block.into_iter().enumerate() {
            samples[ci].append(&mut rows);
        }
    }
    CheckpointSamples {
        checkpoints: checkpoints.to_vec(),
        seed,
        samples,
    }
}

/// One renewal-skipping pass; `record(ci, x, n)` is called once per
/// checkpoint in ascending order.
fn walk_checkpoints<R: Rng + ?Sized>(
    sampler: &Sampler,
    checkpoints: &[usize],
    rng: &mut R,
    mut record: impl FnMut(usize, i64, u64),
) {
    let mut x = 0i64;
    let mut n_count = 0u64;
    let mut next_zero = sampler.draw(rng);
    let mut ci = 0;
    while ci < checkpoints.len() {
        while ci < checkpoints.len() && (checkpoints[ci] as u64) < next_zero {
            record(ci, x, n_count);
            ci += 1;
        }
        if ci == checkpoints.len() {
            break;
        }
        // the walker escapes at time next_zero <= checkpoints[ci]
        n_count += 1;
        let up = rng.random::<f64>() < 0.5;
        let fresh = sampler.draw(rng);
        // the move lands at time next_zero + 1, so a checkpoint exactly at
        // the renewal sees the pre-move position but the incremented count
        while ci < checkpoints.len() && (checkpoints[ci] as u64) == next_zero {
            record(ci, x, n_count);
            ci += 1;
        }
        x += if up { 1 } else { -1 };
        next_zero = next_zero.saturating_add(1).saturating_add(fresh);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp05() -> TrappingDistribution {
        TrappingDistribution::exponential(0.5).unwrap()
    }

    fn check_trajectory_invariants(tr: &Trajectory) {
        assert_eq!(tr.positions[0], 0);
        for t in 0..tr.positions.len() - 1 {
            let dx = tr.positions[t + 1] - tr.positions[t];
            assert!(dx.abs() <= 1);
            if tr.traps[t] > 0 {
                assert_eq!(dx, 0, "moved while trapped at t={t}");
                assert_eq!(tr.traps[t + 1], tr.traps[t] - 1);
            } else {
                assert_eq!(dx.abs(), 1, "failed to move at escape t={t}");
            }
        }
    }

    #[test]
    fn trajectory_invariants_hold_on_many_paths() {
        for (i, d) in [
            exp05(),
            TrappingDistribution::power_law_zeta(1.5).unwrap(),
            TrappingDistribution::deterministic(0),
        ]
        .iter()
        .enumerate()
        {
            let sampler = Sampler::new(d);
            for w in 0..10_000u64 {
                let mut rng = walker_rng(5 + i as u64, w);
                let tr = simulate_walker_with(&sampler, 64, &mut rng);
                check_trajectory_invariants(&tr);
            }
        }
    }

    #[test]
    fn deterministic_walker_moves_on_schedule() {
        let mut rng = walker_rng(11, 0);
        let tr = simulate_walker(&TrappingDistribution::deterministic(3), 63, &mut rng);
        // zeros at t = 3, 7, 11, ...: N_t = t/4 + 1 at t = 3 mod 4
        for t in (3..=63).step_by(4) {
            let n_t = tr.traps[..=t].iter().filter(|&&v| v == 0).count();
            assert_eq!(n_t, t / 4 + 1, "t={t}");
        }
        let simple = simulate_walker(&TrappingDistribution::deterministic(0), 64, &mut rng);
        for t in 0..64 {
            assert_eq!((simple.positions[t + 1] - simple.positions[t]).abs(), 1);
        }
    }

    #[test]
    fn position_bounded_by_prior_renewal_count() {
        let sampler = Sampler::new(&exp05());
        for w in 0..200u64 {
            let mut rng = walker_rng(3, w);
            let tr = simulate_walker_with(&sampler, 128, &mut rng);
            for t in 1..=128usize {
                let n_prev = tr.traps[..t].iter().filter(|&&v| v == 0).count();
                assert!(tr.positions[t].unsigned_abs() as usize <= n_prev);
                assert!(n_prev <= t);
            }
        }
    }

    #[test]
    fn checkpoint_walk_matches_full_simulation() {
        let checkpoints = [1usize, 2, 5, 17, 40, 64];
        for d in [
            exp05(),
            TrappingDistribution::power_law_zeta(1.5).unwrap(),
            TrappingDistribution::deterministic(2),
        ] {
            let sampler = Sampler::new(&d);
            for w in 0..50u64 {
                let mut rng_a = walker_rng(99, w);
                let tr = simulate_walker_with(&sampler, 64, &mut rng_a);
                let mut got: Vec<(i64, u64)> = Vec::new();
                let mut rng_b = walker_rng(99, w);
                walk_checkpoints(&sampler, &checkpoints, &mut rng_b, |_, x, n| {
                    got.push((x, n))
                });
                for (i, &c) in checkpoints.iter().enumerate() {
                    let n_c = tr.traps[..=c].iter().filter(|&&v| v == 0).count() as u64;
                    assert_eq!(
                        got[i],
                        (tr.positions[c], n_c),
                        "{} w={w} c={c}",
                        d.spec_string()
                    );
                }
            }
        }
    }

    #[test]
    fn ensemble_is_reproducible_and_pool_independent() {
        let d = exp05();
        let a = ensemble_msd(&d, 64, 3000, 42);
        let b = ensemble_msd(&d, 64, 3000, 42);
        assert_eq!(a, b);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| ensemble_msd(&d, 64, 3000, 42));
        assert_eq!(a, single);
        let quad = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| ensemble_msd(&d, 64, 3000, 42));
        assert_eq!(a, quad);
        let s1 = ensemble_samples(&d, &[16, 64], 2000, 7);
        let s2 = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(|| ensemble_samples(&d, &[16, 64], 2000, 7));
        assert_eq!(s1, s2);
    }

    #[test]
    fn ensemble_msd_tracks_exact_line() {
        // sigma_t^2 = 0.5 t exactly for exponential trapping
        let stats = ensemble_msd(&exp05(), 256, 20_000, 42);
        assert_eq!(stats.msd_hat[0], 0.0);
        let mut misses = 0usize;
        for t in 1..=256usize {
            if (stats.msd_hat[t] - 0.5 * t as f64).abs() > 4.0 * stats.msd_se[t] {
                misses += 1;
            }
        }
        assert!(misses <= 3, "{misses} of 256 beyond 4 SE");
    }

    #[test]
    fn ensemble_samples_match_exact_count_law() {
        let d = exp05();
        let t = 64usize;
        let m = 20_000usize;
        let samples = ensemble_samples(&d, &[t], m, 4242);
        let exact = crate::exact::count_distribution(&d, t).unwrap();
        let mut counts = vec![0u64; t + 2];
        for &(_, n) in &samples.samples[0] {
            counts[(n as usize).min(t + 1)] += 1;
        }
        for (n, &p) in exact.probs.iter().enumerate() {
            let expect = p * m as f64;
            if expect < 10.0 {
                continue;
            }
            let se = (p * (1.0 - p) * m as f64).sqrt();
            assert!(
                (counts[n] as f64 - expect).abs() <= 4.0 * se,
                "n={n}: {} vs {expect}",
                counts[n]
            );
        }
    }
}
