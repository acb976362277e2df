//! Discrete-time random walks with per-site trapping: exact mean-squared
//! displacement by recurrence, exact count/position laws, reproducible Monte
//! Carlo, power-law scaling fits and limit-theorem diagnostics.

pub mod dist;
pub mod error;
pub mod exact;
pub mod fit;
pub mod limits;
pub mod montecarlo;
pub mod msd;
pub mod parse;
pub mod report;
pub mod sample;
pub mod zeta;

pub use dist::{ExtendedReal, TrappingDistribution};
pub use error::{Error, Result};
pub use exact::{
    brute_force_distribution, count_distribution, position_distribution, CountDistribution,
    PositionDistribution,
};
pub use fit::{
    beta_sweep, horizon_truncated_zeta, powerlaw_fit, sigmoid_fit, slow_variation_profile,
    BetaSweepRow, ExponentFit, SigmoidFit, SigmoidModel, SlowVariationProfile,
};
pub use limits::{
    clt_check, concentration_check, heavy_tail_scaling_check, normal_cdf, CltReport,
    ConcentrationReport, HeavyTailReport,
};
pub use montecarlo::{
    ensemble_msd, ensemble_samples, simulate_walker, simulate_walker_with, walker_rng,
    CheckpointSamples, EnsembleStats, Trajectory,
};
pub use msd::{linear_bounds, msd_series, renewal_mass, BoundEnvelope, MsdSeries};
pub use parse::parse_spec;
pub use sample::Sampler;
pub use zeta::{hurwitz_zeta, zeta};
