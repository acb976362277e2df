//! CSV and JSON emission for every artifact the CLI can produce.
//!
//! CSV always carries a header row and prints floats with 17 significant
//! digits so files round-trip bit-exactly; JSON mirrors the same numbers
//! through serde.

use std::io::{self, Write};

use crate::exact::{CountDistribution, PositionDistribution};
use crate::fit::{BetaSweepRow, ExponentFit, SigmoidFit, SigmoidModel};
use crate::limits::{CltReport, ConcentrationReport, HeavyTailReport};
use crate::montecarlo::{CheckpointSamples, EnsembleStats, Trajectory};
use crate::msd::{BoundEnvelope, MsdSeries};

/// 17 significant digits, round-trip safe for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_msd_csv(
    out: &mut dyn Write,
    series: &MsdSeries,
    bounds: Option<&BoundEnvelope>,
) -> io::Result<()> {
    match bounds {
        None => {
            writeln!(out, "t,sigma2")?;
            for (t, &v) in series.sigma2.iter().enumerate() {
                writeln!(out, "{t},{}", fmt_f64(v))?;
            }
        }
        Some(env) => {
            let d = series
                .diffusion
                .expect("bounds imply a finite diffusion coefficient");
            writeln!(out, "t,sigma2,dt,lower,upper")?;
            for (t, &v) in series.sigma2.iter().enumerate() {
                writeln!(
                    out,
                    "{t},{},{},{},{}",
                    fmt_f64(v),
                    fmt_f64(d * t as f64),
                    fmt_f64(env.lower[t]),
                    fmt_f64(env.upper[t])
                )?;
            }
        }
    }
    Ok(())
}

pub fn write_position_csv(out: &mut dyn Write, law: &PositionDistribution) -> io::Result<()> {
    writeln!(out, "z,prob")?;
    let t = law.t as i64;
    for (i, &p) in law.probs.iter().enumerate() {
        writeln!(out, "{},{}", i as i64 - t, fmt_f64(p))?;
    }
    Ok(())
}

pub fn write_count_csv(out: &mut dyn Write, law: &CountDistribution) -> io::Result<()> {
    writeln!(out, "n,prob")?;
    for (n, &p) in law.probs.iter().enumerate() {
        writeln!(out, "{n},{}", fmt_f64(p))?;
    }
    Ok(())
}

pub fn write_ensemble_csv(out: &mut dyn Write, stats: &EnsembleStats) -> io::Result<()> {
    writeln!(out, "t,msd_hat,msd_se")?;
    for t in 0..=stats.horizon {
        writeln!(
            out,
            "{t},{},{}",
            fmt_f64(stats.msd_hat[t]),
            fmt_f64(stats.msd_se[t])
        )?;
    }
    Ok(())
}

pub fn write_trajectory_csv(out: &mut dyn Write, tr: &Trajectory) -> io::Result<()> {
    writeln!(out, "t,x,trap")?;
    for (t, (&x, &trap)) in tr.positions.iter().zip(&tr.traps).enumerate() {
        writeln!(out, "{t},{x},{trap}")?;
    }
    Ok(())
}

pub fn write_samples_csv(out: &mut dyn Write, samples: &CheckpointSamples) -> io::Result<()> {
    writeln!(out, "t,x,n")?;
    for (ci, &t) in samples.checkpoints.iter().enumerate() {
        for &(x, n) in &samples.samples[ci] {
            writeln!(out, "{t},{x},{n}")?;
        }
    }
    Ok(())
}

pub fn write_beta_sweep_csv(out: &mut dyn Write, rows: &[BetaSweepRow]) -> io::Result<()> {
    writeln!(out, "q,N,beta,rms")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(row.q),
            row.n,
            fmt_f64(row.beta),
            fmt_f64(row.rms_residual)
        )?;
    }
    Ok(())
}

pub fn write_exponent_fit_csv(out: &mut dyn Write, fit: &ExponentFit) -> io::Result<()> {
    writeln!(out, "t_min,t_max,beta,log_intercept,rms")?;
    writeln!(
        out,
        "{},{},{},{},{}",
        fit.t_min,
        fit.t_max,
        fmt_f64(fit.beta),
        fmt_f64(fit.log_intercept),
        fmt_f64(fit.rms_residual)
    )
}

pub fn write_sigmoid_fit_csv(out: &mut dyn Write, fit: &SigmoidFit) -> io::Result<()> {
    match fit.model {
        SigmoidModel::TwoParam => {
            writeln!(out, "model,r,eta,rms")?;
            writeln!(
                out,
                "two,{},{},{}",
                fmt_f64(fit.r),
                fmt_f64(fit.eta),
                fmt_f64(fit.rms_residual)
            )
        }
        SigmoidModel::ThreeParam => {
            writeln!(out, "model,r,eta,c,rms")?;
            writeln!(
                out,
                "three,{},{},{},{}",
                fmt_f64(fit.r),
                fmt_f64(fit.eta),
                fmt_f64(fit.c.expect("three-parameter fit carries c")),
                fmt_f64(fit.rms_residual)
            )
        }
    }
}

pub fn write_clt_csv(out: &mut dyn Write, report: &CltReport) -> io::Result<()> {
    writeln!(out, "t,sup_distance")?;
    for (i, &t) in report.checkpoints.iter().enumerate() {
        writeln!(out, "{t},{}", fmt_f64(report.sup_distance[i]))?;
    }
    Ok(())
}

pub fn write_concentration_csv(
    out: &mut dyn Write,
    report: &ConcentrationReport,
) -> io::Result<()> {
    writeln!(out, "t,h,violation_freq,ratio")?;
    for (i, &t) in report.checkpoints.iter().enumerate() {
        let freq = report.violation_freq[i]
            .map(fmt_f64)
            .unwrap_or_else(|| "skipped".into());
        let ratio = report.ratio[i]
            .map(fmt_f64)
            .unwrap_or_else(|| "skipped".into());
        writeln!(out, "{t},{},{freq},{ratio}", fmt_f64(report.h[i]))?;
    }
    Ok(())
}

pub fn write_heavy_tail_csv(out: &mut dyn Write, report: &HeavyTailReport) -> io::Result<()> {
    writeln!(out, "t,pairwise_sup,symmetry_defect,scaled_second_moment")?;
    for (i, &t) in report.checkpoints.iter().enumerate() {
        let pair = if i + 1 < report.checkpoints.len() {
            fmt_f64(report.pairwise_sup[i])
        } else {
            String::new()
        };
        writeln!(
            out,
            "{t},{pair},{},{}",
            fmt_f64(report.symmetry_defect[i]),
            fmt_f64(report.scaled_second_moment[i])
        )?;
    }
    Ok(())
}

/// Serializes any report type as pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}
