//! Riemann and Hurwitz zeta by direct summation with an Euler-Maclaurin tail.
//!
//! Both functions are restricted to real `s > 1`, which is the whole range the
//! trapping-time laws need (normalizers, tails and partial moments of the
//! power-law family). With 64 summed terms and Bernoulli corrections through
//! B16 the absolute error is far below the 1e-13 budget everywhere we call it.

use crate::error::{Error, Result};

/// B_{2j} / (2j)! for j = 1..=8.
const BERNOULLI_OVER_FACT: [f64; 8] = [
    1.0 / 12.0,                    // B2/2!
    -1.0 / 720.0,                  // B4/4!
    1.0 / 30240.0,                 // B6/6!
    -1.0 / 1209600.0,              // B8/8!
    1.0 / 47900160.0,              // B10/10!
    -691.0 / 1307674368000.0,      // B12/12!
    7.0 / 74724249600.0,           // B14/14!
    -3617.0 / 10670622842880000.0, // B16/16!
];

const CUTOFF: usize = 64;

/// Hurwitz zeta `sum_{k>=0} (a+k)^{-s}` for `s > 1`, `a > 0`.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::Domain(format!("zeta requires s > 1, got {s}")));
    }
    if a.is_nan() || a <= 0.0 {
        return Err(Error::Domain(format!(
            "hurwitz_zeta requires a > 0, got {a}"
        )));
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in 0..CUTOFF {
        let term = (a + k as f64).powf(-s);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let x = a + CUTOFF as f64;
    // integral + midpoint correction
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // Bernoulli corrections: B_{2j}/(2j)! * s(s+1)...(s+2j-2) * x^{-s-2j+1}
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    let inv_x2 = 1.0 / (x * x);
    for (j, b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        sum += b * rising * power;
        let m = 2 * (j + 1) - 1;
        rising *= (s + m as f64) * (s + m as f64 + 1.0);
        power *= inv_x2;
    }
    Ok(sum)
}

/// Riemann zeta for real `s > 1`.
pub fn zeta(s: f64) -> Result<f64> {
    hurwitz_zeta(s, 1.0)
}
