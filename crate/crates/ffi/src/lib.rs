//! C ABI over the trapwalk library.
//!
//! Conventions: distributions are opaque handles created by
//! `trapwalk_dist_parse` and released by `trapwalk_dist_free`; every other
//! function returns a `TrapwalkStatus` and writes results through caller
//! provided buffers whose lengths are documented per function. Panics never
//! cross the boundary; they surface as `TRAPWALK_STATUS_INTERNAL_ERROR`.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use trapwalk::error::Error;
use trapwalk::exact::{count_distribution, position_distribution};
use trapwalk::msd::{msd_series_with_limit, renewal_mass};
use trapwalk::{ExtendedReal, MsdSeries, Sampler, TrappingDistribution};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrapwalkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseFailed = 3,
    InfiniteMean = 4,
    HorizonTooLarge = 5,
    ZeroEscape = 6,
    InternalError = 7,
}

fn status_of(err: &Error) -> TrapwalkStatus {
    match err {
        Error::Parse { .. } => TrapwalkStatus::ParseFailed,
        Error::Validation(_) | Error::Window(_) | Error::Domain(_) => {
            TrapwalkStatus::InvalidArgument
        }
        Error::InfiniteMean => TrapwalkStatus::InfiniteMean,
        Error::HorizonTooLarge { .. } => TrapwalkStatus::HorizonTooLarge,
        Error::ZeroEscape => TrapwalkStatus::ZeroEscape,
        Error::FitDiverged => TrapwalkStatus::InternalError,
    }
}

/// Opaque trapping-time distribution handle.
pub struct TrapwalkDist {
    inner: TrappingDistribution,
}

fn guard(body: impl FnOnce() -> TrapwalkStatus) -> TrapwalkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => TrapwalkStatus::InternalError,
    }
}

/// Static name of a status code (never NULL).
#[no_mangle]
pub extern "C" fn trapwalk_status_name(status: TrapwalkStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        TrapwalkStatus::Ok => b"ok\0",
        TrapwalkStatus::NullPointer => b"null pointer\0",
        TrapwalkStatus::InvalidArgument => b"invalid argument\0",
        TrapwalkStatus::ParseFailed => b"parse failed\0",
        TrapwalkStatus::InfiniteMean => b"infinite mean\0",
        TrapwalkStatus::HorizonTooLarge => b"horizon too large\0",
        TrapwalkStatus::ZeroEscape => b"zero escape probability\0",
        TrapwalkStatus::InternalError => b"internal error\0",
    };
    name.as_ptr() as *const c_char
}

/// Parses a distribution spec (`exp:<l>`, `zeta:<q>`, `det:<tau0>`,
/// `custom:<path>`) into a new handle written to `out`.
///
/// # Safety
/// `spec` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_dist_parse(
    spec: *const c_char,
    out: *mut *mut TrapwalkDist,
) -> TrapwalkStatus {
    if spec.is_null() || out.is_null() {
        return TrapwalkStatus::NullPointer;
    }
    let text = match CStr::from_ptr(spec).to_str() {
        Ok(t) => t,
        Err(_) => return TrapwalkStatus::ParseFailed,
    };
    guard(|| match trapwalk::parse_spec(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(TrapwalkDist { inner }));
            TrapwalkStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Releases a handle created by `trapwalk_dist_parse`. NULL is a no-op.
///
/// # Safety
/// `dist` must be a handle from `trapwalk_dist_parse`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_dist_free(dist: *mut TrapwalkDist) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

unsafe fn dist_ref<'a>(dist: *const TrapwalkDist) -> Option<&'a TrappingDistribution> {
    dist.as_ref().map(|d| &d.inner)
}

/// P(T = tau).
///
/// # Safety
/// `dist` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_dist_pmf(
    dist: *const TrapwalkDist,
    tau: u64,
    out: *mut f64,
) -> TrapwalkStatus {
    let (Some(d), false) = (dist_ref(dist), out.is_null()) else {
        return TrapwalkStatus::NullPointer;
    };
    guard(|| {
        *out = d.pmf(tau);
        TrapwalkStatus::Ok
    })
}

/// P(T >= tau).
///
/// # Safety
/// `dist` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_dist_tail(
    dist: *const TrapwalkDist,
    tau: u64,
    out: *mut f64,
) -> TrapwalkStatus {
    let (Some(d), false) = (dist_ref(dist), out.is_null()) else {
        return TrapwalkStatus::NullPointer;
    };
    guard(|| {
        *out = d.tail(tau);
        TrapwalkStatus::Ok
    })
}

/// E(T^alpha). `*finite` is 1 when the moment is finite (then `*out` holds
/// it) and 0 when it diverges.
///
/// # Safety
/// `dist` must be a live handle; `out` and `finite` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_dist_moment(
    dist: *const TrapwalkDist,
    alpha: f64,
    out: *mut f64,
    finite: *mut i32,
) -> TrapwalkStatus {
    let (Some(d), false, false) = (dist_ref(dist), out.is_null(), finite.is_null()) else {
        return TrapwalkStatus::NullPointer;
    };
    if alpha.is_nan() || alpha <= 0.0 {
        return TrapwalkStatus::InvalidArgument;
    }
    guard(|| {
        match d.moment(alpha) {
            ExtendedReal::Finite(v) => {
                *out = v;
                *finite = 1;
            }
            ExtendedReal::Infinite => {
                *out = f64::INFINITY;
                *finite = 0;
            }
        }
        TrapwalkStatus::Ok
    })
}

/// D = 1/(E(T)+1); fails with `INFINITE_MEAN` when E(T) diverges.
///
/// # Safety
/// `dist` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_dist_diffusion_coefficient(
    dist: *const TrapwalkDist,
    out: *mut f64,
) -> TrapwalkStatus {
    let (Some(d), false) = (dist_ref(dist), out.is_null()) else {
        return TrapwalkStatus::NullPointer;
    };
    guard(|| match d.diffusion_coefficient() {
        Ok(v) => {
            *out = v;
            TrapwalkStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Stationary trap-countdown law pi(tau).
///
/// # Safety
/// `dist` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_dist_stationary(
    dist: *const TrapwalkDist,
    tau: u64,
    out: *mut f64,
) -> TrapwalkStatus {
    let (Some(d), false) = (dist_ref(dist), out.is_null()) else {
        return TrapwalkStatus::NullPointer;
    };
    guard(|| match d.stationary(tau) {
        Ok(v) => {
            *out = v;
            TrapwalkStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Exact MSD sequence sigma^2_t for t = 0..=n; `out` must hold n+1 doubles.
///
/// # Safety
/// `dist` must be a live handle; `out` must point to n+1 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_msd_series(
    dist: *const TrapwalkDist,
    n: usize,
    out: *mut f64,
) -> TrapwalkStatus {
    let (Some(d), false) = (dist_ref(dist), out.is_null()) else {
        return TrapwalkStatus::NullPointer;
    };
    guard(
        || match msd_series_with_limit(d, n, trapwalk::msd::DEFAULT_MAX_HORIZON) {
            Ok(MsdSeries { sigma2, .. }) => {
                std::ptr::copy_nonoverlapping(sigma2.as_ptr(), out, sigma2.len());
                TrapwalkStatus::Ok
            }
            Err(e) => status_of(&e),
        },
    )
}

/// Renewal mass Q_t for t = 0..=n; `out` must hold n+1 doubles.
///
/// # Safety
/// `dist` must be a live handle; `out` must point to n+1 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_renewal_mass(
    dist: *const TrapwalkDist,
    n: usize,
    out: *mut f64,
) -> TrapwalkStatus {
    let (Some(d), false) = (dist_ref(dist), out.is_null()) else {
        return TrapwalkStatus::NullPointer;
    };
    guard(|| {
        let q = renewal_mass(d, n);
        std::ptr::copy_nonoverlapping(q.as_ptr(), out, q.len());
        TrapwalkStatus::Ok
    })
}

/// Exact law of X_t: writes P(X_t = z) for z = -t..=t into `out`, which must
/// hold 2t+1 doubles (index z+t).
///
/// # Safety
/// `dist` must be a live handle; `out` must point to 2t+1 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_position_distribution(
    dist: *const TrapwalkDist,
    t: usize,
    out: *mut f64,
) -> TrapwalkStatus {
    let (Some(d), false) = (dist_ref(dist), out.is_null()) else {
        return TrapwalkStatus::NullPointer;
    };
    guard(|| match position_distribution(d, t) {
        Ok(law) => {
            std::ptr::copy_nonoverlapping(law.probs.as_ptr(), out, law.probs.len());
            TrapwalkStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Exact law of the renewal count N_t: writes P(N_t = n) for n = 0..=t+1
/// into `out`, which must hold t+2 doubles.
///
/// # Safety
/// `dist` must be a live handle; `out` must point to t+2 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_count_distribution(
    dist: *const TrapwalkDist,
    t: usize,
    out: *mut f64,
) -> TrapwalkStatus {
    let (Some(d), false) = (dist_ref(dist), out.is_null()) else {
        return TrapwalkStatus::NullPointer;
    };
    guard(|| match count_distribution(d, t) {
        Ok(law) => {
            std::ptr::copy_nonoverlapping(law.probs.as_ptr(), out, law.probs.len());
            TrapwalkStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Empirical MSD over `m` walkers with the reproducible splittable RNG.
/// `msd_out` must hold n+1 doubles; `se_out` may be NULL or hold n+1.
///
/// # Safety
/// `dist` must be a live handle; buffers must satisfy the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_ensemble_msd(
    dist: *const TrapwalkDist,
    n: usize,
    m: usize,
    seed: u64,
    msd_out: *mut f64,
    se_out: *mut f64,
) -> TrapwalkStatus {
    let (Some(d), false) = (dist_ref(dist), msd_out.is_null()) else {
        return TrapwalkStatus::NullPointer;
    };
    if m < 2 {
        return TrapwalkStatus::InvalidArgument;
    }
    guard(|| {
        let stats = trapwalk::ensemble_msd(d, n, m, seed);
        std::ptr::copy_nonoverlapping(stats.msd_hat.as_ptr(), msd_out, stats.msd_hat.len());
        if !se_out.is_null() {
            std::ptr::copy_nonoverlapping(stats.msd_se.as_ptr(), se_out, stats.msd_se.len());
        }
        TrapwalkStatus::Ok
    })
}

/// One exact trajectory: `positions` must hold n+1 int64, `traps` may be
/// NULL or hold n+1 uint64. The walker stream is keyed by (seed, 0).
///
/// # Safety
/// `dist` must be a live handle; buffers must satisfy the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_simulate_trajectory(
    dist: *const TrapwalkDist,
    n: usize,
    seed: u64,
    positions: *mut i64,
    traps: *mut u64,
) -> TrapwalkStatus {
    let (Some(d), false) = (dist_ref(dist), positions.is_null()) else {
        return TrapwalkStatus::NullPointer;
    };
    guard(|| {
        let sampler = Sampler::new(d);
        let mut rng = trapwalk::walker_rng(seed, 0);
        let tr = trapwalk::simulate_walker_with(&sampler, n, &mut rng);
        std::ptr::copy_nonoverlapping(tr.positions.as_ptr(), positions, tr.positions.len());
        if !traps.is_null() {
            std::ptr::copy_nonoverlapping(tr.traps.as_ptr(), traps, tr.traps.len());
        }
        TrapwalkStatus::Ok
    })
}

/// Riemann zeta for s > 1.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_zeta(s: f64, out: *mut f64) -> TrapwalkStatus {
    if out.is_null() {
        return TrapwalkStatus::NullPointer;
    }
    guard(|| match trapwalk::zeta(s) {
        Ok(v) => {
            *out = v;
            TrapwalkStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// OLS power-law fit of `sigma2[t]` (indexed from t = 0, `len` entries)
/// over integer t in [t_min, t_max]; any of the three outputs may be NULL.
///
/// # Safety
/// `sigma2` must point to `len` readable doubles; non-NULL outputs valid.
#[no_mangle]
pub unsafe extern "C" fn trapwalk_powerlaw_fit(
    sigma2: *const f64,
    len: usize,
    t_min: usize,
    t_max: usize,
    beta: *mut f64,
    log_intercept: *mut f64,
    rms: *mut f64,
) -> TrapwalkStatus {
    if sigma2.is_null() {
        return TrapwalkStatus::NullPointer;
    }
    if len < 2 {
        return TrapwalkStatus::InvalidArgument;
    }
    guard(|| {
        let series = MsdSeries {
            dist_spec: "ffi".into(),
            horizon: len - 1,
            sigma2: std::slice::from_raw_parts(sigma2, len).to_vec(),
            diffusion: None,
        };
        match trapwalk::powerlaw_fit(&series, t_min, t_max) {
            Ok(fit) => {
                if !beta.is_null() {
                    *beta = fit.beta;
                }
                if !log_intercept.is_null() {
                    *log_intercept = fit.log_intercept;
                }
                if !rms.is_null() {
                    *rms = fit.rms_residual;
                }
                TrapwalkStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}
