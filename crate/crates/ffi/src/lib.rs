//! C ABI over `basketmit`.
//!
//! Every entry point returns a [`BmStatus`]. On anything other than
//! `BM_STATUS_OK` a message is available from [`bm_last_error_message`] on the
//! same thread. Handles are opaque and must be released with their
//! `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use basketmit::estimate::{minimize_eps_given_n, minimize_n_given_eps, BoundInputs, EstimationResult, DEFAULT_N_CEILING};
use basketmit::io::Experiment;
use basketmit::mitigate::{drive_protocol, Posterior, ProtocolOutcome, ProtocolStatus, SimulationSource};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Arguments were rejected.
    InvalidArgument = 2,
    /// The computation ended in a protocol or estimation abort.
    Abort = 3,
    /// File, parse or simulation failure.
    Failed = 4,
    /// A panic was caught.
    Panic = 5,
}

/// Protocol verdict.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmVerdict {
    False = 0,
    True = 1,
    Aborted = 2,
}

/// The optimum returned by the estimator.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BmEstimate {
    pub n: u64,
    pub eps_max: f64,
    pub eps_ver: f64,
    pub eps_rej: f64,
    pub phi: f64,
    pub tau: f64,
}

/// A loaded experiment config.
pub struct BmExperiment(Experiment);

/// The outcome of a protocol run.
pub struct BmOutcome(ProtocolOutcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn guard(f: impl FnOnce() -> Result<(), (BmStatus, String)>) -> BmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BmStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            BmStatus::Panic
        }
    }
}

fn null() -> (BmStatus, String) {
    (BmStatus::NullPointer, "null pointer argument".into())
}

fn failed(e: impl std::fmt::Display) -> (BmStatus, String) {
    (BmStatus::Failed, e.to_string())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL,
/// or 0 when there is none.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn bm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn bound_inputs(k: u32, p: f64, p_max: f64, tau: f64) -> BoundInputs {
    BoundInputs::new(k as usize, p, p_max, (!tau.is_nan()).then_some(tau))
}

fn write_estimate(res: EstimationResult, out: &mut BmEstimate) -> Result<(), (BmStatus, String)> {
    match res {
        EstimationResult::Done(e) => {
            *out = BmEstimate {
                n: e.n,
                eps_max: e.eps_max,
                eps_ver: e.eps_ver,
                eps_rej: e.eps_rej,
                phi: e.phi,
                tau: e.tau,
            };
            Ok(())
        }
        EstimationResult::Abort { reason, .. } => Err((BmStatus::Abort, reason.to_string())),
    }
}

/// Minimises ε_max at fixed `n`. Pass `tau = NaN` to optimise τ.
///
/// # Safety
/// `out` must be null or point to writable memory for one `BmEstimate`.
#[no_mangle]
pub unsafe extern "C" fn bm_estimate_eps(k: u32, p: f64, p_max: f64, n: u64, tau: f64, out: *mut BmEstimate) -> BmStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        write_estimate(minimize_eps_given_n(&bound_inputs(k, p, p_max, tau), n), out)
    })
}

/// Smallest `n` with ε_max ≤ `eps_target`. Pass `tau = NaN` to optimise τ.
///
/// # Safety
/// `out` must be null or point to writable memory for one `BmEstimate`.
#[no_mangle]
pub unsafe extern "C" fn bm_estimate_n(
    k: u32,
    p: f64,
    p_max: f64,
    eps_target: f64,
    tau: f64,
    out: *mut BmEstimate,
) -> BmStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        write_estimate(
            minimize_n_given_eps(&bound_inputs(k, p, p_max, tau), eps_target, DEFAULT_N_CEILING),
            out,
        )
    })
}

/// Bayesian combination from the uniform prior: basket `j` voted `votes[j]`
/// with bound `eps[j]`. Writes the posterior probability of outcome 1.
///
/// # Safety
/// `eps` and `votes` must be valid for `len` elements; `p1` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bm_combine(eps: *const f64, votes: *const u8, len: usize, p1: *mut f64) -> BmStatus {
    guard(|| {
        let p1 = p1.as_mut().ok_or_else(null)?;
        if len > 0 && (eps.is_null() || votes.is_null()) {
            return Err(null());
        }
        let mut post = Posterior::uniform();
        for j in 0..len {
            let (e, v) = (*eps.add(j), *votes.add(j));
            let q = if v == 1 { [e, 1.0 - e] } else { [1.0 - e, e] };
            post.update(q).map_err(|e| (BmStatus::InvalidArgument, e.to_string()))?;
        }
        *p1 = post.p1();
        Ok(())
    })
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a Path, (BmStatus, String)> {
    if path.is_null() {
        return Err(null());
    }
    CStr::from_ptr(path)
        .to_str()
        .map(Path::new)
        .map_err(|_| (BmStatus::InvalidArgument, "path is not UTF-8".into()))
}

/// Loads an experiment config file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bm_experiment_load(path: *const c_char, out: *mut *mut BmExperiment) -> BmStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        *out = ptr::null_mut();
        let exp = Experiment::load(path_arg(path)?).map_err(failed)?;
        *out = Box::into_raw(Box::new(BmExperiment(exp)));
        Ok(())
    })
}

/// # Safety
/// `exp` must be null or a handle from [`bm_experiment_load`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bm_experiment_free(exp: *mut BmExperiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}

/// Overrides the experiment's master seed (and the walk seed).
///
/// # Safety
/// `exp` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bm_experiment_set_seed(exp: *mut BmExperiment, seed: u64) -> BmStatus {
    guard(|| {
        let exp = exp.as_mut().ok_or_else(null)?;
        exp.0.config.seed = seed;
        exp.0.config.noise.seed = seed;
        Ok(())
    })
}

/// Simulates and analyses the experiment end to end. A protocol abort is
/// still `BM_STATUS_OK` with an outcome whose verdict is `Aborted`.
///
/// # Safety
/// `exp` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bm_protocol_run(exp: *const BmExperiment, out: *mut *mut BmOutcome) -> BmStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        *out = ptr::null_mut();
        let exp = &exp.as_ref().ok_or_else(null)?.0;
        let mut src = SimulationSource::new(exp.setup());
        let outcome = drive_protocol(&exp.config.protocol, exp.colouring.k(), &mut src).map_err(failed)?;
        *out = Box::into_raw(Box::new(BmOutcome(outcome)));
        Ok(())
    })
}

/// # Safety
/// `outcome` must be null or a handle from [`bm_protocol_run`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bm_outcome_free(outcome: *mut BmOutcome) {
    if !outcome.is_null() {
        drop(Box::from_raw(outcome));
    }
}

/// Verdict and confidence (NaN on abort).
///
/// # Safety
/// `outcome` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn bm_outcome_verdict(
    outcome: *const BmOutcome,
    verdict: *mut BmVerdict,
    confidence: *mut f64,
) -> BmStatus {
    guard(|| {
        let o = &outcome.as_ref().ok_or_else(null)?.0;
        let verdict = verdict.as_mut().ok_or_else(null)?;
        let confidence = confidence.as_mut().ok_or_else(null)?;
        *verdict = match o.status {
            ProtocolStatus::True => BmVerdict::True,
            ProtocolStatus::False => BmVerdict::False,
            ProtocolStatus::Abort => BmVerdict::Aborted,
        };
        *confidence = o.confidence.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Number of baskets found over all repetitions.
///
/// # Safety
/// `outcome` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bm_outcome_basket_count(outcome: *const BmOutcome, count: *mut usize) -> BmStatus {
    guard(|| {
        let o = &outcome.as_ref().ok_or_else(null)?.0;
        *count.as_mut().ok_or_else(null)? = o.baskets().count();
        Ok(())
    })
}

/// The full outcome as JSON. Release with [`bm_string_free`].
///
/// # Safety
/// `outcome` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bm_outcome_json(outcome: *const BmOutcome, out: *mut *mut c_char) -> BmStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        *out = ptr::null_mut();
        let o = &outcome.as_ref().ok_or_else(null)?.0;
        let s = serde_json::to_string(o).map_err(failed)?;
        *out = CString::new(s).map_err(failed)?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
