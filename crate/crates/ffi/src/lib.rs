//! C ABI over `jsw-core`.
//!
//! Every fallible function returns a [`JswStatus`]; on failure the message is
//! available from [`jsw_last_error_message`] on the same thread until the next
//! failing call. Models and mark sequences are opaque handles owned by the
//! caller and released with their `_free` function. Profiles cross the
//! boundary as `double` buffers of length `servers`, sorted ascending.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use jsw_core::comparison::{fcfs_oracle, verify_theorem1};
use jsw_core::config::{ExperimentConfig, Overrides};
use jsw_core::loynes::{estimate_stationary, LoynesSettings};
use jsw_core::orderings::{prec, prec_p, prec_star, OrderVerdict};
use jsw_core::processes::{generate, stability_check, InputModel, MarkSequence, Stability};
use jsw_core::{kw_step, pth_step, Error, Mark, SortedProfile};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JswStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Precondition = 3,
    Config = 4,
    Input = 5,
    Unstable = 6,
    Utf8 = 7,
    Panic = 8,
}

/// Stability classification of an input model for a given server count.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JswStability {
    Stable = 0,
    Critical = 1,
    Unstable = 2,
}

/// Opaque input model.
pub struct JswModel(InputModel);

/// Opaque, immutable sequence of marks.
pub struct JswMarks(MarkSequence);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> JswStatus {
    match e {
        Error::Domain(_) => JswStatus::Domain,
        Error::Precondition(_) => JswStatus::Precondition,
        Error::Config(_) => JswStatus::Config,
        Error::Input { .. } => JswStatus::Input,
        Error::Unstable { .. } => JswStatus::Unstable,
    }
}

struct Fail(JswStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(JswStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> JswStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JswStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            JswStatus::Panic
        }
    }
}

unsafe fn input<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a>(ptr: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

unsafe fn out_ref<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    ptr.as_mut().ok_or_else(|| null(what))
}

unsafe fn profile(ptr: *const f64, len: usize, what: &str) -> Result<SortedProfile, Fail> {
    Ok(SortedProfile::new(input(ptr, len, what)?.to_vec())?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jsw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failing call on this thread. Valid until the next
/// failing call on this thread; empty if none failed yet.
#[no_mangle]
pub extern "C" fn jsw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// One step of the JSW recursion. `profile_in` and `out` hold `servers` doubles
/// and may alias.
#[no_mangle]
pub unsafe extern "C" fn jsw_kw_step(
    profile_in: *const f64,
    servers: usize,
    sigma: f64,
    xi: f64,
    out: *mut f64,
) -> JswStatus {
    jsw_pth_step(profile_in, servers, sigma, xi, 1, out)
}

/// One step of the rank-`rank` recursion; the arriving work joins the
/// `rank`-th smallest workload (1-based).
#[no_mangle]
pub unsafe extern "C" fn jsw_pth_step(
    profile_in: *const f64,
    servers: usize,
    sigma: f64,
    xi: f64,
    rank: usize,
    out: *mut f64,
) -> JswStatus {
    guard(|| {
        let u = profile(profile_in, servers, "profile")?;
        let m = Mark::new(sigma, xi)?;
        let next = if rank == 1 {
            kw_step(&u, &m)
        } else {
            pth_step(&u, &m, rank)?
        };
        output(out, servers, "out")?.copy_from_slice(next.as_slice());
        Ok(())
    })
}

unsafe fn order(
    u: *const f64,
    v: *const f64,
    len: usize,
    holds: *mut bool,
    check: impl FnOnce(&SortedProfile, &SortedProfile) -> jsw_core::Result<OrderVerdict>,
) -> JswStatus {
    guard(|| {
        let (u, v) = (profile(u, len, "u")?, profile(v, len, "v")?);
        *out_ref(holds, "holds")? = check(&u, &v)?.holds;
        Ok(())
    })
}

/// Coordinatewise order `u ≺ v` on sorted profiles.
#[no_mangle]
pub unsafe extern "C" fn jsw_prec(u: *const f64, v: *const f64, len: usize, tol: f64, holds: *mut bool) -> JswStatus {
    order(u, v, len, holds, |u, v| prec(u, v, tol))
}

/// Tail-sum order `u ≺_* v` on sorted profiles.
#[no_mangle]
pub unsafe extern "C" fn jsw_prec_star(
    u: *const f64,
    v: *const f64,
    len: usize,
    tol: f64,
    holds: *mut bool,
) -> JswStatus {
    order(u, v, len, holds, |u, v| prec_star(u, v, tol))
}

/// Rank order `u ≺_P v`: tail sums plus coordinates from `rank` upward.
#[no_mangle]
pub unsafe extern "C" fn jsw_prec_p(
    u: *const f64,
    v: *const f64,
    len: usize,
    rank: usize,
    tol: f64,
    holds: *mut bool,
) -> JswStatus {
    order(u, v, len, holds, |u, v| prec_p(u, v, rank, tol))
}

/// Builds a model from the `[model]` section of config text. Relative trace
/// paths resolve against the working directory.
#[no_mangle]
pub unsafe extern "C" fn jsw_model_from_config(config: *const c_char, out: *mut *mut JswModel) -> JswStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if config.is_null() {
            return Err(null("config"));
        }
        let text = CStr::from_ptr(config)
            .to_str()
            .map_err(|e| Fail(JswStatus::Utf8, format!("config is not UTF-8: {e}")))?;
        let model = ExperimentConfig::parse(text, &Overrides::default())?.model()?;
        *out = Box::into_raw(Box::new(JswModel(model)));
        Ok(())
    })
}

/// Releases a model. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn jsw_model_free(model: *mut JswModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Mean service requirement and mean inter-arrival time. `estimated` is set
/// when a mean comes from a trace rather than a law.
#[no_mangle]
pub unsafe extern "C" fn jsw_model_means(
    model: *const JswModel,
    mean_sigma: *mut f64,
    mean_xi: *mut f64,
    estimated: *mut bool,
) -> JswStatus {
    guard(|| {
        let model = &model.as_ref().ok_or_else(|| null("model"))?.0;
        let (s, x) = (model.mean_sigma(), model.mean_xi());
        *out_ref(mean_sigma, "mean_sigma")? = s.value;
        *out_ref(mean_xi, "mean_xi")? = x.value;
        *out_ref(estimated, "estimated")? = s.estimated || x.estimated;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn jsw_model_stability(
    model: *const JswModel,
    servers: usize,
    out: *mut JswStability,
) -> JswStatus {
    guard(|| {
        let model = &model.as_ref().ok_or_else(|| null("model"))?.0;
        *out_ref(out, "out")? = match stability_check(model, servers) {
            Stability::Stable => JswStability::Stable,
            Stability::Critical => JswStability::Critical,
            Stability::Unstable => JswStability::Unstable,
        };
        Ok(())
    })
}

/// Draws the first `length` marks of the model's stream for `seed`.
#[no_mangle]
pub unsafe extern "C" fn jsw_marks_generate(
    model: *const JswModel,
    seed: u64,
    length: usize,
    out: *mut *mut JswMarks,
) -> JswStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let model = &model.as_ref().ok_or_else(|| null("model"))?.0;
        *out = Box::into_raw(Box::new(JswMarks(generate(model, seed, length)?)));
        Ok(())
    })
}

/// Builds a mark sequence from caller-supplied arrays of length `length`.
#[no_mangle]
pub unsafe extern "C" fn jsw_marks_from_arrays(
    sigma: *const f64,
    xi: *const f64,
    length: usize,
    out: *mut *mut JswMarks,
) -> JswStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let (s, x) = (input(sigma, length, "sigma")?, input(xi, length, "xi")?);
        let marks = s
            .iter()
            .zip(x)
            .map(|(&s, &x)| Mark::new(s, x))
            .collect::<Result<Vec<_>, _>>()?;
        *out = Box::into_raw(Box::new(JswMarks(MarkSequence::from_marks(marks))));
        Ok(())
    })
}

/// Number of marks; zero for a null handle.
#[no_mangle]
pub unsafe extern "C" fn jsw_marks_len(marks: *const JswMarks) -> usize {
    marks.as_ref().map_or(0, |m| m.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn jsw_marks_get(
    marks: *const JswMarks,
    index: usize,
    sigma: *mut f64,
    xi: *mut f64,
) -> JswStatus {
    guard(|| {
        let marks = &marks.as_ref().ok_or_else(|| null("marks"))?.0;
        let m = marks.marks().get(index).ok_or_else(|| {
            Fail(
                JswStatus::Domain,
                format!("index {index} out of range for {} marks", marks.len()),
            )
        })?;
        *out_ref(sigma, "sigma")? = m.sigma();
        *out_ref(xi, "xi")? = m.xi();
        Ok(())
    })
}

/// Releases a mark sequence. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn jsw_marks_free(marks: *mut JswMarks) {
    if !marks.is_null() {
        drop(Box::from_raw(marks));
    }
}

/// Loynes estimate of the minimal stationary profile. Writes `servers`
/// doubles to `profile_out`. Returns `JSW_STATUS_UNSTABLE` unless the model is
/// strictly stable for `servers - rank + 1` servers.
#[no_mangle]
pub unsafe extern "C" fn jsw_loynes_estimate(
    model: *const JswModel,
    seed: u64,
    servers: usize,
    rank: usize,
    tolerance: f64,
    window: usize,
    max_n: usize,
    profile_out: *mut f64,
    steps_used: *mut usize,
    converged: *mut bool,
) -> JswStatus {
    guard(|| {
        let model = &model.as_ref().ok_or_else(|| null("model"))?.0;
        let settings = LoynesSettings {
            tolerance,
            window,
            max_n,
        };
        let r = estimate_stationary(model, seed, servers, rank, &settings)?;
        output(profile_out, servers, "profile_out")?.copy_from_slice(r.profile.as_slice());
        *out_ref(steps_used, "steps_used")? = r.steps_used;
        *out_ref(converged, "converged")? = r.converged;
        Ok(())
    })
}

/// First-come-first-served waiting times of the `len(marks)` customers on
/// `servers` servers, written to `waits_out`.
#[no_mangle]
pub unsafe extern "C" fn jsw_fcfs_oracle(marks: *const JswMarks, servers: usize, waits_out: *mut f64) -> JswStatus {
    guard(|| {
        let marks = &marks.as_ref().ok_or_else(|| null("marks"))?.0;
        let waits = fcfs_oracle(marks, servers)?;
        output(waits_out, waits.len(), "waits_out")?.copy_from_slice(&waits);
        Ok(())
    })
}

/// Checks the pathwise comparison of `servers` against `fewer` JSW servers
/// from empty, storing the number of violated inequalities.
#[no_mangle]
pub unsafe extern "C" fn jsw_verify_fewer_servers(
    marks: *const JswMarks,
    servers: usize,
    fewer: usize,
    violations: *mut usize,
) -> JswStatus {
    guard(|| {
        let marks = &marks.as_ref().ok_or_else(|| null("marks"))?.0;
        let report = verify_theorem1(servers, fewer, marks)?;
        *out_ref(violations, "violations")? = report.violations.len();
        Ok(())
    })
}
