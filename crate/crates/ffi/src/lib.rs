//! C ABI for the apso solver.
//!
//! Every fallible function returns an [`ApsoStatus`] and writes its result
//! through an out pointer. On failure, [`apso_last_error`] describes what went
//! wrong on the calling thread. Instances and schedules are opaque handles
//! owned by the caller and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use apso::jobshop::{decode_position_with, validate_schedule};
use apso::orlib::{best_known, parse_instance};
use apso::{JsspInstance, Operation, ParameterSet, PsoConfig, Schedule, ScheduleBuilder};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApsoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidParams = 4,
    InvalidArgument = 5,
    NotFound = 6,
    Panic = 7,
}

/// Opaque job-shop instance.
pub struct ApsoInstance {
    inner: JsspInstance,
}

/// Opaque schedule: start times per job and operation.
pub struct ApsoSchedule {
    inner: Schedule,
}

/// The four behavioral parameters of the swarm.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApsoParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub omega: f64,
    pub beta: f64,
}

/// Swarm size, run length, seed and schedule builder for [`apso_solve`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApsoSolveOptions {
    pub n_particles: usize,
    pub n_iterations: usize,
    pub seed: u64,
    /// true: gap-filling builder; false: semi-active.
    pub gap_filling: bool,
}

impl From<ParameterSet> for ApsoParams {
    fn from(p: ParameterSet) -> Self {
        Self {
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            omega: p.omega,
            beta: p.beta,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (ApsoStatus, String);

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ApsoStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ApsoStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {message}"));
            ApsoStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    (ApsoStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (ApsoStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn check_out<T>(p: *mut T) -> Result<(), Failure> {
    if p.is_null() {
        Err(null("output pointer"))
    } else {
        Ok(())
    }
}

fn to_params(p: &ApsoParams) -> Result<ParameterSet, Failure> {
    ParameterSet::new(p.alpha1, p.alpha2, p.omega, p.beta)
        .map_err(|e| (ApsoStatus::InvalidParams, e.to_string()))
}

fn to_builder(gap_filling: bool) -> ScheduleBuilder {
    if gap_filling {
        ScheduleBuilder::GapFilling
    } else {
        ScheduleBuilder::SemiActive
    }
}

/// Parses an instance in the `n m` header plus `machine duration` pairs
/// format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn apso_instance_parse(
    text: *const c_char,
    out: *mut *mut ApsoInstance,
) -> ApsoStatus {
    guard(|| {
        check_out(out)?;
        let text = str_arg(text, "text")?;
        let inner = parse_instance(text).map_err(|e| (ApsoStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(ApsoInstance { inner }));
        Ok(())
    })
}

/// Builds an instance from row-major `n_jobs * n_machines` arrays of 0-based
/// machine indices and durations.
///
/// # Safety
/// `machines` and `durations` must each point to `n_jobs * n_machines`
/// elements and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn apso_instance_from_arrays(
    n_jobs: usize,
    n_machines: usize,
    machines: *const usize,
    durations: *const u64,
    out: *mut *mut ApsoInstance,
) -> ApsoStatus {
    guard(|| {
        check_out(out)?;
        let len = n_jobs
            .checked_mul(n_machines)
            .ok_or_else(|| (ApsoStatus::InvalidArgument, "size overflows".to_string()))?;
        if machines.is_null() {
            return Err(null("machines"));
        }
        if durations.is_null() {
            return Err(null("durations"));
        }
        let machines = std::slice::from_raw_parts(machines, len);
        let durations = std::slice::from_raw_parts(durations, len);
        let jobs = (0..n_jobs)
            .map(|j| {
                (0..n_machines)
                    .map(|k| {
                        Operation::new(machines[j * n_machines + k], durations[j * n_machines + k])
                    })
                    .collect()
            })
            .collect();
        let inner =
            JsspInstance::new(jobs).map_err(|e| (ApsoStatus::InvalidArgument, e.to_string()))?;
        *out = Box::into_raw(Box::new(ApsoInstance { inner }));
        Ok(())
    })
}

/// Releases an instance. Null is ignored.
///
/// # Safety
/// `inst` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn apso_instance_free(inst: *mut ApsoInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of jobs, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn apso_instance_n_jobs(inst: *const ApsoInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.n_jobs())
}

/// Number of machines, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn apso_instance_n_machines(inst: *const ApsoInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.n_machines())
}

/// Max of the longest job and the most loaded machine, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn apso_instance_lower_bound(inst: *const ApsoInstance) -> u64 {
    inst.as_ref().map_or(0, |i| i.inner.lower_bound())
}

/// Looks up a named parameter set: `kennedy`, `pedersen` or `apso`.
///
/// # Safety
/// `label` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn apso_params_preset(
    label: *const c_char,
    out: *mut ApsoParams,
) -> ApsoStatus {
    guard(|| {
        check_out(out)?;
        let label = str_arg(label, "label")?;
        let p = ParameterSet::preset(label).ok_or_else(|| {
            (
                ApsoStatus::NotFound,
                format!("unknown parameter set {label:?}; known: kennedy, pedersen, apso"),
            )
        })?;
        *out = p.into();
        Ok(())
    })
}

/// 50 particles, 100 iterations, seed 0, gap-filling builder.
#[no_mangle]
pub extern "C" fn apso_solve_options_default() -> ApsoSolveOptions {
    let c = PsoConfig::default();
    ApsoSolveOptions {
        n_particles: c.n_particles,
        n_iterations: c.n_iterations,
        seed: c.seed,
        gap_filling: ScheduleBuilder::default() == ScheduleBuilder::GapFilling,
    }
}

/// Runs one seeded swarm and returns the best schedule found.
///
/// # Safety
/// `inst` must be a live instance handle; `params`, `options` and `out` must
/// be valid pointers. A null `options` selects the defaults.
#[no_mangle]
pub unsafe extern "C" fn apso_solve(
    inst: *const ApsoInstance,
    params: *const ApsoParams,
    options: *const ApsoSolveOptions,
    out: *mut *mut ApsoSchedule,
) -> ApsoStatus {
    guard(|| {
        check_out(out)?;
        let inst = ref_arg(inst, "instance")?;
        let params = to_params(ref_arg(params, "params")?)?;
        let options = options
            .as_ref()
            .copied()
            .unwrap_or_else(|| apso_solve_options_default());
        let config = PsoConfig {
            n_particles: options.n_particles,
            n_iterations: options.n_iterations,
            seed: options.seed,
            ..PsoConfig::default()
        };
        let (inner, _) = apso::bench::solve(
            &inst.inner,
            &params,
            &config,
            to_builder(options.gap_filling),
        )
        .map_err(|e| (ApsoStatus::InvalidArgument, e.to_string()))?;
        *out = Box::into_raw(Box::new(ApsoSchedule { inner }));
        Ok(())
    })
}

/// Decodes a random-key position of length `n_jobs * n_machines`.
///
/// # Safety
/// `inst` must be a live instance handle, `x` must point to `len` doubles and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn apso_decode(
    inst: *const ApsoInstance,
    x: *const f64,
    len: usize,
    gap_filling: bool,
    out: *mut *mut ApsoSchedule,
) -> ApsoStatus {
    guard(|| {
        check_out(out)?;
        let inst = ref_arg(inst, "instance")?;
        if x.is_null() {
            return Err(null("x"));
        }
        let x = std::slice::from_raw_parts(x, len);
        let inner = decode_position_with(x, &inst.inner, to_builder(gap_filling))
            .map_err(|e| (ApsoStatus::InvalidArgument, e.to_string()))?;
        *out = Box::into_raw(Box::new(ApsoSchedule { inner }));
        Ok(())
    })
}

/// Makespan of a schedule, or 0 for a null handle.
///
/// # Safety
/// `schedule` must be null or a live schedule handle.
#[no_mangle]
pub unsafe extern "C" fn apso_schedule_makespan(schedule: *const ApsoSchedule) -> u64 {
    schedule.as_ref().map_or(0, |s| s.inner.makespan)
}

/// Start time of operation `index` of `job`.
///
/// # Safety
/// `schedule` must be a live schedule handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn apso_schedule_start(
    schedule: *const ApsoSchedule,
    job: usize,
    index: usize,
    out: *mut u64,
) -> ApsoStatus {
    guard(|| {
        check_out(out)?;
        let s = ref_arg(schedule, "schedule")?;
        let start = s
            .inner
            .start
            .get(job)
            .and_then(|ops| ops.get(index))
            .ok_or_else(|| {
                (
                    ApsoStatus::InvalidArgument,
                    format!("no operation {index} of job {job}"),
                )
            })?;
        *out = *start;
        Ok(())
    })
}

/// Writes whether `schedule` respects job order and machine capacity of `inst`.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn apso_schedule_is_feasible(
    schedule: *const ApsoSchedule,
    inst: *const ApsoInstance,
    out: *mut bool,
) -> ApsoStatus {
    guard(|| {
        check_out(out)?;
        let s = ref_arg(schedule, "schedule")?;
        let inst = ref_arg(inst, "instance")?;
        *out = validate_schedule(&s.inner, &inst.inner).is_empty();
        Ok(())
    })
}

/// Releases a schedule. Null is ignored.
///
/// # Safety
/// `schedule` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn apso_schedule_free(schedule: *mut ApsoSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

/// Best-known makespan of a Lawrence instance such as `LA01`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn apso_best_known(name: *const c_char, out: *mut u64) -> ApsoStatus {
    guard(|| {
        check_out(out)?;
        let name = str_arg(name, "name")?;
        *out = best_known(name).ok_or_else(|| {
            (
                ApsoStatus::NotFound,
                format!("no best-known value for {name:?}"),
            )
        })?;
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn apso_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn apso_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
