//! C interface to the `ymh` simulator.
//!
//! Every fallible function returns a [`YmhStatus`]. On failure the message is
//! kept per thread and can be read with [`ymh_last_error_message`]. Handles
//! are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use ymh::config::SimConfig;
use ymh::dynamics::{FluidState, Simulation};
use ymh::hopf::HopfSampler;
use ymh::verify::{verify_algebra, verify_hopf};
use ymh::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YmhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

impl From<&Error> for YmhStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::SolverDiverged { .. } | Error::Numerical(_) => YmhStatus::Numerical,
            Error::InvalidConfig { .. } | Error::Parse { .. } => YmhStatus::Config,
            Error::Io(_) | Error::Format(_) => YmhStatus::Io,
            _ => YmhStatus::InvalidArgument,
        }
    }
}

/// Parsed run configuration.
pub struct YmhConfig {
    inner: SimConfig,
}

/// Time integrator holding the geometry and the current state.
pub struct YmhSimulation {
    inner: Simulation,
}

/// Diagnostics of one state.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct YmhDiagnostics {
    pub t: f64,
    pub kinetic: f64,
    pub charge: f64,
    pub total: f64,
    pub div_inf: f64,
    /// NaN on 3-D grids.
    pub enstrophy: f64,
    pub charge_l2: f64,
    pub charge_l4: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: YmhStatus, msg: impl Into<String>) -> YmhStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> YmhStatus {
    fail(YmhStatus::from(&e), e.to_string())
}

/// Runs `body`, turning errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), YmhStatus>) -> YmhStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => YmhStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(YmhStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, YmhStatus> {
    if s.is_null() {
        return Err(fail(YmhStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(YmhStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, YmhStatus> {
    p.as_ref().ok_or_else(|| fail(YmhStatus::NullPointer, format!("{what} is null")))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, YmhStatus> {
    p.as_mut().ok_or_else(|| fail(YmhStatus::NullPointer, format!("{what} is null")))
}

fn lift<T>(r: ymh::Result<T>) -> Result<T, YmhStatus> {
    r.map_err(from_error)
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ymh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ymh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from a function of this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ymh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a TOML configuration.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ymh_config_parse(toml: *const c_char, out: *mut *mut YmhConfig) -> YmhStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let text = read_str(toml, "toml")?;
        let inner = lift(SimConfig::parse(text))?;
        *out = Box::into_raw(Box::new(YmhConfig { inner }));
        Ok(())
    })
}

/// Builds one of the named templates (`taylor-green`, `passive`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ymh_config_template(name: *const c_char, out: *mut *mut YmhConfig) -> YmhStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let name = read_str(name, "name")?;
        let inner = lift(SimConfig::template(name))?;
        *out = Box::into_raw(Box::new(YmhConfig { inner }));
        Ok(())
    })
}

/// Serializes the configuration to TOML. Free the result with [`ymh_string_free`].
///
/// # Safety
/// `cfg` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ymh_config_to_toml(cfg: *const YmhConfig, out: *mut *mut c_char) -> YmhStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let cfg = deref(cfg, "cfg")?;
        let s = CString::new(cfg.inner.to_toml()).map_err(|_| fail(YmhStatus::InvalidArgument, "NUL in TOML"))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// Overrides `time.dt`, `time.steps` and `output.dir`. A non-positive
/// `steps` or a NULL `output_dir` leaves that field unchanged; `dt` is
/// checked like the command-line flag.
///
/// # Safety
/// `cfg` must be a live handle; `output_dir` is NULL or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ymh_config_override(
    cfg: *mut YmhConfig,
    dt: f64,
    steps: i64,
    output_dir: *const c_char,
) -> YmhStatus {
    guard(|| {
        let cfg = deref_mut(cfg, "cfg")?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(fail(YmhStatus::InvalidArgument, "dt must be positive"));
        }
        let mut next = cfg.inner.clone();
        next.time.dt = dt;
        if steps > 0 {
            next.time.steps = steps as usize;
        }
        if !output_dir.is_null() {
            next.output.dir = PathBuf::from(read_str(output_dir, "output_dir")?);
        }
        lift(next.validate())?;
        cfg.inner = next;
        Ok(())
    })
}

/// # Safety
/// `cfg` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ymh_config_free(cfg: *mut YmhConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs the configured simulation to completion, writing its outputs.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ymh_run(cfg: *const YmhConfig) -> YmhStatus {
    guard(|| {
        let cfg = deref(cfg, "cfg")?;
        lift(ymh::run::run(&cfg.inner)).map(|_| ())
    })
}

/// Creates an integrator at the configured initial state. Nothing is written
/// to disk.
///
/// # Safety
/// `cfg` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ymh_simulation_new(cfg: *const YmhConfig, out: *mut *mut YmhSimulation) -> YmhStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let cfg = &deref(cfg, "cfg")?.inner;
        lift(cfg.validate())?;
        let geom = lift(cfg.geometry())?;
        let (x, f) = lift(cfg.initial_fields(&geom))?;
        let state = lift(FluidState::initial(x, f, &geom))?;
        let inner = lift(Simulation::new(geom, state, cfg.time.dt))?.without_timing();
        *out = Box::into_raw(Box::new(YmhSimulation { inner }));
        Ok(())
    })
}

/// Advances `steps` RK4 steps. On failure the state of the last accepted
/// step is kept.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ymh_simulation_step(sim: *mut YmhSimulation, steps: usize) -> YmhStatus {
    guard(|| {
        let sim = deref_mut(sim, "sim")?;
        for _ in 0..steps {
            lift(sim.inner.advance())?;
        }
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live handle; NULL gives NaN.
#[no_mangle]
pub unsafe extern "C" fn ymh_simulation_time(sim: *const YmhSimulation) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.inner.state().t)
}

/// # Safety
/// `sim` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ymh_simulation_diagnostics(sim: *const YmhSimulation, out: *mut YmhDiagnostics) -> YmhStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let sim = deref(sim, "sim")?;
        let d = lift(sim.inner.diagnostics(0.0))?;
        *out = YmhDiagnostics {
            t: d.t,
            kinetic: d.kinetic,
            charge: d.charge,
            total: d.total,
            div_inf: d.div_inf,
            enstrophy: d.enstrophy,
            charge_l2: d.charge_l2,
            charge_l4: d.charge_l4,
        };
        Ok(())
    })
}

/// Number of fields (`X0..` then `f0..`) and samples per field (`N^dim`).
///
/// # Safety
/// `sim` must be a live handle; `fields` and `samples` writable pointers.
#[no_mangle]
pub unsafe extern "C" fn ymh_simulation_shape(
    sim: *const YmhSimulation,
    fields: *mut usize,
    samples: *mut usize,
) -> YmhStatus {
    guard(|| {
        let sim = deref(sim, "sim")?;
        let fields = deref_mut(fields, "fields")?;
        let samples = deref_mut(samples, "samples")?;
        let s = sim.inner.state();
        *fields = s.x().dim() + s.f().dim();
        *samples = s.x().grid().real_len();
        Ok(())
    })
}

/// Copies real-space samples of field `index` (row-major, last axis
/// fastest) into `buf`, which must hold `len` doubles with `len` equal to
/// the sample count.
///
/// # Safety
/// `sim` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn ymh_simulation_field(
    sim: *const YmhSimulation,
    index: usize,
    buf: *mut f64,
    len: usize,
) -> YmhStatus {
    guard(|| {
        let sim = deref(sim, "sim")?;
        if buf.is_null() {
            return Err(fail(YmhStatus::NullPointer, "buf is null"));
        }
        let s = sim.inner.state();
        let (x, f) = (s.x(), s.f());
        let field = if index < x.dim() {
            x.component(index)
        } else if index < x.dim() + f.dim() {
            f.component(index - x.dim())
        } else {
            return Err(fail(YmhStatus::InvalidArgument, format!("field index {index} out of range")));
        };
        let values = field.to_values();
        if len != values.len() {
            return Err(fail(YmhStatus::InvalidArgument, format!("buffer holds {len} values, field has {}", values.len())));
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(&values);
        Ok(())
    })
}

/// # Safety
/// `sim` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ymh_simulation_free(sim: *mut YmhSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Runs the Hopf fibration checks; `passed` receives 1 or 0. `samples` of 0
/// uses the default.
///
/// # Safety
/// `passed` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ymh_verify_hopf(samples: usize, seed: u64, passed: *mut i32) -> YmhStatus {
    guard(|| {
        let passed = deref_mut(passed, "passed")?;
        let mut sampler = HopfSampler { seed, ..HopfSampler::default() };
        if samples > 0 {
            sampler.samples = samples;
        }
        *passed = lift(verify_hopf(&sampler))?.passed() as i32;
        Ok(())
    })
}

/// Runs the su(2) bracket, Jacobi and duality checks on `T^2`; `passed`
/// receives 1 or 0.
///
/// # Safety
/// `passed` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ymh_verify_algebra(
    resolution: usize,
    instances: usize,
    seed: u64,
    passed: *mut i32,
) -> YmhStatus {
    guard(|| {
        let passed = deref_mut(passed, "passed")?;
        *passed = lift(verify_algebra(resolution, instances, seed))?.passed() as i32;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_error_kind() {
        assert_eq!(YmhStatus::from(&Error::Numerical("x".into())), YmhStatus::Numerical);
        assert_eq!(YmhStatus::from(&Error::Parse { line: 1, message: "x".into() }), YmhStatus::Config);
        assert_eq!(YmhStatus::from(&Error::InvalidArgument("x".into())), YmhStatus::InvalidArgument);
    }

    #[test]
    fn panics_become_a_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, YmhStatus::Panic);
        let msg = unsafe { CStr::from_ptr(ymh_last_error_message()) }.to_str().unwrap();
        assert_eq!(msg, "panic: boom");
    }

    #[test]
    fn success_clears_the_message() {
        set_error("old");
        assert_eq!(guard(|| Ok(())), YmhStatus::Ok);
        assert!(ymh_last_error_message().is_null());
    }
}
