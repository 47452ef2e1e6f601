//! C interface to `lzsm`.
//!
//! Configurations and trajectories are opaque handles created and freed
//! through this API. Every fallible call returns an [`LzsmStatus`]; on
//! failure the message is kept per thread and can be copied out with
//! [`lzsm_last_error_message`]. Panics never cross the boundary.

use lzsm::blochpert::{bloch_perturbative, TruncationSpec};
use lzsm::harness::parse_config;
use lzsm::integrate::{propagate_tdse, SpinState, Trajectory};
use lzsm::model::DriveConfig;
use lzsm::{analytic, Error};
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LzsmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    Parse = 4,
    UnsupportedConfig = 5,
    OffResonance = 6,
    Domain = 7,
    Accuracy = 8,
    IntegrationFailure = 9,
    Io = 10,
    Panic = 11,
}

impl From<&Error> for LzsmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidConfig(_) => Self::InvalidConfig,
            Error::Parse { .. } => Self::Parse,
            Error::UnsupportedConfig(_) => Self::UnsupportedConfig,
            Error::OffResonance(_) => Self::OffResonance,
            Error::Domain(_) | Error::Pole(_) | Error::UnsupportedRegion(_) => Self::Domain,
            Error::Accuracy(_) => Self::Accuracy,
            Error::IntegrationFailure { .. } => Self::IntegrationFailure,
            Error::Io(_) => Self::Io,
        }
    }
}

/// Drive configuration (dimensionless, sweep velocity 1 unless zero-sweep).
pub struct LzsmConfig {
    cfg: DriveConfig,
}

/// Sampled solution of the Schrödinger equation.
pub struct LzsmTrajectory {
    inner: Trajectory<SpinState>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: LzsmStatus, msg: impl Into<String>) -> LzsmStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), LzsmStatus>) -> LzsmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            LzsmStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(LzsmStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: lzsm::Result<T>) -> Result<T, LzsmStatus> {
    r.map_err(|e| fail(LzsmStatus::from(&e), e.to_string()))
}

unsafe fn config_ref<'a>(h: *const LzsmConfig) -> Result<&'a DriveConfig, LzsmStatus> {
    h.as_ref().map(|c| &c.cfg).ok_or_else(|| fail(LzsmStatus::NullPointer, "null config handle"))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, LzsmStatus> {
    p.as_mut().ok_or_else(|| fail(LzsmStatus::NullPointer, format!("null output pointer `{name}`")))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, LzsmStatus> {
    if p.is_null() {
        return Err(fail(LzsmStatus::NullPointer, format!("null string `{name}`")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(LzsmStatus::InvalidArgument, format!("`{name}` is not UTF-8")))
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn lzsm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// New configuration with `v = 1` and every drive off.
#[no_mangle]
pub extern "C" fn lzsm_config_new() -> *mut LzsmConfig {
    Box::into_raw(Box::new(LzsmConfig { cfg: DriveConfig::default() }))
}

/// Parse a `key = value` or JSON config (physical units are rescaled).
///
/// # Safety
/// `src` must be a NUL-terminated string; `out_config` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lzsm_config_parse(src: *const c_char, out_config: *mut *mut LzsmConfig) -> LzsmStatus {
    guard(|| {
        let slot = out(out_config, "out_config")?;
        *slot = std::ptr::null_mut();
        let spec = lift(parse_config(text(src, "text")?))?;
        *slot = Box::into_raw(Box::new(LzsmConfig { cfg: spec.cfg }));
        Ok(())
    })
}

/// # Safety
/// `config` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lzsm_config_free(config: *mut LzsmConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Set a field by name (`v`, `delta`, `eps0`, `amp_rf`, `freq_rf`, `amp_mw`,
/// `freq_mw`, `phase`). The value is taken as dimensionless.
///
/// # Safety
/// `config` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lzsm_config_set(config: *mut LzsmConfig, name: *const c_char, value: f64) -> LzsmStatus {
    guard(|| {
        let c = config.as_mut().ok_or_else(|| fail(LzsmStatus::NullPointer, "null config handle"))?;
        let name = text(name, "name")?;
        let mut next = c.cfg;
        if !next.set(name, value) {
            return Err(fail(LzsmStatus::InvalidArgument, format!("unknown field `{name}`")));
        }
        lift(next.validate())?;
        c.cfg = next;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle, `name` a NUL-terminated string and
/// `value` writable.
#[no_mangle]
pub unsafe extern "C" fn lzsm_config_get(config: *const LzsmConfig, name: *const c_char, value: *mut f64) -> LzsmStatus {
    guard(|| {
        let cfg = config_ref(config)?;
        let name = text(name, "name")?;
        let v = cfg.get(name).ok_or_else(|| fail(LzsmStatus::InvalidArgument, format!("unknown field `{name}`")))?;
        *out(value, "value")? = v;
        Ok(())
    })
}

/// Survival probability `exp(-2 pi delta)` at multiphoton resonance.
///
/// # Safety
/// `config` must be a live handle and `p_up` writable.
#[no_mangle]
pub unsafe extern "C" fn lzsm_strong_drive_survival(config: *const LzsmConfig, p_up: *mut f64) -> LzsmStatus {
    guard(|| {
        let p = lift(analytic::strong_drive_survival(config_ref(config)?))?;
        *out(p_up, "p_up")? = p;
        Ok(())
    })
}

/// Final populations of the weak-drive single passage.
///
/// # Safety
/// `config` must be a live handle; `p_up` and `p_dn` writable.
#[no_mangle]
pub unsafe extern "C" fn lzsm_weak_drive_probabilities(
    config: *const LzsmConfig,
    p_up: *mut f64,
    p_dn: *mut f64,
) -> LzsmStatus {
    guard(|| {
        let (up, dn) = lift(analytic::weak_drive_probabilities(config_ref(config)?))?;
        *out(p_up, "p_up")? = up;
        *out(p_dn, "p_dn")? = dn;
        Ok(())
    })
}

/// Perturbative Bloch vector at `tau`; `n_max = 0` picks the default cutoff.
///
/// # Safety
/// `config` must be a live handle and `u` must point to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lzsm_bloch_perturbative(
    config: *const LzsmConfig,
    tau: f64,
    n_max: u32,
    u: *mut f64,
) -> LzsmStatus {
    guard(|| {
        let cfg = config_ref(config)?;
        let trunc = if n_max == 0 { TruncationSpec::default_for(cfg) } else { lift(TruncationSpec::new(n_max, cfg))? };
        let b = lift(bloch_perturbative(tau, cfg, trunc))?;
        out(u, "u")?;
        std::slice::from_raw_parts_mut(u, 3).copy_from_slice(&[b.ux, b.uy, b.uz]);
        Ok(())
    })
}

/// Integrate from spin up at `tau_start` to `tau_end`, sampling every `stride`.
///
/// # Safety
/// `config` must be a live handle and `out_trajectory` writable.
#[no_mangle]
pub unsafe extern "C" fn lzsm_trajectory_new(
    config: *const LzsmConfig,
    tau_start: f64,
    tau_end: f64,
    tol: f64,
    stride: f64,
    out_trajectory: *mut *mut LzsmTrajectory,
) -> LzsmStatus {
    guard(|| {
        let slot = out(out_trajectory, "out_trajectory")?;
        *slot = std::ptr::null_mut();
        let inner = lift(propagate_tdse(config_ref(config)?, SpinState::up(), tau_start, tau_end, tol, stride))?;
        *slot = Box::into_raw(Box::new(LzsmTrajectory { inner }));
        Ok(())
    })
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lzsm_trajectory_len(trajectory: *const LzsmTrajectory) -> usize {
    trajectory.as_ref().map_or(0, |t| t.inner.len())
}

/// Sample `index` as `[tau, p_up, p_dn, ux, uy, uz]`.
///
/// # Safety
/// `trajectory` must be a live handle and `row` must point to 6 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lzsm_trajectory_sample(
    trajectory: *const LzsmTrajectory,
    index: usize,
    row: *mut f64,
) -> LzsmStatus {
    guard(|| {
        let t = trajectory.as_ref().ok_or_else(|| fail(LzsmStatus::NullPointer, "null trajectory handle"))?;
        let (tau, s) = t
            .inner
            .samples
            .get(index)
            .ok_or_else(|| fail(LzsmStatus::InvalidArgument, format!("index {index} out of range")))?;
        out(row, "row")?;
        let u = s.to_bloch();
        let vals = [*tau, s.c_up.norm_sqr(), s.c_dn.norm_sqr(), u.ux, u.uy, u.uz];
        std::slice::from_raw_parts_mut(row, 6).copy_from_slice(&vals);
        Ok(())
    })
}

/// # Safety
/// `trajectory` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lzsm_trajectory_free(trajectory: *mut LzsmTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}
