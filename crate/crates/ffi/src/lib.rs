//! C interface to the kinetic library.
//!
//! Models are opaque handles created by `kr_model_*` and released with
//! [`kr_model_free`]. Every other call returns a [`KrStatus`] code and writes
//! its result through an out pointer; on failure the message is available
//! from [`kr_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use kinetic::kinetics::{self, Regime};
use kinetic::model::{self, ModelDocument};
use kinetic::{Error, FluxModel};

#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NoConvergence = 4,
    Parse = 5,
    NoConnection = 6,
    Internal = 7,
}

/// Opaque model handle.
pub struct KrModel {
    inner: FluxModel,
}

/// One value of the kinetic function.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KrKineticSample {
    pub phi_flat: f64,
    pub phi_sharp: f64,
    pub lambda: f64,
    /// 1 for a nonclassical shock, 0 at or above the threshold.
    pub nonclassical: i32,
}

/// Shock set: an optional isolated state and an interval.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KrShockSet {
    pub has_isolated: i32,
    pub isolated: f64,
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: i32,
    pub hi_closed: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

fn status_of(e: &Error) -> KrStatus {
    match e {
        Error::Domain { .. } | Error::OutsideBand { .. } | Error::SpeedOutOfRange { .. } => KrStatus::Domain,
        Error::InvalidModel(_) | Error::InvalidArgument(_) | Error::FluxClass(_) | Error::NotEquilibrium { .. } => {
            KrStatus::InvalidArgument
        }
        Error::NoBracket { .. }
        | Error::RootNotConverged { .. }
        | Error::Quadrature { .. }
        | Error::Integration { .. }
        | Error::BracketExpansion { .. }
        | Error::NonMonotoneExtrapolation { .. }
        | Error::ProfileBlowUp { .. } => KrStatus::NoConvergence,
        Error::NoConnection { .. } | Error::PrematureAxisCrossing { .. } | Error::NegativePotential { .. } => {
            KrStatus::NoConnection
        }
    }
}

fn fail(status: KrStatus, message: impl Into<String>) -> KrStatus {
    set_error(message.into());
    status
}

/// Runs `body`, turning errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), KrStatus>) -> KrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            KrStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(KrStatus::Internal, "internal panic"),
    }
}

fn lift<T>(r: kinetic::Result<T>) -> Result<T, KrStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn model_ref<'a>(model: *const KrModel) -> Result<&'a FluxModel, KrStatus> {
    // SAFETY: non-null handles come from kr_model_* and are live per the caller contract.
    unsafe { model.as_ref() }
        .map(|m| &m.inner)
        .ok_or_else(|| fail(KrStatus::NullPointer, "model handle is null"))
}

unsafe fn store<T>(out: *mut T, value: T) -> Result<(), KrStatus> {
    if out.is_null() {
        return Err(fail(KrStatus::NullPointer, "output pointer is null"));
    }
    // SAFETY: checked non-null; the caller provides writable storage.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn scalar(
    model: *const KrModel,
    out: *mut f64,
    eval: impl FnOnce(&FluxModel) -> kinetic::Result<f64>,
) -> KrStatus {
    guard(|| {
        let m = unsafe { model_ref(model)? };
        if out.is_null() {
            return Err(fail(KrStatus::NullPointer, "output pointer is null"));
        }
        let v = lift(eval(m))?;
        unsafe { store(out, v) }
    })
}

unsafe fn publish(model: FluxModel, out: *mut *mut KrModel) -> Result<(), KrStatus> {
    let handle = Box::into_raw(Box::new(KrModel { inner: model }));
    unsafe { store(out, handle) }
}

/// Builds a model from a JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_model_from_json(json: *const c_char, out: *mut *mut KrModel) -> KrStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(fail(KrStatus::NullPointer, "null argument"));
        }
        // SAFETY: checked non-null; NUL termination is the caller's contract.
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| fail(KrStatus::Parse, format!("model document is not UTF-8: {e}")))?;
        let doc = ModelDocument::parse(text).map_err(|e| fail(KrStatus::Parse, e.to_string()))?;
        let m = lift(doc.build())?;
        unsafe { publish(m, out) }
    })
}

/// Builds `f = K u³` with `b = c2 = 1` and `c1 = C`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kr_model_cubic(k: f64, c: f64, out: *mut *mut KrModel) -> KrStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(KrStatus::NullPointer, "output pointer is null"));
        }
        let m = lift(FluxModel::scaled_cubic(k, c))?;
        unsafe { publish(m, out) }
    })
}

/// Releases a model; null is ignored.
///
/// # Safety
/// `model` must come from `kr_model_*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kr_model_free(model: *mut KrModel) {
    if !model.is_null() {
        // SAFETY: created by Box::into_raw in publish.
        drop(unsafe { Box::from_raw(model) });
    }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_kinetic_function(
    model: *const KrModel,
    u0: f64,
    alpha: f64,
    out: *mut KrKineticSample,
) -> KrStatus {
    guard(|| {
        let m = unsafe { model_ref(model)? };
        if out.is_null() {
            return Err(fail(KrStatus::NullPointer, "output pointer is null"));
        }
        let s = lift(kinetics::kinetic_function(m, u0, alpha))?;
        let sample = KrKineticSample {
            phi_flat: s.phi_flat,
            phi_sharp: s.phi_sharp,
            lambda: s.lam,
            nonclassical: i32::from(s.regime == Regime::Nonclassical),
        };
        unsafe { store(out, sample) }
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_critical_ratio(model: *const KrModel, u0: f64, u2: f64, out: *mut f64) -> KrStatus {
    unsafe { scalar(model, out, |m| kinetics::critical_ratio(m, u0, u2)) }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_threshold_ratio(model: *const KrModel, u0: f64, out: *mut f64) -> KrStatus {
    unsafe { scalar(model, out, |m| kinetics::threshold_ratio(m, u0)) }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_lambda_alpha(model: *const KrModel, u0: f64, alpha: f64, out: *mut f64) -> KrStatus {
    unsafe { scalar(model, out, |m| kinetics::lambda_alpha(m, u0, alpha)) }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_phi_natural(model: *const KrModel, u: f64, out: *mut f64) -> KrStatus {
    unsafe { scalar(model, out, |m| model::phi_natural(m, u)) }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_phi_zero(model: *const KrModel, u: f64, out: *mut f64) -> KrStatus {
    unsafe { scalar(model, out, |m| model::phi_zero(m, u)) }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_entropy_dissipation(
    model: *const KrModel,
    u_minus: f64,
    u_plus: f64,
    out: *mut f64,
) -> KrStatus {
    unsafe { scalar(model, out, |m| model::entropy_dissipation(m, u_minus, u_plus)) }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kr_shock_set(model: *const KrModel, u_minus: f64, alpha: f64, out: *mut KrShockSet) -> KrStatus {
    guard(|| {
        let m = unsafe { model_ref(model)? };
        if out.is_null() {
            return Err(fail(KrStatus::NullPointer, "output pointer is null"));
        }
        let s = lift(kinetics::shock_set(m, u_minus, alpha))?;
        let set = KrShockSet {
            has_isolated: i32::from(s.isolated.is_some()),
            isolated: s.isolated.unwrap_or(f64::NAN),
            lo: s.interval.lo,
            hi: s.interval.hi,
            lo_closed: i32::from(s.interval.lo_closed),
            hi_closed: i32::from(s.interval.hi_closed),
        };
        unsafe { store(out, set) }
    })
}

/// Copies the last error message of this thread into `buf` (truncated and
/// NUL-terminated) and returns the full message length without the NUL.
/// Pass a null `buf` to query the length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn kr_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: n + 1 <= len bytes are writable per the caller contract.
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}
