//! C ABI for `gaussgap`.
//!
//! Every fallible function returns a status code: `GG_OK` on success, one of
//! the `GG_*` codes below, or a library error status (10 and up). The text
//! of the most recent failure on the calling thread is available from
//! [`gg_last_error_message`]. Models are opaque handles released with
//! [`gg_model_free`]; strings returned by the library are released with
//! [`gg_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gaussgap::dynamics::weyl_evolve;
use gaussgap::gap::{gns_gap, kms_gap, one_dim_closed_forms};
use gaussgap::io::{parse_model, LoadedModel, OneDimPreset, Preset};
use gaussgap::model::{build_drift_diffusion, GklsModel};
use gaussgap::report::run_report;
use gaussgap::stationary::solve_stationary;
use gaussgap::Error;
use libc::{c_char, size_t};
use num_complex::Complex64;

pub const GG_OK: i32 = 0;
pub const GG_NULL_POINTER: i32 = 1;
pub const GG_PANIC: i32 = 2;
pub const GG_INVALID_UTF8: i32 = 3;
pub const GG_BUFFER_TOO_SMALL: i32 = 4;

/// Opaque model handle.
pub struct GgModel {
    inner: LoadedModel,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GgClosedForms {
    pub gamma: f64,
    pub g: f64,
    pub g_breve: f64,
    pub sigma: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Lib(Error),
    Status(i32, &'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GG_OK,
        Ok(Err(Failure::Lib(e))) => {
            set_error(format!("{}: {e}", e.code()));
            e.status()
        }
        Ok(Err(Failure::Status(code, msg))) => {
            set_error(msg.to_string());
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            GG_PANIC
        }
    }
}

fn null() -> Failure {
    Failure::Status(GG_NULL_POINTER, "null pointer argument")
}

unsafe fn model_ref<'a>(model: *const GgModel) -> Result<&'a GklsModel, Failure> {
    model.as_ref().map(|m| &m.inner.model).ok_or_else(null)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn into_handle(inner: LoadedModel) -> *mut GgModel {
    Box::into_raw(Box::new(GgModel { inner }))
}

/// Parses a JSON model file.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer. On
/// success `*out` owns a handle to release with [`gg_model_free`].
#[no_mangle]
pub unsafe extern "C" fn gg_model_from_json(json: *const c_char, out: *mut *mut GgModel) -> i32 {
    guard(|| {
        if json.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Failure::Status(GG_INVALID_UTF8, "model text is not UTF-8"))?;
        let loaded = parse_model(text)?;
        write_out(out, into_handle(loaded))
    })
}

/// One-mode model with `L₁ = μa`, `L₂ = λa†`, `H = Ωa†a + κ(a†² + a²)/2`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gg_model_one_dim(mu2: f64, lambda2: f64, omega: f64, kappa: f64, out: *mut *mut GgModel) -> i32 {
    guard(|| {
        let model = GklsModel::one_dim(mu2, lambda2, omega, kappa)?;
        let preset = Some(Preset::OneDim(OneDimPreset { mu2, lambda2, omega, kappa }));
        write_out(out, into_handle(LoadedModel { model, preset }))
    })
}

/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gg_model_free(model: *mut GgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle; `d` and `m` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gg_model_dims(model: *const GgModel, d: *mut size_t, m: *mut size_t) -> i32 {
    guard(|| {
        let model = model_ref(model)?;
        write_out(d, model.d)?;
        write_out(m, model.m)
    })
}

/// GNS spectral gap; `*has_gap` is 1 when the gap is positive.
///
/// # Safety
/// `model` must be a live handle; `g` and `has_gap` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gg_gap_gns(model: *const GgModel, g: *mut f64, has_gap: *mut i32) -> i32 {
    guard(|| {
        let model = model_ref(model)?;
        let dd = build_drift_diffusion(model)?;
        let st = solve_stationary(&dd, &model.zeta)?;
        let gap = gns_gap(&dd, &st)?;
        write_out(g, gap.g)?;
        write_out(has_gap, gap.has_gap as i32)
    })
}

/// KMS spectral gap.
///
/// # Safety
/// `model` must be a live handle; `g_breve` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gg_gap_kms(model: *const GgModel, g_breve: *mut f64) -> i32 {
    guard(|| {
        let model = model_ref(model)?;
        let dd = build_drift_diffusion(model)?;
        let st = solve_stationary(&dd, &model.zeta)?;
        write_out(g_breve, kms_gap(&dd, &st)?.g_breve)
    })
}

/// Full analysis report as JSON. Release `*out` with [`gg_string_free`].
///
/// # Safety
/// `model` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gg_analyze_json(model: *const GgModel, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let loaded = &model.as_ref().ok_or_else(null)?.inner;
        let json = run_report(loaded)?.to_json();
        let c = CString::new(json).map_err(|_| Failure::Status(GG_PANIC, "report contains NUL"))?;
        write_out(out, c.into_raw())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Invariant covariance `S`, row-major `2d × 2d`.
///
/// # Safety
/// `model` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gg_stationary_covariance(model: *const GgModel, buf: *mut f64, len: size_t) -> i32 {
    guard(|| {
        let model = model_ref(model)?;
        let n = 2 * model.d;
        if buf.is_null() {
            return Err(null());
        }
        if len < n * n {
            return Err(Failure::Status(GG_BUFFER_TOO_SMALL, "buffer needs (2d)^2 doubles"));
        }
        let dd = build_drift_diffusion(model)?;
        let st = solve_stationary(&dd, &model.zeta)?;
        let out = std::slice::from_raw_parts_mut(buf, n * n);
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = st.s2d[(i, j)];
            }
        }
        Ok(())
    })
}

/// `𝒯_t(W(z)) = e^{decay + i·phase} W(z_t)`. `z` and `z_t` hold `d`
/// interleaved `re, im` pairs (`len = 2d`).
///
/// # Safety
/// `model` must be a live handle; `z` and `z_t` must hold `len` doubles;
/// `decay` and `phase` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gg_weyl_evolve(
    model: *const GgModel,
    z: *const f64,
    len: size_t,
    t: f64,
    decay: *mut f64,
    phase: *mut f64,
    z_t: *mut f64,
) -> i32 {
    guard(|| {
        let model = model_ref(model)?;
        if z.is_null() || z_t.is_null() {
            return Err(null());
        }
        if len != 2 * model.d {
            return Err(Error::DimensionMismatch(format!("z needs {} doubles, got {len}", 2 * model.d)).into());
        }
        let input = std::slice::from_raw_parts(z, len);
        let zv = gaussgap::linalg::CVec::from_iterator(model.d, input.chunks(2).map(|c| Complex64::new(c[0], c[1])));
        let dd = build_drift_diffusion(model)?;
        let ev = weyl_evolve(&dd, &zv, t, &model.zeta)?;
        write_out(decay, ev.decay)?;
        write_out(phase, ev.phase)?;
        let out = std::slice::from_raw_parts_mut(z_t, len);
        for (k, w) in ev.z_t.iter().enumerate() {
            out[2 * k] = w.re;
            out[2 * k + 1] = w.im;
        }
        Ok(())
    })
}

/// Closed-form gaps of the one-mode family.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gg_one_dim_closed_forms(
    mu2: f64,
    lambda2: f64,
    omega: f64,
    kappa: f64,
    out: *mut GgClosedForms,
) -> i32 {
    guard(|| {
        let cf = one_dim_closed_forms(mu2, lambda2, omega, kappa)?;
        write_out(out, GgClosedForms { gamma: cf.gamma, g: cf.g, g_breve: cf.g_breve, sigma: cf.sigma })
    })
}
