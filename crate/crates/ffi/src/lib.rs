//! C ABI over `unitom`.
//!
//! Objects are opaque handles created by `*_build`/`*_from_*` functions and
//! released with the matching `*_free`. Every fallible function returns a
//! [`UnitomStatus`]; on failure [`unitom_last_error`] describes the problem
//! for the calling thread. Matrices cross the boundary as separate real and
//! imaginary arrays in row-major order.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use unitom::channel::KrausChannel;
use unitom::linalg::{haar_unitary, seeded_rng, ComplexMatrix, C64};
use unitom::observables::{build_observable_set, clifford_set_d2, ObservableSet, Question};
use unitom::subspaces::BuildOptions;
use unitom::tomography::{
    measure_exact, measure_sampled, reconstruct_unitary, separation, ExpectationVector, ReconstructOptions, Tolerances,
};
use unitom::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitomStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    OutOfRange = 4,
    BufferTooSmall = 5,
    CertificationFailed = 6,
    NumericalFailure = 7,
    Io = 8,
    Panic = 9,
}

/// Opaque interactive observable set.
pub struct UnitomObservableSet(ObservableSet);

/// Opaque channel in Kraus form.
pub struct UnitomChannel(KrausChannel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).expect("NULs removed"));
}

fn status_of(e: &Error) -> UnitomStatus {
    match e {
        Error::DimensionMismatch(_) => UnitomStatus::DimensionMismatch,
        Error::OutOfRange(_) => UnitomStatus::OutOfRange,
        Error::InvalidArgument(_) | Error::NotHermitian { .. } | Error::NonFinite { .. } | Error::Schema { .. } => {
            UnitomStatus::InvalidArgument
        }
        Error::CertificationFailed { .. } => UnitomStatus::CertificationFailed,
        Error::Io(_) | Error::Unreadable { .. } | Error::Json(_) => UnitomStatus::Io,
        _ => UnitomStatus::NumericalFailure,
    }
}

struct Fail(UnitomStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(UnitomStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> UnitomStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            UnitomStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            UnitomStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn out_slice<'a>(p: *mut f64, len: usize, need: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    if len < need {
        return Err(Fail(UnitomStatus::BufferTooSmall, format!("{what} holds {len} values, {need} needed")));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn in_slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn unitom_version() -> *const c_char {
    static V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn unitom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds the observable set for `question` (`among_rank_q`, `among_all` or
/// `among_unital`).
#[no_mangle]
pub unsafe extern "C" fn unitom_observable_set_build(
    d: usize,
    q: usize,
    question: *const c_char,
    seed: u64,
    out: *mut *mut UnitomObservableSet,
) -> UnitomStatus {
    guard(|| {
        if question.is_null() {
            return Err(null("question"));
        }
        let name = CStr::from_ptr(question)
            .to_str()
            .map_err(|_| Fail(UnitomStatus::InvalidArgument, "question is not UTF-8".into()))?;
        let question = Question::parse(name)?;
        let set = build_observable_set(d, q, question, seed, BuildOptions::default())?;
        write(out, boxed(UnitomObservableSet(set)), "out")
    })
}

/// The six local Clifford observables for two qubits.
#[no_mangle]
pub unsafe extern "C" fn unitom_observable_set_clifford(out: *mut *mut UnitomObservableSet) -> UnitomStatus {
    guard(|| write(out, boxed(UnitomObservableSet(clifford_set_d2()?)), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn unitom_observable_set_count(set: *const UnitomObservableSet, out: *mut usize) -> UnitomStatus {
    guard(|| write(out, deref(set, "set")?.0.len(), "out"))
}

/// Local dimension `d`; observables are `d² × d²`.
#[no_mangle]
pub unsafe extern "C" fn unitom_observable_set_dim(set: *const UnitomObservableSet, out: *mut usize) -> UnitomStatus {
    guard(|| write(out, deref(set, "set")?.0.d, "out"))
}

/// Copies observable `index` into `re` and `im`, each of length at least `d⁴`.
#[no_mangle]
pub unsafe extern "C" fn unitom_observable_set_observable(
    set: *const UnitomObservableSet,
    index: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> UnitomStatus {
    guard(|| {
        let set = &deref(set, "set")?.0;
        let o = set.observables.get(index).ok_or_else(|| {
            Fail(UnitomStatus::OutOfRange, format!("index {index} out of range for {} observables", set.len()))
        })?;
        let entries = o.h.as_complex().row_major();
        let re = out_slice(re, len, entries.len(), "re")?;
        let im = out_slice(im, len, entries.len(), "im")?;
        for (k, z) in entries.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Scale `c` of observable `index`; the measured value is `c(p₊ − p₋)`.
#[no_mangle]
pub unsafe extern "C" fn unitom_observable_set_scale(
    set: *const UnitomObservableSet,
    index: usize,
    out: *mut f64,
) -> UnitomStatus {
    guard(|| {
        let set = &deref(set, "set")?.0;
        let o = set
            .observables
            .get(index)
            .ok_or_else(|| Fail(UnitomStatus::OutOfRange, format!("index {index} out of range")))?;
        write(out, o.scale, "out")
    })
}

/// Serializes the set; release the string with [`unitom_string_free`].
#[no_mangle]
pub unsafe extern "C" fn unitom_observable_set_to_json(
    set: *const UnitomObservableSet,
    out: *mut *mut c_char,
) -> UnitomStatus {
    guard(|| {
        let text = unitom::io::to_json_string(&unitom::io::observable_set_value(&deref(set, "set")?.0))?;
        let c = CString::new(text).map_err(|_| Fail(UnitomStatus::Io, "JSON contains NUL".into()))?;
        write(out, c.into_raw(), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn unitom_observable_set_free(set: *mut UnitomObservableSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

#[no_mangle]
pub unsafe extern "C" fn unitom_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Channel from `count` Kraus operators of size `d × d`, concatenated
/// row-major in `re` and `im` (each `count · d²` long). The operators must
/// satisfy `Σ Aᵢ†Aᵢ = I`.
#[no_mangle]
pub unsafe extern "C" fn unitom_channel_from_kraus(
    d: usize,
    count: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut UnitomChannel,
) -> UnitomStatus {
    guard(|| {
        let n = d * d;
        let re = in_slice(re, count * n, "re")?;
        let im = in_slice(im, count * n, "im")?;
        let ops = (0..count)
            .map(|k| {
                let entries = (0..n).map(|i| C64::new(re[k * n + i], im[k * n + i])).collect();
                ComplexMatrix::from_row_major(d, d, entries)
            })
            .collect::<unitom::Result<Vec<_>>>()?;
        let ch = KrausChannel::new(ops)?;
        if !ch.is_trace_preserving() {
            return Err(Fail(
                UnitomStatus::InvalidArgument,
                format!("Kraus operators are not trace preserving (deviation {:e})", ch.tp_deviation()),
            ));
        }
        write(out, boxed(UnitomChannel(ch)), "out")
    })
}

/// Haar-random unitary channel.
#[no_mangle]
pub unsafe extern "C" fn unitom_channel_haar_unitary(d: usize, seed: u64, out: *mut *mut UnitomChannel) -> UnitomStatus {
    guard(|| {
        if d == 0 {
            return Err(Fail(UnitomStatus::InvalidArgument, "d must be at least 1".into()));
        }
        write(out, boxed(UnitomChannel(KrausChannel::unitary(haar_unitary(d, seed))?)), "out")
    })
}

/// Random channel with `q` Kraus operators.
#[no_mangle]
pub unsafe extern "C" fn unitom_channel_random(d: usize, q: usize, seed: u64, out: *mut *mut UnitomChannel) -> UnitomStatus {
    guard(|| write(out, boxed(UnitomChannel(KrausChannel::random(d, q, &mut seeded_rng(seed))?)), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn unitom_channel_free(ch: *mut UnitomChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Exact expectations `tr(H_i J)` into `values` (length at least the set count).
#[no_mangle]
pub unsafe extern "C" fn unitom_measure_exact(
    set: *const UnitomObservableSet,
    ch: *const UnitomChannel,
    values: *mut f64,
    len: usize,
) -> UnitomStatus {
    guard(|| {
        let e = measure_exact(&deref(set, "set")?.0, &deref(ch, "channel")?.0)?;
        out_slice(values, len, e.len(), "values")?.copy_from_slice(&e.values);
        Ok(())
    })
}

/// Finite-shot estimates; `std_errors` may be null.
#[no_mangle]
pub unsafe extern "C" fn unitom_measure_sampled(
    set: *const UnitomObservableSet,
    ch: *const UnitomChannel,
    shots: u64,
    seed: u64,
    values: *mut f64,
    std_errors: *mut f64,
    len: usize,
) -> UnitomStatus {
    guard(|| {
        let e = measure_sampled(&deref(set, "set")?.0, &deref(ch, "channel")?.0, shots, seed)?;
        out_slice(values, len, e.len(), "values")?.copy_from_slice(&e.values);
        if !std_errors.is_null() {
            let se = e.standard_errors.as_deref().unwrap_or_default();
            out_slice(std_errors, len, se.len(), "std_errors")?.copy_from_slice(se);
        }
        Ok(())
    })
}

/// Whether the set separates two channels by more than `tol` under exact
/// statistics; `gap` receives the largest componentwise difference.
#[no_mangle]
pub unsafe extern "C" fn unitom_discriminate(
    set: *const UnitomObservableSet,
    a: *const UnitomChannel,
    b: *const UnitomChannel,
    tol: f64,
    distinguished: *mut bool,
    gap: *mut f64,
) -> UnitomStatus {
    guard(|| {
        let set = &deref(set, "set")?.0;
        let ea = measure_exact(set, &deref(a, "a")?.0)?;
        let eb = measure_exact(set, &deref(b, "b")?.0)?;
        let (sep, g) = separation(&ea, &eb, tol, Tolerances::default().sigmas)?;
        write(distinguished, sep, "distinguished")?;
        if !gap.is_null() {
            gap.write(g);
        }
        Ok(())
    })
}

/// Unitary fitting the exact expectations `values` (`len` = set count).
/// `u_re`/`u_im` receive `d²` entries; `residual` and `converged` may be null.
#[no_mangle]
pub unsafe extern "C" fn unitom_reconstruct_unitary(
    set: *const UnitomObservableSet,
    values: *const f64,
    len: usize,
    restarts: usize,
    seed: u64,
    u_re: *mut f64,
    u_im: *mut f64,
    residual: *mut f64,
    converged: *mut bool,
) -> UnitomStatus {
    guard(|| {
        let set = &deref(set, "set")?.0;
        let target = ExpectationVector::exact(in_slice(values, len, "values")?.to_vec());
        let opts = ReconstructOptions { restarts, ..Default::default() };
        let r = reconstruct_unitary(set, &target, opts, seed)?;
        let entries = r.unitary.row_major();
        let re = out_slice(u_re, entries.len(), entries.len(), "u_re")?;
        let im = out_slice(u_im, entries.len(), entries.len(), "u_im")?;
        for (k, z) in entries.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        if !residual.is_null() {
            residual.write(r.residual);
        }
        if !converged.is_null() {
            converged.write(r.converged);
        }
        Ok(())
    })
}
