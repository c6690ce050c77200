//! C interface to the `sparse-sieve` library.
//!
//! Objects cross the boundary as opaque pointers created by `*_new`
//! functions and released by the matching `*_free`. Every fallible call
//! returns an [`SsStatus`]; results go through out-pointers, and
//! [`ss_last_error`] describes the most recent failure on the calling
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use sparse_sieve::arith::quad_cong_roots;
use sparse_sieve::bounds::sieve_lhs;
use sparse_sieve::cli::parse_moduli;
use sparse_sieve::counting::k_delta;
use sparse_sieve::harmonic::gauss_sum;
use sparse_sieve::moduli::{enumerate_farey, FareyList, ModuliSet};
use sparse_sieve::sequence::{eval_exp_sum, make_sequence, CoefficientSequence, SequenceKind};
use sparse_sieve::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotCoprime = 3,
    EmptySet = 4,
    CapacityExceeded = 5,
    Io = 6,
    Numerical = 7,
    Internal = 8,
}

/// A coefficient sequence `a_1..a_N`.
pub struct SsSequence(CoefficientSequence);

/// A finite set of moduli.
pub struct SsModuli(ModuliSet);

/// The Farey fractions `a/q`, `(a,q) = 1`, over a moduli set, sorted.
pub struct SsFarey(FareyList);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> SsStatus {
    match err {
        Error::NotCoprime { .. } | Error::NotInvertible { .. } => SsStatus::NotCoprime,
        Error::EmptySet(_) => SsStatus::EmptySet,
        Error::CapacityExceeded { .. } => SsStatus::CapacityExceeded,
        Error::Io(_) | Error::FileFormat { .. } => SsStatus::Io,
        Error::QuadratureFailure { .. } => SsStatus::Numerical,
        _ => SsStatus::InvalidArgument,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), SsStatus>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SsStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic".into());
            SsStatus::Internal
        }
    }
}

fn fail(err: Error) -> SsStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null(what: &str) -> SsStatus {
    set_error(format!("{what} is null"));
    SsStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, SsStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        SsStatus::InvalidArgument
    })
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, SsStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn in_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, SsStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ss_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ss_status_name(status: SsStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SsStatus::Ok => c"ok",
        SsStatus::NullPointer => c"null pointer",
        SsStatus::InvalidArgument => c"invalid argument",
        SsStatus::NotCoprime => c"arguments not coprime",
        SsStatus::EmptySet => c"empty set",
        SsStatus::CapacityExceeded => c"capacity exceeded",
        SsStatus::Io => c"i/o or file format error",
        SsStatus::Numerical => c"numerical target not met",
        SsStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Builds a sequence from a spec such as `"ones"`, `"delta:3"`,
/// `"random_phases"` or `"focused:1/4"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ss_sequence_new(
    spec: *const c_char,
    n: usize,
    seed: u64,
    out: *mut *mut SsSequence,
) -> SsStatus {
    guard(|| {
        let spec = str_arg(spec, "spec")?;
        let out = out_arg(out, "out")?;
        let kind = SequenceKind::parse(spec, seed).map_err(fail)?;
        let seq = make_sequence(&kind, n).map_err(fail)?;
        *out = Box::into_raw(Box::new(SsSequence(seq)));
        Ok(())
    })
}

/// Builds a sequence from `n` real and `n` imaginary parts; `im` may be
/// NULL for a real sequence.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `n` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn ss_sequence_from_values(
    re: *const f64,
    im: *const f64,
    n: usize,
    out: *mut *mut SsSequence,
) -> SsStatus {
    guard(|| {
        if re.is_null() {
            return Err(null("re"));
        }
        let out = out_arg(out, "out")?;
        let re = std::slice::from_raw_parts(re, n);
        let values: Vec<Complex64> = if im.is_null() {
            re.iter().map(|&r| Complex64::new(r, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, n);
            re.iter()
                .zip(im)
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect()
        };
        let seq = CoefficientSequence::from_values(values).map_err(fail)?;
        *out = Box::into_raw(Box::new(SsSequence(seq)));
        Ok(())
    })
}

/// # Safety
/// `seq` must come from an `ss_sequence_*` constructor, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ss_sequence_free(seq: *mut SsSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// `N`, or 0 for NULL.
///
/// # Safety
/// `seq` must be a live sequence or NULL.
#[no_mangle]
pub unsafe extern "C" fn ss_sequence_len(seq: *const SsSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.0.len())
}

/// `Z = Σ|a_n|²`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ss_sequence_energy(seq: *const SsSequence, out: *mut f64) -> SsStatus {
    guard(|| {
        *out_arg(out, "out")? = in_arg(seq, "seq")?.0.energy();
        Ok(())
    })
}

/// `S(α) = Σ a_n e(nα)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ss_exp_sum(
    seq: *const SsSequence,
    alpha: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SsStatus {
    guard(|| {
        let seq = in_arg(seq, "seq")?;
        let (re, im) = (out_arg(out_re, "out_re")?, out_arg(out_im, "out_im")?);
        if !alpha.is_finite() {
            set_error(format!("alpha = {alpha} is not finite"));
            return Err(SsStatus::InvalidArgument);
        }
        let s = eval_exp_sum(&seq.0, alpha);
        (*re, *im) = (s.re, s.im);
        Ok(())
    })
}

/// Builds a moduli set from a spec (`"squares"`, `"octave"`, `"primes"`,
/// `"list:1,4,9"`, `"file:path"`). `q` is the size expression (e.g.
/// `"16"` or `"N^0.3"`, may be NULL), `q0` the octave base (ignored when
/// not positive) and `n` the value substituted for `N` (ignored when not
/// positive).
///
/// # Safety
/// `spec` must be a NUL-terminated string, `q` NULL or NUL-terminated, and
/// `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ss_moduli_new(
    spec: *const c_char,
    q: *const c_char,
    q0: f64,
    n: f64,
    out: *mut *mut SsModuli,
) -> SsStatus {
    guard(|| {
        let spec = str_arg(spec, "spec")?;
        let q = if q.is_null() {
            None
        } else {
            Some(str_arg(q, "q")?)
        };
        let out = out_arg(out, "out")?;
        let set = parse_moduli(spec, q, (q0 > 0.0).then_some(q0), (n > 0.0).then_some(n))
            .map_err(fail)?;
        *out = Box::into_raw(Box::new(SsModuli(set)));
        Ok(())
    })
}

/// Builds an explicit set from `len` strictly increasing positive values.
///
/// # Safety
/// `values` must point to `len` readable integers (or be NULL with
/// `len = 0`).
#[no_mangle]
pub unsafe extern "C" fn ss_moduli_from_list(
    values: *const u64,
    len: usize,
    out: *mut *mut SsModuli,
) -> SsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let v = if len == 0 {
            Vec::new()
        } else if values.is_null() {
            return Err(null("values"));
        } else {
            std::slice::from_raw_parts(values, len).to_vec()
        };
        if v.first() == Some(&0) {
            set_error("moduli must be positive".into());
            return Err(SsStatus::InvalidArgument);
        }
        let set = ModuliSet::explicit(v).map_err(fail)?;
        *out = Box::into_raw(Box::new(SsModuli(set)));
        Ok(())
    })
}

/// # Safety
/// `set` must come from an `ss_moduli_*` constructor, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ss_moduli_free(set: *mut SsModuli) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// `|𝒮|`, or 0 for NULL.
///
/// # Safety
/// `set` must be a live set or NULL.
#[no_mangle]
pub unsafe extern "C" fn ss_moduli_len(set: *const SsModuli) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Copies up to `cap` elements into `buf` and stores the set size in
/// `out_len`.
///
/// # Safety
/// `buf` must have room for `cap` integers (may be NULL when `cap = 0`).
#[no_mangle]
pub unsafe extern "C" fn ss_moduli_elements(
    set: *const SsModuli,
    buf: *mut u64,
    cap: usize,
    out_len: *mut usize,
) -> SsStatus {
    guard(|| {
        let set = in_arg(set, "set")?;
        *out_arg(out_len, "out_len")? = set.0.len();
        let n = cap.min(set.0.len());
        if n > 0 {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(set.0.elements().as_ptr(), buf, n);
        }
        Ok(())
    })
}

/// `Σ_{q∈𝒮} Σ_{(a,q)=1} |S(a/q)|²`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ss_sieve_lhs(
    seq: *const SsSequence,
    set: *const SsModuli,
    out: *mut f64,
) -> SsStatus {
    guard(|| {
        let (seq, set) = (in_arg(seq, "seq")?, in_arg(set, "set")?);
        *out_arg(out, "out")? = sieve_lhs(&seq.0, &set.0).map_err(fail)?;
        Ok(())
    })
}

/// Sorted Farey fractions over `set`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ss_farey_new(set: *const SsModuli, out: *mut *mut SsFarey) -> SsStatus {
    guard(|| {
        let set = in_arg(set, "set")?;
        let out = out_arg(out, "out")?;
        let list = enumerate_farey(&set.0).map_err(fail)?;
        *out = Box::into_raw(Box::new(SsFarey(list)));
        Ok(())
    })
}

/// # Safety
/// `farey` must come from [`ss_farey_new`], or be NULL.
#[no_mangle]
pub unsafe extern "C" fn ss_farey_free(farey: *mut SsFarey) {
    if !farey.is_null() {
        drop(Box::from_raw(farey));
    }
}

/// Number of fractions, or 0 for NULL.
///
/// # Safety
/// `farey` must be a live list or NULL.
#[no_mangle]
pub unsafe extern "C" fn ss_farey_len(farey: *const SsFarey) -> usize {
    farey.as_ref().map_or(0, |f| f.0.len())
}

/// The `index`-th fraction `a/q` in increasing order.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ss_farey_get(
    farey: *const SsFarey,
    index: usize,
    out_a: *mut u64,
    out_q: *mut u64,
) -> SsStatus {
    guard(|| {
        let farey = in_arg(farey, "farey")?;
        let (a, q) = (out_arg(out_a, "out_a")?, out_arg(out_q, "out_q")?);
        let Some(entry) = farey.0.entries().get(index) else {
            set_error(format!(
                "index {index} out of range for {} fractions",
                farey.0.len()
            ));
            return Err(SsStatus::InvalidArgument);
        };
        (*a, *q) = (entry.a, entry.q);
        Ok(())
    })
}

/// `K(Δ)`: most fractions within circular distance `Δ` of one point.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ss_k_delta(farey: *const SsFarey, delta: f64, out: *mut u64) -> SsStatus {
    guard(|| {
        let farey = in_arg(farey, "farey")?;
        *out_arg(out, "out")? = k_delta(&farey.0, delta).map_err(fail)?;
        Ok(())
    })
}

/// `Σ_{d=1}^{c} e((kd² + ld)/c)`.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ss_gauss_sum(
    k: i64,
    l: i64,
    c: u64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SsStatus {
    guard(|| {
        let (re, im) = (out_arg(out_re, "out_re")?, out_arg(out_im, "out_im")?);
        let g = gauss_sum(k, l, c).map_err(fail)?;
        (*re, *im) = (g.re, g.im);
        Ok(())
    })
}

/// Number of `x mod k` with `x²g ≡ l (mod k)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ss_quad_root_count(g: u64, l: i64, k: u64, out: *mut u64) -> SsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        if k == 0 {
            set_error("modulus k must be positive".into());
            return Err(SsStatus::InvalidArgument);
        }
        *out = quad_cong_roots(g, l, k).count;
        Ok(())
    })
}
