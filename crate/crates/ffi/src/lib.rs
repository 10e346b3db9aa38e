//! C ABI over `stardisc`.
//!
//! Point sets and chain results cross the boundary as opaque handles that
//! the caller releases with the matching `*_free` function. Every fallible
//! call returns a [`StardiscStatus`]; on failure a message is available from
//! [`stardisc_last_error`] on the same thread. Strings returned to C are
//! released with [`stardisc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stardisc::adversary::{self, ChainCertificate, ChainParameters, ChainResult};
use stardisc::discrepancy::{self, ExactOptions, Side};
use stardisc::generators::{generate, GeneratorKind, GeneratorSpec};
use stardisc::{Error, PointSet};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StardiscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    GridTooLarge = 4,
    SoundnessViolation = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StardiscSide {
    Overfill = 0,
    Underfill = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StardiscGenerator {
    Random = 0,
    Halton = 1,
    Hammersley = 2,
    Grid = 3,
}

/// Opaque point set handle.
pub struct StardiscPointSet {
    inner: PointSet,
}

/// Opaque result of [`stardisc_certify`].
pub struct StardiscChainResult {
    inner: ChainResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message).unwrap_or_else(|_| c"error message contained NUL".into());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(error: &Error) -> StardiscStatus {
    match error {
        Error::Io(_) => StardiscStatus::Io,
        Error::GridTooLarge { .. } => StardiscStatus::GridTooLarge,
        Error::SoundnessViolation(_) => StardiscStatus::SoundnessViolation,
        _ => StardiscStatus::InvalidArgument,
    }
}

struct Failure(StardiscStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(StardiscStatus::NullPointer, format!("{what} is NULL"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> StardiscStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => StardiscStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("panic inside stardisc".into());
            StardiscStatus::Panic
        }
    }
}

unsafe fn point_set<'a>(handle: *const StardiscPointSet) -> Result<&'a PointSet, Failure> {
    // SAFETY: caller passes NULL or a live handle from this library.
    unsafe { handle.as_ref() }
        .map(|h| &h.inner)
        .ok_or_else(|| null("point set"))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    // SAFETY: caller guarantees a NUL-terminated string.
    unsafe { CStr::from_ptr(s) }.to_str().map_err(|_| {
        Failure(
            StardiscStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

fn to_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|_| {
        Failure(
            StardiscStatus::InvalidArgument,
            "string contains NUL".into(),
        )
    })
}

fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, per the caller contract, writable.
    unsafe { out.write(value) };
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn stardisc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stardisc_string_free(s: *mut c_char) {
    if s.is_null() {
        return;
    }
    // SAFETY: allocated by CString::into_raw in this crate.
    drop(unsafe { CString::from_raw(s) });
}

/// Builds a point set from `n * dim` row-major coordinates.
///
/// # Safety
/// `coords` must point to `n * dim` readable doubles (it may be NULL when
/// `n == 0`); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stardisc_point_set_new(
    coords: *const f64,
    n: usize,
    dim: usize,
    out: *mut *mut StardiscPointSet,
) -> StardiscStatus {
    guard(|| {
        let len = n
            .checked_mul(dim)
            .ok_or_else(|| Failure(StardiscStatus::InvalidArgument, "n * dim overflows".into()))?;
        let values = if len == 0 {
            Vec::new()
        } else if coords.is_null() {
            return Err(null("coords"));
        } else {
            // SAFETY: caller guarantees `len` readable doubles.
            unsafe { std::slice::from_raw_parts(coords, len) }.to_vec()
        };
        let inner = PointSet::from_flat(dim, values)?;
        write_out(
            out,
            Box::into_raw(Box::new(StardiscPointSet { inner })),
            "out",
        )
    })
}

/// Reads a point set from a CSV point file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stardisc_point_set_from_csv(
    path: *const c_char,
    out: *mut *mut StardiscPointSet,
) -> StardiscStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let path = unsafe { c_str(path, "path") }?;
        let inner = PointSet::from_csv_path(path)?;
        write_out(
            out,
            Box::into_raw(Box::new(StardiscPointSet { inner })),
            "out",
        )
    })
}

/// Generates a point set; `seed` is used by the random generator only.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stardisc_generate(
    kind: StardiscGenerator,
    n: usize,
    dim: usize,
    seed: u64,
    out: *mut *mut StardiscPointSet,
) -> StardiscStatus {
    guard(|| {
        let kind = match kind {
            StardiscGenerator::Random => GeneratorKind::Random,
            StardiscGenerator::Halton => GeneratorKind::Halton,
            StardiscGenerator::Hammersley => GeneratorKind::Hammersley,
            StardiscGenerator::Grid => GeneratorKind::Grid,
        };
        let inner = generate(&GeneratorSpec::new(kind, n, dim).with_seed(seed))?;
        write_out(
            out,
            Box::into_raw(Box::new(StardiscPointSet { inner })),
            "out",
        )
    })
}

/// # Safety
/// `points` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stardisc_point_set_free(points: *mut StardiscPointSet) {
    if !points.is_null() {
        // SAFETY: allocated by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(points) });
    }
}

/// Number of points, or 0 for NULL.
///
/// # Safety
/// `points` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stardisc_point_set_len(points: *const StardiscPointSet) -> usize {
    // SAFETY: forwarded caller contract.
    unsafe { points.as_ref() }.map_or(0, |p| p.inner.len())
}

/// Dimension, or 0 for NULL.
///
/// # Safety
/// `points` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stardisc_point_set_dim(points: *const StardiscPointSet) -> usize {
    // SAFETY: forwarded caller contract.
    unsafe { points.as_ref() }.map_or(0, |p| p.inner.dim())
}

/// Exact star discrepancy. `threads == 0` uses the default pool and
/// `max_corners == 0` the default grid cap. `out_corner` may be NULL;
/// otherwise it receives `dim` doubles. `out_side` may be NULL.
///
/// # Safety
/// `points` must be a live handle, `out_value` writable, `out_corner` NULL
/// or writable for `dim` doubles, `out_side` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn stardisc_star_discrepancy_exact(
    points: *const StardiscPointSet,
    max_corners: u64,
    threads: usize,
    out_value: *mut f64,
    out_corner: *mut f64,
    out_side: *mut StardiscSide,
) -> StardiscStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let x = unsafe { point_set(points) }?;
        let options = ExactOptions {
            max_corners: if max_corners == 0 {
                discrepancy::DEFAULT_MAX_CORNERS
            } else {
                max_corners
            },
            threads: (threads > 0).then_some(threads),
        };
        let r = discrepancy::star_discrepancy_exact(x, &options)?;
        write_out(out_value, r.value, "out_value")?;
        if !out_corner.is_null() {
            // SAFETY: caller guarantees room for `dim` doubles.
            unsafe { ptr::copy_nonoverlapping(r.argmax_corner.as_ptr(), out_corner, r.d) };
        }
        if !out_side.is_null() {
            let side = match r.side {
                Side::Overfill => StardiscSide::Overfill,
                Side::Underfill => StardiscSide::Underfill,
            };
            write_out(out_side, side, "out_side")?;
        }
        Ok(())
    })
}

/// Sampled lower bound on the star discrepancy.
///
/// # Safety
/// `points` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn stardisc_star_discrepancy_sampled(
    points: *const StardiscPointSet,
    trials: u64,
    seed: u64,
    out_value: *mut f64,
) -> StardiscStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let x = unsafe { point_set(points) }?;
        let r = discrepancy::star_discrepancy_sampled(x, trials, seed)?;
        write_out(out_value, r.value, "out_value")
    })
}

/// `⌊d/2⌋·⌊1/(βε)⌋` after validating the parameters.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stardisc_guaranteed_chain_length(
    dim: usize,
    epsilon: f64,
    beta: f64,
    out: *mut u64,
) -> StardiscStatus {
    guard(|| {
        let params = ChainParameters::new(dim, epsilon, beta)?;
        write_out(out, params.guaranteed_chain_length(), "out")
    })
}

/// Runs the chain adversary for the claim `D* <= epsilon`.
///
/// # Safety
/// `points` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stardisc_certify(
    points: *const StardiscPointSet,
    epsilon: f64,
    beta: f64,
    out: *mut *mut StardiscChainResult,
) -> StardiscStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let x = unsafe { point_set(points) }?;
        let inner = adversary::certify(x, epsilon, beta)?;
        write_out(
            out,
            Box::into_raw(Box::new(StardiscChainResult { inner })),
            "out",
        )
    })
}

/// # Safety
/// `result` must be NULL or a handle from [`stardisc_certify`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stardisc_chain_result_free(result: *mut StardiscChainResult) {
    if !result.is_null() {
        // SAFETY: allocated by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(result) });
    }
}

/// True when the chain completed (certificate), false when refuted or NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stardisc_chain_result_is_certificate(
    result: *const StardiscChainResult,
) -> bool {
    // SAFETY: forwarded caller contract.
    unsafe { result.as_ref() }.is_some_and(|r| r.inner.is_certificate())
}

/// Number of chain steps: `k` for a certificate, the partial chain length
/// for a refutation.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stardisc_chain_result_steps(result: *const StardiscChainResult) -> usize {
    // SAFETY: forwarded caller contract.
    match unsafe { result.as_ref() }.map(|r| &r.inner) {
        Some(ChainResult::Certificate(c)) => c.k,
        Some(ChainResult::Refuted { partial_chain, .. }) => partial_chain.len(),
        None => 0,
    }
}

/// Witness excess of a refutation; `InvalidArgument` for a certificate.
///
/// # Safety
/// `result` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stardisc_chain_result_excess(
    result: *const StardiscChainResult,
    out: *mut f64,
) -> StardiscStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let r = unsafe { result.as_ref() }.ok_or_else(|| null("result"))?;
        let witness = r.inner.witness().ok_or_else(|| {
            Failure(
                StardiscStatus::InvalidArgument,
                "result is a certificate".into(),
            )
        })?;
        write_out(out, witness.excess, "out")
    })
}

/// Certificate or witness JSON, matching the `stardisc certify` output.
/// Release with [`stardisc_string_free`].
///
/// # Safety
/// `result` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stardisc_chain_result_to_json(
    result: *const StardiscChainResult,
    out: *mut *mut c_char,
) -> StardiscStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let r = unsafe { result.as_ref() }.ok_or_else(|| null("result"))?;
        let text = match &r.inner {
            ChainResult::Certificate(c) => c.to_json()?,
            ChainResult::Refuted { witness, .. } => {
                serde_json::to_string_pretty(witness).map_err(Error::from)?
            }
        };
        write_out(out, to_c_string(text)?, "out")
    })
}

/// Re-checks a certificate JSON against `points`. A certificate that parses
/// but fails any check sets `*out_valid = false` and returns `Ok`; the
/// first failed check is then available from [`stardisc_last_error`].
///
/// # Safety
/// `points` must be a live handle, `json` a NUL-terminated string and
/// `out_valid` writable.
#[no_mangle]
pub unsafe extern "C" fn stardisc_verify_certificate_json(
    points: *const StardiscPointSet,
    json: *const c_char,
    out_valid: *mut bool,
) -> StardiscStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let x = unsafe { point_set(points) }?;
        // SAFETY: forwarded caller contract.
        let text = unsafe { c_str(json, "json") }?;
        let failures = match ChainCertificate::from_json(text) {
            Ok(cert) => adversary::verify_certificate(x, &cert).failures,
            Err(Error::Json(e)) => return Err(Error::Json(e).into()),
            Err(e) => vec![e.to_string()],
        };
        if let Some(first) = failures.first() {
            set_last_error(first.clone());
        }
        write_out(out_valid, failures.is_empty(), "out_valid")
    })
}
