//! C ABI over the verifier. Inputs arrive as JSON documents in the same
//! formats the command-line tool reads; structured results come back as
//! JSON strings the caller frees with [`fgc_string_free`]. Handles are
//! opaque and must be released with their matching `_free` function.
//!
//! Every entry point returns an [`FgcStatus`]: `Ok` for success,
//! `PropertyViolation` when a checked property failed (the report says
//! which), `InvalidInput` for unusable arguments.

use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use fgcs::format::{self, doc_from_space, poset_from_doc, space_from_doc, Document, RunReport};
use fgcs::miner::{mine, MinerConfig};
use fgcs::poset::FinPoset;
use fgcs::ray;
use fgcs::set::{Subset, DEFAULT_CAP};
use fgcs::space::{FGCSpace, Mode};
use fgcs::subclass;
use fgcs::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgcStatus {
    Ok = 0,
    PropertyViolation = 1,
    InvalidInput = 2,
    NullPointer = 3,
    InternalError = 4,
}

/// Opaque handle to a validated space with its family.
pub struct FgcSpace {
    inner: Arc<FGCSpace>,
}

/// Opaque handle to a finite poset.
pub struct FgcPoset {
    inner: FinPoset,
}

fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, FgcStatus> {
    if ptr.is_null() {
        return Err(FgcStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| FgcStatus::InvalidInput)
}

fn give_string(out: *mut *mut c_char, text: String) -> Result<(), FgcStatus> {
    if out.is_null() {
        return Err(FgcStatus::NullPointer);
    }
    let c = CString::new(text).map_err(|_| FgcStatus::InternalError)?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn guarded(body: impl FnOnce() -> FgcStatus) -> FgcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => FgcStatus::InternalError,
    }
}

fn status_of(_err: &Error) -> FgcStatus {
    FgcStatus::InvalidInput
}

/// Version of the underlying library, as a static string.
#[no_mangle]
pub extern "C" fn fgc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Frees a string returned by any function in this library.
///
/// # Safety
/// `s` must be a pointer previously returned through an out-parameter of
/// this library and not yet freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fgc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn build_space(text: &str, cap: usize) -> Result<Result<Arc<FGCSpace>, RunReport>, FgcStatus> {
    let doc = match format::parse_document(text) {
        Ok(Document::Space(doc)) => doc,
        _ => return Err(FgcStatus::InvalidInput),
    };
    let mut run = RunReport::new("ffi validate");
    let loaded = match space_from_doc(&doc) {
        Ok(loaded) => loaded,
        Err(Error::NotAClosureSystem { reason }) | Err(Error::NotAClosureOperator { reason }) => {
            let mut report = fgcs::Report::new();
            report.push(fgcs::Violation::new("closure-axioms", vec![], reason));
            run.push("closure-axioms", report);
            return Ok(Err(run));
        }
        Err(e) => return Err(status_of(&e)),
    };
    let mut space = loaded.space;
    let report = space.validate(cap).map_err(|e| status_of(&e))?;
    let hull_ok = report.ok;
    run.push("hull-conditions", report);
    if !hull_ok {
        return Ok(Err(run));
    }
    let Some(family) = loaded.family else {
        return Err(FgcStatus::InvalidInput);
    };
    let mut x = FGCSpace::new(space, family).map_err(|e| status_of(&e))?;
    let report = x.validate(cap).map_err(|e| status_of(&e))?;
    let family_ok = report.ok;
    run.push("family-refinement", report);
    if !family_ok {
        return Ok(Err(run));
    }
    Ok(Ok(Arc::new(x)))
}

/// Parses and fully validates a space document (universe, gamma, tau,
/// family). On success the handle is stored in `out`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fgc_space_parse(json: *const c_char, out: *mut *mut FgcSpace) -> FgcStatus {
    guarded(|| {
        if out.is_null() {
            return FgcStatus::NullPointer;
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match build_space(text, DEFAULT_CAP) {
            Ok(Ok(space)) => {
                unsafe { *out = Box::into_raw(Box::new(FgcSpace { inner: space })) };
                FgcStatus::Ok
            }
            Ok(Err(_)) => FgcStatus::PropertyViolation,
            Err(status) => status,
        }
    })
}

/// Releases a space handle.
///
/// # Safety
/// `space` must come from [`fgc_space_parse`] or [`fgc_poset_to_space`]
/// and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fgc_space_free(space: *mut FgcSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Validates a space document without keeping a handle, writing the full
/// report JSON whenever the document could be interpreted.
///
/// # Safety
/// `json` must be a NUL-terminated string; `report_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fgc_space_validate(
    json: *const c_char,
    report_out: *mut *mut c_char,
) -> FgcStatus {
    guarded(|| {
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match build_space(text, DEFAULT_CAP) {
            Ok(Ok(_)) => {
                let mut run = RunReport::new("ffi validate");
                run.push("hull-conditions", fgcs::Report::new());
                run.push("family-refinement", fgcs::Report::new());
                match give_string(report_out, run.to_json()) {
                    Ok(()) => FgcStatus::Ok,
                    Err(s) => s,
                }
            }
            Ok(Err(run)) => match give_string(report_out, run.to_json()) {
                Ok(()) => FgcStatus::PropertyViolation,
                Err(s) => s,
            },
            Err(status) => status,
        }
    })
}

fn with_space<T>(
    space: *const FgcSpace,
    body: impl FnOnce(&Arc<FGCSpace>) -> Result<T, FgcStatus>,
) -> Result<T, FgcStatus> {
    if space.is_null() {
        return Err(FgcStatus::NullPointer);
    }
    let handle = unsafe { &*space };
    body(&handle.inner)
}

fn emit_json(out: *mut *mut c_char, result: Result<String, FgcStatus>) -> FgcStatus {
    match result {
        Ok(json) => match give_string(out, json) {
            Ok(()) => FgcStatus::Ok,
            Err(s) => s,
        },
        Err(s) => s,
    }
}

/// Writes the regular opens of a space as a JSON array of rendered sets.
///
/// # Safety
/// `space` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fgc_space_regulars(space: *const FgcSpace, out: *mut *mut c_char) -> FgcStatus {
    guarded(|| {
        emit_json(
            out,
            with_space(space, |x| {
                let regulars = x.regular_opens(DEFAULT_CAP).map_err(|e| status_of(&e))?;
                serde_json::to_string(&regulars.render_labels()).map_err(|_| FgcStatus::InternalError)
            }),
        )
    })
}

/// Writes the basis (family hulls) as a JSON array of rendered sets.
///
/// # Safety
/// `space` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fgc_space_basis(space: *const FgcSpace, out: *mut *mut c_char) -> FgcStatus {
    guarded(|| {
        emit_json(
            out,
            with_space(space, |x| {
                let basis = x.basis().map_err(|e| status_of(&e))?;
                let labels: Vec<String> = basis.members().iter().map(|b| b.to_string()).collect();
                serde_json::to_string(&labels).map_err(|_| FgcStatus::InternalError)
            }),
        )
    })
}

/// Decides way-below between two regular opens given as `{a,b}` strings,
/// writing 0 or 1 into `result`. A nonzero `oracle` also runs the
/// definitional oracle where it fits and reports any disagreement.
///
/// # Safety
/// `space` must be a live handle; `u1`, `u2` NUL-terminated; `result`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn fgc_space_way_below(
    space: *const FgcSpace,
    u1: *const c_char,
    u2: *const c_char,
    oracle: c_int,
    result: *mut c_int,
) -> FgcStatus {
    guarded(|| {
        if result.is_null() {
            return FgcStatus::NullPointer;
        }
        let outcome = with_space(space, |x| {
            let a = Subset::parse(x.universe(), read_str(u1)?).map_err(|e| status_of(&e))?;
            let b = Subset::parse(x.universe(), read_str(u2)?).map_err(|e| status_of(&e))?;
            let fast =
                x.way_below(&a, &b, Mode::Fast, DEFAULT_CAP).map_err(|e| status_of(&e))?;
            if oracle != 0 {
                if let Ok(o) = x.way_below(&a, &b, Mode::Oracle, DEFAULT_CAP) {
                    if o != fast {
                        return Err(FgcStatus::InternalError);
                    }
                }
            }
            Ok(fast)
        });
        match outcome {
            Ok(fast) => {
                unsafe { *result = fast as c_int };
                FgcStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Writes the space classification as JSON: the trichotomy class, the
/// number of regular opens, and the order flags of their inclusion
/// order.
///
/// # Safety
/// `space` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fgc_space_classify(space: *const FgcSpace, out: *mut *mut c_char) -> FgcStatus {
    guarded(|| {
        emit_json(
            out,
            with_space(space, |x| {
                let c = subclass::classify_space(x, DEFAULT_CAP).map_err(|e| status_of(&e))?;
                let value = serde_json::json!({
                    "class": c.class,
                    "regular_opens": c.regular_count,
                    "flags": c.flags,
                });
                serde_json::to_string(&value).map_err(|_| FgcStatus::InternalError)
            }),
        )
    })
}

/// Serializes the space behind a handle back to its document form.
///
/// # Safety
/// `space` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fgc_space_to_json(space: *const FgcSpace, out: *mut *mut c_char) -> FgcStatus {
    guarded(|| {
        emit_json(
            out,
            with_space(space, |x| {
                let doc = doc_from_space(x.space(), Some(x.family()));
                serde_json::to_string_pretty(&doc).map_err(|_| FgcStatus::InternalError)
            }),
        )
    })
}

/// Parses a poset document (`elements` plus `leq` pairs; the
/// reflexive-transitive closure is applied on load).
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fgc_poset_parse(json: *const c_char, out: *mut *mut FgcPoset) -> FgcStatus {
    guarded(|| {
        if out.is_null() {
            return FgcStatus::NullPointer;
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let doc = match format::parse_document(text) {
            Ok(Document::Poset(doc)) => doc,
            _ => return FgcStatus::InvalidInput,
        };
        match poset_from_doc(&doc) {
            Ok(p) => {
                unsafe { *out = Box::into_raw(Box::new(FgcPoset { inner: p })) };
                FgcStatus::Ok
            }
            Err(_) => FgcStatus::InvalidInput,
        }
    })
}

/// Releases a poset handle.
///
/// # Safety
/// `poset` must come from [`fgc_poset_parse`] and not be used afterwards;
/// null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fgc_poset_free(poset: *mut FgcPoset) {
    if !poset.is_null() {
        drop(Box::from_raw(poset));
    }
}

/// Writes the order classification flags of a poset as JSON.
///
/// # Safety
/// `poset` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fgc_poset_classify(poset: *const FgcPoset, out: *mut *mut c_char) -> FgcStatus {
    guarded(|| {
        if poset.is_null() {
            return FgcStatus::NullPointer;
        }
        let p = unsafe { &(*poset).inner };
        let c = p.classify();
        match serde_json::to_string(&c.flags) {
            Ok(json) => emit_json(out, Ok(json)),
            Err(_) => FgcStatus::InternalError,
        }
    })
}

/// Runs the representation round trip of a poset, writing the report
/// JSON. Returns `PropertyViolation` when the round trip fails.
///
/// # Safety
/// `poset` must be a live handle; `report_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fgc_poset_roundtrip(
    poset: *const FgcPoset,
    report_out: *mut *mut c_char,
) -> FgcStatus {
    guarded(|| {
        if poset.is_null() {
            return FgcStatus::NullPointer;
        }
        let p = unsafe { &(*poset).inner };
        match p.roundtrip(DEFAULT_CAP) {
            Ok(outcome) => {
                let ok = outcome.report.ok;
                let json = match serde_json::to_string(&outcome.report) {
                    Ok(j) => j,
                    Err(_) => return FgcStatus::InternalError,
                };
                match give_string(report_out, json) {
                    Ok(()) => {
                        if ok {
                            FgcStatus::Ok
                        } else {
                            FgcStatus::PropertyViolation
                        }
                    }
                    Err(s) => s,
                }
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Derives the space of a poset and returns it as a new space handle.
///
/// # Safety
/// `poset` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fgc_poset_to_space(poset: *const FgcPoset, out: *mut *mut FgcSpace) -> FgcStatus {
    guarded(|| {
        if poset.is_null() || out.is_null() {
            return FgcStatus::NullPointer;
        }
        let p = unsafe { &(*poset).inner };
        match p.to_fgcs(DEFAULT_CAP) {
            Ok(space) => {
                unsafe { *out = Box::into_raw(Box::new(FgcSpace { inner: Arc::new(space) })) };
                FgcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Way-below on the rational-ray carrier; endpoints use the grammar
/// `(p/q,inf)`, `[p/q,inf)` or `all`. Closed rays are rejected as not
/// regular.
///
/// # Safety
/// `u1` and `u2` must be NUL-terminated; `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fgc_ray_way_below(
    u1: *const c_char,
    u2: *const c_char,
    result: *mut c_int,
) -> FgcStatus {
    guarded(|| {
        if result.is_null() {
            return FgcStatus::NullPointer;
        }
        let parse = |p: *const c_char| -> Result<ray::RayOpen, FgcStatus> {
            let set: ray::RaySet = read_str(p)?.parse().map_err(|_| FgcStatus::InvalidInput)?;
            set.as_open().ok_or(FgcStatus::InvalidInput)
        };
        match (parse(u1), parse(u2)) {
            (Ok(a), Ok(b)) => {
                unsafe { *result = ray::ray_way_below(&a, &b) as c_int };
                FgcStatus::Ok
            }
            (Err(s), _) | (_, Err(s)) => s,
        }
    })
}

/// Runs the seeded miner and writes its report JSON. Returns
/// `PropertyViolation` when any violation was found.
///
/// # Safety
/// `report_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fgc_mine(
    seed: u64,
    count: usize,
    max_n: usize,
    report_out: *mut *mut c_char,
) -> FgcStatus {
    guarded(|| {
        let cfg = MinerConfig::new(seed, count, max_n);
        let outcome = mine(&cfg, DEFAULT_CAP);
        let run = outcome.to_run_report("ffi mine");
        match give_string(report_out, run.to_json()) {
            Ok(()) => {
                if outcome.ok() {
                    FgcStatus::Ok
                } else {
                    FgcStatus::PropertyViolation
                }
            }
            Err(s) => s,
        }
    })
}
