//! C interface to the povm-domain library.
//!
//! Conventions:
//! - Every fallible call returns a [`PdStatus`] and writes results through
//!   out pointers, which are left untouched on failure.
//! - Handles created here ([`PdState`], [`PdPovm`]) are opaque and must be
//!   released with their matching `*_free` function; strings returned
//!   through `char**` must be released with [`pd_string_free`].
//! - After a non-`Ok` status, [`pd_last_error_message`] returns a
//!   descriptive message for the calling thread until the next failure.
//! - All functions are thread-safe; handles are immutable after creation
//!   and may be shared across threads but not freed twice.

use povm_domain::domain::{membership, probabilities, tetrahedron_coordinates, ProbabilityPoint};
use povm_domain::estimation::{
    classify, linear_inversion, project_to_physical, simulate_counts, CountRecord,
    FeasibilityVerdict,
};
use povm_domain::io::{from_json_str, to_json_string, PovmJson, StateJson};
use povm_domain::povm::{effective_dimension, random_povm, tetrahedral_povm, validate, Povm};
use povm_domain::states::{random_density, DensityMatrix};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Outcome of a C API call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PdStatus {
    /// Call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was structurally valid but unusable (wrong dimension,
    /// zero shots, non-finite tolerance, ...).
    InvalidArgument = 2,
    /// A string was not valid UTF-8 or not valid JSON for the schema.
    ParseError = 3,
    /// The parsed object violates a physical constraint.
    ValidationError = 4,
    /// An iterative kernel failed to converge.
    NumericalError = 5,
    /// A caller-supplied buffer has the wrong length.
    BufferTooSmall = 6,
    /// A panic was caught at the boundary; state is unspecified.
    InternalError = 7,
}

/// Feasibility of a count record against the physical domain.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PdVerdict {
    /// The frequencies are the image of a density matrix.
    Feasible = 0,
    /// Unphysical frequencies whose error box reaches the domain.
    Marginal = 1,
    /// The error box misses the domain entirely.
    Insufficient = 2,
}

/// Membership diagnostics for a probability vector.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct PdMembership {
    /// Nonzero when the vector is the image of a density matrix.
    pub inside: bool,
    /// Smallest eigenvalue of the reconstructed matrix.
    pub min_eigenvalue: f64,
    /// Euclidean distance from the vector to the affine span of the map.
    pub consistency_residual: f64,
    /// Nonzero when the measurement is informationally incomplete and the
    /// reconstruction picked the minimum-norm candidate.
    pub non_unique: bool,
}

/// Diagnostics accompanying a tomographic estimate.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct PdInversionInfo {
    /// Distance from the input frequencies to the affine span.
    pub consistency_residual: f64,
    /// Rank of the affine map.
    pub effective_dimension: usize,
    /// Nonzero when the solution is a minimum-norm representative.
    pub non_unique: bool,
    /// Smallest eigenvalue of the raw inversion before repair.
    pub min_eigenvalue_raw: f64,
}

/// Opaque density matrix handle.
pub struct PdState(DensityMatrix);

/// Opaque measurement handle.
pub struct PdPovm(Povm);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized: Vec<u8> = message.bytes().filter(|&b| b != 0).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("nul bytes removed");
    });
}

fn fail(status: PdStatus, message: &str) -> PdStatus {
    set_error(message);
    status
}

/// Runs a body with panics converted to `InternalError`.
fn guarded<F: FnOnce() -> PdStatus>(body: F) -> PdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(PdStatus::InternalError, "internal panic"),
    }
}

/// Last error message for this thread; empty string when no call failed
/// yet. The pointer stays valid until the next failing call on the same
/// thread. Never null. Do not free.
#[no_mangle]
pub extern "C" fn pd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string. Do not free.
#[no_mangle]
pub extern "C" fn pd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned through a `char**` out parameter.
///
/// # Safety
/// `s` must be a pointer produced by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn pd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn str_arg<'a>(ptr: *const c_char) -> Result<&'a str, PdStatus> {
    if ptr.is_null() {
        set_error("string argument is null");
        return Err(PdStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| {
        set_error(&format!("argument is not UTF-8: {e}"));
        PdStatus::ParseError
    })
}

fn export_string(text: String, out: *mut *mut c_char) -> PdStatus {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(e) => return fail(PdStatus::InternalError, &format!("embedded nul: {e}")),
    };
    unsafe { *out = c.into_raw() };
    PdStatus::Ok
}

macro_rules! require_nonnull {
    ($($ptr:ident),+) => {
        $(
            if $ptr.is_null() {
                return fail(
                    PdStatus::NullPointer,
                    concat!(stringify!($ptr), " is null"),
                );
            }
        )+
    };
}

unsafe fn state_arg<'a>(ptr: *const PdState) -> Result<&'a DensityMatrix, PdStatus> {
    if ptr.is_null() {
        set_error("state handle is null");
        return Err(PdStatus::NullPointer);
    }
    Ok(&(*ptr).0)
}

unsafe fn povm_arg<'a>(ptr: *const PdPovm) -> Result<&'a Povm, PdStatus> {
    if ptr.is_null() {
        set_error("measurement handle is null");
        return Err(PdStatus::NullPointer);
    }
    Ok(&(*ptr).0)
}

/// Parses a density matrix from `{"d": ..., "matrix": [[[re, im], ...], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_state_parse_json(
    json: *const c_char,
    out: *mut *mut PdState,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(out);
        let text = match str_arg(json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let parsed: StateJson = match from_json_str(text) {
            Ok(p) => p,
            Err(e) => return fail(PdStatus::ParseError, &e.to_string()),
        };
        match parsed.to_density() {
            Ok(rho) => {
                *out = Box::into_raw(Box::new(PdState(rho)));
                PdStatus::Ok
            }
            Err(e) => fail(PdStatus::ValidationError, &e.to_string()),
        }
    })
}

/// Serializes a state back to its JSON schema.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_state_to_json(
    state: *const PdState,
    out: *mut *mut c_char,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(out);
        let rho = match state_arg(state) {
            Ok(r) => r,
            Err(status) => return status,
        };
        export_string(to_json_string(&StateJson::from_density(rho)), out)
    })
}

/// Releases a state handle.
///
/// # Safety
/// `state` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pd_state_free(state: *mut PdState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Order of the density matrix behind a handle.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_state_dim(state: *const PdState, out: *mut usize) -> PdStatus {
    guarded(|| {
        require_nonnull!(out);
        match state_arg(state) {
            Ok(rho) => {
                *out = rho.dim();
                PdStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Creates the maximally mixed state `identity / dim`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_state_maximally_mixed(dim: usize, out: *mut *mut PdState) -> PdStatus {
    guarded(|| {
        require_nonnull!(out);
        if dim == 0 {
            return fail(PdStatus::InvalidArgument, "dimension must be positive");
        }
        *out = Box::into_raw(Box::new(PdState(DensityMatrix::maximally_mixed(dim))));
        PdStatus::Ok
    })
}

/// Draws a reproducible random state of the given rank.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_state_random(
    dim: usize,
    rank: usize,
    seed: u64,
    out: *mut *mut PdState,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(out);
        match random_density(dim, rank, seed) {
            Ok(rho) => {
                *out = Box::into_raw(Box::new(PdState(rho)));
                PdStatus::Ok
            }
            Err(e) => fail(PdStatus::InvalidArgument, &e.to_string()),
        }
    })
}

/// Parses a measurement from `{"d": ..., "effects": [...]}` and checks it
/// is a valid POVM under `tol`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_povm_parse_json(
    json: *const c_char,
    tol: f64,
    out: *mut *mut PdPovm,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(out);
        let text = match str_arg(json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let parsed: PovmJson = match from_json_str(text) {
            Ok(p) => p,
            Err(e) => return fail(PdStatus::ParseError, &e.to_string()),
        };
        let povm = match parsed.to_povm() {
            Ok(p) => p,
            Err(e) => return fail(PdStatus::ValidationError, &e.to_string()),
        };
        let report = validate(&povm, tol);
        if !report.ok {
            return fail(
                PdStatus::ValidationError,
                &format!("not a measurement: {}", report.violations.join("; ")),
            );
        }
        *out = Box::into_raw(Box::new(PdPovm(povm)));
        PdStatus::Ok
    })
}

/// Serializes a measurement back to its JSON schema.
///
/// # Safety
/// `povm` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_povm_to_json(povm: *const PdPovm, out: *mut *mut c_char) -> PdStatus {
    guarded(|| {
        require_nonnull!(out);
        let p = match povm_arg(povm) {
            Ok(p) => p,
            Err(status) => return status,
        };
        export_string(to_json_string(&PovmJson::from_povm(p)), out)
    })
}

/// Releases a measurement handle.
///
/// # Safety
/// `povm` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pd_povm_free(povm: *mut PdPovm) {
    if !povm.is_null() {
        drop(Box::from_raw(povm));
    }
}

/// Hilbert space dimension of a measurement.
///
/// # Safety
/// `povm` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_povm_dim(povm: *const PdPovm, out: *mut usize) -> PdStatus {
    guarded(|| {
        require_nonnull!(out);
        match povm_arg(povm) {
            Ok(p) => {
                *out = p.dim();
                PdStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Number of outcomes of a measurement.
///
/// # Safety
/// `povm` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_povm_outcomes(povm: *const PdPovm, out: *mut usize) -> PdStatus {
    guarded(|| {
        require_nonnull!(out);
        match povm_arg(povm) {
            Ok(p) => {
                *out = p.len();
                PdStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Creates the symmetric four-outcome qubit measurement.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_povm_tetrahedral(out: *mut *mut PdPovm) -> PdStatus {
    guarded(|| {
        require_nonnull!(out);
        *out = Box::into_raw(Box::new(PdPovm(tetrahedral_povm())));
        PdStatus::Ok
    })
}

/// Draws a reproducible random measurement with `n` outcomes.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_povm_random(
    dim: usize,
    n: usize,
    seed: u64,
    out: *mut *mut PdPovm,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(out);
        if dim == 0 || n == 0 {
            return fail(
                PdStatus::InvalidArgument,
                "dimension and outcome count must be positive",
            );
        }
        *out = Box::into_raw(Box::new(PdPovm(random_povm(dim, n, seed))));
        PdStatus::Ok
    })
}

/// Writes the validation report for a measurement as JSON and its overall
/// flag to `out_ok`. `out_report_json` may be null when only the flag is
/// wanted.
///
/// # Safety
/// `povm` must be a live handle, `out_ok` a valid pointer, and
/// `out_report_json` null or valid.
#[no_mangle]
pub unsafe extern "C" fn pd_povm_validate(
    povm: *const PdPovm,
    tol: f64,
    out_ok: *mut bool,
    out_report_json: *mut *mut c_char,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(out_ok);
        let p = match povm_arg(povm) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let report = validate(p, tol);
        *out_ok = report.ok;
        if out_report_json.is_null() {
            return PdStatus::Ok;
        }
        export_string(to_json_string(&report), out_report_json)
    })
}

/// Rank of the affine map of a measurement.
///
/// # Safety
/// `povm` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pd_effective_dimension(
    povm: *const PdPovm,
    tol: f64,
    out: *mut usize,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(out);
        match povm_arg(povm) {
            Ok(p) => {
                *out = effective_dimension(p, tol);
                PdStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Outcome probabilities of a state under a measurement. `buf` must hold
/// exactly `pd_povm_outcomes` entries.
///
/// # Safety
/// Handles must be live; `buf` must point to `buf_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pd_probabilities(
    state: *const PdState,
    povm: *const PdPovm,
    buf: *mut f64,
    buf_len: usize,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(buf);
        let rho = match state_arg(state) {
            Ok(r) => r,
            Err(status) => return status,
        };
        let p = match povm_arg(povm) {
            Ok(p) => p,
            Err(status) => return status,
        };
        if buf_len != p.len() {
            return fail(
                PdStatus::BufferTooSmall,
                &format!("buffer holds {buf_len} entries, need {}", p.len()),
            );
        }
        match probabilities(rho, p) {
            Ok(point) => {
                std::ptr::copy_nonoverlapping(point.values().as_ptr(), buf, buf_len);
                PdStatus::Ok
            }
            Err(e) => fail(PdStatus::InvalidArgument, &e.to_string()),
        }
    })
}

fn point_from_raw(
    q: *const f64,
    len: usize,
    n_outcomes: usize,
) -> Result<ProbabilityPoint, PdStatus> {
    if len != n_outcomes {
        set_error(&format!("vector holds {len} entries, need {n_outcomes}"));
        return Err(PdStatus::BufferTooSmall);
    }
    let values = unsafe { std::slice::from_raw_parts(q, len) }.to_vec();
    ProbabilityPoint::new(values).map_err(|e| {
        set_error(&e.to_string());
        PdStatus::InvalidArgument
    })
}

/// Tests whether a probability vector is the image of a density matrix.
/// `out_witness` may be null; when non-null and the vector is inside, it
/// receives a new state handle.
///
/// # Safety
/// `q` must point to `len` readable doubles; `povm` must be live; `out`
/// must be valid; `out_witness` null or valid.
#[no_mangle]
pub unsafe extern "C" fn pd_membership(
    q: *const f64,
    len: usize,
    povm: *const PdPovm,
    tol: f64,
    out: *mut PdMembership,
    out_witness: *mut *mut PdState,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(q, out);
        let p = match povm_arg(povm) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let point = match point_from_raw(q, len, p.len()) {
            Ok(point) => point,
            Err(status) => return status,
        };
        let verdict = membership(&point, p, tol);
        *out = PdMembership {
            inside: verdict.inside,
            min_eigenvalue: verdict.min_eigenvalue,
            consistency_residual: verdict.consistency_residual,
            non_unique: verdict.non_unique,
        };
        if !out_witness.is_null() {
            *out_witness = match verdict.witness_state {
                Some(w) => Box::into_raw(Box::new(PdState(w))),
                None => std::ptr::null_mut(),
            };
        }
        PdStatus::Ok
    })
}

/// Linear inversion of a probability vector followed by projection onto
/// the physical set. Diagnostics describe the raw inversion.
///
/// # Safety
/// `q` must point to `len` readable doubles; `povm` must be live;
/// `out_state` and `out_info` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pd_tomography_estimate(
    q: *const f64,
    len: usize,
    povm: *const PdPovm,
    out_state: *mut *mut PdState,
    out_info: *mut PdInversionInfo,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(q, out_state, out_info);
        let p = match povm_arg(povm) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let point = match point_from_raw(q, len, p.len()) {
            Ok(point) => point,
            Err(status) => return status,
        };
        let (raw, diagnostics) = match linear_inversion(&point, p) {
            Ok(pair) => pair,
            Err(e) => return fail(PdStatus::NumericalError, &e.to_string()),
        };
        let min_eigenvalue_raw =
            match povm_domain::linalg::hermitian_eigen(&raw, povm_domain::DEFAULT_TOL) {
                Ok(eigen) => eigen.eigenvalues[0],
                Err(e) => return fail(PdStatus::NumericalError, &e.to_string()),
            };
        let repaired = match project_to_physical(&raw) {
            Ok(state) => state,
            Err(e) => return fail(PdStatus::NumericalError, &e.to_string()),
        };
        *out_info = PdInversionInfo {
            consistency_residual: diagnostics.consistency_residual,
            effective_dimension: diagnostics.effective_dimension,
            non_unique: diagnostics.non_unique,
            min_eigenvalue_raw,
        };
        *out_state = Box::into_raw(Box::new(PdState(repaired)));
        PdStatus::Ok
    })
}

/// Simulates `shots` measurements of a state. `counts` must hold exactly
/// `pd_povm_outcomes` entries.
///
/// # Safety
/// Handles must be live; `counts` must point to `len` writable u64.
#[no_mangle]
pub unsafe extern "C" fn pd_simulate_counts(
    state: *const PdState,
    povm: *const PdPovm,
    shots: u64,
    seed: u64,
    counts: *mut u64,
    len: usize,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(counts);
        let rho = match state_arg(state) {
            Ok(r) => r,
            Err(status) => return status,
        };
        let p = match povm_arg(povm) {
            Ok(p) => p,
            Err(status) => return status,
        };
        if len != p.len() {
            return fail(
                PdStatus::BufferTooSmall,
                &format!("buffer holds {len} entries, need {}", p.len()),
            );
        }
        match simulate_counts(rho, p, shots, seed) {
            Ok(record) => {
                std::ptr::copy_nonoverlapping(record.counts().as_ptr(), counts, len);
                PdStatus::Ok
            }
            Err(e) => fail(PdStatus::InvalidArgument, &e.to_string()),
        }
    })
}

/// Classifies a count record against the physical domain. On a feasible or
/// marginal verdict, `out_estimate` (when non-null) receives a state
/// handle; on a marginal verdict, `out_boundary` (when non-null, length
/// `len`) receives the in-domain point found inside the error box.
///
/// # Safety
/// `counts` must point to `len` readable u64; `povm` must be live;
/// `out_verdict` must be valid; `out_estimate` and `out_boundary` null or
/// valid.
#[no_mangle]
pub unsafe extern "C" fn pd_classify(
    counts: *const u64,
    len: usize,
    povm: *const PdPovm,
    k: f64,
    budget: usize,
    seed: u64,
    tol: f64,
    out_verdict: *mut PdVerdict,
    out_estimate: *mut *mut PdState,
    out_boundary: *mut f64,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(counts, out_verdict);
        let p = match povm_arg(povm) {
            Ok(p) => p,
            Err(status) => return status,
        };
        if len != p.len() {
            return fail(
                PdStatus::BufferTooSmall,
                &format!("count vector holds {len} entries, need {}", p.len()),
            );
        }
        let values = std::slice::from_raw_parts(counts, len).to_vec();
        let record = match CountRecord::new(values) {
            Ok(r) => r,
            Err(e) => return fail(PdStatus::InvalidArgument, &e.to_string()),
        };
        let verdict = match classify(&record, p, k, budget, seed, tol) {
            Ok(v) => v,
            Err(e) => return fail(PdStatus::InvalidArgument, &e.to_string()),
        };
        if !out_estimate.is_null() {
            *out_estimate = std::ptr::null_mut();
        }
        match verdict {
            FeasibilityVerdict::Feasible { estimate } => {
                *out_verdict = PdVerdict::Feasible;
                if !out_estimate.is_null() {
                    *out_estimate = Box::into_raw(Box::new(PdState(estimate)));
                }
            }
            FeasibilityVerdict::Marginal {
                boundary_point,
                estimate,
            } => {
                *out_verdict = PdVerdict::Marginal;
                if !out_estimate.is_null() {
                    *out_estimate = Box::into_raw(Box::new(PdState(estimate)));
                }
                if !out_boundary.is_null() {
                    std::ptr::copy_nonoverlapping(
                        boundary_point.values().as_ptr(),
                        out_boundary,
                        len,
                    );
                }
            }
            FeasibilityVerdict::Insufficient => {
                *out_verdict = PdVerdict::Insufficient;
            }
        }
        PdStatus::Ok
    })
}

/// Maps a four-outcome probability vector to the tetrahedron coordinates
/// `(x, y, z)`. `out_xyz` must hold three doubles.
///
/// # Safety
/// `q` must point to `len` readable doubles; `out_xyz` to three writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn pd_tetrahedron_coordinates(
    q: *const f64,
    len: usize,
    out_xyz: *mut f64,
) -> PdStatus {
    guarded(|| {
        require_nonnull!(q, out_xyz);
        let point = match point_from_raw(q, len, 4) {
            Ok(point) => point,
            Err(status) => return status,
        };
        match tetrahedron_coordinates(&point) {
            Ok((x, y, z)) => {
                let xyz = [x, y, z];
                std::ptr::copy_nonoverlapping(xyz.as_ptr(), out_xyz, 3);
                PdStatus::Ok
            }
            Err(e) => fail(PdStatus::InvalidArgument, &e.to_string()),
        }
    })
}
