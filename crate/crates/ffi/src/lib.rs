//! C ABI for the alpha-concurrence library.
//!
//! Conventions: every fallible call returns an [`AconcStatus`]; results come
//! back through out-pointers. States are opaque handles created by the
//! `aconc_state_*` constructors and released with [`aconc_state_free`]. The
//! header is generated into `include/aconc.h` at build time.
//!
//! A human-readable description of the most recent failure on the calling
//! thread is available through [`aconc_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use aconc::convex_roof::{roof_upper_bound, RoofConfig};
use aconc::error::Error;
use aconc::measures::{self, Alpha};
use aconc::states::{self, State};
use aconc::Complex64;

/// Status of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AconcStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// File could not be read or written.
    Io = 3,
    /// File is not valid JSON or does not match the state schema.
    Parse = 4,
    /// A parameter was outside its domain (dimensions, alpha, weights...).
    Domain = 5,
    /// A state or ensemble invariant failed to hold.
    Invariant = 6,
    /// Invalid optimizer configuration.
    Config = 7,
    /// The operation is not defined for this kind of state.
    WrongKind = 8,
    /// The roof search hit its iteration cap before converging; the
    /// reported value is still a valid upper bound.
    NoConvergence = 9,
    /// An unexpected internal failure.
    Internal = 10,
}

/// Which side of a [`AconcBoundReport`] attained the maximum norm.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AconcBoundBranch {
    Ppt = 0,
    Realignment = 1,
    Both = 2,
}

/// Lower-bound report for a mixed state.
#[repr(C)]
pub struct AconcBoundReport {
    pub ppt_norm: f64,
    pub realign_norm: f64,
    pub lower_bound: f64,
    pub branch: AconcBoundBranch,
}

/// Options for the decomposition search. Zero `ensemble_size` means the
/// built-in default of min(rank^2, rank + 4).
#[repr(C)]
pub struct AconcRoofOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub ensemble_size: usize,
    pub seed: u64,
}

impl Default for AconcRoofOptions {
    fn default() -> Self {
        let d = RoofConfig::default();
        Self {
            restarts: d.restarts,
            max_iters: d.max_iters,
            ensemble_size: 0,
            seed: d.seed,
        }
    }
}

/// Opaque handle over a pure or mixed state.
pub struct AconcState {
    inner: State,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> AconcStatus {
    match err {
        Error::Io(_) => AconcStatus::Io,
        Error::Parse(_) | Error::Schema(_) => AconcStatus::Parse,
        Error::Domain(_) => AconcStatus::Domain,
        Error::Config(_) => AconcStatus::Config,
        Error::InvariantViolation(_)
        | Error::NonSquare { .. }
        | Error::NotHermitian { .. }
        | Error::NotPsd { .. }
        | Error::RankTolTooAggressive { .. }
        | Error::NotIsometry { .. } => AconcStatus::Invariant,
    }
}

fn fail(err: &Error) -> AconcStatus {
    set_last_error(&err.to_string());
    status_of(err)
}

/// Runs a closure, catching panics so they never unwind across the ABI.
fn guarded(f: impl FnOnce() -> AconcStatus) -> AconcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            AconcStatus::Internal
        }
    }
}

unsafe fn path_from(ptr: *const c_char) -> Result<&'static Path, AconcStatus> {
    if ptr.is_null() {
        set_last_error("null path");
        return Err(AconcStatus::NullArgument);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => {
            set_last_error("path is not valid UTF-8");
            Err(AconcStatus::InvalidUtf8)
        }
    }
}

fn boxed(state: State, out: *mut *mut AconcState) -> AconcStatus {
    if out.is_null() {
        set_last_error("null output handle");
        return AconcStatus::NullArgument;
    }
    let handle = Box::new(AconcState { inner: state });
    unsafe { *out = Box::into_raw(handle) };
    AconcStatus::Ok
}

macro_rules! try_ffi {
    ($expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return fail(&e),
        }
    };
}

/// Copies the last error message on this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the untruncated length without the NUL.
#[no_mangle]
pub unsafe extern "C" fn aconc_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn aconc_status_name(status: AconcStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        AconcStatus::Ok => b"ok\0",
        AconcStatus::NullArgument => b"null argument\0",
        AconcStatus::InvalidUtf8 => b"invalid utf-8\0",
        AconcStatus::Io => b"i/o error\0",
        AconcStatus::Parse => b"parse or schema error\0",
        AconcStatus::Domain => b"domain error\0",
        AconcStatus::Invariant => b"invariant violation\0",
        AconcStatus::Config => b"invalid configuration\0",
        AconcStatus::WrongKind => b"wrong state kind\0",
        AconcStatus::NoConvergence => b"no convergence\0",
        AconcStatus::Internal => b"internal error\0",
    };
    name.as_ptr() as *const c_char
}

/// Loads a state file (the JSON schema of the library) into a new handle.
#[no_mangle]
pub unsafe extern "C" fn aconc_state_load(
    path: *const c_char,
    out: *mut *mut AconcState,
) -> AconcStatus {
    guarded(|| {
        let path = match path_from(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let state = try_ffi!(states::load_state(path));
        boxed(state, out)
    })
}

/// Saves the state behind `handle` to `path`.
#[no_mangle]
pub unsafe extern "C" fn aconc_state_save(
    handle: *const AconcState,
    path: *const c_char,
) -> AconcStatus {
    guarded(|| {
        let Some(state) = handle.as_ref() else {
            set_last_error("null handle");
            return AconcStatus::NullArgument;
        };
        let path = match path_from(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        try_ffi!(states::save_state(&state.inner, path));
        AconcStatus::Ok
    })
}

/// Builds a pure state from `len` interleaved `(re, im)` pairs, row-major
/// over the product basis. The amplitudes must already be normalized.
#[no_mangle]
pub unsafe extern "C" fn aconc_state_pure_new(
    dim_a: usize,
    dim_b: usize,
    re_im: *const f64,
    len: usize,
    out: *mut *mut AconcState,
) -> AconcStatus {
    guarded(|| {
        if re_im.is_null() {
            set_last_error("null amplitude buffer");
            return AconcStatus::NullArgument;
        }
        let data = std::slice::from_raw_parts(re_im, 2 * len);
        let amps: Vec<Complex64> = (0..len)
            .map(|i| Complex64::new(data[2 * i], data[2 * i + 1]))
            .collect();
        let psi = try_ffi!(states::PureState::new(dim_a, dim_b, amps));
        boxed(State::Pure(psi), out)
    })
}

/// Isotropic state of fidelity `f` on d x d.
#[no_mangle]
pub unsafe extern "C" fn aconc_state_isotropic(
    d: usize,
    f: f64,
    out: *mut *mut AconcState,
) -> AconcStatus {
    guarded(|| {
        let rho = try_ffi!(states::isotropic(d, f));
        boxed(State::Mixed(rho), out)
    })
}

/// Werner state of antisymmetric weight `w` on d x d.
#[no_mangle]
pub unsafe extern "C" fn aconc_state_werner(
    d: usize,
    w: f64,
    out: *mut *mut AconcState,
) -> AconcStatus {
    guarded(|| {
        let rho = try_ffi!(states::werner(d, w));
        boxed(State::Mixed(rho), out)
    })
}

/// Maximally entangled state on d x d.
#[no_mangle]
pub unsafe extern "C" fn aconc_state_max_entangled(
    d: usize,
    out: *mut *mut AconcState,
) -> AconcStatus {
    guarded(|| {
        if d < 2 {
            set_last_error("max_entangled requires d >= 2");
            return AconcStatus::Domain;
        }
        boxed(State::Pure(states::max_entangled(d)), out)
    })
}

/// Haar-random pure state, deterministic for a fixed seed.
#[no_mangle]
pub unsafe extern "C" fn aconc_state_random_pure(
    dim_a: usize,
    dim_b: usize,
    seed: u64,
    out: *mut *mut AconcState,
) -> AconcStatus {
    guarded(|| {
        if dim_a == 0 || dim_b == 0 {
            set_last_error("dimensions must be positive");
            return AconcStatus::Domain;
        }
        boxed(State::Pure(states::random_pure(dim_a, dim_b, seed)), out)
    })
}

/// Releases a handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn aconc_state_free(handle: *mut AconcState) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// 0 for pure states, 1 for mixed states.
#[no_mangle]
pub unsafe extern "C" fn aconc_state_kind(
    handle: *const AconcState,
    out: *mut i32,
) -> AconcStatus {
    guarded(|| {
        let (Some(state), false) = (handle.as_ref(), out.is_null()) else {
            set_last_error("null argument");
            return AconcStatus::NullArgument;
        };
        *out = match state.inner {
            State::Pure(_) => 0,
            State::Mixed(_) => 1,
        };
        AconcStatus::Ok
    })
}

/// Local dimensions of the state.
#[no_mangle]
pub unsafe extern "C" fn aconc_state_dims(
    handle: *const AconcState,
    dim_a: *mut usize,
    dim_b: *mut usize,
) -> AconcStatus {
    guarded(|| {
        let (Some(state), false) = (handle.as_ref(), dim_a.is_null() || dim_b.is_null()) else {
            set_last_error("null argument");
            return AconcStatus::NullArgument;
        };
        let (da, db) = state.inner.dims();
        *dim_a = da;
        *dim_b = db;
        AconcStatus::Ok
    })
}

/// Exact alpha-concurrence of a pure state.
#[no_mangle]
pub unsafe extern "C" fn aconc_alpha_concurrence_pure(
    handle: *const AconcState,
    alpha: f64,
    out: *mut f64,
) -> AconcStatus {
    guarded(|| {
        let (Some(state), false) = (handle.as_ref(), out.is_null()) else {
            set_last_error("null argument");
            return AconcStatus::NullArgument;
        };
        let State::Pure(psi) = &state.inner else {
            set_last_error("alpha_concurrence_pure needs a pure state");
            return AconcStatus::WrongKind;
        };
        let alpha = try_ffi!(Alpha::new(alpha));
        *out = try_ffi!(measures::alpha_concurrence_pure(psi, alpha));
        AconcStatus::Ok
    })
}

/// Squared Schmidt coefficients of a pure state, written into `buf`
/// (capacity `cap`); `written` receives the rank.
#[no_mangle]
pub unsafe extern "C" fn aconc_schmidt(
    handle: *const AconcState,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> AconcStatus {
    guarded(|| {
        let (Some(state), false) = (handle.as_ref(), buf.is_null() || written.is_null()) else {
            set_last_error("null argument");
            return AconcStatus::NullArgument;
        };
        let State::Pure(psi) = &state.inner else {
            set_last_error("schmidt needs a pure state");
            return AconcStatus::WrongKind;
        };
        let lambda = try_ffi!(states::schmidt(psi, None));
        if lambda.rank() > cap {
            set_last_error("buffer too small for the Schmidt rank");
            return AconcStatus::Config;
        }
        for (i, &l) in lambda.lambdas().iter().enumerate() {
            *buf.add(i) = l;
        }
        *written = lambda.rank();
        AconcStatus::Ok
    })
}

/// PPT/realignment lower bound on the alpha-concurrence of the state
/// (pure states are bounded through their projector).
#[no_mangle]
pub unsafe extern "C" fn aconc_lower_bound(
    handle: *const AconcState,
    alpha: f64,
    out: *mut AconcBoundReport,
) -> AconcStatus {
    guarded(|| {
        let (Some(state), false) = (handle.as_ref(), out.is_null()) else {
            set_last_error("null argument");
            return AconcStatus::NullArgument;
        };
        let alpha = try_ffi!(Alpha::new(alpha));
        let rho = state.inner.to_density();
        let report = try_ffi!(measures::lower_bound_alpha(&rho, alpha));
        *out = AconcBoundReport {
            ppt_norm: report.ppt_norm,
            realign_norm: report.realign_norm,
            lower_bound: report.lower_bound,
            branch: match report.branch {
                measures::BoundBranch::Ppt => AconcBoundBranch::Ppt,
                measures::BoundBranch::Realignment => AconcBoundBranch::Realignment,
                measures::BoundBranch::Both => AconcBoundBranch::Both,
            },
        };
        AconcStatus::Ok
    })
}

/// Default options for [`aconc_roof_upper_bound`].
#[no_mangle]
pub extern "C" fn aconc_roof_options_default() -> AconcRoofOptions {
    AconcRoofOptions::default()
}

/// Upper bound on the alpha-concurrence by the decomposition search.
/// Returns `NoConvergence` (with a valid `out`) when the search hit
/// `max_iters` without stabilizing.
#[no_mangle]
pub unsafe extern "C" fn aconc_roof_upper_bound(
    handle: *const AconcState,
    alpha: f64,
    options: AconcRoofOptions,
    out: *mut f64,
) -> AconcStatus {
    guarded(|| {
        let (Some(state), false) = (handle.as_ref(), out.is_null()) else {
            set_last_error("null argument");
            return AconcStatus::NullArgument;
        };
        let alpha = try_ffi!(Alpha::new(alpha));
        let rho = state.inner.to_density();
        let config = RoofConfig {
            ensemble_size: (options.ensemble_size > 0).then_some(options.ensemble_size),
            restarts: options.restarts,
            max_iters: options.max_iters,
            seed: options.seed,
            ..Default::default()
        };
        let result = try_ffi!(roof_upper_bound(&rho, alpha, &config));
        *out = result.value;
        if result.converged {
            AconcStatus::Ok
        } else {
            set_last_error("roof search hit max_iters before converging");
            AconcStatus::NoConvergence
        }
    })
}

macro_rules! scalar_fn {
    ($(#[$doc:meta])* $name:ident, |$($arg:ident : $ty:ty),*| $body:expr) => {
        $(#[$doc])*
        #[no_mangle]
        pub unsafe extern "C" fn $name($($arg: $ty,)* out: *mut f64) -> AconcStatus {
            guarded(|| {
                if out.is_null() {
                    set_last_error("null output");
                    return AconcStatus::NullArgument;
                }
                *out = try_ffi!($body);
                AconcStatus::Ok
            })
        }
    };
}

scalar_fn!(
    /// Exact isotropic alpha-concurrence.
    aconc_isotropic_alpha,
    |d: usize, f: f64, alpha: f64| Alpha::new(alpha).and_then(|a| measures::isotropic_alpha(d, f, a))
);
scalar_fn!(
    /// Exact Werner alpha-concurrence.
    aconc_werner_alpha,
    |w: f64, alpha: f64| Alpha::new(alpha).and_then(|a| measures::werner_alpha(w, a))
);
scalar_fn!(
    /// Isotropic concurrence.
    aconc_isotropic_concurrence,
    |d: usize, f: f64| measures::isotropic_concurrence(d, f)
);
scalar_fn!(
    /// Werner concurrence.
    aconc_werner_concurrence,
    |w: f64| measures::werner_concurrence(w)
);
scalar_fn!(
    /// Werner entanglement of formation.
    aconc_werner_eof,
    |w: f64| measures::werner_eof(w)
);
scalar_fn!(
    /// Two-level-ansatz closed form for isotropic states.
    aconc_eta_isotropic_closed,
    |d: usize, f: f64, alpha: f64| Alpha::new(alpha).and_then(|a| aconc::eta::eta_isotropic_closed(d, f, a))
);
scalar_fn!(
    /// Two-level-ansatz closed form for Werner states.
    aconc_eta_werner_closed,
    |w: f64, alpha: f64| Alpha::new(alpha).and_then(|a| aconc::eta::eta_werner_closed(w, a))
);

/// Dimension where the 1/2-concurrence overtakes the concurrence on
/// isotropic states.
#[no_mangle]
pub extern "C" fn aconc_crossover_dimension() -> f64 {
    measures::concurrence_crossover_dimension()
}
