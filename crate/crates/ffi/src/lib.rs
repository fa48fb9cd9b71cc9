//! C ABI over the two-species coarsening toolkit.
//!
//! Every object crosses the boundary as an opaque handle created by a
//! `*_new`/`*_solve` call and released by the matching `*_free`. Fallible
//! calls return a [`TsStatus`]; on any non-OK status a human-readable
//! message is available from [`ts_last_error_message`] until the next
//! failure on the same thread. The generated header lives at
//! `include/twospecies.h`.

use std::cell::RefCell;
use std::os::raw::c_char;
use twospecies::error::Error;
use twospecies::kinetic::KineticSolution;
use twospecies::measures::{ks_distance, GridDensity};
use twospecies::pdmp::ParticleState;
use twospecies::scheme::{scheme_init, scheme_step, SchemeState};
use twospecies::InitialCondition;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    /// An argument lies outside the mathematical domain of the operation.
    Domain = 1,
    /// Structurally inconsistent inputs (mismatched grids, bad parameters).
    Config = 2,
    /// Degenerate input (zero species-2 mass, kernel mass at the origin).
    Degenerate = 3,
    /// The discretization cannot step without exhausting species 2.
    HorizonExhausted = 4,
    /// Evaluation requested at or beyond the solution horizon.
    OutOfHorizon = 5,
    Io = 6,
    NullArgument = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> TsStatus {
    match err {
        Error::Domain(_) => TsStatus::Domain,
        Error::Config(_) => TsStatus::Config,
        Error::Degenerate(_) => TsStatus::Degenerate,
        Error::HorizonExhausted { .. } => TsStatus::HorizonExhausted,
        Error::OutOfHorizon { .. } => TsStatus::OutOfHorizon,
        Error::Io { .. } => TsStatus::Io,
    }
}

fn fail(err: Error) -> TsStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null_arg(what: &str) -> TsStatus {
    set_error(format!("null argument: {what}"));
    TsStatus::NullArgument
}

/// Copies the message of the most recent failure on this thread into `buf`
/// (NUL-terminated, truncated to `cap`). Returns the untruncated length.
///
/// # Safety
/// `buf` must point to at least `cap` writable bytes, or be null (in which
/// case only the length is returned).
#[no_mangle]
pub unsafe extern "C" fn ts_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Opaque handle over a nonnegative density sampled on a uniform grid.
pub struct TsGridDensity(GridDensity);

/// Opaque handle over a solved kinetic system.
pub struct TsKineticSolution(KineticSolution);

/// Opaque handle over the deterministic bin-discretization state.
pub struct TsScheme(SchemeState);

/// Opaque handle over an event-driven particle system.
pub struct TsPdmp(ParticleState);

/// Builds a grid density from `len` node values spaced `step` apart.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be a valid
/// destination pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_grid_new(
    step: f64,
    values: *const f64,
    len: usize,
    out: *mut *mut TsGridDensity,
) -> TsStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if values.is_null() {
        return null_arg("values");
    }
    let vals = std::slice::from_raw_parts(values, len).to_vec();
    match GridDensity::new(step, vals) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(TsGridDensity(g)));
            TsStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `g` must be a handle from [`ts_grid_new`] not yet freed, or null.
#[no_mangle]
pub unsafe extern "C" fn ts_grid_free(g: *mut TsGridDensity) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Total mass (trapezoid integral); NaN on a null handle.
///
/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ts_grid_mass(g: *const TsGridDensity) -> f64 {
    match g.as_ref() {
        Some(g) => g.0.mass(),
        None => f64::NAN,
    }
}

/// Cumulative `F(x)`.
///
/// # Safety
/// `g` must be a live handle; `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn ts_grid_cumulative(
    g: *const TsGridDensity,
    x: f64,
    out: *mut f64,
) -> TsStatus {
    let (Some(g), Some(out)) = (g.as_ref(), out.as_mut()) else {
        return null_arg("grid or out");
    };
    match twospecies::measures::cumulative_eval(&g.0, x) {
        Ok(v) => {
            *out = v;
            TsStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Quantile `inf{x : F(x) >= q}`.
///
/// # Safety
/// `g` must be a live handle; `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn ts_grid_quantile(
    g: *const TsGridDensity,
    q: f64,
    out: *mut f64,
) -> TsStatus {
    let (Some(g), Some(out)) = (g.as_ref(), out.as_mut()) else {
        return null_arg("grid or out");
    };
    match twospecies::measures::quantile(&g.0, q) {
        Ok(v) => {
            *out = v;
            TsStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Kolmogorov-Smirnov distance between two grid densities.
///
/// # Safety
/// `a` and `b` must be live handles; `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn ts_ks_distance_grid(
    a: *const TsGridDensity,
    b: *const TsGridDensity,
    out: *mut f64,
) -> TsStatus {
    let (Some(a), Some(b), Some(out)) = (a.as_ref(), b.as_ref(), out.as_mut()) else {
        return null_arg("grid or out");
    };
    *out = ks_distance(&a.0, &b.0);
    TsStatus::Ok
}

/// Solves the kinetic equations on `[0, t_max]` with series tolerance `tol`.
/// Pass a negative `n2_floor` for the default `1e-3 * N2(0)`.
///
/// # Safety
/// `f1` and `f2` must be live grid handles; `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn ts_solution_solve(
    f1: *const TsGridDensity,
    f2: *const TsGridDensity,
    t_max: f64,
    tol: f64,
    n2_floor: f64,
    out: *mut *mut TsKineticSolution,
) -> TsStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let (Some(f1), Some(f2)) = (f1.as_ref(), f2.as_ref()) else {
        return null_arg("f1 or f2");
    };
    let floor = if n2_floor < 0.0 { None } else { Some(n2_floor) };
    match KineticSolution::solve(&f1.0, &f2.0, t_max, tol, floor) {
        Ok(sol) => {
            *out = Box::into_raw(Box::new(TsKineticSolution(sol)));
            TsStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `s` must be a handle from [`ts_solution_solve`] not yet freed, or null.
#[no_mangle]
pub unsafe extern "C" fn ts_solution_free(s: *mut TsKineticSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Removal rate `a(t)` by linear interpolation on the stored grid.
///
/// # Safety
/// `s` must be a live handle; `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn ts_solution_removal_rate_at(
    s: *const TsKineticSolution,
    t: f64,
    out: *mut f64,
) -> TsStatus {
    let (Some(s), Some(out)) = (s.as_ref(), out.as_mut()) else {
        return null_arg("solution or out");
    };
    if !t.is_finite() || t < 0.0 || t >= s.0.horizon() {
        return fail(Error::OutOfHorizon {
            t,
            horizon: s.0.horizon(),
        });
    }
    *out = s.0.removal_rate().eval(t);
    TsStatus::Ok
}

/// `N2(t) = N2(0) - L(t)`.
///
/// # Safety
/// `s` must be a live handle; `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn ts_solution_n2_at(
    s: *const TsKineticSolution,
    t: f64,
    out: *mut f64,
) -> TsStatus {
    let (Some(s), Some(out)) = (s.as_ref(), out.as_mut()) else {
        return null_arg("solution or out");
    };
    if !t.is_finite() || t < 0.0 || t >= s.0.horizon() {
        return fail(Error::OutOfHorizon {
            t,
            horizon: s.0.horizon(),
        });
    }
    *out = s.0.n2_at(t);
    TsStatus::Ok
}

/// Largest time at which the evaluators remain valid; NaN on null.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ts_solution_horizon(s: *const TsKineticSolution) -> f64 {
    match s.as_ref() {
        Some(s) => s.0.horizon(),
        None => f64::NAN,
    }
}

/// First time `N2` reaches `floor` (end of grid if never); NaN on null.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ts_solution_blowup_time(s: *const TsKineticSolution, floor: f64) -> f64 {
    match s.as_ref() {
        Some(s) => s.0.blowup_time(floor),
        None => f64::NAN,
    }
}

/// Max-norm residual of the renewal equation, the solver's independent
/// consistency check; NaN on null.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ts_solution_renewal_residual(s: *const TsKineticSolution) -> f64 {
    match s.as_ref() {
        Some(s) => s.0.renewal_residual(),
        None => f64::NAN,
    }
}

/// Initializes the bin discretization with width `delta` from a normalized
/// density pair.
///
/// # Safety
/// `f1` and `f2` must be live grid handles; `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn ts_scheme_new(
    f1: *const TsGridDensity,
    f2: *const TsGridDensity,
    delta: f64,
    out: *mut *mut TsScheme,
) -> TsStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let (Some(f1), Some(f2)) = (f1.as_ref(), f2.as_ref()) else {
        return null_arg("f1 or f2");
    };
    let ic = match InitialCondition::new(f1.0.clone(), f2.0.clone()) {
        Ok(ic) => ic,
        Err(e) => return fail(e),
    };
    match scheme_init(&ic, delta) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(TsScheme(s)));
            TsStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `s` must be a handle from [`ts_scheme_new`] not yet freed, or null.
#[no_mangle]
pub unsafe extern "C" fn ts_scheme_free(s: *mut TsScheme) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Advances the discretization by one time step of size `delta`.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ts_scheme_step(s: *mut TsScheme) -> TsStatus {
    let Some(s) = s.as_mut() else {
        return null_arg("scheme");
    };
    match scheme_step(&s.0) {
        Ok(next) => {
            s.0 = next;
            TsStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Step index `k` (the state covers times in `[k*delta, (k+1)*delta)`).
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ts_scheme_step_index(s: *const TsScheme) -> usize {
    match s.as_ref() {
        Some(s) => s.0.step_index(),
        None => usize::MAX,
    }
}

/// Species-2 total at the current step; NaN on null.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ts_scheme_n2(s: *const TsScheme) -> f64 {
    match s.as_ref() {
        Some(s) => s.0.n2(),
        None => f64::NAN,
    }
}

/// Copies the bin masses of species 1 (`species = 1`) or species 2 into
/// `buf`, writing at most `cap` values; `written` receives the bin count.
///
/// # Safety
/// `buf` must point to `cap` writable doubles; `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ts_scheme_bin_masses(
    s: *const TsScheme,
    species: u32,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> TsStatus {
    let (Some(s), Some(written)) = (s.as_ref(), written.as_mut()) else {
        return null_arg("scheme or written");
    };
    let masses = match species {
        1 => s.0.mu1().masses(),
        2 => s.0.mu2().masses(),
        _ => {
            return fail(Error::Domain(format!(
                "species must be 1 or 2, got {species}"
            )))
        }
    };
    *written = masses.len();
    if !buf.is_null() {
        let n = masses.len().min(cap);
        std::ptr::copy_nonoverlapping(masses.as_ptr(), buf, n);
    }
    TsStatus::Ok
}

/// Builds an n-particle system by deterministic quantile placement with the
/// ChaCha stream `(master_seed, stream)`.
///
/// # Safety
/// `f1` and `f2` must be live grid handles; `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn ts_pdmp_new(
    f1: *const TsGridDensity,
    f2: *const TsGridDensity,
    n: usize,
    master_seed: u64,
    stream: u64,
    out: *mut *mut TsPdmp,
) -> TsStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let (Some(f1), Some(f2)) = (f1.as_ref(), f2.as_ref()) else {
        return null_arg("f1 or f2");
    };
    let ic = match InitialCondition::new(f1.0.clone(), f2.0.clone()) {
        Ok(ic) => ic,
        Err(e) => return fail(e),
    };
    match ParticleState::init(&ic, n, master_seed, stream) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(TsPdmp(s)));
            TsStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `p` must be a handle from [`ts_pdmp_new`] not yet freed, or null.
#[no_mangle]
pub unsafe extern "C" fn ts_pdmp_free(p: *mut TsPdmp) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Applies every event with time `<= t`.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ts_pdmp_advance_to(p: *mut TsPdmp, t: f64) -> TsStatus {
    let Some(p) = p.as_mut() else {
        return null_arg("pdmp");
    };
    p.0.advance_to(t);
    TsStatus::Ok
}

/// Elapsed time; NaN on null.
///
/// # Safety
/// `p` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ts_pdmp_time(p: *const TsPdmp) -> f64 {
    match p.as_ref() {
        Some(p) => p.0.time(),
        None => f64::NAN,
    }
}

/// Number of removals so far.
///
/// # Safety
/// `p` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ts_pdmp_removal_count(p: *const TsPdmp) -> usize {
    match p.as_ref() {
        Some(p) => p.0.removal_count(),
        None => usize::MAX,
    }
}

/// Species counts.
///
/// # Safety
/// `p` must be a live handle; `s1` and `s2` valid destinations.
#[no_mangle]
pub unsafe extern "C" fn ts_pdmp_counts(
    p: *const TsPdmp,
    s1: *mut usize,
    s2: *mut usize,
) -> TsStatus {
    let (Some(p), Some(s1), Some(s2)) = (p.as_ref(), s1.as_mut(), s2.as_mut()) else {
        return null_arg("pdmp or counts");
    };
    *s1 = p.0.s1_len();
    *s2 = p.0.s2_len();
    TsStatus::Ok
}

/// Whether the process has reached its cemetery state.
///
/// # Safety
/// `p` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ts_pdmp_is_cemetery(p: *const TsPdmp) -> bool {
    p.as_ref().is_some_and(|p| p.0.is_cemetery())
}

/// Normalized loss `L^n(t)` for `t` at or before the current time.
///
/// # Safety
/// `p` must be a live handle; `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn ts_pdmp_loss_at(p: *const TsPdmp, t: f64, out: *mut f64) -> TsStatus {
    let (Some(p), Some(out)) = (p.as_ref(), out.as_mut()) else {
        return null_arg("pdmp or out");
    };
    match p.0.loss_count(t) {
        Ok(v) => {
            *out = v;
            TsStatus::Ok
        }
        Err(e) => fail(e),
    }
}
