//! C ABI over `pu-core`.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `*_free`. Every entry point returns a [`PuStatus`]; on failure
//! the message is kept per thread and read back with
//! [`pu_last_error_message`]. Matrices are 4x4, row-major, 16 doubles.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pu_core::dynamics::{
    integrate, mode_decompose, mode_energy, threshold_search, IntegratorSettings, ScanOptions, Trajectory,
};
use pu_core::model::{
    free_vector_field, h1, h2, interacting_vector_field, j1, j2, jet_to_ostro, ostro_to_jet, Chart, JetState,
    OstroState, Potential, PuParams,
};
use pu_core::symmetry::{commutant_basis, invariant_tensor_space, sample_points};
use pu_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PuStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Degenerate = 3,
    Singular = 4,
    NoSolution = 5,
    Numerical = 6,
    AllBounded = 7,
    AllUnbounded = 8,
    BufferTooSmall = 9,
    Panic = 10,
    Internal = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PuMatrix {
    /// Hessian of the canonical energy `H1`.
    H1 = 0,
    /// Hessian of the second conserved quadratic `H2`.
    H2 = 1,
    /// Canonical Poisson tensor in the jet chart.
    J1 = 2,
    J2 = 3,
    /// Linear free flow `z' = A z`.
    Flow = 4,
}

/// Opaque frequency pair.
pub struct PuModel(PuParams);

/// Opaque sampled trajectory.
pub struct PuTrajectory(Trajectory);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PuTrajectorySummary {
    pub samples: usize,
    pub escaped: bool,
    /// NaN unless `escaped`.
    pub escape_time: f64,
    pub max_norm: f64,
    pub h1_drift: f64,
    pub h2_drift: f64,
    pub hint_drift: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PuThreshold {
    pub lambda_star: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub non_monotone: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Fail(PuStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::DegenerateFrequencies { .. } | Error::DegenerateModel(_) | Error::InsufficientSamples { .. } => {
                PuStatus::Degenerate
            }
            Error::SingularBlend { .. }
            | Error::SingularHessian { .. }
            | Error::SingularMap { .. }
            | Error::SingularCoefficient { .. } => PuStatus::Singular,
            Error::NoSolution(_) | Error::NonUnique { .. } | Error::NotInSpan { .. } | Error::ComplexBranch { .. } => {
                PuStatus::NoSolution
            }
            Error::StepUnderflow { .. } | Error::StepLimit { .. } => PuStatus::Numerical,
            Error::AllBounded { .. } => PuStatus::AllBounded,
            Error::AllUnbounded { .. } => PuStatus::AllUnbounded,
            Error::InvalidArgument(_) | Error::PreconditionViolated(_) | Error::ChartMismatch { .. } => {
                PuStatus::InvalidArgument
            }
            _ => PuStatus::Internal,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PuStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PuStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PuStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            PuStatus::Panic
        }
    }
}

unsafe fn model<'a>(m: *const PuModel) -> Result<&'a PuParams, Fail> {
    unsafe { m.as_ref() }.map(|m| &m.0).ok_or_else(|| null("model"))
}

unsafe fn read4(p: *const f64, what: &str) -> Result<[f64; 4], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    let mut out = [0.0; 4];
    unsafe { ptr::copy_nonoverlapping(p, out.as_mut_ptr(), 4) };
    Ok(out)
}

unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    unsafe { p.write(v) };
    Ok(())
}

unsafe fn write_slice(p: *mut f64, v: &[f64], what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    unsafe { ptr::copy_nonoverlapping(v.as_ptr(), p, v.len()) };
    Ok(())
}

fn settings(t_end: f64, tol: f64) -> Result<IntegratorSettings, Fail> {
    let s = IntegratorSettings {
        t_end,
        tol,
        ..Default::default()
    };
    s.validate()?;
    Ok(s)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pu_version() -> *const c_char {
    const V: &str = concat!("pu-ffi ", env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn pu_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = e.len().min(len - 1);
            unsafe {
                ptr::copy_nonoverlapping(e.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        e.len()
    })
}

/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn pu_model_new(omega1: f64, omega2: f64, out: *mut *mut PuModel) -> PuStatus {
    guard(|| {
        let p = PuParams::new(omega1, omega2)?;
        unsafe { write(out, Box::into_raw(Box::new(PuModel(p))), "out") }
    })
}

/// # Safety
/// `m` must be null or a handle from [`pu_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pu_model_free(m: *mut PuModel) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// `alpha = w1^2 + w2^2`, `beta = w1^2 w2^2`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pu_model_coefficients(m: *const PuModel, alpha: *mut f64, beta: *mut f64) -> PuStatus {
    guard(|| {
        let p = unsafe { model(m) }?;
        unsafe {
            write(alpha, p.alpha(), "alpha")?;
            write(beta, p.beta(), "beta")
        }
    })
}

/// Writes the requested jet-chart matrix to `out[16]`.
///
/// # Safety
/// `out` must be valid for 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn pu_model_matrix(m: *const PuModel, which: PuMatrix, out: *mut f64) -> PuStatus {
    guard(|| {
        let p = unsafe { model(m) }?;
        let mat = match which {
            PuMatrix::H1 => h1(p).hessian(),
            PuMatrix::H2 => h2(p).hessian(),
            PuMatrix::J1 => *j1(p, Chart::Jet).matrix(),
            PuMatrix::J2 => *j2(p).matrix(),
            PuMatrix::Flow => free_vector_field(p).linear,
        };
        let flat: Vec<f64> = (0..16).map(|k| mat[(k / 4, k % 4)]).collect();
        unsafe { write_slice(out, &flat, "out") }
    })
}

/// `(q, q', q'', q''')` to `(x1, x2, p1, p2)`.
///
/// # Safety
/// `jet` and `out` must be valid for 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn pu_jet_to_ostro(m: *const PuModel, jet: *const f64, out: *mut f64) -> PuStatus {
    guard(|| {
        let p = unsafe { model(m) }?;
        let z = unsafe { read4(jet, "jet") }?;
        let s = jet_to_ostro(p, &JetState::new(z[0], z[1], z[2], z[3]));
        unsafe { write_slice(out, s.to_vector().as_slice(), "out") }
    })
}

/// # Safety
/// `ostro` and `out` must be valid for 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn pu_ostro_to_jet(m: *const PuModel, ostro: *const f64, out: *mut f64) -> PuStatus {
    guard(|| {
        let p = unsafe { model(m) }?;
        let s = unsafe { read4(ostro, "ostro") }?;
        let z = ostro_to_jet(p, &OstroState::new(s[0], s[1], s[2], s[3]));
        unsafe { write_slice(out, z.to_vector().as_slice(), "out") }
    })
}

/// Mode amplitudes of a jet state as `(re a1, im a1, re a2, im a2)`, with
/// `q(t) = 2 Re(a1 e^{-i w1 t} + a2 e^{-i w2 t})`, and the per-mode energies
/// `(e1, e2)` whose sum is `H1`.
///
/// # Safety
/// `jet` and `amplitudes` must be valid for 4 doubles, `energies` for 2 (or null).
#[no_mangle]
pub unsafe extern "C" fn pu_modes(
    m: *const PuModel,
    jet: *const f64,
    amplitudes: *mut f64,
    energies: *mut f64,
) -> PuStatus {
    guard(|| {
        let p = unsafe { model(m) }?;
        let z = unsafe { read4(jet, "jet") }?;
        let a = mode_decompose(p, &JetState::new(z[0], z[1], z[2], z[3]));
        unsafe { write_slice(amplitudes, &[a.a1.re, a.a1.im, a.a2.re, a.a2.im], "amplitudes") }?;
        if !energies.is_null() {
            let e = mode_energy(p, &a);
            unsafe { write_slice(energies, &[e.e1, e.e2], "energies") }?;
        }
        Ok(())
    })
}

/// Integrates from the jet state `z0` with `W = lambda q^4 / 4` (`lambda = 0`
/// is the free flow) up to `t_end` or escape.
///
/// # Safety
/// `z0` must be valid for 4 doubles, `out` for one pointer.
#[no_mangle]
pub unsafe extern "C" fn pu_integrate(
    m: *const PuModel,
    lambda: f64,
    z0: *const f64,
    t_end: f64,
    tol: f64,
    out: *mut *mut PuTrajectory,
) -> PuStatus {
    guard(|| {
        let p = unsafe { model(m) }?;
        let z = unsafe { read4(z0, "z0") }?;
        if !lambda.is_finite() {
            return Err(Fail(PuStatus::InvalidArgument, "lambda must be finite".into()));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let field = interacting_vector_field(p, Potential::quartic(lambda));
        let traj = integrate(p, &field, JetState::new(z[0], z[1], z[2], z[3]), &settings(t_end, tol)?)?;
        unsafe { write(out, Box::into_raw(Box::new(PuTrajectory(traj))), "out") }
    })
}

/// # Safety
/// `t` must be null or a handle from [`pu_integrate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pu_trajectory_free(t: *mut PuTrajectory) {
    if !t.is_null() {
        drop(unsafe { Box::from_raw(t) });
    }
}

/// # Safety
/// `t` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pu_trajectory_summary(t: *const PuTrajectory, out: *mut PuTrajectorySummary) -> PuStatus {
    guard(|| {
        let t = &unsafe { t.as_ref() }.ok_or_else(|| null("trajectory"))?.0;
        let meta = &t.meta;
        let s = PuTrajectorySummary {
            samples: t.len(),
            escaped: meta.escape_time.is_some(),
            escape_time: meta.escape_time.unwrap_or(f64::NAN),
            max_norm: meta.max_norm,
            h1_drift: meta.h1_drift,
            h2_drift: meta.h2_drift,
            hint_drift: meta.hint_drift,
            accepted_steps: meta.accepted_steps,
            rejected_steps: meta.rejected_steps,
        };
        unsafe { write(out, s, "out") }
    })
}

/// Copies sample times into `times[cap]` and jet states into `states[4 cap]`
/// (either may be null). Fails with `BufferTooSmall` if `cap` is below the
/// sample count reported by [`pu_trajectory_summary`].
///
/// # Safety
/// Non-null buffers must hold `cap` (times) and `4 cap` (states) doubles.
#[no_mangle]
pub unsafe extern "C" fn pu_trajectory_samples(
    t: *const PuTrajectory,
    times: *mut f64,
    states: *mut f64,
    cap: usize,
) -> PuStatus {
    guard(|| {
        let t = &unsafe { t.as_ref() }.ok_or_else(|| null("trajectory"))?.0;
        if cap < t.len() {
            return Err(Fail(
                PuStatus::BufferTooSmall,
                format!("need {} samples, have room for {cap}", t.len()),
            ));
        }
        if !times.is_null() {
            unsafe { write_slice(times, &t.times, "times") }?;
        }
        if !states.is_null() {
            let flat: Vec<f64> = t.states.iter().flat_map(|z| [z.q, z.qd, z.qdd, z.qddd]).collect();
            unsafe { write_slice(states, &flat, "states") }?;
        }
        Ok(())
    })
}

/// Runaway threshold in `lambda` over `[0, lambda_max]` from the jet state
/// `z0`. `grid_points` and `bisection_iters` of zero take the defaults.
/// Returns `AllBounded` / `AllUnbounded` when the range holds no transition.
///
/// # Safety
/// `z0` must be valid for 4 doubles, `out` for one [`PuThreshold`].
#[no_mangle]
pub unsafe extern "C" fn pu_threshold(
    m: *const PuModel,
    z0: *const f64,
    lambda_max: f64,
    t_end: f64,
    tol: f64,
    grid_points: usize,
    bisection_iters: usize,
    out: *mut PuThreshold,
) -> PuStatus {
    guard(|| {
        let p = unsafe { model(m) }?;
        let z = unsafe { read4(z0, "z0") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut opts = ScanOptions::default();
        if grid_points > 0 {
            opts.grid_points = grid_points;
        }
        if bisection_iters > 0 {
            opts.bisection_iters = bisection_iters;
        }
        let r = threshold_search(
            p,
            JetState::new(z[0], z[1], z[2], z[3]),
            &settings(t_end, tol)?,
            lambda_max,
            opts,
        )?;
        let (lo, hi) = r.bracket.unwrap_or((f64::NAN, f64::NAN));
        let res = PuThreshold {
            lambda_star: r.lambda_star.unwrap_or(f64::NAN),
            bracket_lo: lo,
            bracket_hi: hi,
            non_monotone: r.non_monotone,
        };
        unsafe { write(out, res, "out") }
    })
}

/// Dimension of the linear symmetries of the free flow.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pu_commutant_dimension(m: *const PuModel, out: *mut usize) -> PuStatus {
    guard(|| {
        let p = unsafe { model(m) }?;
        let b = commutant_basis(&free_vector_field(p).linear);
        unsafe { write(out, b.dimension, "out") }
    })
}

/// Dimension of constant Poisson tensors preserved by the flow with
/// `W = lambda q^4 / 4`, tested at `samples` seeded points when `lambda != 0`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pu_invariant_tensor_dimension(
    m: *const PuModel,
    lambda: f64,
    samples: usize,
    seed: u64,
    out: *mut usize,
) -> PuStatus {
    guard(|| {
        let p = unsafe { model(m) }?;
        let field = interacting_vector_field(p, Potential::quartic(lambda));
        let space = invariant_tensor_space(&field, &sample_points(samples, seed))?;
        unsafe { write(out, space.dimension, "out") }
    })
}
