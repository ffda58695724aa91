//! C ABI over tfd-core. Objects cross the boundary as opaque handles that the
//! caller releases with the matching `_free`; every call returns a status
//! code and writes results through out-pointers.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tfd_core::cli::{execute, RunKind};
use tfd_core::kinetics::{relax, RelaxMode, RelaxOptions};
use tfd_core::liouville::algebra::{verify_algebra, AlgebraSweep};
use tfd_core::liouville::{LiouvilleBasis, ModeSpec, Statistics};
use tfd_core::perturbation::{Channel, InteractionModel};
use tfd_core::renorm::equilibrium_renormalize;
use tfd_core::schedule::ThermalSchedule;
use tfd_core::tfd::propagator_delta;
use tfd_core::TfdError;

/// Status codes returned by every entry point.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Io = 4,
    /// A scenario ran but at least one check failed.
    CheckFailed = 5,
    Panic = 6,
}

/// Truncated Liouville space.
pub struct TfdBasis(Arc<LiouvilleBasis>);

/// Two-body interaction with its coupling.
pub struct TfdModel(InteractionModel);

/// One vertex entry V_{jklm}.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TfdChannel {
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub v_re: f64,
    pub v_im: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &TfdError) -> TfdStatus {
    match err {
        TfdError::Io(_) => TfdStatus::Io,
        e if e.is_numerical() => TfdStatus::Numerical,
        _ => TfdStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (TfdStatus, String)>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TfdStatus::Ok as i32,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status as i32
        }
        Err(_) => {
            set_error("internal panic".into());
            TfdStatus::Panic as i32
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, (TfdStatus, String)>;
}

impl<T> OrStatus<T> for tfd_core::Result<T> {
    fn or_status(self) -> Result<T, (TfdStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (TfdStatus, String) {
    (TfdStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (TfdStatus, String) {
    (TfdStatus::InvalidArgument, msg.into())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (TfdStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], (TfdStatus, String)> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (TfdStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn string(p: *const c_char, what: &str) -> Result<String, (TfdStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

/// σ = +1 boson, −1 fermion.
fn statistics(sigma: i32) -> Result<Statistics, (TfdStatus, String)> {
    Statistics::from_sigma(sigma).or_status()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length, or 0 without error.
#[no_mangle]
pub unsafe extern "C" fn tfd_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Creates a basis of `n_modes` modes. `sigma[j]` is +1 or −1; `cutoff[j]`
/// is ignored for fermions.
#[no_mangle]
pub unsafe extern "C" fn tfd_basis_new(
    sigma: *const i32,
    omega: *const f64,
    cutoff: *const usize,
    n_modes: usize,
    out_basis: *mut *mut TfdBasis,
) -> i32 {
    guard(|| {
        let out_basis = out(out_basis, "out_basis")?;
        *out_basis = ptr::null_mut();
        let sigma = slice(sigma, n_modes, "sigma")?;
        let omega = slice(omega, n_modes, "omega")?;
        let cutoff = slice(cutoff, n_modes, "cutoff")?;
        let modes = (0..n_modes)
            .map(|j| {
                Ok(match statistics(sigma[j])? {
                    Statistics::Boson => ModeSpec::boson(omega[j], cutoff[j]),
                    Statistics::Fermion => ModeSpec::fermion(omega[j]),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let basis = LiouvilleBasis::new(modes).or_status()?;
        *out_basis = Box::into_raw(Box::new(TfdBasis(Arc::new(basis))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tfd_basis_free(basis: *mut TfdBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Liouville dimension (dim_h²).
#[no_mangle]
pub unsafe extern "C" fn tfd_basis_dim(basis: *const TfdBasis, out_dim: *mut usize) -> i32 {
    guard(|| {
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        *out(out_dim, "out_dim")? = b.0.dim_l();
        Ok(())
    })
}

/// Runs the algebra identity sweep; writes the largest residual and the
/// number of failed checks.
#[no_mangle]
pub unsafe extern "C" fn tfd_verify_algebra(
    basis: *const TfdBasis,
    seed: u64,
    tol: f64,
    out_max_residual: *mut f64,
    out_failed: *mut usize,
) -> i32 {
    guard(|| {
        let b = basis.as_ref().ok_or_else(|| null("basis"))?;
        let max_residual = out(out_max_residual, "out_max_residual")?;
        let failed = out(out_failed, "out_failed")?;
        let sweep = AlgebraSweep {
            tol,
            ..AlgebraSweep::default()
        };
        let checks = verify_algebra(&b.0, sweep, &mut ChaCha8Rng::seed_from_u64(seed)).or_status()?;
        *max_residual = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
        *failed = checks.iter().filter(|c| !c.passed()).count();
        Ok(())
    })
}

/// Builds an interaction from vertex entries; `sigma` gives the statistics
/// of each mode.
#[no_mangle]
pub unsafe extern "C" fn tfd_model_new(
    lambda: f64,
    sigma: *const i32,
    n_modes: usize,
    channels: *const TfdChannel,
    n_channels: usize,
    out_model: *mut *mut TfdModel,
) -> i32 {
    guard(|| {
        let out_model = out(out_model, "out_model")?;
        *out_model = ptr::null_mut();
        let stats = slice(sigma, n_modes, "sigma")?
            .iter()
            .map(|&s| statistics(s))
            .collect::<Result<Vec<_>, _>>()?;
        let chans: Vec<Channel> = slice(channels, n_channels, "channels")?
            .iter()
            .map(|c| Channel {
                j: c.j,
                k: c.k,
                l: c.l,
                m: c.m,
                v: c.v_re,
                v_im: c.v_im,
            })
            .collect();
        let model = InteractionModel::new(lambda, stats, &chans).or_status()?;
        *out_model = Box::into_raw(Box::new(TfdModel(model)));
        Ok(())
    })
}

/// Three bosons with the single channel V₀₂₁₁ = 1.
#[no_mangle]
pub unsafe extern "C" fn tfd_model_ladder(lambda: f64, out_model: *mut *mut TfdModel) -> i32 {
    guard(|| {
        let out_model = out(out_model, "out_model")?;
        if !lambda.is_finite() {
            *out_model = ptr::null_mut();
            return Err(invalid("lambda is not finite"));
        }
        *out_model = Box::into_raw(Box::new(TfdModel(InteractionModel::ladder(lambda))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tfd_model_free(model: *mut TfdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

#[no_mangle]
pub unsafe extern "C" fn tfd_model_n_modes(model: *const TfdModel, out_n: *mut usize) -> i32 {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        *out(out_n, "out_n")? = m.0.n_modes();
        Ok(())
    })
}

/// Δ(t₁,t₂) for one mode at constant occupation and energy, row-major as
/// (re, im) pairs: out[8] = {Δ¹¹, Δ¹², Δ²¹, Δ²²}.
#[no_mangle]
pub unsafe extern "C" fn tfd_propagator_delta(sigma: i32, n: f64, omega: f64, t1: f64, t2: f64, out_values: *mut f64) -> i32 {
    guard(|| {
        let stats = statistics(sigma)?;
        let values = slice_mut(out_values, 8, "out_values")?;
        if !(n.is_finite() && omega.is_finite() && t1.is_finite() && t2.is_finite()) {
            return Err(invalid("arguments must be finite"));
        }
        let d = propagator_delta(&ThermalSchedule::constant(&[stats], &[n], &[omega]), 0, t1, t2);
        for (i, (r, c)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
            values[2 * i] = d[(r, c)].re;
            values[2 * i + 1] = d[(r, c)].im;
        }
        Ok(())
    })
}

/// Markovian relaxation of the occupations to `t_end`. Writes the final
/// occupations and the distance to the fitted equilibrium. A `broadening`
/// ≤ 0 selects the default width.
#[no_mangle]
pub unsafe extern "C" fn tfd_transport_relax(
    model: *const TfdModel,
    n0: *const f64,
    omega: *const f64,
    n_modes: usize,
    t_end: f64,
    dt: f64,
    broadening: f64,
    out_n: *mut f64,
    out_gap: *mut f64,
) -> i32 {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if n_modes != m.0.n_modes() {
            return Err(invalid(format!("{n_modes} modes for a {}-mode model", m.0.n_modes())));
        }
        let n0 = slice(n0, n_modes, "n0")?;
        let omega = slice(omega, n_modes, "omega")?;
        let out_n = slice_mut(out_n, n_modes, "out_n")?;
        let out_gap = out(out_gap, "out_gap")?;
        let mut opts = RelaxOptions::new(RelaxMode::Markovian, t_end, dt);
        opts.gamma_delta = (broadening > 0.0).then_some(broadening);
        let tr = relax(&m.0, n0, omega, &opts).or_status()?;
        out_n.copy_from_slice(tr.n.last().expect("trajectory has a start"));
        *out_gap = *tr.equilibrium_gap.last().expect("trajectory has a start");
        Ok(())
    })
}

/// Self-consistent on-shell energies at inverse temperature β.
#[no_mangle]
pub unsafe extern "C" fn tfd_equilibrium_renormalize(
    model: *const TfdModel,
    omega0: *const f64,
    n_modes: usize,
    beta: f64,
    width: f64,
    out_omega: *mut f64,
) -> i32 {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let omega0 = slice(omega0, n_modes, "omega0")?;
        let out_omega = slice_mut(out_omega, n_modes, "out_omega")?;
        let r = equilibrium_renormalize(&m.0, omega0, beta, width).or_status()?;
        out_omega.copy_from_slice(&r.omega);
        Ok(())
    })
}

/// Runs a scenario like the command-line tool. `kind` is one of
/// "verify-algebra", "evolve", "propagators", "transport",
/// "renorm-compare". A negative `seed` keeps the config seed. Returns
/// `CHECK_FAILED` when the run completed with failing checks.
#[no_mangle]
pub unsafe extern "C" fn tfd_run_scenario(kind: *const c_char, config: *const c_char, out_dir: *const c_char, seed: i64) -> i32 {
    guard(|| {
        let kind: RunKind = string(kind, "kind")?.parse().or_status()?;
        let config = string(config, "config")?;
        let out_dir = string(out_dir, "out_dir")?;
        let seed = u64::try_from(seed).ok();
        let ex = execute(kind, Path::new(&config), Path::new(&out_dir), seed, |v| std::env::var(v).ok()).or_status()?;
        if ex.output.passed() {
            Ok(())
        } else {
            let failed = ex.output.checks.iter().filter(|c| !c.passed()).count();
            Err((TfdStatus::CheckFailed, format!("{failed} checks failed")))
        }
    })
}
