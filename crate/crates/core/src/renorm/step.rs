//! The new renormalization conditions S¹²[ω_j;t] = 0 and Re S¹¹[ω_j;t] = 0
//! on a transport history, and the staggered run built on them.

use super::onshell::equilibrium_onshell_solve;
use crate::error::{Result, TfdError};
use crate::kinetics::{kernel_samples, memory_window, transport_rhs, trapezoid, KernelOptions, TransportState};
use crate::perturbation::{lambda_core, InteractionModel};
use crate::sparse::C64;
use serde::Serialize;

/// On-shell self-energy of one mode at one time after both conditions are imposed.
#[derive(Debug, Clone, Serialize)]
pub struct OnShellResult {
    pub mode: usize,
    pub t: f64,
    /// S¹¹, S¹², S²¹, S²² at ω_j including the counterterms, as (re, im).
    pub s: [[f64; 2]; 4],
    pub omega: f64,
    pub ndot: f64,
    pub s12_residual: f64,
    pub re_s11_residual: f64,
    /// Root solve failed and ω was carried over.
    pub fallback: bool,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Samples (s, S¹¹_loop(t,s)) over the memory window; S¹¹ = −i(Λ^> − σΛ^<).
fn s11_samples(state: &TransportState, model: &InteractionModel, j: usize, opts: &KernelOptions) -> Result<Vec<(f64, C64)>> {
    let window = memory_window(&state.history, opts.t_mem)?;
    let t = state.t();
    let sig = state.sigmas();
    let pt = state.history.last_phase();
    Ok(window
        .iter()
        .map(|p| {
            let rel: Vec<f64> = pt.iter().zip(&p.phase).map(|(a, b)| a - b).collect();
            let (gt, lt) = lambda_core(model, &sig, j, &p.n, &rel, t - p.s, opts.damping);
            (p.s, C64::new(0.0, -1.0) * (gt - lt * sig[j]))
        })
        .collect())
}

/// Solves both conditions for every mode at the latest history time.
///
/// ṅ_j comes from the Im-part condition with the phases already in the
/// history, so it equals [`transport_rhs`] exactly. ω_j is the root of
/// ω₀ⱼ − ω + Re S¹¹_loop[ω;t] closest to `omega_guess`, with the trial energy
/// held constant across the window. A failed root solve keeps the guess and
/// sets `fallback`.
pub fn new_renorm_step(
    state: &TransportState,
    model: &InteractionModel,
    omega0: &[f64],
    omega_guess: &[f64],
    opts: &KernelOptions,
) -> Result<Vec<OnShellResult>> {
    let k = state.statistics.len();
    if omega0.len() != k || omega_guess.len() != k || model.n_modes() != k {
        return Err(TfdError::Shape("energies, model and state disagree on modes".into()));
    }
    let t = state.t();
    let scale = model.lambda * model.lambda * model.vertex_norm2();
    let half = (10.0 * scale).max(1e-12);
    let tol = 1e-10 * scale.max(1e-300);
    let ndot = transport_rhs(state, model, opts)?;
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let sigma = state.statistics[j].sigma();
        let s12_loop = trapezoid(&kernel_samples(state, model, j, opts, |j, pt, ph| pt[j] - ph[j])?);
        let samples = s11_samples(state, model, j, opts)?;
        let s11_loop = |w: f64| -> C64 {
            let shifted: Vec<(f64, C64)> = samples.iter().map(|&(s, v)| (s, v * C64::from_polar(1.0, w * (t - s)))).collect();
            trapezoid(&shifted)
        };
        let re_total = |w: f64| omega0[j] - w + s11_loop(w).re;
        let (omega, fallback) = match equilibrium_onshell_solve(re_total, omega_guess[j], half, tol) {
            Ok(w) => (w, false),
            Err(TfdError::NoBracket { .. }) => (omega_guess[j], true),
            Err(e) => return Err(e),
        };
        let s11 = s11_loop(omega) + (omega0[j] - omega);
        // counterterm −iσṅ δ(t−s) in the 12 component
        let s12 = C64::new(0.0, 2.0 * s12_loop.im) - C64::new(0.0, sigma * ndot[j]);
        out.push(OnShellResult {
            mode: j,
            t,
            s: [pair(s11), pair(s12), [0.0, 0.0], pair(s11.conj())],
            omega,
            ndot: ndot[j],
            s12_residual: s12.norm(),
            re_s11_residual: s11.re.abs(),
            fallback,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct RenormOptions {
    pub t_end: f64,
    pub dt: f64,
    pub kernel: KernelOptions,
    pub max_halvings: usize,
}

/// Trajectory of the staggered solve.
#[derive(Debug, Clone, Serialize)]
pub struct RenormTrajectory {
    pub times: Vec<f64>,
    pub n: Vec<Vec<f64>>,
    pub ndot: Vec<Vec<f64>>,
    pub omega: Vec<Vec<f64>>,
    /// max_j |ṅ_j recomputed with the updated ω − ṅ_j used for the step|.
    pub staggering_residual: Vec<f64>,
    pub fallbacks: usize,
}

fn physical(state: &TransportState, n: &[f64]) -> bool {
    n.iter()
        .zip(&state.statistics)
        .all(|(&x, s)| x >= 0.0 && x.is_finite() && (!s.is_fermion() || x <= 1.0))
}

/// Heun steps of ṅ from the Im-part condition; after each step ω is updated
/// from the Re-part condition and the phase of the last interval is rebuilt
/// with the mean of old and new ω.
pub fn renorm_relax(model: &InteractionModel, n0: &[f64], omega0: &[f64], opts: &RenormOptions) -> Result<RenormTrajectory> {
    if !(opts.t_end > 0.0 && opts.dt > 0.0) {
        return Err(TfdError::Config("t_end and dt must be positive".into()));
    }
    let stats = model.statistics().to_vec();
    let mut state = TransportState::new(stats, 0.0, n0.to_vec())?;
    if !physical(&state, n0) {
        return Err(TfdError::Config(format!("initial occupations {n0:?} outside the physical region")));
    }
    let first = new_renorm_step(&state, model, omega0, omega0, &opts.kernel)?;
    let mut omega: Vec<f64> = first.iter().map(|r| r.omega).collect();
    let mut fallbacks = first.iter().filter(|r| r.fallback).count();
    let mut rate = transport_rhs(&state, model, &opts.kernel)?;
    let steps = (opts.t_end / opts.dt).round().max(1.0) as usize;
    let mut traj = RenormTrajectory {
        times: vec![0.0],
        n: vec![n0.to_vec()],
        ndot: vec![rate.clone()],
        omega: vec![omega.clone()],
        staggering_residual: vec![0.0],
        fallbacks: 0,
    };
    for step in 1..=steps {
        let target = opts.t_end * step as f64 / steps as f64;
        let mut stagger: f64 = 0.0;
        while state.t() < target - 1e-12 * target.max(1.0) {
            let t = state.t();
            let mut h = target - t;
            let mut halvings = 0;
            let base_phase = state.history.last_phase().to_vec();
            let advance = |w: &[f64], h: f64| -> Vec<f64> { base_phase.iter().zip(w).map(|(p, w)| p + w * h).collect() };
            let corr = loop {
                let n = state.n().to_vec();
                let pred: Vec<f64> = n.iter().zip(&rate).map(|(a, r)| a + h * r).collect();
                if physical(&state, &pred) {
                    state.history.push(t + h, pred, advance(&omega, h))?;
                    let r2 = transport_rhs(&state, model, &opts.kernel)?;
                    state.history.pop();
                    let corr: Vec<f64> = n.iter().zip(rate.iter().zip(&r2)).map(|(a, (x, y))| a + 0.5 * h * (x + y)).collect();
                    if physical(&state, &corr) {
                        break corr;
                    }
                }
                halvings += 1;
                if halvings > opts.max_halvings {
                    return Err(TfdError::OccupationBound {
                        mode: 0,
                        t: t + h,
                        value: f64::NAN,
                    });
                }
                h *= 0.5;
            };
            state.history.push(t + h, corr.clone(), advance(&omega, h))?;
            let used = transport_rhs(&state, model, &opts.kernel)?;
            let res = new_renorm_step(&state, model, omega0, &omega, &opts.kernel)?;
            fallbacks += res.iter().filter(|r| r.fallback).count();
            let new_omega: Vec<f64> = res.iter().map(|r| r.omega).collect();
            let mean: Vec<f64> = omega.iter().zip(&new_omega).map(|(a, b)| 0.5 * (a + b)).collect();
            state.history.pop();
            state.history.push(t + h, corr, advance(&mean, h))?;
            rate = transport_rhs(&state, model, &opts.kernel)?;
            stagger = stagger.max(rate.iter().zip(&used).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            omega = new_omega;
            state.history.prune(state.t() - 2.5 * opts.kernel.t_mem);
        }
        traj.times.push(state.t());
        traj.n.push(state.n().to_vec());
        traj.ndot.push(rate.clone());
        traj.omega.push(omega.clone());
        traj.staggering_residual.push(stagger);
    }
    traj.fallbacks = fallbacks;
    Ok(traj)
}
