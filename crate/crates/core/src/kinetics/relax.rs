//! Relaxation runs in the Markovian and memory forms of the transport equation.

use super::collision::markovian_collision;
use super::equilibrium::{equilibrium_gap, EquilibriumSpec};
use super::transport::{transport_rhs, KernelOptions, TransportState};
use crate::error::{Result, TfdError};
use crate::liouville::Statistics;
use crate::ode::{integrate, OdeOptions};
use crate::perturbation::InteractionModel;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelaxMode {
    Markovian,
    Memory,
}

#[derive(Debug, Clone)]
pub struct RelaxOptions {
    pub mode: RelaxMode,
    pub t_end: f64,
    /// Output spacing, and the initial step of the memory integrator.
    pub dt: f64,
    /// Lorentzian width or kernel damping; defaults to 0.05 × smallest level spacing.
    pub gamma_delta: Option<f64>,
    /// Memory window; defaults to 8/γ_δ.
    pub t_mem: Option<f64>,
    pub ode: OdeOptions,
    pub max_halvings: usize,
}

impl RelaxOptions {
    pub fn new(mode: RelaxMode, t_end: f64, dt: f64) -> Self {
        RelaxOptions {
            mode,
            t_end,
            dt,
            gamma_delta: None,
            t_mem: None,
            ode: OdeOptions::with_tolerances(1e-10, 1e-12),
            max_halvings: 30,
        }
    }

    pub fn broadening(&self, omega: &[f64]) -> f64 {
        self.gamma_delta.unwrap_or_else(|| default_broadening(omega))
    }

    pub fn memory(&self, omega: &[f64]) -> f64 {
        self.t_mem.unwrap_or_else(|| 8.0 / self.broadening(omega))
    }
}

/// 0.05 × the smallest nonzero spacing between mode energies.
pub fn default_broadening(omega: &[f64]) -> f64 {
    let mut spacing = f64::INFINITY;
    for (a, &x) in omega.iter().enumerate() {
        for &y in &omega[a + 1..] {
            let d = (x - y).abs();
            if d > 0.0 {
                spacing = spacing.min(d);
            }
        }
    }
    if spacing.is_finite() {
        0.05 * spacing
    } else {
        0.05 * omega.iter().map(|w| w.abs()).fold(0.0, f64::max).max(1.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportTrajectory {
    pub times: Vec<f64>,
    pub n: Vec<Vec<f64>>,
    pub ndot: Vec<Vec<f64>>,
    pub equilibrium_gap: Vec<f64>,
    /// Equilibrium fitted to the final number and energy.
    pub equilibrium: EquilibriumSpec,
    /// |ṅ(T_mem) − ṅ(2T_mem)| at the final time, memory mode only.
    pub tail_estimate: Option<f64>,
    pub rejected_steps: usize,
}

fn physical(stats: &[Statistics], n: &[f64]) -> Option<usize> {
    n.iter()
        .zip(stats)
        .position(|(&x, s)| !(x >= 0.0 && x.is_finite() && (!s.is_fermion() || x <= 1.0)))
}

pub fn relax(model: &InteractionModel, n0: &[f64], omega: &[f64], opts: &RelaxOptions) -> Result<TransportTrajectory> {
    let stats = model.statistics().to_vec();
    if n0.len() != stats.len() || omega.len() != stats.len() {
        return Err(TfdError::Shape("initial occupations, energies and model modes differ".into()));
    }
    if let Some(j) = physical(&stats, n0) {
        return Err(TfdError::OccupationBound { mode: j, t: 0.0, value: n0[j] });
    }
    if !(opts.t_end > 0.0 && opts.dt > 0.0) {
        return Err(TfdError::Config("t_end and dt must be positive".into()));
    }
    let gamma = opts.broadening(omega);
    let steps = (opts.t_end / opts.dt).round().max(1.0) as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| opts.t_end * k as f64 / steps as f64).collect();
    let (times, n, ndot, tail, rejected) = match opts.mode {
        RelaxMode::Markovian => {
            let mut failure = None;
            let (ys, st) = integrate(
                |_, y: &[f64], dy: &mut [f64]| match markovian_collision(model, y, omega, gamma) {
                    Ok(r) => dy.copy_from_slice(&r),
                    Err(e) => {
                        failure.get_or_insert(e);
                        dy.iter_mut().for_each(|v| *v = f64::NAN);
                    }
                },
                &grid,
                n0,
                &opts.ode,
                |_, y| physical(&stats, y).is_none(),
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            let nd = ys.iter().map(|y| markovian_collision(model, y, omega, gamma)).collect::<Result<Vec<_>>>()?;
            (grid.clone(), ys, nd, None, st.rejected)
        }
        RelaxMode::Memory => memory_run(model, n0, omega, &grid, gamma, opts)?,
    };
    let mut gaps = Vec::with_capacity(n.len());
    let mut last_eq = None;
    for y in &n {
        let (g, eq) = equilibrium_gap(&stats, omega, y)?;
        gaps.push(g);
        last_eq = Some(eq);
    }
    Ok(TransportTrajectory {
        times,
        n,
        ndot,
        equilibrium_gap: gaps,
        equilibrium: last_eq.expect("trajectory has at least one sample"),
        tail_estimate: tail,
        rejected_steps: rejected,
    })
}

type MemoryOutput = (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>, Option<f64>, usize);

/// Heun predictor–corrector on the history buffer; steps that leave the
/// physical region are halved, never clipped.
fn memory_run(
    model: &InteractionModel,
    n0: &[f64],
    omega: &[f64],
    grid: &[f64],
    gamma: f64,
    opts: &RelaxOptions,
) -> Result<MemoryOutput> {
    let stats = model.statistics().to_vec();
    let kopts = KernelOptions {
        damping: gamma,
        t_mem: opts.memory(omega),
    };
    let phase = |t: f64| -> Vec<f64> { omega.iter().map(|w| w * (t - grid[0])).collect() };
    let mut state = TransportState::new(stats.clone(), grid[0], n0.to_vec())?;
    let mut rate = transport_rhs(&state, model, &kopts)?;
    let mut out_n = vec![n0.to_vec()];
    let mut out_d = vec![rate.clone()];
    let mut rejected = 0;
    for &target in &grid[1..] {
        while state.t() < target - 1e-12 * target.abs().max(1.0) {
            let t = state.t();
            let mut h = (target - t).min(opts.dt);
            let mut halvings = 0;
            loop {
                let n = state.n().to_vec();
                let pred: Vec<f64> = n.iter().zip(&rate).map(|(a, r)| a + h * r).collect();
                let step_ok = physical(&stats, &pred).is_none() && {
                    state.history.push(t + h, pred.clone(), phase(t + h))?;
                    let r2 = transport_rhs(&state, model, &kopts)?;
                    state.history.pop();
                    let corr: Vec<f64> = n.iter().zip(rate.iter().zip(&r2)).map(|(a, (r1, r2))| a + 0.5 * h * (r1 + r2)).collect();
                    if physical(&stats, &corr).is_none() {
                        state.history.push(t + h, corr, phase(t + h))?;
                        true
                    } else {
                        false
                    }
                };
                if step_ok {
                    break;
                }
                rejected += 1;
                halvings += 1;
                if halvings > opts.max_halvings {
                    let j = physical(&stats, &pred).unwrap_or(0);
                    return Err(TfdError::OccupationBound { mode: j, t: t + h, value: pred[j] });
                }
                h *= 0.5;
            }
            rate = transport_rhs(&state, model, &kopts)?;
            state.history.prune(state.t() - 2.5 * kopts.t_mem);
        }
        out_n.push(state.n().to_vec());
        out_d.push(rate.clone());
    }
    let doubled = KernelOptions {
        t_mem: 2.0 * kopts.t_mem,
        ..kopts
    };
    let tail = transport_rhs(&state, model, &doubled)?
        .iter()
        .zip(&rate)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((grid.to_vec(), out_n, out_d, Some(tail), rejected))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_start_is_flat() {
        let omega = [1.0, 2.0, 3.0];
        let n0 = EquilibriumSpec::new(1.0, 0.0).unwrap().occupations(&[Statistics::Boson; 3], &omega);
        for mode in [RelaxMode::Markovian, RelaxMode::Memory] {
            let tr = relax(&InteractionModel::ladder(0.1), &n0, &omega, &RelaxOptions::new(mode, 2.0, 0.1)).unwrap();
            for n in &tr.n {
                for (a, b) in n.iter().zip(&n0) {
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn markovian_conserves_invariants_and_relaxes() {
        let omega = [1.0, 2.0, 3.0];
        let n0 = [1.0, 0.1, 0.6];
        let tr = relax(&InteractionModel::ladder(0.1), &n0, &omega, &RelaxOptions::new(RelaxMode::Markovian, 20.0, 1.0)).unwrap();
        let last = tr.n.last().unwrap();
        assert!((last.iter().sum::<f64>() - 1.7).abs() < 1e-8);
        assert!((last.iter().zip(omega).map(|(a, w)| a * w).sum::<f64>() - 3.0).abs() < 1e-8);
        assert!(tr.equilibrium_gap.last().unwrap() < &tr.equilibrium_gap[0]);
    }

    #[test]
    fn rejects_unphysical_start() {
        let r = relax(&InteractionModel::ladder(0.1), &[-0.1, 0.0, 0.0], &[1.0, 2.0, 3.0], &RelaxOptions::new(RelaxMode::Markovian, 1.0, 0.1));
        assert!(matches!(r, Err(TfdError::OccupationBound { .. })));
    }
}
