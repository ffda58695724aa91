//! Transport equation with memory,
//! ṅ_j(t) = 2σ Im ∫_{t−T_mem}^t ds S¹²_loop(t,s) e^{i∫_s^t ω_j},
//! evaluated on a history buffer of past occupations and phases.

use crate::error::{Result, TfdError};
use crate::liouville::Statistics;
use crate::perturbation::{s12_core, InteractionModel};
use crate::schedule::ThermalSchedule;
use crate::sparse::C64;

/// Kernel damping γ_δ and memory window T_mem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    pub damping: f64,
    pub t_mem: f64,
}

/// Append-only record of (t, n(t), ∫_{t₀}^t ω).
#[derive(Debug, Clone, Default)]
pub struct History {
    times: Vec<f64>,
    n: Vec<Vec<f64>>,
    phase: Vec<Vec<f64>>,
}

impl History {
    pub fn new(t0: f64, n0: Vec<f64>) -> Self {
        let k = n0.len();
        History {
            times: vec![t0],
            n: vec![n0],
            phase: vec![vec![0.0; k]],
        }
    }

    pub fn push(&mut self, t: f64, n: Vec<f64>, phase: Vec<f64>) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(TfdError::History(format!("time {t} does not advance past {last}")));
            }
        }
        self.times.push(t);
        self.n.push(n);
        self.phase.push(phase);
        Ok(())
    }

    pub fn pop(&mut self) {
        if self.times.len() > 1 {
            self.times.pop();
            self.n.pop();
            self.phase.pop();
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("history is never empty")
    }

    pub fn last_n(&self) -> &[f64] {
        self.n.last().expect("history is never empty")
    }

    pub fn last_phase(&self) -> &[f64] {
        self.phase.last().expect("history is never empty")
    }

    pub fn n_at(&self, i: usize) -> &[f64] {
        &self.n[i]
    }

    pub fn phase_at(&self, i: usize) -> &[f64] {
        &self.phase[i]
    }

    /// Drops samples older than `before`, keeping one sample at or before it.
    pub fn prune(&mut self, before: f64) {
        let keep = self.times.iter().position(|&t| t >= before).unwrap_or(self.times.len());
        if keep > 1 {
            let cut = keep - 1;
            self.times.drain(..cut);
            self.n.drain(..cut);
            self.phase.drain(..cut);
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransportState {
    pub statistics: Vec<Statistics>,
    pub history: History,
}

impl TransportState {
    pub fn new(statistics: Vec<Statistics>, t0: f64, n0: Vec<f64>) -> Result<Self> {
        if statistics.len() != n0.len() {
            return Err(TfdError::Shape("statistics and occupations differ in length".into()));
        }
        Ok(TransportState {
            statistics,
            history: History::new(t0, n0),
        })
    }

    /// History sampled from a schedule at the given increasing times.
    pub fn from_schedule(schedule: &ThermalSchedule, times: &[f64]) -> Result<Self> {
        let k = schedule.n_modes();
        let stats = schedule.modes.iter().map(|m| m.statistics).collect();
        let t0 = *times.first().ok_or_else(|| TfdError::History("no sample times".into()))?;
        let mut st = TransportState::new(stats, t0, (0..k).map(|j| schedule.n(j, t0)).collect())?;
        for &t in &times[1..] {
            st.history.push(
                t,
                (0..k).map(|j| schedule.n(j, t)).collect(),
                (0..k).map(|j| schedule.phase(j, t, t0)).collect(),
            )?;
        }
        Ok(st)
    }

    pub fn t(&self) -> f64 {
        self.history.last_time()
    }

    pub fn n(&self) -> &[f64] {
        self.history.last_n()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.statistics.iter().map(|s| s.sigma()).collect()
    }
}

/// One point of the memory window: time, occupations and phases ∫_{t₀}^s ω.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPoint {
    pub s: f64,
    pub n: Vec<f64>,
    pub phase: Vec<f64>,
}

/// History points in [t − T_mem, t]; the window edge is linearly
/// interpolated into the buffer.
pub fn memory_window(history: &History, t_mem: f64) -> Result<Vec<WindowPoint>> {
    let h = history;
    if h.is_empty() {
        return Err(TfdError::History("empty history".into()));
    }
    let start = h.last_time() - t_mem;
    let first = h.times().iter().position(|&x| x >= start).unwrap_or(h.len() - 1);
    let mut out = Vec::new();
    if first > 0 && h.times()[first] > start {
        let (ta, tb) = (h.times()[first - 1], h.times()[first]);
        let w = (start - ta) / (tb - ta);
        let lerp = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + w * (y - x)).collect() };
        out.push(WindowPoint {
            s: start,
            n: lerp(h.n_at(first - 1), h.n_at(first)),
            phase: lerp(h.phase_at(first - 1), h.phase_at(first)),
        });
    }
    for i in first..h.len() {
        out.push(WindowPoint {
            s: h.times()[i],
            n: h.n_at(i).to_vec(),
            phase: h.phase_at(i).to_vec(),
        });
    }
    Ok(out)
}

/// Samples of S¹²(t,s) e^{i∫_s^t ω_j} over the memory window.
/// `omega_phase(j, phase(t), phase(s))` supplies the exponent.
pub fn kernel_samples(
    state: &TransportState,
    model: &InteractionModel,
    j: usize,
    opts: &KernelOptions,
    omega_phase: impl Fn(usize, &[f64], &[f64]) -> f64,
) -> Result<Vec<(f64, C64)>> {
    let window = memory_window(&state.history, opts.t_mem)?;
    let t = state.t();
    let sig = state.sigmas();
    let pt = state.history.last_phase();
    Ok(window
        .iter()
        .map(|p| {
            let rel: Vec<f64> = pt.iter().zip(&p.phase).map(|(a, b)| a - b).collect();
            let s12 = s12_core(model, &sig, j, &p.n, &rel, t - p.s, opts.damping);
            (p.s, s12 * C64::from_polar(1.0, omega_phase(j, pt, &p.phase)))
        })
        .collect())
}

/// Composite trapezoid over (s, f(s)) samples.
pub fn trapezoid(samples: &[(f64, C64)]) -> C64 {
    samples.windows(2).map(|w| (w[1].1 + w[0].1) * (0.5 * (w[1].0 - w[0].0))).sum()
}

/// ṅ_j = 2σ Im ∫ S¹²_loop(t,s) e^{i∫_s^t ω_j} ds for every mode.
pub fn transport_rhs(state: &TransportState, model: &InteractionModel, opts: &KernelOptions) -> Result<Vec<f64>> {
    if model.n_modes() != state.statistics.len() {
        return Err(TfdError::Shape("model and transport state disagree on modes".into()));
    }
    (0..state.statistics.len())
        .map(|j| {
            let samples = kernel_samples(state, model, j, opts, |j, pt, ph| pt[j] - ph[j])?;
            Ok(2.0 * state.statistics[j].sigma() * trapezoid(&samples).im)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::EquilibriumSpec;

    fn uniform(n: Vec<f64>, omega: &[f64], dt: f64, steps: usize) -> TransportState {
        let stats = vec![Statistics::Boson; n.len()];
        let sched = ThermalSchedule::constant(&stats, &n, omega);
        let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
        TransportState::from_schedule(&sched, &times).unwrap()
    }

    #[test]
    fn zero_kernel_and_single_sample() {
        let st = uniform(vec![0.5, 0.4, 0.3], &[1.0, 2.0, 3.0], 0.1, 20);
        let r = transport_rhs(&st, &InteractionModel::ladder(0.0), &KernelOptions { damping: 0.1, t_mem: 5.0 }).unwrap();
        assert_eq!(r, vec![0.0; 3]);
        let st = TransportState::new(vec![Statistics::Boson; 3], 0.0, vec![0.5, 0.4, 0.3]).unwrap();
        let r = transport_rhs(&st, &InteractionModel::ladder(0.2), &KernelOptions { damping: 0.1, t_mem: 5.0 }).unwrap();
        assert_eq!(r, vec![0.0; 3]);
    }

    #[test]
    fn equilibrium_is_stationary() {
        let omega = [1.0, 2.0, 3.0];
        let n = EquilibriumSpec::new(1.3, 0.2).unwrap().occupations(&[Statistics::Boson; 3], &omega);
        let st = uniform(n, &omega, 0.05, 400);
        let r = transport_rhs(&st, &InteractionModel::ladder(0.2), &KernelOptions { damping: 0.5, t_mem: 16.0 }).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-8), "{r:?}");
    }

    #[test]
    fn window_edge_is_interpolated() {
        let st = uniform(vec![0.5, 0.4, 0.3], &[1.0, 2.0, 2.9], 0.1, 50);
        let m = InteractionModel::ladder(0.2);
        let opts = KernelOptions { damping: 0.1, t_mem: 2.05 };
        let s = kernel_samples(&st, &m, 0, &opts, |j, a, b| a[j] - b[j]).unwrap();
        assert!((s[0].0 - (5.0 - 2.05)).abs() < 1e-12);
        assert!((s[1].0 - 3.0).abs() < 1e-12);
    }
}
