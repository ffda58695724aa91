//! Scenario drivers: each kind turns a config into tables and checks.

use super::config::{InitialState, RunKind, ScenarioConfig};
use super::emit::Table;
use crate::error::{Result, TfdError};
use crate::kinetics::{
    default_broadening, relax, transport_rhs, EquilibriumSpec, KernelOptions, RelaxOptions, TransportState,
};
use crate::liouville::algebra::{verify_algebra, AlgebraSweep};
use crate::liouville::{LiouvilleBasis, SuperState};
use crate::ode::OdeOptions;
use crate::renorm::{
    diagonalization_inconsistency_demo, equilibrium_renormalize, new_renorm_step, scaling_exponent, Bump,
    SpectralModel, NORMALIZATION_TOL,
};
use crate::report::{max_check, CheckResult};
use crate::schedule::{Curve, ThermalSchedule};
use crate::sparse::C64;
use crate::tfd::{
    bogoliubov, direct_delta, propagator_delta, xi_commutator_residual, xi_vacuum_check, KernelKind, TimeGrid,
    TwoTimeKernel,
};
use crate::unperturbed::{
    conserved_combination_residual, diagonal_state, evolve_lvn, geometric_state, HuForm, UnperturbedHamiltonian,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Threshold of the equilibrium on-shell residuals.
pub const ONSHELL_TOL: f64 = 1e-10;

/// Tables and checks of one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub kind: RunKind,
    pub tables: Vec<Table>,
    pub checks: Vec<CheckResult>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
}

pub fn run(kind: RunKind, cfg: &ScenarioConfig, seed: u64) -> Result<RunOutput> {
    if let Some(k) = cfg.kind {
        if k != kind {
            return Err(TfdError::Config(format!("config is for '{k}', not '{kind}'")));
        }
    }
    let (tables, checks) = match kind {
        RunKind::VerifyAlgebra => verify(cfg, seed)?,
        RunKind::Evolve => evolve(cfg)?,
        RunKind::Propagators => propagators(cfg)?,
        RunKind::Transport => transport(cfg)?,
        RunKind::RenormCompare => renorm_compare(cfg)?,
    };
    Ok(RunOutput { kind, tables, checks })
}

fn ode(cfg: &ScenarioConfig) -> OdeOptions {
    OdeOptions::with_tolerances(cfg.tolerances.rtol, cfg.tolerances.atol)
}

fn basis(cfg: &ScenarioConfig) -> Result<Arc<LiouvilleBasis>> {
    Ok(Arc::new(LiouvilleBasis::new(cfg.mode_specs())?))
}

fn cols(names: impl IntoIterator<Item = String>) -> Vec<String> {
    names.into_iter().collect()
}

fn checks_table(checks: &[CheckResult]) -> Result<Table> {
    let mut t = Table::new("checks", cols(["index", "residual", "threshold", "pass"].map(String::from)));
    for (i, c) in checks.iter().enumerate() {
        t.push(vec![i as f64, c.residual, c.threshold, if c.passed() { 1.0 } else { 0.0 }])?;
    }
    Ok(t)
}

fn verify(cfg: &ScenarioConfig, seed: u64) -> Result<(Vec<Table>, Vec<CheckResult>)> {
    let basis = basis(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sweep = AlgebraSweep {
        tol: cfg.algebra.tol,
        samples: cfg.algebra.samples,
        max_degree: cfg.algebra.max_degree,
    };
    let mut checks = verify_algebra(&basis, sweep, &mut rng)?;
    let sched = cfg.schedule();
    checks.extend(xi_vacuum_check(&basis, &sched, 0.0, cfg.algebra.tol)?);
    for j in 0..basis.n_modes() {
        let r = xi_commutator_residual(&basis, j, sched.n(j, 0.0))?;
        checks.push(CheckResult::below(format!("xi_commutator_mode{j}"), r, cfg.algebra.tol));
    }
    Ok((vec![checks_table(&checks)?], checks))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// p_{j,m}: marginal level probabilities of every mode.
fn marginals(state: &SuperState) -> Vec<Vec<f64>> {
    let basis = state.basis();
    let mut out: Vec<Vec<f64>> = basis.modes().iter().map(|m| vec![0.0; m.cutoff + 1]).collect();
    for (k, p) in state.diagonal().iter().enumerate() {
        for (j, &o) in basis.decode_fock(k).iter().enumerate() {
            out[j][o] += p.re;
        }
    }
    out
}

fn initial_state(cfg: &ScenarioConfig, basis: &Arc<LiouvilleBasis>, sched: &ThermalSchedule) -> Result<SuperState> {
    let n0: Vec<f64> = (0..basis.n_modes()).map(|j| sched.n(j, 0.0)).collect();
    let geo = geometric_state(basis, &n0)?.state;
    match cfg.evolve.initial {
        InitialState::Geometric => Ok(geo),
        InitialState::Perturbed => {
            let mut p: Vec<f64> = geo.diagonal().iter().map(|z| z.re).collect();
            for k in 0..p.len() {
                let occ = basis.decode_fock(k).to_vec();
                if occ[0] == 1 {
                    let mut lower = occ.clone();
                    lower[0] = 0;
                    let target = basis.encode_fock(&lower).expect("level 0 exists");
                    let moved = cfg.evolve.perturbation * p[k];
                    p[k] -= moved;
                    p[target] += moved;
                }
            }
            diagonal_state(basis, &p)
        }
    }
}

fn evolve(cfg: &ScenarioConfig) -> Result<(Vec<Table>, Vec<CheckResult>)> {
    let basis = basis(cfg)?;
    let sched = cfg.schedule();
    let k = basis.n_modes();
    let hu = UnperturbedHamiltonian::new(&basis, &sched, HuForm::Physical)?;
    let grid = linspace(0.0, cfg.evolve.t_end, cfg.evolve.outputs);
    let rho0 = initial_state(cfg, &basis, &sched)?;
    let opts = ode(cfg);
    let (traj, _) = evolve_lvn(&rho0, &hu, &grid, &opts)?;

    let mut names = vec!["t".to_string(), "trace".to_string()];
    for (j, m) in basis.modes().iter().enumerate() {
        names.push(format!("n_{}", j + 1));
        names.push(format!("n_schedule_{}", j + 1));
        names.push(format!("geometric_residual_{}", j + 1));
        names.extend((0..=m.cutoff).map(|l| format!("p_{}_{l}", j + 1)));
    }
    let mut table = Table::new("evolve", names);
    let mean = |p: &[f64]| -> f64 { p.iter().enumerate().map(|(m, x)| m as f64 * x).sum() };
    let mut trace_dev: f64 = 0.0;
    let mut geo_dev: f64 = 0.0;
    let mut track_dev: f64 = 0.0;
    let start = marginals(&traj[0]);
    for (&t, state) in grid.iter().zip(&traj) {
        let tr = state.trace();
        trace_dev = trace_dev.max((tr - C64::new(1.0, 0.0)).norm());
        let occ: Vec<f64> = (0..k).map(|j| sched.n(j, t)).collect();
        let reference = marginals(&geometric_state(&basis, &occ)?.state);
        let p = marginals(state);
        let mut row = vec![t, tr.re];
        for j in 0..k {
            let dev = p[j].iter().zip(&reference[j]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            geo_dev = geo_dev.max(dev);
            let drift = mean(&p[j]) - mean(&start[j]) - (occ[j] - sched.n(j, 0.0));
            track_dev = track_dev.max(drift.abs());
            row.extend([mean(&p[j]), occ[j], dev]);
            row.extend(&p[j]);
        }
        table.push(row)?;
    }

    let tol = cfg.tolerances.check;
    let mut checks = vec![CheckResult::below("trace_preserved", trace_dev, tol)];
    match cfg.evolve.initial {
        InitialState::Geometric => checks.push(CheckResult::below("geometric_form_preserved", geo_dev, cfg.evolve.geometric_tol)),
        InitialState::Perturbed => {
            checks.push(CheckResult::below("mean_number_tracks_schedule", track_dev, cfg.evolve.geometric_tol))
        }
    }
    let reports = conserved_combination_residual(&basis, &sched, &grid, &opts)?;
    let mut cons = Table::new(
        "conserved",
        cols(["mode", "conserve1", "conserve1_tilde", "conserve2", "conserve2_tilde", "left_vacuum"].map(String::from)),
    );
    let dissipative = cfg.modes.iter().any(|m| m.gamma.as_ref().is_some_and(|g| *g != Curve::constant(0.0)));
    for r in &reports {
        cons.push(vec![r.mode as f64, r.conserve1[0], r.conserve1[1], r.conserve2[0], r.conserve2[1], r.left_vacuum])?;
        let j = r.mode;
        checks.push(max_check(&format!("conserved_combination_1_mode{j}"), r.conserve1, tol));
        checks.push(max_check(&format!("conserved_combination_2_mode{j}"), r.conserve2, tol));
        // with damping the identity is not a left eigenvector, so the
        // residual is reported but not checked
        if !dissipative {
            checks.push(CheckResult::below(format!("left_vacuum_mode{j}"), r.left_vacuum, tol));
        }
    }
    Ok((vec![table, cons], checks))
}

fn mat_row(m: &crate::tfd::Mat2) -> [f64; 8] {
    [
        m[(0, 0)].re,
        m[(0, 0)].im,
        m[(0, 1)].re,
        m[(0, 1)].im,
        m[(1, 0)].re,
        m[(1, 0)].im,
        m[(1, 1)].re,
        m[(1, 1)].im,
    ]
}

/// d = B(t₁) Δ B⁻¹(t₂) for a Δ kernel of mode j.
fn to_xi_basis(delta: &TwoTimeKernel, sched: &ThermalSchedule, j: usize) -> Result<TwoTimeKernel> {
    let grid = delta.grid;
    let b: Vec<_> = grid
        .times()
        .iter()
        .map(|&t| bogoliubov(sched.modes[j].statistics, sched.n(j, t)))
        .collect::<Result<_>>()?;
    Ok(delta.map(KernelKind::D, |a, c, v| b[a].complex() * v * b[c].complex_inverse()))
}

/// max |d¹²|, |d²¹| off the diagonal; the entrywise equal-time merge of Δ
/// does not map to a diagonal d.
fn xi_off_diagonal(d: &TwoTimeKernel) -> f64 {
    let n = d.grid.len;
    (0..n)
        .flat_map(|a| (0..n).filter(move |&c| c != a).map(move |c| (a, c)))
        .map(|(a, c)| {
            let v = d.get(a, c);
            v[(0, 1)].norm().max(v[(1, 0)].norm())
        })
        .fold(0.0, f64::max)
}

/// max over entries forbidden by causality: d¹¹ for t₁ < t₂, d²² for t₁ > t₂.
fn causality_residual(d: &TwoTimeKernel) -> f64 {
    let n = d.grid.len;
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for c in 0..n {
            let v = d.get(a, c);
            if a < c {
                worst = worst.max(v[(0, 0)].norm());
            }
            if a > c {
                worst = worst.max(v[(1, 1)].norm());
            }
        }
    }
    worst
}

fn propagators(cfg: &ScenarioConfig) -> Result<(Vec<Table>, Vec<CheckResult>)> {
    let basis = basis(cfg)?;
    let sched = cfg.schedule();
    let p = &cfg.propagators;
    let j = p.mode;
    let grid = TimeGrid::new(p.start, p.step, p.points)?;
    let hu = UnperturbedHamiltonian::new(&basis, &sched, HuForm::Physical)?;
    let direct = direct_delta(&hu, j, grid, &ode(cfg))?;
    let sandwich = TwoTimeKernel::from_fn((j, j), KernelKind::Delta, grid, |a, b| propagator_delta(&sched, j, a, b));
    let mut names = vec!["t1".to_string(), "t2".to_string()];
    for src in ["sandwich", "direct"] {
        for e in ["11", "12", "21", "22"] {
            names.push(format!("{src}_{e}_re"));
            names.push(format!("{src}_{e}_im"));
        }
    }
    let mut table = Table::new("propagators", names);
    for a in 0..grid.len {
        for b in 0..grid.len {
            let mut row = vec![grid.time(a), grid.time(b)];
            row.extend(mat_row(sandwich.get(a, b)));
            row.extend(mat_row(direct.get(a, b)));
            table.push(row)?;
        }
    }
    let d_direct = to_xi_basis(&direct, &sched, j)?;
    let d_sandwich = to_xi_basis(&sandwich, &sched, j)?;
    let checks = vec![
        CheckResult::below("sandwich_vs_direct", sandwich.max_abs_diff(&direct)?, p.tol),
        CheckResult::below("direct_xi_off_diagonal", xi_off_diagonal(&d_direct), p.tol),
        CheckResult::below("direct_causality", causality_residual(&d_direct), p.tol),
        CheckResult::below("sandwich_causality", causality_residual(&d_sandwich), cfg.tolerances.check),
        CheckResult::below("direct_conjugation", d_direct.conjugation_residual(), p.tol),
    ];
    Ok((vec![table], checks))
}

fn initial_occupations(cfg: &ScenarioConfig) -> Vec<f64> {
    let sched = cfg.schedule();
    cfg.transport
        .n0
        .clone()
        .unwrap_or_else(|| (0..sched.n_modes()).map(|j| sched.n(j, 0.0)).collect())
}

fn transport(cfg: &ScenarioConfig) -> Result<(Vec<Table>, Vec<CheckResult>)> {
    let model = cfg.model()?;
    let omega = cfg.omega();
    let n0 = initial_occupations(cfg);
    let tc = &cfg.transport;
    let mut opts = RelaxOptions::new(tc.mode, tc.t_end, tc.dt);
    opts.gamma_delta = tc.broadening;
    opts.t_mem = tc.memory_window;
    opts.ode = ode(cfg);
    let tr = relax(&model, &n0, &omega, &opts)?;
    let k = omega.len();
    let mut names = vec!["t".to_string()];
    names.extend((1..=k).map(|j| format!("n_{j}")));
    names.extend((1..=k).map(|j| format!("ndot_{j}")));
    names.push("equilibrium_gap".into());
    let mut table = Table::new("transport", names);
    for i in 0..tr.times.len() {
        let mut row = vec![tr.times[i]];
        row.extend(&tr.n[i]);
        row.extend(&tr.ndot[i]);
        row.push(tr.equilibrium_gap[i]);
        table.push(row)?;
    }
    let number0: f64 = n0.iter().sum();
    let stats = cfg.statistics();
    let drift = tr.n.iter().map(|n| (n.iter().sum::<f64>() - number0).abs());
    let unphysical = tr
        .n
        .iter()
        .flat_map(|n| n.iter().zip(&stats))
        .map(|(&x, s)| if s.is_fermion() { (-x).max(x - 1.0).max(0.0) } else { (-x).max(0.0) })
        .fold(0.0, f64::max);
    let mut checks = vec![
        max_check("number_conserved", drift, cfg.tolerances.check),
        CheckResult::below("occupations_physical", unphysical, cfg.tolerances.check),
        CheckResult::below("final_equilibrium_gap", *tr.equilibrium_gap.last().expect("trajectory has a start"), tc.gap_tol),
    ];
    if let Some(tail) = tr.tail_estimate {
        checks.push(CheckResult::below("memory_truncation_estimate", tail, tc.gap_tol));
    }
    let mut eq = Table::new("equilibrium", cols(["beta", "mu"].map(String::from)));
    eq.push(vec![tr.equilibrium.beta, tr.equilibrium.mu])?;
    Ok((vec![table, eq], checks))
}

/// Slope of log|y| on log λ, NaN when undefined so the check fails.
fn exponent_or_nan(x: &[f64], y: &[f64]) -> f64 {
    scaling_exponent(x, y).unwrap_or(f64::NAN)
}

fn renorm_compare(cfg: &ScenarioConfig) -> Result<(Vec<Table>, Vec<CheckResult>)> {
    let rc = &cfg.renorm;
    let base = cfg.model()?;
    let omega0 = cfg.omega();
    let stats = cfg.statistics();
    let k = omega0.len();
    let width = cfg.transport.broadening.unwrap_or_else(|| default_broadening(&omega0));
    let lams = &rc.lambdas;
    let mut checks = Vec::new();

    // equilibrium sweep of the new conditions
    let mut names = vec!["lambda".to_string()];
    for j in 1..=k {
        names.extend([format!("omega_{j}"), format!("shift_{j}"), format!("re_s11_residual_{j}"), format!("s12_residual_{j}")]);
    }
    let mut sweep = Table::new("renorm_sweep", names);
    let mut shifts = vec![Vec::new(); k];
    let (mut re_worst, mut s12_worst) = (0.0f64, 0.0f64);
    for &lam in lams {
        let r = equilibrium_renormalize(&base.with_lambda(lam), &omega0, rc.beta, width)?;
        let mut row = vec![lam];
        for j in 0..k {
            let sh = r.omega[j] - omega0[j];
            shifts[j].push(sh);
            re_worst = re_worst.max(r.re_s11_residual[j]);
            s12_worst = s12_worst.max(r.s12_residual[j]);
            row.extend([r.omega[j], sh, r.re_s11_residual[j], r.s12_residual[j]]);
        }
        sweep.push(row)?;
    }
    checks.push(CheckResult::below("equilibrium_re_s11_residual", re_worst, ONSHELL_TOL));
    checks.push(CheckResult::below("equilibrium_s12_residual", s12_worst, ONSHELL_TOL));
    for (j, sh) in shifts.iter().enumerate() {
        let p = exponent_or_nan(lams, sh);
        checks.push(CheckResult::below(format!("shift_exponent_mode{j}"), (p - 2.0).abs(), rc.shift_exponent_tol));
    }

    // diagonalization condition on a pole plus continuum spectrum
    let [center, half_width, weight] = rc.satellite;
    let mut spectral = Table::new(
        "renorm_spectral",
        cols(["lambda", "omega", "n_h", "n_omega", "gap", "norm"].map(String::from)),
    );
    let mut gaps = Vec::new();
    let mut norm_worst: f64 = 0.0;
    for &lam in lams {
        let bump = Bump::new(center, half_width, weight * lam * lam)?;
        let model = SpectralModel::from_density(stats[0], rc.beta, omega0[0], bump, rc.kappa_points)?;
        let d = diagonalization_inconsistency_demo(&model, 0)?;
        gaps.push(d.gap);
        norm_worst = norm_worst.max((d.norm - 1.0).abs());
        spectral.push(vec![lam, d.omega, d.n_h, d.n_omega, d.gap, d.norm])?;
    }
    checks.push(CheckResult::below("spectral_normalization", norm_worst, NORMALIZATION_TOL));
    checks.push(CheckResult::above("diagonalization_gap_nonzero", gaps.iter().copied().fold(f64::INFINITY, f64::min), 0.0));
    let p = exponent_or_nan(lams, &gaps);
    checks.push(CheckResult::below("gap_exponent", (p - 2.0).abs(), rc.gap_exponent_tol));

    // time-domain conditions on a stationary thermal history
    let energies = rc.condition_energies.clone().unwrap_or_else(|| omega0.clone());
    let n_eq = EquilibriumSpec::new(rc.beta, 0.0)?.occupations(&stats, &energies);
    let steps = (rc.memory_window / rc.step).ceil() as usize;
    let times: Vec<f64> = (0..=steps).map(|i| i as f64 * rc.step).collect();
    let state = TransportState::from_schedule(&ThermalSchedule::constant(&stats, &n_eq, &energies), &times)?;
    let kopts = KernelOptions {
        damping: width,
        t_mem: rc.memory_window,
    };
    let model = base.with_lambda(*lams.last().expect("validated non-empty"));
    let res = new_renorm_step(&state, &model, &energies, &energies, &kopts)?;
    let rhs = transport_rhs(&state, &model, &kopts)?;
    let mut cond = Table::new(
        "renorm_condition",
        cols(["mode", "omega", "ndot", "s12_residual", "re_s11_residual", "fallback"].map(String::from)),
    );
    for r in &res {
        cond.push(vec![r.mode as f64, r.omega, r.ndot, r.s12_residual, r.re_s11_residual, r.fallback as u8 as f64])?;
    }
    checks.push(max_check("stationary_ndot", res.iter().map(|r| r.ndot.abs()), ONSHELL_TOL));
    checks.push(max_check("stationary_s12", res.iter().map(|r| r.s12_residual), ONSHELL_TOL));
    checks.push(max_check(
        "ndot_matches_transport",
        res.iter().map(|r| (r.ndot - rhs[r.mode]).abs()),
        ONSHELL_TOL,
    ));
    checks.push(CheckResult::below(
        "onshell_fallbacks",
        res.iter().filter(|r| r.fallback).count() as f64,
        0.5,
    ));
    Ok((vec![sweep, spectral, cond], checks))
}

