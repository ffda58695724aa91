//! Direct evaluation of Δ^{μν}(t₁,t₂) = −i⟨⟨I|T[a^μ(t₁) ā^ν(t₂)]|ρ₀⟩⟩ on the
//! truncated space by propagating with Ĥ_u.

use super::bogoliubov::mat2;
use super::kernel::{KernelKind, TimeGrid, TwoTimeKernel};
use super::propagator::equal_time_merge;
use super::xi::Doublets;
use crate::error::Result;
use crate::liouville::{identity_superstate, SuperOperator, SuperState};
use crate::ode::OdeOptions;
use crate::sparse::C64;
use crate::unperturbed::{evolve_lvn, geometric_state, UnperturbedHamiltonian};

fn propagate(hu: &UnperturbedHamiltonian, x: SuperState, times: &[f64], opts: &OdeOptions) -> Result<Vec<SuperState>> {
    if times.len() == 1 {
        return Ok(vec![x]);
    }
    Ok(evolve_lvn(&x, hu, times, opts)?.0)
}

/// Δ for mode j on a uniform grid. ρ₀(t) is the geometric state at n(t), which
/// is what Ĥ_u evolution of a geometric start produces.
pub fn direct_delta(hu: &UnperturbedHamiltonian, j: usize, grid: TimeGrid, opts: &OdeOptions) -> Result<TwoTimeKernel> {
    let basis = hu.basis();
    let sched = hu.schedule();
    let d = Doublets::new(basis, j)?;
    let ident = identity_superstate(basis);
    let times = grid.times();
    let n = times.len();
    let rho_at = |t: f64| -> Result<SuperState> {
        let occ: Vec<f64> = (0..basis.n_modes()).map(|k| sched.n(k, t)).collect();
        Ok(geometric_state(basis, &occ)?.state)
    };
    let contract = |op: &SuperOperator, s: &SuperState| -> Result<C64> { ident.inner(&op.apply(s)) };
    let minus_i = C64::new(0.0, -1.0);
    let zero = C64::new(0.0, 0.0);
    // lower[a][b] for a ≥ b, upper[a][b] for a ≤ b
    let mut lower = vec![vec![[[zero; 2]; 2]; n]; n];
    let mut upper = vec![vec![[[zero; 2]; 2]; n]; n];
    for b in 0..n {
        let rho = rho_at(times[b])?;
        for nu in 0..2 {
            let traj = propagate(hu, d.abar[nu].apply(&rho), &times[b..], opts)?;
            for (off, s) in traj.iter().enumerate() {
                for mu in 0..2 {
                    lower[b + off][b][mu][nu] = minus_i * contract(&d.a[mu], s)?;
                }
            }
        }
    }
    let pref = minus_i * d.sigma;
    for a in 0..n {
        let rho = rho_at(times[a])?;
        for mu in 0..2 {
            let traj = propagate(hu, d.a[mu].apply(&rho), &times[a..], opts)?;
            for (off, s) in traj.iter().enumerate() {
                for nu in 0..2 {
                    upper[a][a + off][mu][nu] = pref * contract(&d.abar[nu], s)?;
                }
            }
        }
    }
    let mut k = TwoTimeKernel::zeros((j, j), KernelKind::Delta, grid);
    let m = |v: &[[C64; 2]; 2]| mat2(v[0][0], v[0][1], v[1][0], v[1][1]);
    for a in 0..n {
        for b in 0..n {
            let v = match a.cmp(&b) {
                std::cmp::Ordering::Greater => m(&lower[a][b]),
                std::cmp::Ordering::Less => m(&upper[a][b]),
                std::cmp::Ordering::Equal => equal_time_merge(&m(&lower[a][b]), &m(&upper[a][b])),
            };
            k.set(a, b, v);
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::{LiouvilleBasis, ModeSpec, Statistics};
    use crate::schedule::{Curve, ModeSchedule, ThermalSchedule};
    use crate::tfd::propagator::propagator_delta;
    use crate::unperturbed::HuForm;
    use std::sync::Arc;

    fn check(basis: LiouvilleBasis, sched: ThermalSchedule, tol: f64) {
        let basis = Arc::new(basis);
        let hu = UnperturbedHamiltonian::new(&basis, &sched, HuForm::Physical).unwrap();
        let grid = TimeGrid::new(0.0, 0.25, 5).unwrap();
        let direct = direct_delta(&hu, 0, grid, &OdeOptions::with_tolerances(1e-12, 1e-14)).unwrap();
        let formula = TwoTimeKernel::from_fn((0, 0), KernelKind::Delta, grid, |a, b| propagator_delta(&sched, 0, a, b));
        let err = direct.max_abs_diff(&formula).unwrap();
        assert!(err < tol, "{err}");
    }

    #[test]
    fn fermion_matches_sandwich() {
        let sched = ThermalSchedule::new(vec![ModeSchedule::new(
            Statistics::Fermion,
            Curve::Linear { value: 0.3, slope: 0.2 },
            Curve::Linear { value: 1.0, slope: 0.5 },
        )]);
        check(LiouvilleBasis::new(vec![ModeSpec::fermion(1.0)]).unwrap(), sched, 1e-9);
    }

    #[test]
    fn boson_matches_sandwich() {
        let sched = ThermalSchedule::new(vec![ModeSchedule::new(
            Statistics::Boson,
            Curve::Exponential {
                asymptote: 1.0,
                amplitude: -0.5,
                rate: 1.0,
            },
            Curve::constant(1.0),
        )]);
        check(LiouvilleBasis::new(vec![ModeSpec::boson(1.0, 30)]).unwrap(), sched, 1e-6);
    }
}
