//! Full two-point functions G^{μν}(t₁,t₂) = −i⟨⟨I|T[a^μ(t₁) ā^ν(t₂)]|ρ₀⟩⟩ from
//! the exact engine, their ξ-basis form g = B G B⁻¹ and the Heisenberg
//! occupations read off the equal-time limits.

use super::exact::ExactEngine;
use super::model::InteractionModel;
use crate::error::{Result, TfdError};
use crate::liouville::{identity_superstate, LiouvilleBasis, SuperOperator, SuperState};
use crate::schedule::ThermalSchedule;
use crate::sparse::C64;
use crate::tfd::{
    equal_time_merge, mat2, propagator_d, propagator_delta, BogoliubovMatrix, Doublets, KernelKind, Mat2, TimeGrid,
    TwoTimeKernel,
};
use nalgebra::DMatrix;
use std::sync::Arc;

/// Propagators of one mode on the run grid.
#[derive(Debug, Clone)]
pub struct ModeGreen {
    pub mode: usize,
    pub big_g: TwoTimeKernel,
    pub small_g: TwoTimeKernel,
    pub delta: TwoTimeKernel,
    pub d: TwoTimeKernel,
    /// G(t, t⁻) and G(t, t⁺) at every grid time.
    pub equal_time: Vec<(Mat2, Mat2)>,
    /// Heisenberg occupation from G¹¹(t, t⁺) = −iσ n_H.
    pub n_h: Vec<f64>,
    /// 1 + σn_H − ⟨a a†⟩, nonzero only through boson truncation.
    pub commutator_defect: Vec<f64>,
    sigma: f64,
}

#[derive(Debug, Clone)]
pub struct GreenFunctionSet {
    pub grid: TimeGrid,
    pub modes: Vec<ModeGreen>,
}

fn b_at(schedule: &ThermalSchedule, j: usize, t: f64) -> BogoliubovMatrix {
    BogoliubovMatrix {
        n: schedule.n(j, t),
        sigma: schedule.sigma(j),
    }
}

/// ⟨⟨I|Y as a dim_h × dim_h array R with ⟨⟨I|Y|X⟩⟩ = Σ R_mn X_mn.
fn left_row(ident: &SuperState, y: &SuperOperator) -> DMatrix<C64> {
    let ket = y.bra_apply(ident);
    ket.to_operator().map(|z| z.conj())
}

fn to_mat(v: &[[C64; 2]; 2]) -> Mat2 {
    mat2(v[0][0], v[0][1], v[1][0], v[1][1])
}

impl ModeGreen {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl GreenFunctionSet {
    /// max |g²¹| over all modes and grid points.
    pub fn g21_residual(&self) -> f64 {
        self.modes.iter().map(|m| m.small_g.lower_left_residual()).fold(0.0, f64::max)
    }

    /// max |g¹²(t,t) − iσ(n_H − n)| with n from the schedule.
    pub fn diagonal_identity_residual(&self, schedule: &ThermalSchedule) -> f64 {
        self.identity_residual(schedule, false)
    }

    /// Same identity with the boson truncation term i n (c+1) P(n_j = c)
    /// added, which makes it exact on any truncated space.
    pub fn truncated_identity_residual(&self, schedule: &ThermalSchedule) -> f64 {
        self.identity_residual(schedule, true)
    }

    /// max commutator defect over modes and times.
    pub fn max_commutator_defect(&self) -> f64 {
        self.modes.iter().flat_map(|m| m.commutator_defect.iter().copied()).fold(0.0, f64::max)
    }

    fn identity_residual(&self, schedule: &ThermalSchedule, corrected: bool) -> f64 {
        let mut worst: f64 = 0.0;
        for m in &self.modes {
            for i in 0..self.grid.len {
                let t = self.grid.time(i);
                let n = schedule.n(m.mode, t);
                let edge = if corrected { n * m.commutator_defect[i] } else { 0.0 };
                let expect = C64::new(0.0, m.sigma * (m.n_h[i] - n) + edge);
                worst = worst.max((m.small_g.get(i, i)[(0, 1)] - expect).norm());
            }
        }
        worst
    }

    /// max |g¹¹(t₁,t₂) − g²²*(t₂,t₁)|.
    pub fn conjugation_residual(&self) -> f64 {
        self.modes.iter().map(|m| m.small_g.conjugation_residual()).fold(0.0, f64::max)
    }
}

/// Mode-diagonal propagators for every mode of the engine's basis.
///
/// The Hamiltonian and ρ₀ share enough U(1) phase symmetries that G is
/// diagonal in the mode index, so only the jj blocks are assembled.
pub fn full_green_from_engine(engine: &ExactEngine, schedule: &ThermalSchedule, grid: TimeGrid) -> Result<GreenFunctionSet> {
    let basis = engine.basis();
    if schedule.n_modes() != basis.n_modes() {
        return Err(TfdError::Config("schedule and basis disagree on mode count".into()));
    }
    schedule.validate(grid.start, grid.end())?;
    let ident = identity_superstate(basis);
    let n = grid.len;
    let phases: Vec<DMatrix<C64>> = (0..n).map(|k| engine.phase_matrix(k as f64 * grid.step)).collect();
    let rhos: Vec<SuperState> = (0..n)
        .map(|i| SuperState::from_operator(basis.clone(), &engine.rho_at(grid.time(i))))
        .collect::<Result<_>>()?;
    let e = engine.vectors();
    let row_eig = |r: DMatrix<C64>| e.transpose() * r * e.map(|z| z.conj());
    let minus_i = C64::new(0.0, -1.0);
    let zero = C64::new(0.0, 0.0);
    let mut modes = Vec::new();
    for j in 0..basis.n_modes() {
        let d = Doublets::new(basis, j)?;
        let rows_a: Vec<DMatrix<C64>> = d.a.iter().map(|op| row_eig(left_row(&ident, op))).collect();
        let rows_b: Vec<DMatrix<C64>> = d.abar.iter().map(|op| row_eig(left_row(&ident, op))).collect();
        let mut lower = vec![[[zero; 2]; 2]; n * n];
        let mut upper = vec![[[zero; 2]; 2]; n * n];
        for s in 0..n {
            for nu in 0..2 {
                let x = engine.to_eigenbasis(&d.abar[nu].apply(&rhos[s]).to_operator());
                for a in s..n {
                    let xp = x.component_mul(&phases[a - s]);
                    for mu in 0..2 {
                        lower[a * n + s][mu][nu] = minus_i * rows_a[mu].component_mul(&xp).sum();
                    }
                }
            }
            for mu in 0..2 {
                let x = engine.to_eigenbasis(&d.a[mu].apply(&rhos[s]).to_operator());
                for b in s..n {
                    let xp = x.component_mul(&phases[b - s]);
                    for nu in 0..2 {
                        upper[s * n + b][mu][nu] = minus_i * d.sigma * rows_b[nu].component_mul(&xp).sum();
                    }
                }
            }
        }
        let mut big_g = TwoTimeKernel::zeros((j, j), KernelKind::FullG, grid);
        let mut small_g = TwoTimeKernel::zeros((j, j), KernelKind::SmallG, grid);
        let mut equal_time = Vec::with_capacity(n);
        let mut n_h = Vec::with_capacity(n);
        let commutator_defect = (0..n).map(|i| engine.commutator_defect(j, grid.time(i))).collect();
        for a in 0..n {
            for b in 0..n {
                let (t1, t2) = (grid.time(a), grid.time(b));
                let sandwich = |g: &Mat2| b_at(schedule, j, t1).complex() * g * b_at(schedule, j, t2).complex_inverse();
                let (gv, sg) = match a.cmp(&b) {
                    std::cmp::Ordering::Greater => {
                        let g = to_mat(&lower[a * n + b]);
                        (g, sandwich(&g))
                    }
                    std::cmp::Ordering::Less => {
                        let g = to_mat(&upper[a * n + b]);
                        (g, sandwich(&g))
                    }
                    std::cmp::Ordering::Equal => {
                        let lo = to_mat(&lower[a * n + b]);
                        let up = to_mat(&upper[a * n + b]);
                        equal_time.push((lo, up));
                        n_h.push((C64::new(0.0, d.sigma) * up[(0, 0)]).re);
                        (equal_time_merge(&lo, &up), equal_time_merge(&sandwich(&lo), &sandwich(&up)))
                    }
                };
                big_g.set(a, b, gv);
                small_g.set(a, b, sg);
            }
        }
        modes.push(ModeGreen {
            mode: j,
            delta: TwoTimeKernel::from_fn((j, j), KernelKind::Delta, grid, |t1, t2| propagator_delta(schedule, j, t1, t2)),
            d: TwoTimeKernel::from_fn((j, j), KernelKind::D, grid, |t1, t2| propagator_d(schedule, j, t1, t2)),
            big_g,
            small_g,
            equal_time,
            n_h,
            commutator_defect,
            sigma: d.sigma,
        });
    }
    Ok(GreenFunctionSet { grid, modes })
}

/// Exact propagators starting from the geometric state at n(t₀), t₀ = grid start.
pub fn full_green(
    basis: &Arc<LiouvilleBasis>,
    model: &InteractionModel,
    schedule: &ThermalSchedule,
    grid: TimeGrid,
) -> Result<GreenFunctionSet> {
    let n0: Vec<f64> = (0..basis.n_modes()).map(|j| schedule.n(j, grid.start)).collect();
    let engine = ExactEngine::from_occupations(basis, model, &n0, grid.start)?;
    full_green_from_engine(&engine, schedule, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::{ModeSpec, Statistics};

    fn kerr_basis() -> Arc<LiouvilleBasis> {
        Arc::new(LiouvilleBasis::new(vec![ModeSpec::boson(1.0, 12)]).unwrap())
    }

    fn kerr(lambda: f64) -> InteractionModel {
        InteractionModel::new(lambda, vec![Statistics::Boson], &[super::super::model::Channel::new(0, 0, 0, 0, 1.0)]).unwrap()
    }

    #[test]
    fn free_theory_equals_delta() {
        let basis = kerr_basis();
        let sched = ThermalSchedule::constant(&[Statistics::Boson], &[0.1], &[1.0]);
        let grid = TimeGrid::new(0.0, 0.2, 8).unwrap();
        let set = full_green(&basis, &kerr(0.0), &sched, grid).unwrap();
        let m = &set.modes[0];
        assert!(m.big_g.max_abs_diff(&m.delta).unwrap() < 1e-7);
        assert!(m.small_g.max_abs_diff(&m.d).unwrap() < 1e-7);
    }

    #[test]
    fn triangularity_and_diagonal_identity() {
        let basis = kerr_basis();
        let sched = ThermalSchedule::constant(&[Statistics::Boson], &[0.3], &[1.0]);
        let grid = TimeGrid::new(0.0, 0.25, 9).unwrap();
        let set = full_green(&basis, &kerr(0.1), &sched, grid).unwrap();
        assert!(set.g21_residual() < 1e-10, "{}", set.g21_residual());
        assert!(set.truncated_identity_residual(&sched) < 1e-10);
        assert!(set.conjugation_residual() < 1e-10);
        // the uncorrected identity is off by exactly the truncation term
        let gap = set.diagonal_identity_residual(&sched);
        assert!(gap > 1e-9 && gap < 0.3 * set.max_commutator_defect() * 1.0001);
    }

    #[test]
    fn n_h_matches_engine_and_fermions_work() {
        let basis = Arc::new(LiouvilleBasis::new(vec![ModeSpec::fermion(1.0), ModeSpec::fermion(1.5)]).unwrap());
        let model = InteractionModel::new(0.4, vec![Statistics::Fermion; 2], &[super::super::model::Channel::new(0, 1, 1, 0, 1.0)])
            .unwrap();
        let sched = ThermalSchedule::constant(&[Statistics::Fermion; 2], &[0.3, 0.6], &[1.0, 1.5]);
        let grid = TimeGrid::new(0.0, 0.3, 6).unwrap();
        let engine = ExactEngine::from_occupations(&basis, &model, &[0.3, 0.6], 0.0).unwrap();
        let set = full_green_from_engine(&engine, &sched, grid).unwrap();
        for m in &set.modes {
            for i in 0..grid.len {
                assert!((m.n_h[i] - engine.occupation(m.mode, grid.time(i))).abs() < 1e-12);
                // G(t,t⁻) carries 1 + σ n_H
                let lo = m.equal_time[i].0[(0, 0)];
                assert!((lo - C64::new(0.0, -(1.0 - m.n_h[i]))).norm() < 1e-12);
            }
        }
        assert!(set.g21_residual() < 1e-12);
        assert!(set.diagonal_identity_residual(&sched) < 1e-12);
    }
}
