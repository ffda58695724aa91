//! Heisenberg-picture α-frame operators of the unperturbed dynamics.
//!
//! α_k(t) = Σ_l c_kl(t) O_l with O = (ǎ, ǎ†, ã, ã†) of one mode, so the
//! operator equations reduce to a 4×4 linear system for c(t).

use super::zeta::ZetaParams;
use crate::error::Result;
use crate::liouville::{identity_superstate, LiouvilleBasis, ModeGenerators, SuperOperator, SuperState};
use crate::ode::{solve, OdeOptions};
use crate::schedule::ThermalSchedule;
use crate::sparse::C64;
use std::sync::Arc;

pub const A_CHECK: usize = 0;
pub const AD_CHECK: usize = 1;
pub const A_TILDE: usize = 2;
pub const AD_TILDE: usize = 3;

type Mat4 = [[C64; 4]; 4];

fn sqrt_sigma(sigma: f64) -> C64 {
    if sigma > 0.0 {
        C64::new(1.0, 0.0)
    } else {
        C64::new(0.0, 1.0)
    }
}

/// Generator C(t) with d/dt α_k = Σ_l C_kl α_l.
pub fn alpha_generator(z: &ZetaParams, sigma: f64) -> Mat4 {
    let zero = C64::new(0.0, 0.0);
    let r = |x: f64| C64::new(x, 0.0);
    let s = sqrt_sigma(sigma);
    let ss = s * sigma;
    let mut c = [[zero; 4]; 4];
    c[A_CHECK][A_CHECK] = r(z.zeta3);
    c[A_CHECK][AD_TILDE] = ss * z.zeta2;
    c[AD_CHECK][AD_CHECK] = r(-z.zeta3);
    c[AD_CHECK][A_TILDE] = -s * z.zeta1;
    c[A_TILDE][A_TILDE] = r(z.zeta3);
    c[A_TILDE][AD_CHECK] = s * z.zeta2;
    c[AD_TILDE][AD_TILDE] = r(-z.zeta3);
    c[AD_TILDE][A_CHECK] = -ss * z.zeta1;
    c
}

/// Ĥ_αu in the Schrödinger operator basis for one mode.
pub fn alpha_hamiltonian(g: &ModeGenerators, z: &ZetaParams, sigma: f64) -> SuperOperator {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let ss = sqrt_sigma(sigma) * sigma;
    let basis = g.a_check.basis().clone();
    SuperOperator::identity(basis)
        .scale(i * z.zeta5)
        .lin_comb(one, &g.a_check.mul(&g.a_tilde), i * ss * z.zeta1)
        .lin_comb(one, &g.ad_check.mul(&g.ad_tilde), i * ss * z.zeta2)
        .lin_comb(one, &g.ad_check.mul(&g.a_check), i * z.zeta3)
        .lin_comb(one, &g.ad_tilde.mul(&g.a_tilde), i * z.zeta3)
}

fn ops(g: &ModeGenerators) -> [&SuperOperator; 4] {
    [&g.a_check, &g.ad_check, &g.a_tilde, &g.ad_tilde]
}

fn combine(g: &ModeGenerators, coeffs: &[C64; 4]) -> SuperOperator {
    let one = C64::new(1.0, 0.0);
    let mut acc = SuperOperator::zero(g.a_check.basis().clone());
    for (c, o) in coeffs.iter().zip(ops(g)) {
        acc = acc.lin_comb(one, o, *c);
    }
    acc
}

/// Max interior deviation between −i[O_k, Ĥ_αu] and Σ_l C_kl O_l.
pub fn generator_consistency(basis: &Arc<LiouvilleBasis>, j: usize, z: &ZetaParams) -> Result<f64> {
    let g = ModeGenerators::new(basis, j)?;
    let sigma = basis.modes()[j].sigma();
    let h = alpha_hamiltonian(&g, z, sigma);
    let c = alpha_generator(z, sigma);
    let mut worst: f64 = 0.0;
    for (k, o) in ops(&g).iter().enumerate() {
        let lhs = o.mul(&h).sub(&h.mul(o)).scale(C64::new(0.0, -1.0));
        let rhs = combine(&g, &c[k]);
        worst = worst.max(lhs.sub(&rhs).max_abs_interior(2));
    }
    Ok(worst)
}

/// Residuals of the α-frame conservation laws for one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservedReport {
    pub mode: usize,
    /// max ‖d/dt (α̌ − √σ α̃†)‖ and of its tilde partner
    pub conserve1: [f64; 2],
    /// max ‖d/dt ((1+σn)α̌ − σ√σ n α̃†)‖ and of its tilde partner
    pub conserve2: [f64; 2],
    /// max ‖⟨⟨I| α̇_k‖ over the four operators
    pub left_vacuum: f64,
}

/// Integrates c(t) for mode j on the given times (reference c = 1 at times[0]).
pub fn propagate_coefficients(schedule: &ThermalSchedule, j: usize, times: &[f64], opts: &OdeOptions) -> Result<Vec<Mat4>> {
    let sigma = schedule.sigma(j);
    let mut y0 = vec![C64::new(0.0, 0.0); 16];
    for k in 0..4 {
        y0[k * 4 + k] = C64::new(1.0, 0.0);
    }
    let mut err = None;
    let ys = solve(
        |t, y: &[C64], dy: &mut [C64]| {
            let z = match ZetaParams::solve(sigma, schedule.n(j, t), schedule.ndot(j, t), schedule.gamma(j, t), schedule.omega(j, t)) {
                Ok(z) => z,
                Err(e) => {
                    err.get_or_insert(e);
                    dy.iter_mut().for_each(|v| *v = C64::new(f64::NAN, 0.0));
                    return;
                }
            };
            let c = alpha_generator(&z, sigma);
            for r in 0..4 {
                for col in 0..4 {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..4 {
                        acc += c[r][k] * y[k * 4 + col];
                    }
                    dy[r * 4 + col] = acc;
                }
            }
        },
        times,
        &y0,
        opts,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(ys?
        .into_iter()
        .map(|y| {
            let mut m = [[C64::new(0.0, 0.0); 4]; 4];
            for r in 0..4 {
                for c in 0..4 {
                    m[r][c] = y[r * 4 + c];
                }
            }
            m
        })
        .collect())
}

/// Finite-difference check of the conserved α-frame combinations along `grid`.
pub fn conserved_combination_residual(
    basis: &Arc<LiouvilleBasis>,
    schedule: &ThermalSchedule,
    grid: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<ConservedReport>> {
    let h = 1e-3;
    let offsets = [-2.0, -1.0, 1.0, 2.0];
    let weights = [1.0, -8.0, 8.0, -1.0];
    let mut times = vec![grid[0] - 2.0 * h];
    for &t in grid {
        for &o in &offsets {
            times.push(t + o * h);
        }
        times.push(t);
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    let index = |t: f64| times.iter().position(|&x| x == t).expect("stencil time present");
    let ident = identity_superstate(basis);
    let mut reports = Vec::new();
    for j in 0..basis.n_modes() {
        let g = ModeGenerators::new(basis, j)?;
        let sigma = schedule.sigma(j);
        let s = sqrt_sigma(sigma);
        let coeffs = propagate_coefficients(schedule, j, &times, opts)?;
        let row = |k: usize, c: &Mat4| c[k];
        let one = C64::new(1.0, 0.0);
        // Each combination as a function of (time, coefficient matrix).
        let combos: [Box<dyn Fn(f64, &Mat4) -> [C64; 4]>; 4] = [
            Box::new(|_, c| lin(one, row(A_CHECK, c), -s, row(AD_TILDE, c))),
            Box::new(|_, c| lin(one, row(A_TILDE, c), -sigma * s, row(AD_CHECK, c))),
            Box::new(|t, c| {
                let n = schedule.n(j, t);
                lin(C64::new(1.0 + sigma * n, 0.0), row(A_CHECK, c), -sigma * s * n, row(AD_TILDE, c))
            }),
            Box::new(|t, c| {
                let n = schedule.n(j, t);
                lin(C64::new(1.0 + sigma * n, 0.0), row(A_TILDE, c), -s * n, row(AD_CHECK, c))
            }),
        ];
        let mut worst = [0.0f64; 4];
        for &t in grid {
            for (w, combo) in worst.iter_mut().zip(&combos) {
                let mut d = [C64::new(0.0, 0.0); 4];
                for (&o, &wt) in offsets.iter().zip(&weights) {
                    let tt = t + o * h;
                    let v = combo(tt, &coeffs[index(tt)]);
                    for l in 0..4 {
                        d[l] += v[l] * (wt / (12.0 * h));
                    }
                }
                *w = w.max(combine(&g, &d).max_abs_interior(1));
            }
        }
        let left_vacuum = left_vacuum_residual(basis, &ident, &g, schedule, j, grid, &coeffs, &times)?;
        reports.push(ConservedReport {
            mode: j,
            conserve1: [worst[0], worst[1]],
            conserve2: [worst[2], worst[3]],
            left_vacuum,
        });
    }
    Ok(reports)
}

fn lin(a: C64, x: [C64; 4], b: C64, y: [C64; 4]) -> [C64; 4] {
    let mut out = [C64::new(0.0, 0.0); 4];
    for l in 0..4 {
        out[l] = a * x[l] + b * y[l];
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn left_vacuum_residual(
    basis: &Arc<LiouvilleBasis>,
    ident: &SuperState,
    g: &ModeGenerators,
    schedule: &ThermalSchedule,
    j: usize,
    grid: &[f64],
    coeffs: &[Mat4],
    times: &[f64],
) -> Result<f64> {
    let sigma = schedule.sigma(j);
    let rows: Vec<SuperState> = ops(g).iter().map(|o| o.bra_apply(ident)).collect();
    let mut worst: f64 = 0.0;
    for &t in grid {
        let k = times.iter().position(|&x| x == t).expect("grid time present");
        let z = ZetaParams::solve(sigma, schedule.n(j, t), schedule.ndot(j, t), schedule.gamma(j, t), schedule.omega(j, t))?;
        let gen = alpha_generator(&z, sigma);
        let c = &coeffs[k];
        for r in 0..4 {
            // d/dt α_r = Σ_m C_rm α_m = Σ_l (C c)_rl O_l
            let mut amps = vec![C64::new(0.0, 0.0); basis.dim_l()];
            for l in 0..4 {
                let mut w = C64::new(0.0, 0.0);
                for m in 0..4 {
                    w += gen[r][m] * c[m][l];
                }
                for (a, b) in amps.iter_mut().zip(rows[l].amps()) {
                    *a += w.conj() * b;
                }
            }
            let v = SuperState::new(basis.clone(), amps)?;
            worst = worst.max(v.max_abs_interior(1));
        }
    }
    Ok(worst)
}
