//! ξ quasiparticle operators, thermal-vacuum conditions and the doublet form
//! of the unperturbed super-Hamiltonian.

use super::bogoliubov::{mat2, Mat2};
use crate::error::{Result, TfdError};
use crate::liouville::{identity_superstate, LiouvilleBasis, ModeGenerators, SuperOperator};
use crate::report::CheckResult;
use crate::schedule::ThermalSchedule;
use crate::sparse::C64;
use crate::unperturbed::geometric_state;
use std::sync::Arc;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub(crate) fn sqrt_sigma(sigma: f64) -> C64 {
    if sigma > 0.0 {
        c(1.0)
    } else {
        C64::new(0.0, 1.0)
    }
}

/// Doublets a = (ǎ, √σ ã†) and ā = (ǎ†, −√σ ã) of mode j.
pub struct Doublets {
    pub a: [SuperOperator; 2],
    pub abar: [SuperOperator; 2],
    pub sigma: f64,
}

impl Doublets {
    pub fn new(basis: &Arc<LiouvilleBasis>, j: usize) -> Result<Self> {
        let g = ModeGenerators::new(basis, j)?;
        let sigma = basis.modes()[j].sigma();
        let s = sqrt_sigma(sigma);
        Ok(Doublets {
            a: [g.a_check.clone(), g.ad_tilde.scale(s)],
            abar: [g.ad_check.clone(), g.a_tilde.scale(-s)],
            sigma,
        })
    }
}

/// ξ = B a and ξ̄ = ā B⁻¹ at occupation n.
pub struct XiOperators {
    pub xi: [SuperOperator; 2],
    pub xibar: [SuperOperator; 2],
}

pub fn xi_operators(basis: &Arc<LiouvilleBasis>, j: usize, n: f64) -> Result<XiOperators> {
    let d = Doublets::new(basis, j)?;
    let sn = d.sigma * n;
    let xi = [
        d.a[0].lin_comb(c(1.0 + sn), &d.a[1], c(-sn)),
        d.a[0].lin_comb(c(-1.0), &d.a[1], c(1.0)),
    ];
    let xibar = [
        d.abar[0].lin_comb(c(1.0), &d.abar[1], c(1.0)),
        d.abar[0].lin_comb(c(sn), &d.abar[1], c(1.0 + sn)),
    ];
    Ok(XiOperators { xi, xibar })
}

/// max over μ,ν of the interior deviation of [ξ^μ, ξ̄^ν]_σ from δ^{μν}.
pub fn xi_commutator_residual(basis: &Arc<LiouvilleBasis>, j: usize, n: f64) -> Result<f64> {
    let x = xi_operators(basis, j, n)?;
    let id = SuperOperator::identity(basis.clone());
    let mut worst: f64 = 0.0;
    for mu in 0..2 {
        for nu in 0..2 {
            let mut r = x.xi[mu].graded_commutator(&x.xibar[nu]);
            if mu == nu {
                r = r.sub(&id);
            }
            worst = worst.max(r.max_abs_interior(2));
        }
    }
    Ok(worst)
}

/// Thermal-vacuum conditions at time t for every mode, with ρ₀ geometric at n(t):
/// ξ¹|ρ₀⟩⟩ = 0, ξ̄²|ρ₀⟩⟩ = 0, ⟨⟨I|ξ² = 0 and ⟨⟨I|ξ̄¹ = 0.
pub fn xi_vacuum_check(
    basis: &Arc<LiouvilleBasis>,
    schedule: &ThermalSchedule,
    t: f64,
    threshold: f64,
) -> Result<Vec<CheckResult>> {
    if schedule.n_modes() != basis.n_modes() {
        return Err(TfdError::Config("schedule and basis disagree on mode count".into()));
    }
    let n: Vec<f64> = (0..basis.n_modes()).map(|j| schedule.n(j, t)).collect();
    let rho = geometric_state(basis, &n)?.state;
    let ident = identity_superstate(basis);
    let mut out = Vec::new();
    for (j, &nj) in n.iter().enumerate() {
        let x = xi_operators(basis, j, nj)?;
        let ket = |op: &SuperOperator| op.apply(&rho).max_abs_interior(1);
        let bra = |op: &SuperOperator| op.bra_apply(&ident).max_abs_interior(1);
        out.push(CheckResult::below(format!("xi1_annihilates_rho_mode{j}"), ket(&x.xi[0]), threshold));
        out.push(CheckResult::below(format!("xibar2_annihilates_rho_mode{j}"), ket(&x.xibar[1]), threshold));
        out.push(CheckResult::below(format!("identity_annihilated_by_xi2_mode{j}"), bra(&x.xi[1]), threshold));
        out.push(CheckResult::below(format!("identity_annihilated_by_xibar1_mode{j}"), bra(&x.xibar[0]), threshold));
    }
    Ok(out)
}

/// T₀ = [[1, −1], [1, −1]].
pub fn t0() -> Mat2 {
    mat2(c(1.0), c(-1.0), c(1.0), c(-1.0))
}

/// Ĥ_u = Σ_j [ω_j (ā a + σ) + ā K_j a] with K_j = −iσṅ_j T₀.
#[derive(Debug, Clone)]
pub struct DoubletHu {
    pub omega: Vec<f64>,
    pub counterterm: Vec<Mat2>,
}

pub fn doublet_hu(schedule: &ThermalSchedule, t: f64) -> DoubletHu {
    let n = schedule.n_modes();
    DoubletHu {
        omega: (0..n).map(|j| schedule.omega(j, t)).collect(),
        counterterm: (0..n)
            .map(|j| t0() * C64::new(0.0, -schedule.sigma(j) * schedule.ndot(j, t)))
            .collect(),
    }
}

impl DoubletHu {
    /// Contracts the doublet table back into a superoperator.
    pub fn to_superoperator(&self, basis: &Arc<LiouvilleBasis>) -> Result<SuperOperator> {
        if self.omega.len() != basis.n_modes() {
            return Err(TfdError::Config("doublet table and basis disagree on mode count".into()));
        }
        let one = c(1.0);
        let mut h = SuperOperator::zero(basis.clone());
        for (j, (w, k)) in self.omega.iter().zip(&self.counterterm).enumerate() {
            let d = Doublets::new(basis, j)?;
            h = h.add(&SuperOperator::identity(basis.clone()).scale(c(w * d.sigma)));
            for mu in 0..2 {
                for nu in 0..2 {
                    let coeff = k[(mu, nu)] + if mu == nu { c(*w) } else { c(0.0) };
                    if coeff != c(0.0) {
                        h = h.lin_comb(one, &d.abar[mu].mul(&d.a[nu]), coeff);
                    }
                }
            }
        }
        Ok(h)
    }
}
