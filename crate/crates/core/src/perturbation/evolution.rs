//! Interaction-picture evolution superoperator V̂(t,t₀) = Û₀⁻¹(t,t₀) Û(t,t₀).
//!
//! Û₀, Ŵ = Û₀⁻¹ and V̂ are integrated jointly as dense matrices:
//! dÛ₀/dt = −iĤ_u Û₀, dŴ/dt = iŴĤ_u, dV̂/dt = −iŴĤ_IÛ₀V̂ with Ĥ_I = Ĥ − Ĥ_u.

use super::model::InteractionModel;
use crate::error::{Result, TfdError};
use crate::liouville::{identity_superstate, total_super_hamiltonian, LiouvilleBasis};
use crate::ode::{solve, OdeOptions};
use crate::schedule::ThermalSchedule;
use crate::sparse::{max_modulus, CsrMatrix, C64};
use crate::unperturbed::{HuForm, UnperturbedHamiltonian};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::cell::RefCell;
use std::sync::Arc;

/// Largest Liouville dimension accepted by the dense integrator.
pub const MAX_DENSE_DIM: usize = 1024;

#[derive(Debug, Clone)]
pub struct VEvolution {
    pub times: Vec<f64>,
    pub v: Vec<DMatrix<C64>>,
    /// max over times of |⟨⟨I|V̂ − ⟨⟨I||
    pub left_invariance: f64,
    /// max over times of |V̂ − Û₀⁻¹ e^{−iĤ(t−t₀)}|
    pub factorization: f64,
    /// spectral norms ‖V̂(t)‖
    pub norms: Vec<f64>,
    /// exp ∫ ‖Ŵ Ĥ_I Û₀‖ by trapezoid over the output times
    pub norm_bounds: Vec<f64>,
}

/// Sparse × dense product.
fn sparse_dense(a: &CsrMatrix, b: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(a.rows(), b.ncols());
    for c in 0..b.ncols() {
        let col = b.column(c);
        let mut dst = out.column_mut(c);
        for r in 0..a.rows() {
            let mut acc = C64::new(0.0, 0.0);
            for (k, v) in a.row(r) {
                acc += v * col[k];
            }
            dst[r] = acc;
        }
    }
    out
}

/// Dense × sparse product.
fn dense_sparse(b: &DMatrix<C64>, a: &CsrMatrix) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(b.nrows(), a.cols());
    for k in 0..a.rows() {
        for (c, v) in a.row(k) {
            let src = b.column(k) * v;
            let mut dst = out.column_mut(c);
            dst += src;
        }
    }
    out
}

fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

pub fn evolve_v(
    basis: &Arc<LiouvilleBasis>,
    model: &InteractionModel,
    schedule: &ThermalSchedule,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<VEvolution> {
    let dl = basis.dim_l();
    if dl > MAX_DENSE_DIM {
        return Err(TfdError::Config(format!(
            "evolve_v integrates dense superoperators; dim_l {dl} exceeds {MAX_DENSE_DIM}"
        )));
    }
    if times.len() < 2 {
        return Err(TfdError::Config("evolve_v needs at least two times".into()));
    }
    schedule.validate(times[0], times[times.len() - 1])?;
    let hu = UnperturbedHamiltonian::new(basis, schedule, HuForm::Physical)?;
    let h_sparse = total_super_hamiltonian(&model.fock_hamiltonian(basis)?, basis, 1e-12)?.matrix().clone();
    let h_full = h_sparse.to_dense();
    let hu_at = |t: f64| -> Result<CsrMatrix> { Ok(hu.at(t)?.matrix().clone()) };
    let n2 = dl * dl;
    let mut y0 = vec![C64::new(0.0, 0.0); 3 * n2];
    for block in 0..3 {
        for k in 0..dl {
            y0[block * n2 + k * dl + k] = C64::new(1.0, 0.0);
        }
    }
    // column-major blocks, matching nalgebra storage
    let unpack = |y: &[C64], block: usize| DMatrix::from_column_slice(dl, dl, &y[block * n2..(block + 1) * n2]);
    let failure = RefCell::new(None);
    let minus_i = C64::new(0.0, -1.0);
    let ys = solve(
        |t, y: &[C64], dy: &mut [C64]| {
            let hu_t = match hu_at(t) {
                Ok(h) => h,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    dy.iter_mut().for_each(|v| *v = C64::new(f64::NAN, 0.0));
                    return;
                }
            };
            let (u0, w, v) = (unpack(y, 0), unpack(y, 1), unpack(y, 2));
            let hi = h_sparse.sub(&hu_t);
            let du0 = sparse_dense(&hu_t, &u0) * minus_i;
            let dw = dense_sparse(&w, &hu_t) * (-minus_i);
            let dv = (&w * sparse_dense(&hi, &(&u0 * &v))) * minus_i;
            dy[..n2].copy_from_slice(du0.as_slice());
            dy[n2..2 * n2].copy_from_slice(dw.as_slice());
            dy[2 * n2..].copy_from_slice(dv.as_slice());
        },
        times,
        &y0,
        opts,
    )
    .map_err(|e| failure.borrow_mut().take().unwrap_or(e))?;

    let eig = SymmetricEigen::new(h_full.clone());
    let exact_u = |tau: f64| {
        let ph = DVector::from_iterator(dl, eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -l * tau)));
        &eig.eigenvectors * DMatrix::from_diagonal(&ph) * eig.eigenvectors.adjoint()
    };
    let ident = DVector::from_column_slice(identity_superstate(basis).amps()).transpose();
    let mut out = VEvolution {
        times: times.to_vec(),
        v: Vec::new(),
        left_invariance: 0.0,
        factorization: 0.0,
        norms: Vec::new(),
        norm_bounds: Vec::new(),
    };
    let mut integral = 0.0;
    let mut prev_rate: Option<f64> = None;
    for (k, y) in ys.iter().enumerate() {
        let (u0, w, v) = (unpack(y, 0), unpack(y, 1), unpack(y, 2));
        let t = times[k];
        let rate = spectral_norm(&(&w * sparse_dense(&h_sparse.sub(&hu_at(t)?), &u0)));
        if let Some(p) = prev_rate {
            integral += 0.5 * (p + rate) * (t - times[k - 1]);
        }
        prev_rate = Some(rate);
        out.left_invariance = out.left_invariance.max(max_modulus(&(&ident * &v - &ident)));
        out.factorization = out.factorization.max(max_modulus(&(&w * exact_u(t - times[0]) - &v)));
        out.norms.push(spectral_norm(&v));
        out.norm_bounds.push(integral.exp());
        out.v.push(v);
    }
    Ok(out)
}
