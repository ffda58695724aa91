//! Geometric occupation distributions and the q-vector description of
//! deviations from them.

use crate::error::{Result, TfdError};
use crate::liouville::{LiouvilleBasis, Statistics, SuperState};
use crate::ode::{solve, OdeOptions};
use crate::schedule::Curve;
use crate::sparse::C64;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::sync::Arc;

/// Tail mass threshold f^{cutoff+1} above which a truncated geometric state is
/// flagged as not acceptance-grade.
pub const TAIL_WARNING: f64 = 1e-10;

/// Single-mode geometric probabilities p_m ∝ f^m, f = n/(1+σn), renormalized
/// over the truncated range. Also returns the discarded tail weight f^{cutoff+1}.
pub fn geometric_probabilities(statistics: Statistics, n: f64, cutoff: usize) -> Result<(Vec<f64>, f64)> {
    match statistics {
        Statistics::Fermion => {
            if !(0.0..=1.0).contains(&n) {
                return Err(TfdError::Config(format!("fermion occupation {n} outside [0,1]")));
            }
            Ok((vec![1.0 - n, n], 0.0))
        }
        Statistics::Boson => {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(TfdError::Config(format!("boson occupation {n} must be non-negative")));
            }
            let f = n / (1.0 + n);
            let mut p: Vec<f64> = (0..=cutoff).map(|m| f.powi(m as i32)).collect();
            let total: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= total);
            Ok((p, f.powi(cutoff as i32 + 1)))
        }
    }
}

/// Product of per-mode geometric distributions as a diagonal superstate.
#[derive(Debug, Clone)]
pub struct GeometricState {
    pub state: SuperState,
    /// Discarded tail weight per mode.
    pub tails: Vec<f64>,
}

impl GeometricState {
    pub fn acceptance_grade(&self) -> bool {
        self.tails.iter().all(|&t| t < TAIL_WARNING)
    }
}

pub fn geometric_state(basis: &Arc<LiouvilleBasis>, n: &[f64]) -> Result<GeometricState> {
    if n.len() != basis.n_modes() {
        return Err(TfdError::Config(format!(
            "{} occupations for {} modes",
            n.len(),
            basis.n_modes()
        )));
    }
    let mut per_mode = Vec::new();
    let mut tails = Vec::new();
    for (m, &nj) in basis.modes().iter().zip(n) {
        let (p, tail) = geometric_probabilities(m.statistics, nj, m.cutoff)?;
        per_mode.push(p);
        tails.push(tail);
    }
    let dh = basis.dim_h();
    let mut amps = vec![C64::new(0.0, 0.0); basis.dim_l()];
    for k in 0..dh {
        let occ = basis.decode_fock(k);
        let p: f64 = occ.iter().zip(&per_mode).map(|(&o, pm)| pm[o]).product();
        amps[k * dh + k] = C64::new(p, 0.0);
    }
    Ok(GeometricState {
        state: SuperState::new(basis.clone(), amps)?,
        tails,
    })
}

/// Diagonal superstate from a single-mode distribution.
pub fn diagonal_state(basis: &Arc<LiouvilleBasis>, p: &[f64]) -> Result<SuperState> {
    let dh = basis.dim_h();
    if p.len() != dh {
        return Err(TfdError::Shape(format!("distribution has {} entries, dim_h is {dh}", p.len())));
    }
    let mut amps = vec![C64::new(0.0, 0.0); basis.dim_l()];
    for (k, &pk) in p.iter().enumerate() {
        amps[k * dh + k] = C64::new(pk, 0.0);
    }
    SuperState::new(basis.clone(), amps)
}

/// Max |p_m − (1−f) f^m| of a single-boson-mode state against occupation n.
pub fn geometric_residual(state: &SuperState, n: f64) -> f64 {
    let f = n / (1.0 + n);
    state
        .diagonal()
        .iter()
        .enumerate()
        .map(|(m, p)| (p - C64::new((1.0 - f) * f.powi(m as i32), 0.0)).norm())
        .fold(0.0, f64::max)
}

/// q_m = √(m+1)[(1+n)p_{m+1} − n p_m] for m = 0..len(p)−2.
pub fn q_vector(p: &[f64], n: f64) -> Vec<f64> {
    (0..p.len().saturating_sub(1))
        .map(|m| ((m + 1) as f64).sqrt() * ((1.0 + n) * p[m + 1] - n * p[m]))
        .collect()
}

/// Real symmetric tridiagonal M with M_mm = −2(m+1), M_{m,m+1} = √((m+1)(m+2)).
pub fn m_matrix(size: usize) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |r, c| {
        if r == c {
            -2.0 * (r as f64 + 1.0)
        } else if r.abs_diff(c) == 1 {
            ((r as f64 + 1.0) * (c as f64 + 1.0)).sqrt()
        } else {
            0.0
        }
    })
}

/// Eigen-decomposition of M, eigenvalues ascending.
pub struct MSpectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn m_spectrum(size: usize) -> MSpectrum {
    let eig = SymmetricEigen::new(m_matrix(size));
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(size, size, |r, c| eig.eigenvectors[(r, order[c])]);
    MSpectrum { values, vectors }
}

/// q(t) from the closed form and from direct integration of q̇ = ṅ M q.
#[derive(Debug, Clone)]
pub struct QEvolution {
    pub closed_form: Vec<f64>,
    pub integrated: Vec<f64>,
    /// Σ c_ℓ² e^{2λ_ℓ Δn}
    pub predicted_norm2: f64,
}

/// Evolves q from time `tau` to `t` under occupation curve n(·).
///
/// The closed form is q(t) = Σ_ℓ c_ℓ u_ℓ e^{λ_ℓ [n(t) − n(τ)]}.
pub fn evolve_q(q0: &[f64], n: &Curve, tau: f64, t: f64, opts: &OdeOptions) -> Result<QEvolution> {
    let size = q0.len();
    let spec = m_spectrum(size);
    let dn = n.value(t) - n.value(tau);
    let c = spec.vectors.transpose() * DVector::from_column_slice(q0);
    let mut closed = DVector::zeros(size);
    let mut norm2 = 0.0;
    for l in 0..size {
        let w = c[l] * (spec.values[l] * dn).exp();
        closed += spec.vectors.column(l) * w;
        norm2 += w * w;
    }
    let m = m_matrix(size);
    let integrated = if t == tau {
        q0.to_vec()
    } else {
        let ys = solve(
            |s, q: &[f64], dq: &mut [f64]| {
                let nd = n.derivative(s);
                for r in 0..size {
                    let mut acc = 0.0;
                    for k in r.saturating_sub(1)..(r + 2).min(size) {
                        acc += m[(r, k)] * q[k];
                    }
                    dq[r] = nd * acc;
                }
            },
            &[tau, t],
            q0,
            opts,
        )?;
        ys[1].clone()
    };
    Ok(QEvolution {
        closed_form: closed.iter().copied().collect(),
        integrated,
        predicted_norm2: norm2,
    })
}
