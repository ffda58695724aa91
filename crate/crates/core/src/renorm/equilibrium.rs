//! Second-order on-shell renormalization of a thermal equilibrium state.
//!
//! In equilibrium the loop self-energy of mode j is a sum of lines at
//! Δ = ω_l + ω_m − ω_k with spectral weight 2λ²|V|²[F^> − σF^<], broadened
//! into Lorentzians of width γ_δ. Then Re S¹¹(k₀) = Σ w (k₀ − Δ)/(γ² + (k₀ − Δ)²)
//! and S¹²(k₀) = 2iσπ(n(k₀) − n_j)σ_jj(k₀).

use super::onshell::equilibrium_onshell_solve;
use crate::error::{Result, TfdError};
use crate::kinetics::{distribution, EquilibriumSpec};
use crate::perturbation::InteractionModel;
use serde::Serialize;
use std::f64::consts::PI;

/// Broadened loop spectrum σ_jj(κ) of one mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopSpectrum {
    /// (Δ, weight) per vertex line.
    pub lines: Vec<(f64, f64)>,
    pub width: f64,
}

impl LoopSpectrum {
    pub fn new(model: &InteractionModel, omega: &[f64], n: &[f64], j: usize, width: f64) -> Self {
        let sig: Vec<f64> = model.statistics().iter().map(|s| s.sigma()).collect();
        let c = 2.0 * model.lambda * model.lambda;
        let lines = model
            .entries()
            .filter(|(key, _)| key[0] == j)
            .map(|([_, k, l, m], v)| {
                let gt = n[k] * (1.0 + sig[l] * n[l]) * (1.0 + sig[m] * n[m]);
                let lt = (1.0 + sig[k] * n[k]) * n[l] * n[m];
                (omega[l] + omega[m] - omega[k], c * v.norm_sqr() * (gt - sig[j] * lt))
            })
            .collect();
        LoopSpectrum { lines, width }
    }

    pub fn density(&self, kappa: f64) -> f64 {
        let g = self.width;
        self.lines.iter().map(|&(d, w)| w / PI * g / (g * g + (kappa - d).powi(2))).sum()
    }

    /// Re S¹¹_loop(k₀).
    pub fn re_s11(&self, k0: f64) -> f64 {
        let g = self.width;
        self.lines.iter().map(|&(d, w)| w * (k0 - d) / (g * g + (k0 - d).powi(2))).sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumRenorm {
    pub lambda: f64,
    pub beta: f64,
    pub omega0: Vec<f64>,
    pub omega: Vec<f64>,
    pub n: Vec<f64>,
    /// |ω₀ − ω + Re S¹¹_loop(ω)| per mode.
    pub re_s11_residual: Vec<f64>,
    /// |S¹²(ω)| per mode.
    pub s12_residual: Vec<f64>,
    pub iterations: usize,
}

impl EquilibriumRenorm {
    pub fn shifts(&self) -> Vec<f64> {
        self.omega.iter().zip(&self.omega0).map(|(a, b)| a - b).collect()
    }
}

/// Self-consistent on-shell energies at inverse temperature β (μ = 0):
/// ω_j solves ω₀ⱼ − ω_j + Re S¹¹_loop(ω_j) = 0 with internal lines and
/// occupations at the current energies, iterated to a fixed point.
pub fn equilibrium_renormalize(model: &InteractionModel, omega0: &[f64], beta: f64, width: f64) -> Result<EquilibriumRenorm> {
    let k = model.n_modes();
    if omega0.len() != k {
        return Err(TfdError::Shape(format!("{} energies for {k} modes", omega0.len())));
    }
    if !(width > 0.0) {
        return Err(TfdError::Config("broadening must be positive".into()));
    }
    let stats = model.statistics().to_vec();
    let eq = EquilibriumSpec::new(beta, 0.0)?;
    let scale = model.lambda * model.lambda * model.vertex_norm2();
    let half = (10.0 * scale).max(1e-12);
    let tol = 1e-13 * scale.max(1e-300);
    let mut omega = omega0.to_vec();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let n = eq.occupations(&stats, &omega);
        let mut next = omega.clone();
        for j in 0..k {
            let spec = LoopSpectrum::new(model, &omega, &n, j, width);
            next[j] = equilibrium_onshell_solve(|x| omega0[j] - x + spec.re_s11(x), omega[j], half, tol)?;
        }
        let change = next.iter().zip(&omega).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        omega = next;
        if change <= 1e-15 * omega.iter().fold(1.0, |m: f64, w| m.max(w.abs())) || iterations >= 200 {
            break;
        }
    }
    let n = eq.occupations(&stats, &omega);
    let mut re_res = Vec::with_capacity(k);
    let mut s12_res = Vec::with_capacity(k);
    for j in 0..k {
        let spec = LoopSpectrum::new(model, &omega, &n, j, width);
        re_res.push((omega0[j] - omega[j] + spec.re_s11(omega[j])).abs());
        let n_k0 = distribution(stats[j].sigma(), beta, 0.0, omega[j]);
        s12_res.push(2.0 * PI * (n_k0 - n[j]).abs() * spec.density(omega[j]).abs());
    }
    Ok(EquilibriumRenorm {
        lambda: model.lambda,
        beta,
        omega0: omega0.to_vec(),
        omega,
        n,
        re_s11_residual: re_res,
        s12_residual: s12_res,
        iterations,
    })
}

/// Least-squares slope of log|y| against log x.
pub fn scaling_exponent(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(TfdError::Shape("need at least two (x, y) pairs".into()));
    }
    if x.iter().chain(y).any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(TfdError::Config("scaling fit needs finite nonzero values".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.abs().ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
