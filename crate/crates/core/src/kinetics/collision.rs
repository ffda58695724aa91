use crate::error::{Result, TfdError};
use crate::perturbation::InteractionModel;
use std::f64::consts::PI;

/// δ_γ(x) = (γ/π)/(x² + γ²).
pub fn lorentzian(x: f64, gamma: f64) -> f64 {
    gamma / (PI * (x * x + gamma * gamma))
}

/// Quantum-Boltzmann rates
/// ṅ_j = 2λ² Σ_klm |V_jklm|² 2π δ_γ(ω_j+ω_k−ω_l−ω_m)
///        × [(1+σn_j)(1+σn_k) n_l n_m − n_j n_k (1+σn_l)(1+σn_m)].
pub fn markovian_collision(model: &InteractionModel, n: &[f64], omega: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if !(gamma > 0.0) {
        return Err(TfdError::Config(format!("broadening {gamma} must be positive")));
    }
    let modes = model.n_modes();
    if n.len() != modes || omega.len() != modes {
        return Err(TfdError::Shape(format!("{} occupations, {} energies for {modes} modes", n.len(), omega.len())));
    }
    let sig: Vec<f64> = model.statistics().iter().map(|s| s.sigma()).collect();
    let f = |x: usize| 1.0 + sig[x] * n[x];
    let mut rates = vec![0.0; modes];
    for ([j, k, l, m], v) in model.entries() {
        let bracket = f(j) * f(k) * n[l] * n[m] - n[j] * n[k] * f(l) * f(m);
        let delta = lorentzian(omega[j] + omega[k] - omega[l] - omega[m], gamma);
        rates[j] += 2.0 * model.lambda * model.lambda * v.norm_sqr() * 2.0 * PI * delta * bracket;
    }
    Ok(rates)
}
