use crate::error::{Result, TfdError};
use crate::liouville::Statistics;
use serde::Serialize;

/// n(κ) = 1/(e^{β(κ−μ)} − σ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumSpec {
    pub beta: f64,
    pub mu: f64,
}

impl EquilibriumSpec {
    pub fn new(beta: f64, mu: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite() && mu.is_finite()) {
            return Err(TfdError::Config(format!("invalid equilibrium β = {beta}, μ = {mu}")));
        }
        Ok(EquilibriumSpec { beta, mu })
    }

    pub fn occupation(&self, statistics: Statistics, kappa: f64) -> f64 {
        distribution(statistics.sigma(), self.beta, self.mu, kappa)
    }

    pub fn occupations(&self, statistics: &[Statistics], omega: &[f64]) -> Vec<f64> {
        statistics.iter().zip(omega).map(|(&s, &w)| self.occupation(s, w)).collect()
    }
}

pub fn distribution(sigma: f64, beta: f64, mu: f64, kappa: f64) -> f64 {
    1.0 / ((beta * (kappa - mu)).exp_m1() + 1.0 - sigma)
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// μ with Σ_j n_j(β, μ) = total.
pub fn mu_for_number(statistics: &[Statistics], omega: &[f64], beta: f64, total: f64) -> f64 {
    let count = |mu: f64| -> f64 {
        statistics.iter().zip(omega).map(|(s, &w)| distribution(s.sigma(), beta, mu, w)).sum::<f64>() - total
    };
    let all_fermion = statistics.iter().all(|s| s.is_fermion());
    let wmin = omega.iter().copied().fold(f64::INFINITY, f64::min);
    let wmax = omega.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let hi = if all_fermion {
        let mut h = wmax + 1.0;
        while count(h) < 0.0 {
            h += 2.0 * (h - wmin).abs() + 1.0;
        }
        h
    } else {
        // μ approaches the lowest boson level from below
        let wb = statistics
            .iter()
            .zip(omega)
            .filter(|(s, _)| !s.is_fermion())
            .map(|(_, &w)| w)
            .fold(f64::INFINITY, f64::min);
        wb - 1e-300_f64.max(wb.abs() * f64::EPSILON)
    };
    let mut lo = wmin - 1.0;
    while count(lo) > 0.0 {
        lo -= 2.0 * (hi - lo);
    }
    bisect(lo, hi, count)
}

/// Equilibrium with the given total number Σn_j and energy Σω_j n_j.
pub fn fit_equilibrium(statistics: &[Statistics], omega: &[f64], number: f64, energy: f64) -> Result<EquilibriumSpec> {
    if statistics.len() != omega.len() || omega.is_empty() {
        return Err(TfdError::Shape("statistics and energies differ in length".into()));
    }
    if !(number > 0.0) {
        return Err(TfdError::Config(format!("total number {number} must be positive")));
    }
    if statistics.iter().all(|s| s.is_fermion()) && number >= statistics.len() as f64 {
        return Err(TfdError::Config(format!("{number} fermions do not fit into {} modes", statistics.len())));
    }
    let excess = |beta: f64| -> f64 {
        let mu = mu_for_number(statistics, omega, beta, number);
        statistics.iter().zip(omega).map(|(s, &w)| w * distribution(s.sigma(), beta, mu, w)).sum::<f64>() - energy
    };
    // energy decreases with β at fixed number; bracket in log β
    let (mut lo, mut hi) = (-12.0f64, 8.0f64);
    let (flo, fhi) = (excess(lo.exp()), excess(hi.exp()));
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(TfdError::NoBracket {
            lo: lo.exp(),
            hi: hi.exp(),
            scan: vec![(lo.exp(), flo), (hi.exp(), fhi)],
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid.exp()) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let beta = (0.5 * (lo + hi)).exp();
    EquilibriumSpec::new(beta, mu_for_number(statistics, omega, beta, number))
}

/// max_j |n_j − n_eq(ω_j)| against the equilibrium with the same number and energy.
pub fn equilibrium_gap(statistics: &[Statistics], omega: &[f64], n: &[f64]) -> Result<(f64, EquilibriumSpec)> {
    let number: f64 = n.iter().sum();
    let energy: f64 = n.iter().zip(omega).map(|(a, w)| a * w).sum();
    let eq = fit_equilibrium(statistics, omega, number, energy)?;
    let gap = eq
        .occupations(statistics, omega)
        .iter()
        .zip(n)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((gap, eq))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distributions() {
        assert!((distribution(1.0, 1.0, 0.0, 2f64.ln()) - 1.0).abs() < 1e-15);
        assert!((distribution(-1.0, 3.0, 0.5, 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fit_recovers_parameters() {
        let stats = [Statistics::Boson; 3];
        let omega = [1.0, 2.0, 3.0];
        let truth = EquilibriumSpec::new(0.8, 0.3).unwrap();
        let n = truth.occupations(&stats, &omega);
        let (gap, eq) = equilibrium_gap(&stats, &omega, &n).unwrap();
        assert!(gap < 1e-12);
        assert!((eq.beta - 0.8).abs() < 1e-10 && (eq.mu - 0.3).abs() < 1e-10);
        let fstats = [Statistics::Fermion; 3];
        let truth = EquilibriumSpec::new(1.7, 2.2).unwrap();
        let n = truth.occupations(&fstats, &omega);
        let (gap, _) = equilibrium_gap(&fstats, &omega, &n).unwrap();
        assert!(gap < 1e-12);
    }

    #[test]
    fn ladder_initial_condition_has_a_fit() {
        let stats = [Statistics::Boson; 3];
        let (gap, eq) = equilibrium_gap(&stats, &[1.0, 2.0, 3.0], &[1.0, 0.1, 0.6]).unwrap();
        assert!(gap > 0.1);
        assert!(eq.mu < 1.0 && eq.beta > 0.0);
    }
}
