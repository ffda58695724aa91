//! Equilibrium spectral functions on a κ-grid and the comparison between the
//! Heisenberg occupation n_H = ∫ n(κ) ρ(κ) dκ and n(ω) at the on-shell energy.

use super::onshell::equilibrium_onshell_solve;
use crate::error::{Result, TfdError};
use crate::kinetics::distribution;
use crate::liouville::Statistics;
use serde::Serialize;

/// Normalization tolerance for ∫ρ = 1.
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// Compact density w·(15/16h)(1 − x²)², x = (κ − c)/h, on [c − h, c + h].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    pub weight: f64,
}

impl Bump {
    pub fn new(center: f64, half_width: f64, weight: f64) -> Result<Self> {
        if !(half_width > 0.0 && weight.is_finite() && center.is_finite()) {
            return Err(TfdError::Config(format!("bad bump ({center}, {half_width}, {weight})")));
        }
        Ok(Bump { center, half_width, weight })
    }

    fn amplitude(&self) -> f64 {
        15.0 * self.weight / (16.0 * self.half_width)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    pub fn density(&self, kappa: f64) -> f64 {
        let x = (kappa - self.center) / self.half_width;
        if x.abs() >= 1.0 {
            0.0
        } else {
            self.amplitude() * (1.0 - x * x).powi(2)
        }
    }

    /// Principal value P∫ density(κ)/(k − κ) dκ in closed form.
    pub fn hilbert(&self, k: f64) -> f64 {
        let y = (k - self.center) / self.half_width;
        if y.abs() > 2.0 {
            // Σ c_m y^{−(2m+1)}, c_m = 16/((2m+1)(2m+3)(2m+5)); avoids cancellation
            return self.amplitude() * far_series(y, |_, c, ym| c * ym / y);
        }
        let p = (1.0 - y * y).powi(2);
        let log = if p == 0.0 { 0.0 } else { ((y + 1.0) / (y - 1.0)).abs().ln() };
        self.amplitude() * (p * log + 10.0 / 3.0 * y - 2.0 * y.powi(3))
    }

    /// d/dk of [`Bump::hilbert`].
    pub fn hilbert_derivative(&self, k: f64) -> f64 {
        let y = (k - self.center) / self.half_width;
        if y.abs() > 2.0 {
            let d = far_series(y, |m, c, ym| -((2 * m + 1) as f64) * c * ym / (y * y));
            return self.amplitude() / self.half_width * d;
        }
        let log = if (y * y - 1.0).abs() == 0.0 { 0.0 } else { ((y + 1.0) / (y - 1.0)).abs().ln() };
        self.amplitude() / self.half_width * (-4.0 * y * (1.0 - y * y) * log + 16.0 / 3.0 - 8.0 * y * y)
    }
}

/// Sums term(m, c_m, y^{−2m}) until the terms stop mattering.
fn far_series(y: f64, term: impl Fn(usize, f64, f64) -> f64) -> f64 {
    let inv2 = 1.0 / (y * y);
    let mut ym = 1.0;
    let mut acc = 0.0;
    for m in 0..200 {
        let q = (2 * m + 1) as f64;
        let t = term(m, 16.0 / (q * (q + 2.0) * (q + 4.0)), ym);
        acc += t;
        if t.abs() <= 1e-18 * acc.abs() {
            break;
        }
        ym *= inv2;
    }
    acc
}

/// Isolated quasiparticle pole of weight Z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pole {
    pub position: f64,
    pub weight: f64,
}

/// Diagonal spectral data of one mode: self-energy density σ(κ), continuum
/// ρ(κ) of the propagator, and an optional pole.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralModel {
    pub statistics: Statistics,
    pub beta: f64,
    /// Bare energy ω₀.
    pub omega0: f64,
    pub kappa: Vec<f64>,
    /// Quadrature weights on `kappa`.
    pub weights: Vec<f64>,
    pub sigma: Vec<f64>,
    pub rho: Vec<f64>,
    pub pole: Option<Pole>,
}

/// Composite Simpson nodes and weights with panels split at `breaks`, so
/// that the integrand is smooth inside each panel. Every panel gets the
/// same number of nodes.
fn composite_grid(breaks: &[f64], points: usize) -> (Vec<f64>, Vec<f64>) {
    let mut b: Vec<f64> = breaks.to_vec();
    b.sort_by(f64::total_cmp);
    b.dedup();
    let per = (points / (b.len() - 1).max(1)).max(3) | 1;
    let mut x = Vec::new();
    let mut w = Vec::new();
    for seg in b.windows(2) {
        let len = seg[1] - seg[0];
        let h = len / (per - 1) as f64;
        for i in 0..per {
            let c = if i == 0 || i == per - 1 { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            x.push(seg[0] + h * i as f64);
            w.push(c * h / 3.0);
        }
    }
    (x, w)
}

impl SpectralModel {
    /// Sum of compact peaks with given weights, no pole and no self-energy.
    pub fn from_peaks(statistics: Statistics, beta: f64, omega0: f64, peaks: &[Bump], points: usize) -> Result<Self> {
        if peaks.is_empty() {
            return Err(TfdError::Config("no spectral peaks".into()));
        }
        let breaks: Vec<f64> = peaks.iter().flat_map(|b| [b.support().0, b.support().1]).collect();
        let (kappa, weights) = composite_grid(&breaks, points);
        let rho = kappa.iter().map(|&k| peaks.iter().map(|b| b.density(k)).sum()).collect();
        Ok(SpectralModel {
            statistics,
            beta,
            omega0,
            sigma: vec![0.0; kappa.len()],
            kappa,
            weights,
            rho,
            pole: None,
        })
    }

    /// Propagator spectrum of G(k₀) = 1/(k₀ − ω₀ − Σ(k₀)) with the
    /// self-energy density `sigma`: a pole at the on-shell energy plus the
    /// continuum σ/((κ − ω₀ − ReΣ)² + π²σ²) over the bump.
    pub fn from_density(statistics: Statistics, beta: f64, omega0: f64, sigma: Bump, points: usize) -> Result<Self> {
        let (lo, hi) = sigma.support();
        if (lo..=hi).contains(&omega0) {
            return Err(TfdError::Config("bare energy inside the self-energy continuum".into()));
        }
        let gap = (omega0 - lo).abs().min((omega0 - hi).abs());
        let width = (10.0 * sigma.weight.abs()).min(0.9 * gap).max(f64::MIN_POSITIVE);
        let omega = equilibrium_onshell_solve(
            |k| omega0 - k + sigma.hilbert(k),
            omega0,
            width,
            1e-15 * omega0.abs().max(1.0),
        )?;
        let z = 1.0 / (1.0 - sigma.hilbert_derivative(omega));
        let (kappa, weights) = composite_grid(&[lo, hi], points);
        let dens: Vec<f64> = kappa.iter().map(|&k| sigma.density(k)).collect();
        let rho = kappa
            .iter()
            .zip(&dens)
            .map(|(&k, &s)| {
                let re = k - omega0 - sigma.hilbert(k);
                s / (re * re + std::f64::consts::PI.powi(2) * s * s)
            })
            .collect();
        Ok(SpectralModel {
            statistics,
            beta,
            omega0,
            kappa,
            weights,
            sigma: dens,
            rho,
            pole: Some(Pole { position: omega, weight: z }),
        })
    }

    /// ∫ρ dκ including the pole weight.
    pub fn norm(&self) -> f64 {
        self.integrate(|i| self.rho[i]) + self.pole.map_or(0.0, |p| p.weight)
    }

    fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.weights.iter().enumerate().map(|(i, w)| w * f(i)).sum()
    }

    fn n(&self, kappa: f64) -> f64 {
        distribution(self.statistics.sigma(), self.beta, 0.0, kappa)
    }

    /// n_H = ∫ n(κ) ρ(κ) dκ.
    pub fn heisenberg_occupation(&self) -> f64 {
        self.integrate(|i| self.n(self.kappa[i]) * self.rho[i]) + self.pole.map_or(0.0, |p| p.weight * self.n(p.position))
    }

    /// On-shell energy: the pole if present, else the root of
    /// ω₀ − k + P∫σ(κ)/(k − κ) dκ on the sampled density.
    pub fn onshell_energy(&self) -> Result<f64> {
        if let Some(p) = self.pole {
            return Ok(p.position);
        }
        if self.sigma.iter().all(|&s| s == 0.0) {
            return Ok(self.omega0);
        }
        let hilbert = |k: f64| self.integrate(|i| self.sigma[i] / (k - self.kappa[i]));
        let total = self.integrate(|i| self.sigma[i]).abs();
        equilibrium_onshell_solve(|k| self.omega0 - k + hilbert(k), self.omega0, 10.0 * total, 1e-13)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalizationReport {
    pub mode: usize,
    pub omega: f64,
    pub n_h: f64,
    pub n_omega: f64,
    pub gap: f64,
    pub norm: f64,
}

/// Compares n_H with n(ω) at the on-shell energy. A nonzero gap means the
/// condition n_H = n is incompatible with the equilibrium spectrum.
pub fn diagonalization_inconsistency_demo(spectral: &SpectralModel, j: usize) -> Result<DiagonalizationReport> {
    let norm = spectral.norm();
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(TfdError::Unnormalized { integral: norm });
    }
    let omega = spectral.onshell_energy()?;
    let n_h = spectral.heisenberg_occupation();
    let n_omega = spectral.n(omega);
    Ok(DiagonalizationReport {
        mode: j,
        omega,
        n_h,
        n_omega,
        gap: (n_h - n_omega).abs(),
        norm,
    })
}
