use crate::error::{Result, TfdError};
use crate::schedule::ThermalSchedule;
use num_complex::Complex64;

/// Rates of the constrained unperturbed super-Hamiltonian for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaParams {
    pub omega: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub zeta3: f64,
    pub zeta5: f64,
}

impl ZetaParams {
    /// General solution of the probability-conservation constraints and
    /// ṅ = −ζ1 n + ζ2 (1+σn), parameterized by the free rate γ.
    pub fn solve(sigma: f64, n: f64, ndot: f64, gamma: f64, omega: f64) -> Result<Self> {
        let one_plus = 1.0 + sigma * n;
        if gamma != 0.0 && one_plus.abs() < 1e-14 {
            return Err(TfdError::Singular(format!(
                "1 + σn vanishes (n = {n}) while γ = {gamma} is nonzero"
            )));
        }
        let (g2, g3) = if gamma == 0.0 {
            (0.0, 0.0)
        } else {
            (gamma * n / one_plus, gamma * (1.0 + 2.0 * sigma * n) / (2.0 * one_plus))
        };
        let zeta2 = ndot + g2;
        Ok(ZetaParams {
            omega,
            zeta1: sigma * ndot + gamma,
            zeta2,
            zeta3: -sigma * ndot - g3,
            zeta5: -zeta2,
        })
    }

    /// Complex couplings (η1..η5) of the general bilinear form.
    pub fn eta(&self) -> [Complex64; 5] {
        let i = Complex64::new(0.0, 1.0);
        [
            i * self.zeta1,
            i * self.zeta2,
            Complex64::new(self.omega, self.zeta3),
            Complex64::new(-self.omega, self.zeta3),
            i * self.zeta5,
        ]
    }

    /// Residuals of ζ1 + σζ2 + 2ζ3 = 0 and ζ2 + ζ5 = 0.
    pub fn constraint_residuals(&self, sigma: f64) -> (f64, f64) {
        (
            (self.zeta1 + sigma * self.zeta2 + 2.0 * self.zeta3).abs(),
            (self.zeta2 + self.zeta5).abs(),
        )
    }
}

/// ζ parameters of every mode at time t.
pub fn solve_zeta(schedule: &ThermalSchedule, t: f64) -> Result<Vec<ZetaParams>> {
    (0..schedule.n_modes())
        .map(|j| {
            ZetaParams::solve(
                schedule.sigma(j),
                schedule.n(j, t),
                schedule.ndot(j, t),
                schedule.gamma(j, t),
                schedule.omega(j, t),
            )
        })
        .collect()
}
