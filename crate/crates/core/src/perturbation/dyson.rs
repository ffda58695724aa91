//! Grid form of the Dyson–Schwinger equation G = Δ + Δ Σ G.
//!
//! Two-time kernels become 2N × 2N block matrices and the time convolution
//! uses trapezoid weights W, so G = Δ + Δ W Σ W G and Σ = W⁻¹(Δ⁻¹ − G⁻¹)W⁻¹.

use crate::error::{Result, TfdError};
use crate::sparse::{max_modulus, C64};
use crate::tfd::{mat2, KernelKind, TwoTimeKernel};
use nalgebra::DMatrix;

/// Tikhonov regularization of the grid inverses.
pub const DEFAULT_REGULARIZATION: f64 = 1e-10;

fn to_block(k: &TwoTimeKernel) -> DMatrix<C64> {
    let n = k.grid.len;
    DMatrix::from_fn(2 * n, 2 * n, |r, c| k.get(r / 2, c / 2)[(r % 2, c % 2)])
}

fn from_block(m: &DMatrix<C64>, template: &TwoTimeKernel, kind: KernelKind) -> TwoTimeKernel {
    template.map(kind, |a, b, _| {
        mat2(m[(2 * a, 2 * b)], m[(2 * a, 2 * b + 1)], m[(2 * a + 1, 2 * b)], m[(2 * a + 1, 2 * b + 1)])
    })
}

fn weights(k: &TwoTimeKernel) -> Vec<f64> {
    let n = k.grid.len;
    (0..2 * n)
        .map(|r| {
            let i = r / 2;
            if n > 1 && (i == 0 || i == n - 1) {
                0.5 * k.grid.step
            } else {
                k.grid.step
            }
        })
        .collect()
}

/// (A†A + εI)⁻¹ A†.
fn regularized_inverse(a: &DMatrix<C64>, reg: f64) -> Result<DMatrix<C64>> {
    let n = a.ncols();
    let normal = a.adjoint() * a + DMatrix::<C64>::identity(n, n) * C64::new(reg, 0.0);
    let inv = normal
        .try_inverse()
        .ok_or_else(|| TfdError::Singular("regularized normal matrix is singular".into()))?;
    Ok(inv * a.adjoint())
}

#[derive(Debug, Clone)]
pub struct SigmaExtraction {
    pub sigma: TwoTimeKernel,
    pub regularization: f64,
    /// max |Δ + Δ W Σ W G − G|
    pub closure_residual: f64,
}

pub fn extract_sigma(delta: &TwoTimeKernel, g: &TwoTimeKernel, regularization: f64) -> Result<SigmaExtraction> {
    if delta.grid != g.grid {
        return Err(TfdError::Shape("Δ and G live on different grids".into()));
    }
    let d = to_block(delta);
    let gm = to_block(g);
    let w = weights(delta);
    let di = regularized_inverse(&d, regularization)?;
    let gi = regularized_inverse(&gm, regularization)?;
    let core = di - gi;
    let sigma = DMatrix::from_fn(core.nrows(), core.ncols(), |r, c| core[(r, c)] / (w[r] * w[c]));
    let sigma = from_block(&sigma, delta, KernelKind::Sigma);
    let closure_residual = dyson_closure_residual(delta, &sigma, g)?;
    Ok(SigmaExtraction {
        sigma,
        regularization,
        closure_residual,
    })
}

/// max |Δ + Δ W Σ W G − G| on the grid.
pub fn dyson_closure_residual(delta: &TwoTimeKernel, sigma: &TwoTimeKernel, g: &TwoTimeKernel) -> Result<f64> {
    if delta.grid != g.grid || delta.grid != sigma.grid {
        return Err(TfdError::Shape("kernels live on different grids".into()));
    }
    let w = weights(delta);
    let d = to_block(delta);
    let s = to_block(sigma);
    let gm = to_block(g);
    let ws = DMatrix::from_fn(s.nrows(), s.ncols(), |r, c| s[(r, c)] * (w[r] * w[c]));
    Ok(max_modulus(&(&d + &d * ws * &gm - gm)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::Statistics;
    use crate::schedule::ThermalSchedule;
    use crate::tfd::{propagator_delta, TimeGrid};

    #[test]
    fn free_theory_has_zero_sigma() {
        let s = ThermalSchedule::constant(&[Statistics::Boson], &[0.5], &[1.0]);
        let grid = TimeGrid::new(0.0, 0.2, 6).unwrap();
        let d = TwoTimeKernel::from_fn((0, 0), KernelKind::Delta, grid, |a, b| propagator_delta(&s, 0, a, b));
        let ex = extract_sigma(&d, &d, DEFAULT_REGULARIZATION).unwrap();
        assert!(ex.sigma.values().iter().all(|m| m.iter().all(|z| z.norm() < 1e-12)));
        assert!(ex.closure_residual < 1e-12);
    }
}
