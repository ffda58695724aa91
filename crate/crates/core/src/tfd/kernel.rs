use super::bogoliubov::{max_abs2, Mat2};
use crate::error::{Result, TfdError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// ξ-basis unperturbed propagator d
    D,
    /// operator-basis unperturbed propagator Δ
    Delta,
    /// ξ-basis full propagator g
    SmallG,
    /// operator-basis full propagator G
    FullG,
    /// ξ-basis self-energy S
    S,
    /// operator-basis self-energy Σ
    Sigma,
}

/// Uniform time grid t_i = start + i·step, i < len.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0) || len == 0 {
            return Err(TfdError::Config(format!("invalid grid: step {step}, len {len}")));
        }
        Ok(TimeGrid { start, step, len })
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.time(i)).collect()
    }

    pub fn end(&self) -> f64 {
        self.time(self.len - 1)
    }
}

/// Dense two-time kernel of 2×2 values on a uniform grid, row index t₁.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTimeKernel {
    pub modes: (usize, usize),
    pub kind: KernelKind,
    pub grid: TimeGrid,
    values: Vec<Mat2>,
}

impl TwoTimeKernel {
    pub fn zeros(modes: (usize, usize), kind: KernelKind, grid: TimeGrid) -> Self {
        TwoTimeKernel {
            modes,
            kind,
            grid,
            values: vec![Mat2::zeros(); grid.len * grid.len],
        }
    }

    pub fn from_fn(
        modes: (usize, usize),
        kind: KernelKind,
        grid: TimeGrid,
        mut f: impl FnMut(f64, f64) -> Mat2,
    ) -> Self {
        let mut k = Self::zeros(modes, kind, grid);
        for a in 0..grid.len {
            for b in 0..grid.len {
                k.values[a * grid.len + b] = f(grid.time(a), grid.time(b));
            }
        }
        k
    }

    pub fn get(&self, i1: usize, i2: usize) -> &Mat2 {
        &self.values[i1 * self.grid.len + i2]
    }

    pub fn set(&mut self, i1: usize, i2: usize, v: Mat2) {
        self.values[i1 * self.grid.len + i2] = v;
    }

    pub fn values(&self) -> &[Mat2] {
        &self.values
    }

    fn max_over(&self, f: impl Fn(usize, usize) -> f64) -> f64 {
        let n = self.grid.len;
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| f(a, b))
            .fold(0.0, f64::max)
    }

    /// max |K¹²|, |K²¹|; zero for a d kernel.
    pub fn off_diagonal_residual(&self) -> f64 {
        self.max_over(|a, b| {
            let v = self.get(a, b);
            v[(0, 1)].norm().max(v[(1, 0)].norm())
        })
    }

    /// max |K²¹|; zero for g and S kernels.
    pub fn lower_left_residual(&self) -> f64 {
        self.max_over(|a, b| self.get(a, b)[(1, 0)].norm())
    }

    /// max |K¹¹(t₁,t₂) − K²²*(t₂,t₁)| for a mode-diagonal kernel.
    pub fn conjugation_residual(&self) -> f64 {
        self.max_over(|a, b| (self.get(a, b)[(0, 0)] - self.get(b, a)[(1, 1)].conj()).norm())
    }

    pub fn max_abs_diff(&self, other: &TwoTimeKernel) -> Result<f64> {
        if self.grid != other.grid {
            return Err(TfdError::Shape("kernels live on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| max_abs2(&(x - y)))
            .fold(0.0, f64::max))
    }

    pub fn map(&self, kind: KernelKind, mut f: impl FnMut(usize, usize, &Mat2) -> Mat2) -> TwoTimeKernel {
        let mut out = Self::zeros(self.modes, kind, self.grid);
        let n = self.grid.len;
        for a in 0..n {
            for b in 0..n {
                out.values[a * n + b] = f(a, b, self.get(a, b));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::Statistics;
    use crate::schedule::ThermalSchedule;
    use crate::tfd::propagator::propagator_d;

    #[test]
    fn d_kernel_structure() {
        let s = ThermalSchedule::constant(&[Statistics::Boson], &[0.4], &[1.3]);
        let grid = TimeGrid::new(0.0, 0.1, 12).unwrap();
        let k = TwoTimeKernel::from_fn((0, 0), KernelKind::D, grid, |a, b| propagator_d(&s, 0, a, b));
        assert_eq!(k.off_diagonal_residual(), 0.0);
        assert!(k.conjugation_residual() < 1e-15);
    }
}
