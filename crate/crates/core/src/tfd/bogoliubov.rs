use crate::error::{Result, TfdError};
use crate::liouville::Statistics;
use crate::sparse::C64;
use nalgebra::Matrix2;

/// 2×2 complex matrix in thermal-doublet indices.
pub type Mat2 = Matrix2<C64>;

pub fn mat2(a11: C64, a12: C64, a21: C64, a22: C64) -> Mat2 {
    Matrix2::new(a11, a12, a21, a22)
}

pub fn max_abs2(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Thermal Bogoliubov matrix B(n) = [[1+σn, −σn], [−1, 1]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovMatrix {
    pub n: f64,
    pub sigma: f64,
}

impl BogoliubovMatrix {
    pub fn matrix(&self) -> Matrix2<f64> {
        let s = self.sigma * self.n;
        Matrix2::new(1.0 + s, -s, -1.0, 1.0)
    }

    /// B⁻¹ = [[1, σn], [1, 1+σn]].
    pub fn inverse(&self) -> Matrix2<f64> {
        let s = self.sigma * self.n;
        Matrix2::new(1.0, s, 1.0, 1.0 + s)
    }

    pub fn determinant(&self) -> f64 {
        let m = self.matrix();
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    }

    pub fn complex(&self) -> Mat2 {
        self.matrix().map(|x| C64::new(x, 0.0))
    }

    pub fn complex_inverse(&self) -> Mat2 {
        self.inverse().map(|x| C64::new(x, 0.0))
    }
}

pub fn bogoliubov(statistics: Statistics, n: f64) -> Result<BogoliubovMatrix> {
    let ok = match statistics {
        Statistics::Boson => n >= 0.0 && n.is_finite(),
        Statistics::Fermion => (0.0..=1.0).contains(&n),
    };
    if !ok {
        return Err(TfdError::Config(format!("occupation {n} outside the physical range for {statistics:?}")));
    }
    Ok(BogoliubovMatrix {
        n,
        sigma: statistics.sigma(),
    })
}
