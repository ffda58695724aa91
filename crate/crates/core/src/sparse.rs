//! Compressed sparse row matrices with complex entries.
//!
//! Entries within a row are kept sorted by column and explicit zeros are
//! dropped, so two matrices built from the same triplets are bit-identical.

use num_complex::Complex64;
use std::collections::BTreeMap;

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CsrMatrix {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn diagonal(d: &[C64]) -> Self {
        Self::from_triplets(d.len(), d.len(), d.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Builds from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut per_row: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) outside {rows}x{cols}");
            *per_row[r].entry(c).or_insert(C64::new(0.0, 0.0)) += v;
        }
        Self::from_row_maps(rows, cols, per_row)
    }

    fn from_row_maps(rows: usize, cols: usize, per_row: Vec<BTreeMap<usize, C64>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in per_row {
            for (c, v) in row {
                if v.re != 0.0 || v.im != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates (col, value) over the stored entries of a row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[a..b].iter().copied().zip(self.values[a..b].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        match self.col_idx[a..b].binary_search(&c) {
            Ok(k) => self.values[a + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
    }

    /// Adds `scale * A x` to `y`.
    pub fn matvec_acc(&self, scale: C64, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out += scale * acc;
        }
    }

    /// Row vector times matrix: returns xᵀ A (no conjugation).
    pub fn vecmat(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![C64::new(0.0, 0.0); self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr.re == 0.0 && xr.im == 0.0 {
                continue;
            }
            for (c, v) in self.row(r) {
                y[c] += xr * v;
            }
        }
        y
    }

    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut per_row: Vec<BTreeMap<usize, C64>> = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    *acc.entry(c).or_insert(C64::new(0.0, 0.0)) += a * b;
                }
            }
            per_row.push(acc);
        }
        Self::from_row_maps(self.rows, other.cols, per_row)
    }

    pub fn adjoint(&self) -> CsrMatrix {
        CsrMatrix::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn transpose(&self) -> CsrMatrix {
        CsrMatrix::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v)))
    }

    /// Elementwise complex conjugate.
    pub fn conj(&self) -> CsrMatrix {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v = v.conj();
        }
        out
    }

    pub fn scale(&self, s: C64) -> CsrMatrix {
        CsrMatrix::from_triplets(self.rows, self.cols, self.triplets().map(|(r, c, v)| (r, c, s * v)))
    }

    /// Returns `a*self + b*other`.
    pub fn lin_comb(&self, a: C64, other: &CsrMatrix, b: C64) -> CsrMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CsrMatrix::from_triplets(
            self.rows,
            self.cols,
            self.triplets()
                .map(|(r, c, v)| (r, c, a * v))
                .chain(other.triplets().map(|(r, c, v)| (r, c, b * v))),
        )
    }

    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &CsrMatrix) -> CsrMatrix {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CsrMatrix) -> CsrMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        CsrMatrix::from_triplets(
            rows,
            cols,
            self.triplets().flat_map(|(r1, c1, v1)| {
                other
                    .triplets()
                    .map(move |(r2, c2, v2)| (r1 * other.rows + r2, c1 * other.cols + c2, v1 * v2))
            }),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Max |entry| restricted to columns accepted by `keep`.
    pub fn max_abs_cols<F: Fn(usize) -> bool>(&self, keep: F) -> f64 {
        let mut m: f64 = 0.0;
        for (_, c, v) in self.triplets() {
            if keep(c) {
                m = m.max(v.norm());
            }
        }
        m
    }

    /// Rebuilds with each entry mapped by `f(row, col, value)`.
    pub fn map_entries<F: Fn(usize, usize, C64) -> C64>(&self, f: F) -> CsrMatrix {
        CsrMatrix::from_triplets(self.rows, self.cols, self.triplets().map(|(r, c, v)| (r, c, f(r, c, v))))
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let mut m = nalgebra::DMatrix::from_element(self.rows, self.cols, C64::new(0.0, 0.0));
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn from_dense(m: &nalgebra::DMatrix<C64>) -> CsrMatrix {
        let (rows, cols) = m.shape();
        CsrMatrix::from_triplets(
            rows,
            cols,
            (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c, m[(r, c)]))),
        )
    }
}

/// Largest entry modulus of a dense complex matrix.
pub fn max_modulus<R, C, S>(m: &nalgebra::Matrix<C64, R, C, S>) -> f64
where
    R: nalgebra::Dim,
    C: nalgebra::Dim,
    S: nalgebra::RawStorage<C64, R, C>,
{
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn triplets_are_summed_and_sorted() {
        let m = CsrMatrix::from_triplets(2, 3, vec![(0, 2, c(1.0)), (0, 0, c(2.0)), (0, 2, c(3.0)), (1, 1, c(0.0))]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 2), c(4.0));
        let cols: Vec<usize> = m.row(0).map(|(c, _)| c).collect();
        assert_eq!(cols, vec![0, 2]);
    }

    #[test]
    fn matmul_matches_dense() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, c(1.0)), (0, 1, C64::new(0.0, 2.0)), (1, 0, c(3.0))]);
        let b = CsrMatrix::from_triplets(2, 2, vec![(0, 1, c(5.0)), (1, 1, c(-1.0)), (1, 0, c(1.0))]);
        let dense = a.to_dense() * b.to_dense();
        assert_eq!(a.matmul(&b).to_dense(), dense);
    }

    #[test]
    fn adjoint_and_vecmat() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 1, C64::new(1.0, 1.0))]);
        assert_eq!(a.adjoint().get(1, 0), C64::new(1.0, -1.0));
        let x = vec![c(2.0), c(0.0)];
        assert_eq!(a.vecmat(&x), vec![c(0.0), C64::new(2.0, 2.0)]);
    }

    #[test]
    fn kron_dimensions() {
        let a = CsrMatrix::identity(2);
        let b = CsrMatrix::from_triplets(3, 3, vec![(0, 1, c(1.0))]);
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols(), k.nnz()), (6, 6, 2));
        assert_eq!(k.get(3, 4), c(1.0));
    }
}
