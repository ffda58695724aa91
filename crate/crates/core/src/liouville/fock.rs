//! Plain Fock-space operators on a truncated basis.

use super::basis::LiouvilleBasis;
use crate::error::Result;
use crate::sparse::{CsrMatrix, C64};

/// Annihilator a_j with the Jordan–Wigner string over preceding fermion modes.
pub fn annihilator(basis: &LiouvilleBasis, j: usize) -> Result<CsrMatrix> {
    basis.check_mode(j)?;
    let dh = basis.dim_h();
    let fermionic = basis.modes()[j].statistics.is_fermion();
    let mut trip = Vec::new();
    let mut lowered = vec![0usize; basis.n_modes()];
    for col in 0..dh {
        let occ = basis.decode_fock(col);
        if occ[j] == 0 {
            continue;
        }
        lowered.copy_from_slice(occ);
        lowered[j] -= 1;
        let row = basis.encode_fock(&lowered).expect("lowered state is valid");
        let mut amp = (occ[j] as f64).sqrt();
        if fermionic && basis.fermions_before(col, j) % 2 == 1 {
            amp = -amp;
        }
        trip.push((row, col, C64::new(amp, 0.0)));
    }
    Ok(CsrMatrix::from_triplets(dh, dh, trip))
}

pub fn creator(basis: &LiouvilleBasis, j: usize) -> Result<CsrMatrix> {
    Ok(annihilator(basis, j)?.adjoint())
}

/// Number operator a_j† a_j (diagonal, exact at the cutoff).
pub fn number(basis: &LiouvilleBasis, j: usize) -> Result<CsrMatrix> {
    basis.check_mode(j)?;
    let d: Vec<C64> = (0..basis.dim_h())
        .map(|i| C64::new(basis.decode_fock(i)[j] as f64, 0.0))
        .collect();
    Ok(CsrMatrix::diagonal(&d))
}

/// Maximum deviation of a square matrix from Hermiticity.
pub fn hermiticity_deviation(h: &CsrMatrix) -> f64 {
    h.sub(&h.adjoint()).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::basis::ModeSpec;

    #[test]
    fn boson_matrix_elements() {
        let b = LiouvilleBasis::new(vec![ModeSpec::boson(1.0, 3)]).unwrap();
        let a = annihilator(&b, 0).unwrap();
        assert!((a.get(1, 2).re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.nnz(), 3);
    }

    #[test]
    fn fermion_anticommutation_two_modes() {
        let b = LiouvilleBasis::new(vec![ModeSpec::fermion(1.0), ModeSpec::fermion(2.0)]).unwrap();
        let a0 = annihilator(&b, 0).unwrap();
        let a1 = annihilator(&b, 1).unwrap();
        let anti = a0.matmul(&a1).add(&a1.matmul(&a0));
        assert_eq!(anti.max_abs(), 0.0);
        let anti = a0.matmul(&a1.adjoint()).add(&a1.adjoint().matmul(&a0));
        assert_eq!(anti.max_abs(), 0.0);
        let one = a1.matmul(&a1.adjoint()).add(&a1.adjoint().matmul(&a1));
        assert_eq!(one.sub(&CsrMatrix::identity(4)).max_abs(), 0.0);
    }
}
