use super::basis::LiouvilleBasis;
use super::fock;
use crate::error::{Result, TfdError};
use crate::sparse::{CsrMatrix, C64};
use nalgebra::DMatrix;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Check,
    Tilde,
}

fn same_basis(a: &Arc<LiouvilleBasis>, b: &Arc<LiouvilleBasis>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Sparse superoperator on a Liouville space.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    basis: Arc<LiouvilleBasis>,
    matrix: CsrMatrix,
    parity: Parity,
}

impl SuperOperator {
    pub fn new(basis: Arc<LiouvilleBasis>, matrix: CsrMatrix, parity: Parity) -> Result<Self> {
        let d = basis.dim_l();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(TfdError::Shape(format!(
                "superoperator is {}x{}, basis needs {d}x{d}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(SuperOperator { basis, matrix, parity })
    }

    pub fn zero(basis: Arc<LiouvilleBasis>) -> Self {
        let d = basis.dim_l();
        SuperOperator {
            basis,
            matrix: CsrMatrix::zeros(d, d),
            parity: Parity::Even,
        }
    }

    pub fn identity(basis: Arc<LiouvilleBasis>) -> Self {
        let d = basis.dim_l();
        SuperOperator {
            basis,
            matrix: CsrMatrix::identity(d),
            parity: Parity::Even,
        }
    }

    pub fn basis(&self) -> &Arc<LiouvilleBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    fn with(&self, matrix: CsrMatrix, parity: Parity) -> Self {
        SuperOperator {
            basis: self.basis.clone(),
            matrix,
            parity,
        }
    }

    pub fn mul(&self, other: &SuperOperator) -> SuperOperator {
        assert!(same_basis(&self.basis, &other.basis), "basis mismatch");
        self.with(self.matrix.matmul(&other.matrix), self.parity.combine(other.parity))
    }

    /// `a*self + b*other`; the parity of a mixed sum is taken from `self`.
    pub fn lin_comb(&self, a: C64, other: &SuperOperator, b: C64) -> SuperOperator {
        assert!(same_basis(&self.basis, &other.basis), "basis mismatch");
        self.with(self.matrix.lin_comb(a, &other.matrix, b), self.parity)
    }

    pub fn add(&self, other: &SuperOperator) -> SuperOperator {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &SuperOperator) -> SuperOperator {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, s: C64) -> SuperOperator {
        self.with(self.matrix.scale(s), self.parity)
    }

    pub fn adjoint(&self) -> SuperOperator {
        self.with(self.matrix.adjoint(), self.parity)
    }

    /// Graded commutator AB − σ BA with σ = −1 only for two odd operands.
    pub fn graded_commutator(&self, other: &SuperOperator) -> SuperOperator {
        let s = if self.parity == Parity::Odd && other.parity == Parity::Odd {
            -1.0
        } else {
            1.0
        };
        let ab = self.mul(other);
        let ba = other.mul(self);
        ab.lin_comb(C64::new(1.0, 0.0), &ba, C64::new(-s, 0.0))
    }

    pub fn apply(&self, state: &SuperState) -> SuperState {
        assert!(same_basis(&self.basis, &state.basis), "basis mismatch");
        SuperState {
            basis: state.basis.clone(),
            amps: self.matrix.matvec(&state.amps),
        }
    }

    /// Row vector ⟨⟨v| X as amplitudes of the ket X†|v⟩⟩.
    pub fn bra_apply(&self, bra: &SuperState) -> SuperState {
        let conj: Vec<C64> = bra.amps.iter().map(|z| z.conj()).collect();
        let row = self.matrix.vecmat(&conj);
        SuperState {
            basis: bra.basis.clone(),
            amps: row.into_iter().map(|z| z.conj()).collect(),
        }
    }

    /// Max |entry| over columns in the interior subspace of the given margin.
    pub fn max_abs_interior(&self, margin: usize) -> f64 {
        let b = &self.basis;
        self.matrix.max_abs_cols(|c| b.is_interior(c, margin))
    }
}

/// A vector in Liouville space.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperState {
    basis: Arc<LiouvilleBasis>,
    amps: Vec<C64>,
}

impl SuperState {
    pub fn new(basis: Arc<LiouvilleBasis>, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.dim_l() {
            return Err(TfdError::Shape(format!(
                "state has {} amplitudes, basis needs {}",
                amps.len(),
                basis.dim_l()
            )));
        }
        Ok(SuperState { basis, amps })
    }

    pub fn zero(basis: Arc<LiouvilleBasis>) -> Self {
        let d = basis.dim_l();
        SuperState {
            basis,
            amps: vec![C64::new(0.0, 0.0); d],
        }
    }

    /// |X⟩⟩ = Σ X_{mn} |m,n⟩⟩ for a Fock-space matrix X.
    pub fn from_operator(basis: Arc<LiouvilleBasis>, x: &DMatrix<C64>) -> Result<Self> {
        let dh = basis.dim_h();
        if x.shape() != (dh, dh) {
            return Err(TfdError::Shape(format!("operator shape {:?} vs dim_h {dh}", x.shape())));
        }
        let amps = (0..dh * dh).map(|i| x[(i / dh, i % dh)]).collect();
        Ok(SuperState { basis, amps })
    }

    pub fn to_operator(&self) -> DMatrix<C64> {
        let dh = self.basis.dim_h();
        DMatrix::from_fn(dh, dh, |m, n| self.amps[m * dh + n])
    }

    pub fn basis(&self) -> &Arc<LiouvilleBasis> {
        &self.basis
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    /// ⟨⟨self|other⟩⟩ = Σ conj(self)·other.
    pub fn inner(&self, other: &SuperState) -> Result<C64> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(TfdError::BasisMismatch);
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// ⟨⟨I|self⟩⟩, the trace of the represented operator.
    pub fn trace(&self) -> C64 {
        let dh = self.basis.dim_h();
        (0..dh).map(|m| self.amps[m * dh + m]).sum()
    }

    pub fn sub(&self, other: &SuperState) -> SuperState {
        SuperState {
            basis: self.basis.clone(),
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.amps.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_interior(&self, margin: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.basis.is_interior(*i, margin))
            .fold(0.0, |m, (_, z)| m.max(z.norm()))
    }

    /// Max |ρ_{mn} − ρ*_{nm}|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let dh = self.basis.dim_h();
        let mut dev: f64 = 0.0;
        for m in 0..dh {
            for n in 0..dh {
                dev = dev.max((self.amps[m * dh + n] - self.amps[n * dh + m].conj()).norm());
            }
        }
        dev
    }

    /// Diagonal entries ρ_{mm}.
    pub fn diagonal(&self) -> Vec<C64> {
        let dh = self.basis.dim_h();
        (0..dh).map(|m| self.amps[m * dh + m]).collect()
    }
}

/// The identity superstate |I⟩⟩ = Σ_m |m,m⟩⟩.
pub fn identity_superstate(basis: &Arc<LiouvilleBasis>) -> SuperState {
    let dh = basis.dim_h();
    let mut amps = vec![C64::new(0.0, 0.0); basis.dim_l()];
    for m in 0..dh {
        amps[m * dh + m] = C64::new(1.0, 0.0);
    }
    SuperState {
        basis: basis.clone(),
        amps,
    }
}

/// Ǎ = A ⊗ 1: left multiplication by a Fock operator.
pub fn check_of(basis: &Arc<LiouvilleBasis>, a: &CsrMatrix, parity: Parity) -> Result<SuperOperator> {
    let dh = basis.dim_h();
    if a.rows() != dh || a.cols() != dh {
        return Err(TfdError::Shape(format!("Fock operator must be {dh}x{dh}")));
    }
    SuperOperator::new(basis.clone(), a.kron(&CsrMatrix::identity(dh)), parity)
}

/// √σ σ^{μ−ν} with μ, ν counting fermion occupations.
fn tilde_phase(basis: &LiouvilleBasis, j: usize, m_idx: usize, n_idx: usize) -> C64 {
    if !basis.modes()[j].statistics.is_fermion() {
        return C64::new(1.0, 0.0);
    }
    let mu = basis.fermion_number(m_idx) as i64;
    let nu = basis.fermion_number(n_idx) as i64;
    let sign = if (mu - nu).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    C64::new(0.0, sign)
}

/// ǎ_j or ã_j on the basis.
pub fn super_annihilator(basis: &Arc<LiouvilleBasis>, j: usize, kind: Kind) -> Result<SuperOperator> {
    let a = fock::annihilator(basis, j)?;
    let parity = if basis.modes()[j].statistics.is_fermion() {
        Parity::Odd
    } else {
        Parity::Even
    };
    match kind {
        Kind::Check => check_of(basis, &a, parity),
        Kind::Tilde => {
            let dh = basis.dim_h();
            let mut trip = Vec::with_capacity(a.nnz() * dh);
            // ã|m,n⟩⟩ = phase · |m⟩⟨n|a†, and ⟨n|a† = Σ_{n'} conj(a_{n'n}) ⟨n'|.
            for (n_new, n_old, v) in a.triplets() {
                for m in 0..dh {
                    let ph = tilde_phase(basis, j, m, n_old);
                    trip.push((m * dh + n_new, m * dh + n_old, ph * v.conj()));
                }
            }
            SuperOperator::new(basis.clone(), CsrMatrix::from_triplets(dh * dh, dh * dh, trip), parity)
        }
    }
}

/// The four generators (ǎ, ǎ†, ã, ã†) of mode j.
pub struct ModeGenerators {
    pub a_check: SuperOperator,
    pub ad_check: SuperOperator,
    pub a_tilde: SuperOperator,
    pub ad_tilde: SuperOperator,
}

impl ModeGenerators {
    pub fn new(basis: &Arc<LiouvilleBasis>, j: usize) -> Result<Self> {
        let a_check = super_annihilator(basis, j, Kind::Check)?;
        let a_tilde = super_annihilator(basis, j, Kind::Tilde)?;
        Ok(ModeGenerators {
            ad_check: a_check.adjoint(),
            ad_tilde: a_tilde.adjoint(),
            a_check,
            a_tilde,
        })
    }
}

/// φ(k) = (√σ)^{k²}: i for odd fermion count, 1 otherwise.
fn swap_phase(basis: &LiouvilleBasis, m_idx: usize, n_idx: usize) -> C64 {
    if (basis.fermion_number(m_idx) + basis.fermion_number(n_idx)) % 2 == 1 {
        C64::new(0.0, 1.0)
    } else {
        C64::new(1.0, 0.0)
    }
}

/// Tilde conjugation X ↦ P X* P⁻¹ with P|m,n⟩⟩ = φ(μ+ν)|n,m⟩⟩.
///
/// This realizes the rules (XY)~ = X̃Ỹ, (cX)~ = c*X̃, (X†)~ = X̃†, X̃~ = X and
/// maps ǎ_j to ã_j exactly.
pub fn tilde_conjugate(x: &SuperOperator) -> SuperOperator {
    let basis = x.basis.clone();
    let dh = basis.dim_h();
    let swap = |idx: usize| (idx % dh) * dh + idx / dh;
    let phase = |idx: usize| swap_phase(&basis, idx / dh, idx % dh);
    let trip = x.matrix.triplets().map(|(r, c, v)| {
        let (r2, c2) = (swap(r), swap(c));
        (r2, c2, phase(r2) * v.conj() / phase(c2))
    });
    let matrix = CsrMatrix::from_triplets(dh * dh, dh * dh, trip.collect::<Vec<_>>());
    SuperOperator {
        basis: x.basis.clone(),
        matrix,
        parity: x.parity,
    }
}

/// Ĥ = Ȟ − H̃ from a Hermitian Fock-space Hamiltonian.
pub fn total_super_hamiltonian(h: &CsrMatrix, basis: &Arc<LiouvilleBasis>, tol: f64) -> Result<SuperOperator> {
    let deviation = fock::hermiticity_deviation(h);
    if deviation > tol {
        return Err(TfdError::NotHermitian { deviation });
    }
    let hc = check_of(basis, h, Parity::Even)?;
    let ht = tilde_conjugate(&hc);
    Ok(hc.sub(&ht))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::basis::ModeSpec;

    fn one_fermion() -> Arc<LiouvilleBasis> {
        Arc::new(LiouvilleBasis::new(vec![ModeSpec::fermion(1.0)]).unwrap())
    }

    #[test]
    fn boson_check_and_tilde_elements() {
        let b = Arc::new(LiouvilleBasis::new(vec![ModeSpec::boson(1.0, 3)]).unwrap());
        let a = super_annihilator(&b, 0, Kind::Check).unwrap();
        let at = super_annihilator(&b, 0, Kind::Tilde).unwrap();
        let idx = |m, n| b.encode(&[m], &[n]).unwrap();
        assert!((a.matrix().get(idx(1, 1), idx(2, 1)).re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(at.matrix().get(idx(0, 0), idx(0, 1)), C64::new(1.0, 0.0));
    }

    #[test]
    fn fermion_tilde_phases() {
        let b = one_fermion();
        let at = super_annihilator(&b, 0, Kind::Tilde).unwrap();
        let idx = |m, n| b.encode(&[m], &[n]).unwrap();
        // ã|1,0⟩⟩ vanishes; its adjoint carries the −i phase.
        for r in 0..4 {
            assert_eq!(at.matrix().get(r, idx(1, 0)), C64::new(0.0, 0.0));
        }
        let adt = at.adjoint();
        assert_eq!(adt.matrix().get(idx(1, 1), idx(1, 0)), C64::new(0.0, -1.0));
    }

    #[test]
    fn identity_superstate_fermion() {
        let b = one_fermion();
        let i = identity_superstate(&b);
        let expected: Vec<C64> = [1.0, 0.0, 0.0, 1.0].iter().map(|&x| C64::new(x, 0.0)).collect();
        assert_eq!(i.amps(), &expected[..]);
        assert_eq!(i.inner(&i).unwrap(), C64::new(2.0, 0.0));
    }

    #[test]
    fn tilde_of_check_is_tilde_generator() {
        let b = Arc::new(
            LiouvilleBasis::new(vec![ModeSpec::fermion(1.0), ModeSpec::boson(2.0, 2), ModeSpec::fermion(0.5)]).unwrap(),
        );
        for j in 0..3 {
            let a = super_annihilator(&b, j, Kind::Check).unwrap();
            let at = super_annihilator(&b, j, Kind::Tilde).unwrap();
            assert_eq!(tilde_conjugate(&a).matrix().sub(at.matrix()).max_abs(), 0.0, "mode {j}");
        }
    }

    #[test]
    fn identity_hamiltonian_vanishes() {
        let b = Arc::new(LiouvilleBasis::new(vec![ModeSpec::boson(1.0, 2)]).unwrap());
        let h = total_super_hamiltonian(&CsrMatrix::identity(3), &b, 1e-12).unwrap();
        assert_eq!(h.matrix().max_abs(), 0.0);
    }

    #[test]
    fn non_hermitian_rejected() {
        let b = Arc::new(LiouvilleBasis::new(vec![ModeSpec::boson(1.0, 2)]).unwrap());
        let a = fock::annihilator(&b, 0).unwrap();
        assert!(matches!(
            total_super_hamiltonian(&a, &b, 1e-12),
            Err(TfdError::NotHermitian { .. })
        ));
    }
}
