//! Exact propagation of the interacting system in the eigenbasis of H.

use super::model::InteractionModel;
use crate::error::{Result, TfdError};
use crate::liouville::{fock, LiouvilleBasis};
use crate::sparse::C64;
use crate::unperturbed::geometric_state;
use nalgebra::{DMatrix, SymmetricEigen};
use std::sync::Arc;

/// ρ(t) = e^{−iH(t−t₀)} ρ₀ e^{iH(t−t₀)} with everything kept in the eigenbasis.
pub struct ExactEngine {
    basis: Arc<LiouvilleBasis>,
    hamiltonian: DMatrix<C64>,
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
    rho0_eig: DMatrix<C64>,
    /// E† N_j E
    number_eig: Vec<DMatrix<C64>>,
    /// E† i[H, N_j] E
    rate_eig: Vec<DMatrix<C64>>,
    /// E† P_j E with P_j the projector onto n_j = cutoff (bosons only)
    edge_eig: Vec<Option<DMatrix<C64>>>,
    t0: f64,
}

impl ExactEngine {
    pub fn new(basis: &Arc<LiouvilleBasis>, model: &InteractionModel, rho0: &DMatrix<C64>, t0: f64) -> Result<Self> {
        let dh = basis.dim_h();
        if rho0.shape() != (dh, dh) {
            return Err(TfdError::Shape(format!("initial state {:?} vs dim_h {dh}", rho0.shape())));
        }
        let hamiltonian = model.fock_hamiltonian(basis)?.to_dense();
        let eig = SymmetricEigen::new(hamiltonian.clone());
        let vectors = eig.eigenvectors;
        let energies = eig.eigenvalues.iter().copied().collect();
        let to_eig = |x: &DMatrix<C64>| vectors.adjoint() * x * &vectors;
        let i = C64::new(0.0, 1.0);
        let mut number_eig = Vec::new();
        let mut rate_eig = Vec::new();
        let mut edge_eig = Vec::new();
        for (j, mode) in basis.modes().iter().enumerate() {
            edge_eig.push(if mode.statistics.is_fermion() {
                None
            } else {
                let p = DMatrix::from_fn(dh, dh, |a, b| {
                    let at_edge = a == b && basis.decode_fock(a)[j] == mode.cutoff;
                    C64::new(if at_edge { 1.0 } else { 0.0 }, 0.0)
                });
                Some(to_eig(&p))
            });
            let n = fock::number(basis, j)?.to_dense();
            let comm = (&hamiltonian * &n - &n * &hamiltonian) * i;
            number_eig.push(to_eig(&n));
            rate_eig.push(to_eig(&comm));
        }
        Ok(ExactEngine {
            basis: basis.clone(),
            rho0_eig: to_eig(rho0),
            hamiltonian,
            energies,
            vectors,
            number_eig,
            rate_eig,
            edge_eig,
            t0,
        })
    }

    /// Uncorrelated start: product of geometric distributions at occupations n0.
    pub fn from_occupations(basis: &Arc<LiouvilleBasis>, model: &InteractionModel, n0: &[f64], t0: f64) -> Result<Self> {
        let rho = geometric_state(basis, n0)?.state.to_operator();
        Self::new(basis, model, &rho, t0)
    }

    pub fn basis(&self) -> &Arc<LiouvilleBasis> {
        &self.basis
    }

    pub fn hamiltonian(&self) -> &DMatrix<C64> {
        &self.hamiltonian
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &DMatrix<C64> {
        &self.vectors
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// e^{−i(ε_a−ε_b)τ} elementwise.
    pub fn phase_matrix(&self, tau: f64) -> DMatrix<C64> {
        let n = self.energies.len();
        DMatrix::from_fn(n, n, |a, b| C64::from_polar(1.0, -(self.energies[a] - self.energies[b]) * tau))
    }

    pub fn to_eigenbasis(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        self.vectors.adjoint() * x * &self.vectors
    }

    pub fn from_eigenbasis(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        &self.vectors * x * self.vectors.adjoint()
    }

    pub fn rho_eig_at(&self, t: f64) -> DMatrix<C64> {
        self.rho0_eig.component_mul(&self.phase_matrix(t - self.t0))
    }

    pub fn rho_at(&self, t: f64) -> DMatrix<C64> {
        self.from_eigenbasis(&self.rho_eig_at(t))
    }

    /// Tr(X ρ) from eigenbasis representations.
    fn trace_eig(x: &DMatrix<C64>, rho: &DMatrix<C64>) -> C64 {
        x.transpose().component_mul(rho).sum()
    }

    /// n_H,j(t) = Tr(N_j ρ(t)).
    pub fn occupation(&self, j: usize, t: f64) -> f64 {
        Self::trace_eig(&self.number_eig[j], &self.rho_eig_at(t)).re
    }

    /// (cutoff+1)·P(n_j = cutoff), the defect of ⟨[a_j, a_j†]⟩ = 1 on the
    /// truncated space; zero for fermions.
    pub fn commutator_defect(&self, j: usize, t: f64) -> f64 {
        match &self.edge_eig[j] {
            None => 0.0,
            Some(p) => (self.basis.modes()[j].cutoff + 1) as f64 * Self::trace_eig(p, &self.rho_eig_at(t)).re,
        }
    }

    /// dn_H,j/dt = Tr(i[H, N_j] ρ(t)).
    pub fn occupation_rate(&self, j: usize, t: f64) -> f64 {
        Self::trace_eig(&self.rate_eig[j], &self.rho_eig_at(t)).re
    }
}
