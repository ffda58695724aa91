//! Two-body contact interaction (λ/2) Σ V_jklm a†_j a†_k a_l a_m.

use crate::error::{Result, TfdError};
use crate::liouville::{fock, LiouvilleBasis, ModeSpec, Statistics};
use crate::sparse::{CsrMatrix, C64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One vertex entry before symmetrization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub v: f64,
    #[serde(default)]
    pub v_im: f64,
}

impl Channel {
    pub fn new(j: usize, k: usize, l: usize, m: usize, v: f64) -> Self {
        Channel { j, k, l, m, v, v_im: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionModel {
    pub lambda: f64,
    statistics: Vec<Statistics>,
    vertex: BTreeMap<[usize; 4], C64>,
}

impl InteractionModel {
    /// Expands every channel into its exchange and Hermitian-conjugate images.
    pub fn new(lambda: f64, statistics: Vec<Statistics>, channels: &[Channel]) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(TfdError::Config(format!("coupling {lambda} is not finite")));
        }
        let n = statistics.len();
        let mut vertex = BTreeMap::new();
        let swap_sign = |a: usize, b: usize| {
            if statistics[a].is_fermion() && statistics[b].is_fermion() {
                -1.0
            } else {
                1.0
            }
        };
        for ch in channels {
            let idx = [ch.j, ch.k, ch.l, ch.m];
            if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
                return Err(TfdError::InvalidMode { index: bad, modes: n });
            }
            let v = C64::new(ch.v, ch.v_im);
            let (sc, sa) = (swap_sign(ch.j, ch.k), swap_sign(ch.l, ch.m));
            let images = [
                ([ch.j, ch.k, ch.l, ch.m], v),
                ([ch.k, ch.j, ch.l, ch.m], v * sc),
                ([ch.j, ch.k, ch.m, ch.l], v * sa),
                ([ch.k, ch.j, ch.m, ch.l], v * sc * sa),
                ([ch.l, ch.m, ch.j, ch.k], v.conj()),
                ([ch.m, ch.l, ch.j, ch.k], v.conj() * sa),
                ([ch.l, ch.m, ch.k, ch.j], v.conj() * sc),
                ([ch.m, ch.l, ch.k, ch.j], v.conj() * sc * sa),
            ];
            for (key, val) in images {
                // a†_j a†_j vanishes for a fermion, so those entries are dropped
                let pauli = (key[0] == key[1] && statistics[key[0]].is_fermion())
                    || (key[2] == key[3] && statistics[key[2]].is_fermion());
                if pauli {
                    continue;
                }
                match vertex.insert(key, val) {
                    Some(old) if (old - val).norm() > 1e-14 * (1.0 + val.norm()) => {
                        return Err(TfdError::Config(format!(
                            "vertex channels imply conflicting values for V{key:?}: {old} vs {val}"
                        )));
                    }
                    _ => {}
                }
            }
        }
        vertex.retain(|_, v| *v != C64::new(0.0, 0.0));
        Ok(InteractionModel { lambda, statistics, vertex })
    }

    /// Resonant three-boson ladder ω = (1,2,3) with the 1+3 ↔ 2+2 channel.
    pub fn ladder(lambda: f64) -> Self {
        Self::new(lambda, vec![Statistics::Boson; 3], &[Channel::new(0, 2, 1, 1, 1.0)]).expect("ladder channels are consistent")
    }

    pub fn ladder_modes(cutoffs: [usize; 3], omega: [f64; 3]) -> Vec<ModeSpec> {
        cutoffs.iter().zip(omega).map(|(&c, w)| ModeSpec::boson(w, c)).collect()
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        InteractionModel { lambda, ..self.clone() }
    }

    pub fn n_modes(&self) -> usize {
        self.statistics.len()
    }

    pub fn statistics(&self) -> &[Statistics] {
        &self.statistics
    }

    pub fn vertex(&self, j: usize, k: usize, l: usize, m: usize) -> C64 {
        self.vertex.get(&[j, k, l, m]).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Nonzero entries V_jklm.
    pub fn entries(&self) -> impl Iterator<Item = ([usize; 4], C64)> + '_ {
        self.vertex.iter().map(|(k, v)| (*k, *v))
    }

    /// max |V_jklm − V*_lmjk|.
    pub fn hermiticity_residual(&self) -> f64 {
        self.entries()
            .map(|([j, k, l, m], v)| (v - self.vertex(l, m, j, k).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// ‖V‖² = max over j of Σ_klm |V_jklm|².
    pub fn vertex_norm2(&self) -> f64 {
        (0..self.n_modes())
            .map(|j| self.entries().filter(|(k, _)| k[0] == j).map(|(_, v)| v.norm_sqr()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn check_basis(&self, basis: &LiouvilleBasis) -> Result<()> {
        let stats: Vec<Statistics> = basis.modes().iter().map(|m| m.statistics).collect();
        if stats != self.statistics {
            return Err(TfdError::Config("interaction model and basis disagree on modes".into()));
        }
        Ok(())
    }

    /// (λ/2) Σ V a†a†aa on the Fock space.
    pub fn interaction_fock(&self, basis: &LiouvilleBasis) -> Result<CsrMatrix> {
        self.check_basis(basis)?;
        let dh = basis.dim_h();
        let a: Vec<CsrMatrix> = (0..self.n_modes()).map(|j| fock::annihilator(basis, j)).collect::<Result<_>>()?;
        let ad: Vec<CsrMatrix> = a.iter().map(|x| x.adjoint()).collect();
        let mut h = CsrMatrix::zeros(dh, dh);
        for ([j, k, l, m], v) in self.entries() {
            let term = ad[j].matmul(&ad[k]).matmul(&a[l]).matmul(&a[m]);
            h = h.lin_comb(C64::new(1.0, 0.0), &term, v * (0.5 * self.lambda));
        }
        Ok(h)
    }

    /// H = Σ ω₀ a†a + interaction, with ω₀ the bare energies of the basis modes.
    pub fn fock_hamiltonian(&self, basis: &LiouvilleBasis) -> Result<CsrMatrix> {
        let mut h = self.interaction_fock(basis)?;
        for (j, m) in basis.modes().iter().enumerate() {
            h = h.lin_comb(C64::new(1.0, 0.0), &fock::number(basis, j)?, C64::new(m.bare_energy, 0.0));
        }
        Ok(h)
    }
}
