//! Residual checks for the check/tilde operator algebra on a truncated basis.
//!
//! Boson identities are compared on an interior subspace: operator identities
//! only on input columns with every boson occupation ≤ cutoff − degree, state
//! identities only on components with occupations ≤ cutoff − 1.

use super::basis::LiouvilleBasis;
use super::fock;
use super::superop::{
    check_of, identity_superstate, super_annihilator, tilde_conjugate, total_super_hamiltonian, Kind,
    ModeGenerators, Parity, SuperOperator, SuperState,
};
use crate::error::Result;
use crate::report::{max_check, CheckResult};
use crate::sparse::{CsrMatrix, C64};
use rand::Rng;
use std::sync::Arc;

/// A product of Fock generators a_j (dagger = false) or a_j† (dagger = true).
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub factors: Vec<(usize, bool)>,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    pub fn parity(&self, basis: &LiouvilleBasis) -> Parity {
        let odd = self
            .factors
            .iter()
            .filter(|(j, _)| basis.modes()[*j].statistics.is_fermion())
            .count()
            % 2
            == 1;
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Fock matrix of the product (left factor applied last).
    pub fn fock_matrix(&self, basis: &LiouvilleBasis) -> Result<CsrMatrix> {
        let mut out = CsrMatrix::identity(basis.dim_h());
        for &(j, dagger) in &self.factors {
            let g = if dagger {
                fock::creator(basis, j)?
            } else {
                fock::annihilator(basis, j)?
            };
            out = out.matmul(&g);
        }
        Ok(out)
    }

    pub fn random<R: Rng>(basis: &LiouvilleBasis, rng: &mut R, max_degree: usize) -> Monomial {
        let degree = rng.gen_range(1..=max_degree);
        let factors = (0..degree)
            .map(|_| (rng.gen_range(0..basis.n_modes()), rng.gen_bool(0.5)))
            .collect();
        Monomial { factors }
    }
}

fn random_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random polynomial Σ c_i Ǎ_i of monomials up to `max_degree`.
pub fn random_polynomial<R: Rng>(
    basis: &Arc<LiouvilleBasis>,
    rng: &mut R,
    terms: usize,
    max_degree: usize,
) -> Result<SuperOperator> {
    let mut acc = SuperOperator::zero(basis.clone());
    for _ in 0..terms {
        let m = Monomial::random(basis, rng, max_degree);
        let x = check_of(basis, &m.fock_matrix(basis)?, m.parity(basis))?;
        acc = acc.lin_comb(C64::new(1.0, 0.0), &x, random_c64(rng));
    }
    Ok(acc)
}

/// Tilde conjugate of a superstate: |X⟩⟩ ↦ P|X*⟩⟩.
pub fn tilde_state(state: &SuperState) -> SuperState {
    let basis = state.basis().clone();
    let dh = basis.dim_h();
    let mut out = vec![C64::new(0.0, 0.0); basis.dim_l()];
    for (idx, z) in state.amps().iter().enumerate() {
        let (m, n) = (idx / dh, idx % dh);
        let odd = (basis.fermion_number(m) + basis.fermion_number(n)) % 2 == 1;
        let ph = if odd { C64::new(0.0, 1.0) } else { C64::new(1.0, 0.0) };
        out[n * dh + m] = ph * z.conj();
    }
    SuperState::new(basis, out).expect("same dimension")
}

fn sqrt_sigma(basis: &LiouvilleBasis, j: usize) -> C64 {
    if basis.modes()[j].statistics.is_fermion() {
        C64::new(0.0, 1.0)
    } else {
        C64::new(1.0, 0.0)
    }
}

fn op_residual(x: &SuperOperator, margin: usize) -> f64 {
    x.max_abs_interior(margin)
}

fn minus_identity(x: &SuperOperator) -> SuperOperator {
    x.sub(&SuperOperator::identity(x.basis().clone()))
}

/// Configuration of a randomized algebra sweep.
#[derive(Debug, Clone, Copy)]
pub struct AlgebraSweep {
    pub tol: f64,
    pub samples: usize,
    pub max_degree: usize,
}

impl Default for AlgebraSweep {
    fn default() -> Self {
        AlgebraSweep {
            tol: 1e-12,
            samples: 8,
            max_degree: 3,
        }
    }
}

/// Runs every algebraic identity on `basis` and returns one check per family.
pub fn verify_algebra<R: Rng>(basis: &Arc<LiouvilleBasis>, sweep: AlgebraSweep, rng: &mut R) -> Result<Vec<CheckResult>> {
    let tol = sweep.tol;
    let nm = basis.n_modes();
    let gens: Vec<ModeGenerators> = (0..nm).map(|j| ModeGenerators::new(basis, j)).collect::<Result<_>>()?;
    let ident = identity_superstate(basis);
    let mut out = Vec::new();

    // Canonical (anti)commutators, check and tilde sectors.
    let mut canon = Vec::new();
    let mut mixed = Vec::new();
    for j in 0..nm {
        for k in 0..nm {
            let (gj, gk) = (&gens[j], &gens[k]);
            let delta = |x: SuperOperator| if j == k { minus_identity(&x) } else { x };
            canon.push(op_residual(&delta(gj.a_check.graded_commutator(&gk.ad_check)), 1));
            canon.push(op_residual(&delta(gj.a_tilde.graded_commutator(&gk.ad_tilde)), 1));
            canon.push(op_residual(&gj.a_check.graded_commutator(&gk.a_check), 0));
            canon.push(op_residual(&gj.a_tilde.graded_commutator(&gk.a_tilde), 0));
            for x in [&gj.a_check, &gj.ad_check] {
                for y in [&gk.a_tilde, &gk.ad_tilde] {
                    mixed.push(op_residual(&x.graded_commutator(y), 0));
                }
            }
        }
    }
    out.push(max_check("canonical_commutators", canon, tol));
    out.push(max_check("check_tilde_commutators", mixed, tol));

    // Thermal state conditions on the identity superstate.
    let mut rtsi = Vec::new();
    for (j, g) in gens.iter().enumerate() {
        let s = sqrt_sigma(basis, j);
        let lhs = g.a_tilde.lin_comb(C64::new(1.0, 0.0), &g.ad_check, -s).apply(&ident);
        rtsi.push(lhs.max_abs_interior(1));
        let lhs = g.ad_tilde.lin_comb(C64::new(1.0, 0.0), &g.a_check, -s).apply(&ident);
        rtsi.push(lhs.max_abs_interior(1));
    }
    out.push(max_check("identity_state_conditions", rtsi, tol));

    // Number superoperators are exact everywhere.
    let mut numbers = Vec::new();
    let dh = basis.dim_h();
    for (j, g) in gens.iter().enumerate() {
        let nc = g.ad_check.mul(&g.a_check);
        let nt = g.ad_tilde.mul(&g.a_tilde);
        let dc: Vec<C64> = (0..basis.dim_l())
            .map(|i| C64::new(basis.decode_fock(i / dh)[j] as f64, 0.0))
            .collect();
        let dt: Vec<C64> = (0..basis.dim_l())
            .map(|i| C64::new(basis.decode_fock(i % dh)[j] as f64, 0.0))
            .collect();
        numbers.push(nc.matrix().sub(&CsrMatrix::diagonal(&dc)).max_abs());
        numbers.push(nt.matrix().sub(&CsrMatrix::diagonal(&dt)).max_abs());
    }
    out.push(max_check("number_superoperators", numbers, tol));

    // Tilde conjugation rules and tilde(Ǎ)† |I⟩⟩ = phase · Ǎ |I⟩⟩.
    let mut generator_rule = Vec::new();
    for (j, g) in gens.iter().enumerate() {
        let at = super_annihilator(basis, j, Kind::Tilde)?;
        generator_rule.push(tilde_conjugate(&g.a_check).sub(&at).matrix().max_abs());
        generator_rule.push(tilde_conjugate(&g.ad_check).sub(&at.adjoint()).matrix().max_abs());
    }
    out.push(max_check("tilde_generator_rule", generator_rule, tol));

    let mut products = Vec::new();
    let mut linear = Vec::new();
    let mut adjoints = Vec::new();
    let mut involution = Vec::new();
    let mut tilada = Vec::new();
    for _ in 0..sweep.samples {
        let x = random_polynomial(basis, rng, 3, sweep.max_degree)?;
        let y = random_polynomial(basis, rng, 3, sweep.max_degree)?;
        let (tx, ty) = (tilde_conjugate(&x), tilde_conjugate(&y));
        products.push(tilde_conjugate(&x.mul(&y)).sub(&tx.mul(&ty)).matrix().max_abs());
        let (c1, c2) = (random_c64(rng), random_c64(rng));
        let lhs = tilde_conjugate(&x.lin_comb(c1, &y, c2));
        let rhs = tx.lin_comb(c1.conj(), &ty, c2.conj());
        linear.push(lhs.sub(&rhs).matrix().max_abs());
        adjoints.push(tilde_conjugate(&x.adjoint()).sub(&tx.adjoint()).matrix().max_abs());
        involution.push(tilde_conjugate(&tx).sub(&x).matrix().max_abs());

        let m = Monomial::random(basis, rng, sweep.max_degree);
        let a = check_of(basis, &m.fock_matrix(basis)?, m.parity(basis))?;
        let lhs = tilde_conjugate(&a).adjoint().apply(&ident);
        let phase = match m.parity(basis) {
            Parity::Even => C64::new(1.0, 0.0),
            Parity::Odd => C64::new(0.0, 1.0),
        };
        let rhs = a.scale(phase).apply(&ident);
        tilada.push(lhs.sub(&rhs).max_abs_interior(m.degree()));
    }
    out.push(max_check("tilde_product_rule", products, tol));
    out.push(max_check("tilde_antilinearity", linear, tol));
    out.push(max_check("tilde_adjoint_rule", adjoints, tol));
    out.push(max_check("tilde_involution", involution, tol));
    out.push(max_check("tilde_adjoint_on_identity", tilada, tol));
    out.push(CheckResult::below(
        "identity_tilde_invariance",
        tilde_state(&ident).sub(&ident).max_abs(),
        tol,
    ));

    // Total super-Hamiltonian of a random even Hermitian H.
    let h = random_even_hermitian(basis, rng, sweep.max_degree)?;
    let hh = total_super_hamiltonian(&h, basis, tol)?;
    let row = hh.bra_apply(&ident);
    out.push(CheckResult::below("hamiltonian_left_vacuum", row.max_abs(), tol));
    let x = random_state(basis, rng);
    let lhs = hh.apply(&x);
    let xo = x.to_operator();
    let hd = h.to_dense();
    let comm = &hd * &xo - &xo * &hd;
    let rhs = SuperState::from_operator(basis.clone(), &comm)?;
    out.push(CheckResult::below("hamiltonian_commutator", lhs.sub(&rhs).max_abs(), tol));
    Ok(out)
}

/// Random Hermitian Fock operator with an even number of fermion factors per term.
pub fn random_even_hermitian<R: Rng>(basis: &LiouvilleBasis, rng: &mut R, max_degree: usize) -> Result<CsrMatrix> {
    let mut h = CsrMatrix::zeros(basis.dim_h(), basis.dim_h());
    let mut added = 0;
    while added < 4 {
        let m = Monomial::random(basis, rng, max_degree.max(2));
        if m.parity(basis) == Parity::Odd {
            continue;
        }
        let f = m.fock_matrix(basis)?.scale(random_c64(rng));
        h = h.add(&f).add(&f.adjoint());
        added += 1;
    }
    Ok(h)
}

pub fn random_state<R: Rng>(basis: &Arc<LiouvilleBasis>, rng: &mut R) -> SuperState {
    let amps = (0..basis.dim_l()).map(|_| random_c64(rng)).collect();
    SuperState::new(basis.clone(), amps).expect("dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::basis::ModeSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run(modes: Vec<ModeSpec>) {
        let basis = Arc::new(LiouvilleBasis::new(modes).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for c in verify_algebra(&basis, AlgebraSweep::default(), &mut rng).unwrap() {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn single_boson() {
        run(vec![ModeSpec::boson(1.0, 4)]);
    }

    #[test]
    fn two_fermions() {
        run(vec![ModeSpec::fermion(1.0), ModeSpec::fermion(2.0)]);
    }

    #[test]
    fn mixed_statistics() {
        run(vec![ModeSpec::boson(1.0, 3), ModeSpec::fermion(2.0)]);
    }

    #[test]
    fn tilde_state_of_identity() {
        let basis = Arc::new(LiouvilleBasis::new(vec![ModeSpec::fermion(1.0)]).unwrap());
        let i = identity_superstate(&basis);
        assert_eq!(tilde_state(&i), i);
    }
}
