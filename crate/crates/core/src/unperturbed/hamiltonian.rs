use super::zeta::{solve_zeta, ZetaParams};
use crate::error::{Result, TfdError};
use crate::liouville::{LiouvilleBasis, ModeGenerators, SuperOperator};
use crate::schedule::ThermalSchedule;
use crate::sparse::C64;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HuForm {
    /// Bilinear form with free rate γ from the schedule.
    General,
    /// γ = 0 form written with ṅ only.
    Physical,
}

/// Fixed operator pieces of one mode.
pub struct ModeTerms {
    pub gens: ModeGenerators,
    /// σ√σ ǎ ã
    pub pair_annihilate: SuperOperator,
    /// σ√σ ǎ† ã†
    pub pair_create: SuperOperator,
    /// ǎ† ǎ
    pub number_check: SuperOperator,
    /// ã† ã
    pub number_tilde: SuperOperator,
    /// ã ã†
    pub tilde_anti_number: SuperOperator,
    sigma: f64,
}

fn sigma_sqrt_sigma(sigma: f64) -> C64 {
    if sigma > 0.0 {
        C64::new(1.0, 0.0)
    } else {
        // σ√σ = −i for fermions
        C64::new(0.0, -1.0)
    }
}

impl ModeTerms {
    pub fn new(basis: &Arc<LiouvilleBasis>, j: usize) -> Result<Self> {
        let gens = ModeGenerators::new(basis, j)?;
        let sigma = basis.modes()[j].sigma();
        let ss = sigma_sqrt_sigma(sigma);
        Ok(ModeTerms {
            pair_annihilate: gens.a_check.mul(&gens.a_tilde).scale(ss),
            pair_create: gens.ad_check.mul(&gens.ad_tilde).scale(ss),
            number_check: gens.ad_check.mul(&gens.a_check),
            number_tilde: gens.ad_tilde.mul(&gens.a_tilde),
            tilde_anti_number: gens.a_tilde.mul(&gens.ad_tilde),
            gens,
            sigma,
        })
    }
}

/// The unperturbed super-Hamiltonian family Ĥ_u(t) of a schedule.
pub struct UnperturbedHamiltonian {
    basis: Arc<LiouvilleBasis>,
    terms: Vec<ModeTerms>,
    schedule: ThermalSchedule,
    form: HuForm,
}

impl UnperturbedHamiltonian {
    pub fn new(basis: &Arc<LiouvilleBasis>, schedule: &ThermalSchedule, form: HuForm) -> Result<Self> {
        if schedule.n_modes() != basis.n_modes() {
            return Err(TfdError::Config(format!(
                "schedule has {} modes, basis has {}",
                schedule.n_modes(),
                basis.n_modes()
            )));
        }
        for (j, (m, s)) in basis.modes().iter().zip(&schedule.modes).enumerate() {
            if m.statistics != s.statistics {
                return Err(TfdError::Config(format!("mode {j}: schedule statistics disagree with basis")));
            }
        }
        let terms = (0..basis.n_modes())
            .map(|j| ModeTerms::new(basis, j))
            .collect::<Result<_>>()?;
        Ok(UnperturbedHamiltonian {
            basis: basis.clone(),
            terms,
            schedule: schedule.clone(),
            form,
        })
    }

    pub fn basis(&self) -> &Arc<LiouvilleBasis> {
        &self.basis
    }

    pub fn schedule(&self) -> &ThermalSchedule {
        &self.schedule
    }

    pub fn terms(&self) -> &[ModeTerms] {
        &self.terms
    }

    pub fn zeta(&self, t: f64) -> Result<Vec<ZetaParams>> {
        solve_zeta(&self.schedule, t)
    }

    /// (coefficient, operator) pairs plus the multiple of the identity.
    fn pieces(&self, t: f64) -> Result<(Vec<(C64, &SuperOperator)>, C64)> {
        let i = C64::new(0.0, 1.0);
        let mut out = Vec::with_capacity(5 * self.terms.len());
        let mut constant = C64::new(0.0, 0.0);
        match self.form {
            HuForm::General => {
                for (z, m) in self.zeta(t)?.iter().zip(&self.terms) {
                    out.push((i * z.zeta1, &m.pair_annihilate));
                    out.push((i * z.zeta2, &m.pair_create));
                    out.push((C64::new(z.omega, z.zeta3), &m.number_check));
                    out.push((C64::new(-z.omega, z.zeta3), &m.number_tilde));
                    constant += i * z.zeta5;
                }
            }
            HuForm::Physical => {
                for (j, m) in self.terms.iter().enumerate() {
                    let w = self.schedule.omega(j, t);
                    let nd = self.schedule.ndot(j, t);
                    let s = m.sigma;
                    out.push((C64::new(w, -s * nd), &m.number_check));
                    out.push((C64::new(-w, 0.0), &m.number_tilde));
                    out.push((i * (s * nd), &m.pair_annihilate));
                    out.push((i * nd, &m.pair_create));
                    out.push((-i * nd, &m.tilde_anti_number));
                }
            }
        }
        Ok((out, constant))
    }

    /// Ĥ_u(t) as a sparse superoperator.
    pub fn at(&self, t: f64) -> Result<SuperOperator> {
        let (pieces, constant) = self.pieces(t)?;
        let one = C64::new(1.0, 0.0);
        let mut h = SuperOperator::identity(self.basis.clone()).scale(constant);
        for (c, op) in pieces {
            h = h.lin_comb(one, op, c);
        }
        Ok(h)
    }

    /// y = −i Ĥ_u(t) x without assembling the sum.
    pub fn rhs(&self, t: f64, x: &[C64], y: &mut [C64]) -> Result<()> {
        let (pieces, constant) = self.pieces(t)?;
        let minus_i = C64::new(0.0, -1.0);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = minus_i * constant * xi;
        }
        for (c, op) in pieces {
            if c.re != 0.0 || c.im != 0.0 {
                op.matrix().matvec_acc(minus_i * c, x, y);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::{identity_superstate, tilde_conjugate, ModeSpec, Statistics};
    use crate::schedule::{Curve, ModeSchedule};

    fn setup(stats: Statistics, gamma: f64) -> (Arc<LiouvilleBasis>, ThermalSchedule) {
        let mode = match stats {
            Statistics::Boson => ModeSpec::boson(1.3, 6),
            Statistics::Fermion => ModeSpec::fermion(1.3),
        };
        let basis = Arc::new(LiouvilleBasis::new(vec![mode]).unwrap());
        let mut ms = ModeSchedule::new(stats, Curve::Linear { value: 0.3, slope: 0.2 }, Curve::constant(1.3));
        ms.gamma = Curve::constant(gamma);
        (basis, ThermalSchedule::new(vec![ms]))
    }

    #[test]
    fn static_schedule_reduces_to_energy_difference() {
        let basis = Arc::new(LiouvilleBasis::new(vec![ModeSpec::boson(2.0, 3)]).unwrap());
        let sched = ThermalSchedule::constant(&[Statistics::Boson], &[0.5], &[2.0]);
        let hu = UnperturbedHamiltonian::new(&basis, &sched, HuForm::Physical).unwrap();
        let h = hu.at(0.0).unwrap();
        let m = &hu.terms()[0];
        let expected = m.number_check.sub(&m.number_tilde).scale(C64::new(2.0, 0.0));
        assert_eq!(h.sub(&expected).matrix().max_abs(), 0.0);
    }

    #[test]
    fn left_vacuum_and_anti_tilde() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            for form in [HuForm::General, HuForm::Physical] {
                let gamma = if form == HuForm::General { 0.17 } else { 0.0 };
                let (basis, sched) = setup(stats, gamma);
                let hu = UnperturbedHamiltonian::new(&basis, &sched, form).unwrap();
                let h = hu.at(0.4).unwrap();
                let row = h.bra_apply(&identity_superstate(&basis));
                assert!(row.max_abs_interior(1) < 1e-12, "{stats:?} {form:?}");
                let anti = tilde_conjugate(&h).add(&h);
                assert!(anti.max_abs_interior(1) < 1e-12, "{stats:?} {form:?}");
            }
        }
    }

    #[test]
    fn physical_equals_general_at_zero_gamma() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let (basis, sched) = setup(stats, 0.0);
            let g = UnperturbedHamiltonian::new(&basis, &sched, HuForm::General).unwrap();
            let p = UnperturbedHamiltonian::new(&basis, &sched, HuForm::Physical).unwrap();
            let d = g.at(0.9).unwrap().sub(&p.at(0.9).unwrap());
            assert!(d.max_abs_interior(1) < 1e-14, "{stats:?}");
        }
    }

    #[test]
    fn rhs_matches_assembled_matrix() {
        let (basis, sched) = setup(Statistics::Boson, 0.1);
        let hu = UnperturbedHamiltonian::new(&basis, &sched, HuForm::General).unwrap();
        let x: Vec<C64> = (0..basis.dim_l()).map(|k| C64::new((k as f64).sin(), (k as f64 * 0.3).cos())).collect();
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        hu.rhs(0.2, &x, &mut y).unwrap();
        let z = hu.at(0.2).unwrap().matrix().matvec(&x);
        for (a, b) in y.iter().zip(&z) {
            assert!((a - C64::new(0.0, -1.0) * b).norm() < 1e-13);
        }
    }
}
