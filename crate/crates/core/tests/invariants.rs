//! Property tests for algebraic and physical invariants.

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tfd_core::cli::{format_float, ScenarioConfig};
use tfd_core::kinetics::{distribution, fit_equilibrium, markovian_collision, EquilibriumSpec};
use tfd_core::liouville::algebra::{verify_algebra, AlgebraSweep};
use tfd_core::liouville::{LiouvilleBasis, ModeSpec, Statistics};
use tfd_core::perturbation::InteractionModel;
use tfd_core::schedule::{Curve, ModeSchedule, ThermalSchedule};
use tfd_core::tfd::{bogoliubov, propagator_delta};
use tfd_core::unperturbed::{geometric_residual, geometric_state};

const LADDER_OMEGA: [f64; 3] = [1.0, 2.0, 3.0];

fn stats() -> impl Strategy<Value = Statistics> {
    prop_oneof![Just(Statistics::Boson), Just(Statistics::Fermion)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn algebra_holds_for_any_seed(seed in any::<u64>(), cutoff in 2usize..7, w in 0.5f64..3.0) {
        let basis = Arc::new(LiouvilleBasis::new(vec![ModeSpec::boson(w, cutoff), ModeSpec::fermion(1.3)]).unwrap());
        let sweep = AlgebraSweep { tol: 1e-12, samples: 3, max_degree: 2 };
        let checks = verify_algebra(&basis, sweep, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        for c in checks {
            prop_assert!(c.passed(), "{} residual {}", c.name, c.residual);
        }
    }

    #[test]
    fn bogoliubov_inverse_and_unit_determinant(s in stats(), x in 0.0f64..1.0, scale in 1.0f64..20.0) {
        let n = match s { Statistics::Boson => x * scale, Statistics::Fermion => x };
        let b = bogoliubov(s, n).unwrap();
        let residual = (b.matrix() * b.inverse() - nalgebra::Matrix2::identity()).abs().max();
        prop_assert!(residual < 1e-12 * (1.0 + n));
        prop_assert!((b.determinant() - 1.0).abs() < 1e-12 * (1.0 + n));
    }

    #[test]
    fn collision_conserves_number_and_energy(n in prop::array::uniform3(0.0f64..5.0), gamma in 0.01f64..0.5) {
        let model = InteractionModel::ladder(0.3);
        let r = markovian_collision(&model, &n, &LADDER_OMEGA, gamma).unwrap();
        let scale = r.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        prop_assert!(r.iter().sum::<f64>().abs() < 1e-12 * scale);
        let energy: f64 = r.iter().zip(LADDER_OMEGA).map(|(a, w)| a * w).sum();
        prop_assert!(energy.abs() < 1e-12 * scale);
    }

    #[test]
    fn bose_einstein_is_a_fixed_point(beta in 0.1f64..5.0, mu in -3.0f64..0.9) {
        let model = InteractionModel::ladder(0.3);
        let n = EquilibriumSpec::new(beta, mu).unwrap().occupations(&[Statistics::Boson; 3], &LADDER_OMEGA);
        let r = markovian_collision(&model, &n, &LADDER_OMEGA, 0.05).unwrap();
        let scale = n.iter().fold(1.0f64, |m, x| m.max(x * x));
        prop_assert!(r.iter().all(|x| x.abs() < 1e-12 * scale), "{:?}", r);
    }

    #[test]
    fn equilibrium_fit_recovers_parameters(beta in 0.3f64..3.0, mu in -2.0f64..0.5) {
        let stats = [Statistics::Boson; 3];
        let n: Vec<f64> = LADDER_OMEGA.iter().map(|&w| distribution(1.0, beta, mu, w)).collect();
        let number: f64 = n.iter().sum();
        let energy: f64 = n.iter().zip(LADDER_OMEGA).map(|(a, w)| a * w).sum();
        let fit = fit_equilibrium(&stats, &LADDER_OMEGA, number, energy).unwrap();
        let back = fit.occupations(&stats, &LADDER_OMEGA);
        for (a, b) in back.iter().zip(&n) {
            prop_assert!((a - b).abs() < 1e-8 * (1.0 + b), "{} vs {}", a, b);
        }
    }

    #[test]
    fn thermal_propagator_is_causal(t2 in 0.0f64..4.0, dt in 0.01f64..3.0, bump in 0.1f64..3.0) {
        let base = ThermalSchedule::new(vec![ModeSchedule::new(
            Statistics::Boson,
            Curve::Linear { value: 0.5, slope: 0.1 },
            Curve::constant(1.2),
        )]);
        let n2 = base.n(0, t2);
        // same occupation up to t₂, different afterwards
        let altered = ThermalSchedule::new(vec![ModeSchedule::new(
            Statistics::Boson,
            Curve::hermite(vec![0.0, t2, t2 + 1.0], vec![0.5, n2, n2 + bump], vec![0.1, 0.1, 0.0]).unwrap(),
            Curve::constant(1.2),
        )]);
        let t1 = t2 + dt;
        if t2 > 0.0 {
            prop_assert_eq!(propagator_delta(&base, 0, t1, t2), propagator_delta(&altered, 0, t1, t2));
        }
    }

    #[test]
    fn geometric_states_have_zero_residual(n in 0.0f64..3.0) {
        let basis = Arc::new(LiouvilleBasis::new(vec![ModeSpec::boson(1.0, 60)]).unwrap());
        let g = geometric_state(&basis, &[n]).unwrap();
        // the residual is against the untruncated law, so the cut tail bounds it
        let tail = g.tails.iter().fold(0.0f64, |m, x| m.max(*x));
        prop_assert!(geometric_residual(&g.state, n) <= tail + 1e-12);
    }

    #[test]
    fn float_format_round_trips(x in any::<f64>()) {
        let s = format_float(x);
        if x.is_finite() {
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        } else {
            prop_assert!(["NaN", "inf", "-inf"].contains(&s.as_str()));
        }
    }

    #[test]
    fn config_hash_is_deterministic_and_seed_sensitive(seed in any::<u64>(), lambda in 0.001f64..1.0) {
        let text = format!(
            "kind = \"transport\"\n[[modes]]\nstatistics = \"boson\"\nomega = 1.0\n\
             [[modes]]\nstatistics = \"boson\"\nomega = 2.0\n[[modes]]\nstatistics = \"boson\"\nomega = 3.0\n\
             [interaction]\nlambda = {lambda}\nchannels = [{{ j = 0, k = 2, l = 1, m = 1, v = 1.0 }}]\n"
        );
        let a = ScenarioConfig::parse(&text).unwrap();
        let b = ScenarioConfig::parse(&text).unwrap();
        prop_assert_eq!(a.hash(seed), b.hash(seed));
        prop_assert_ne!(a.hash(seed), a.hash(seed.wrapping_add(1)));
    }
}
