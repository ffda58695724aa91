//! Second-order loop self-energy of the contact vertex.
//!
//! Λ^>_j(t,s) = 2λ² Σ_klm |V_jklm|² n_k (1+σn_l)(1+σn_m) Φ and
//! Λ^<_j(t,s) = 2λ² Σ_klm |V_jklm|² (1+σn_k) n_l n_m Φ, with occupations taken
//! at min(t,s) and Φ = e^{−i∫_s^t (ω_l+ω_m−ω_k)} e^{−γ_δ|t−s|}.
//! Σ^> = −iΛ^>, Σ^< = −iσΛ^<, and S = B(t) Σ_a B⁻¹(s).

use super::model::InteractionModel;
use crate::schedule::ThermalSchedule;
use crate::sparse::C64;
use crate::tfd::{equal_time_merge, mat2, BogoliubovMatrix, Mat2, Side};

/// (Λ^>, Λ^<) from explicit data: occupations `n` at the earlier time,
/// phases ∫_s^t ω_x for every mode, and |t − s|.
pub fn lambda_core(
    model: &InteractionModel,
    sigmas: &[f64],
    j: usize,
    n: &[f64],
    phase: &[f64],
    tau_abs: f64,
    damping: f64,
) -> (C64, C64) {
    let damp = (-damping * tau_abs).exp();
    let mut gt = C64::new(0.0, 0.0);
    let mut lt = C64::new(0.0, 0.0);
    for ([a, k, l, m], v) in model.entries() {
        if a != j {
            continue;
        }
        let w = v.norm_sqr();
        let (nk, nl, nm) = (n[k], n[l], n[m]);
        let ph = C64::from_polar(damp, -(phase[l] + phase[m] - phase[k]));
        gt += ph * (w * nk * (1.0 + sigmas[l] * nl) * (1.0 + sigmas[m] * nm));
        lt += ph * (w * (1.0 + sigmas[k] * nk) * nl * nm);
    }
    let c = 2.0 * model.lambda * model.lambda;
    (gt * c, lt * c)
}

/// S¹²_loop from explicit data, see [`lambda_core`].
pub fn s12_core(
    model: &InteractionModel,
    sigmas: &[f64],
    j: usize,
    n: &[f64],
    phase: &[f64],
    tau_abs: f64,
    damping: f64,
) -> C64 {
    let (gt, lt) = lambda_core(model, sigmas, j, n, phase, tau_abs, damping);
    let sigma = sigmas[j];
    C64::new(0.0, sigma) * (lt * (1.0 + sigma * n[j]) - gt * n[j])
}

fn schedule_data(schedule: &ThermalSchedule, t: f64, s: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let tm = t.min(s);
    let k = schedule.n_modes();
    (
        (0..k).map(|x| schedule.sigma(x)).collect(),
        (0..k).map(|x| schedule.n(x, tm)).collect(),
        (0..k).map(|x| schedule.phase(x, t, s)).collect(),
    )
}

/// (Λ^>, Λ^<) for mode j.
pub fn lambda_pair(model: &InteractionModel, schedule: &ThermalSchedule, j: usize, t: f64, s: f64, damping: f64) -> (C64, C64) {
    let (sig, n, ph) = schedule_data(schedule, t, s);
    lambda_core(model, &sig, j, &n, &ph, (t - s).abs(), damping)
}

/// Operator-basis Σ_a = [[Σ^T, −Σ^<], [Σ^>, −Σ^T̃]] on one time-ordering branch.
pub fn sigma_operator_basis(
    model: &InteractionModel,
    schedule: &ThermalSchedule,
    j: usize,
    t: f64,
    s: f64,
    damping: f64,
    side: Side,
) -> Mat2 {
    let (gt, lt) = lambda_pair(model, schedule, j, t, s, damping);
    let i = C64::new(0.0, 1.0);
    let sig_gt = -i * gt;
    let sig_lt = -i * schedule.sigma(j) * lt;
    match side {
        Side::Lower => mat2(sig_gt, -sig_lt, sig_gt, -sig_lt),
        Side::Upper => mat2(sig_lt, -sig_lt, sig_gt, -sig_gt),
    }
}

fn sandwich(schedule: &ThermalSchedule, j: usize, t: f64, s: f64, m: &Mat2) -> Mat2 {
    let sigma = schedule.sigma(j);
    let bt = BogoliubovMatrix { n: schedule.n(j, t), sigma };
    let bs = BogoliubovMatrix { n: schedule.n(j, s), sigma };
    bt.complex() * m * bs.complex_inverse()
}

/// ξ-basis second-order loop self-energy S_loop(t,s) of mode j.
pub fn self_energy_second_order(
    model: &InteractionModel,
    schedule: &ThermalSchedule,
    j: usize,
    t: f64,
    s: f64,
    damping: f64,
) -> Mat2 {
    let on = |side| sandwich(schedule, j, t, s, &sigma_operator_basis(model, schedule, j, t, s, damping, side));
    if t > s {
        on(Side::Lower)
    } else if t < s {
        on(Side::Upper)
    } else {
        equal_time_merge(&on(Side::Lower), &on(Side::Upper))
    }
}

/// S¹²_loop(t,s) = iσ[(1+σn_j)Λ^< − n_j Λ^>] with n_j at min(t,s).
pub fn s12_loop(model: &InteractionModel, schedule: &ThermalSchedule, j: usize, t: f64, s: f64, damping: f64) -> C64 {
    let (sig, n, ph) = schedule_data(schedule, t, s);
    s12_core(model, &sig, j, &n, &ph, (t - s).abs(), damping)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::Statistics;
    use crate::schedule::{Curve, ModeSchedule};
    use crate::tfd::max_abs2;

    fn sched() -> ThermalSchedule {
        ThermalSchedule::new(
            [(0.4, 1.0), (0.7, 2.0), (0.2, 3.0)]
                .iter()
                .map(|&(n, w)| {
                    ModeSchedule::new(
                        Statistics::Boson,
                        Curve::Linear { value: n, slope: 0.1 },
                        Curve::Linear { value: w, slope: 0.05 },
                    )
                })
                .collect(),
        )
    }

    #[test]
    fn zero_coupling() {
        let m = InteractionModel::ladder(0.0);
        assert_eq!(self_energy_second_order(&m, &sched(), 1, 1.0, 0.3, 0.0), Mat2::zeros());
    }

    #[test]
    fn structure_and_symmetry() {
        let m = InteractionModel::ladder(0.2);
        let s = sched();
        for j in 0..3 {
            for (t, u) in [(1.0, 0.3), (0.2, 0.9), (0.5, 0.5)] {
                let a = self_energy_second_order(&m, &s, j, t, u, 0.05);
                let b = self_energy_second_order(&m, &s, j, u, t, 0.05);
                assert!(a[(1, 0)].norm() < 1e-15);
                assert!((a[(0, 0)] - b[(1, 1)].conj()).norm() < 1e-12);
                assert!((a[(0, 1)] - s12_loop(&m, &s, j, t, u, 0.05)).norm() < 1e-14);
            }
            // S¹¹ ∝ θ(t−s), S²² ∝ θ(s−t)
            assert_eq!(self_energy_second_order(&m, &s, j, 0.2, 0.9, 0.0)[(0, 0)], C64::new(0.0, 0.0));
            assert_eq!(self_energy_second_order(&m, &s, j, 0.9, 0.2, 0.0)[(1, 1)], C64::new(0.0, 0.0));
        }
        assert!(max_abs2(&self_energy_second_order(&m, &s, 0, 1.0, 0.3, 0.0)) > 0.0);
    }
}
