//! Unperturbed propagators d (ξ basis) and Δ (operator basis).
//!
//! At t₁ = t₂ the time ordering is resolved per component: the 11 entry is
//! the t₂ → t₁⁻ limit and the 22 entry the t₂ → t₁⁺ limit. The off-diagonal
//! entries are continuous in the operator basis, so for Δ the convention is
//! applied entrywise to the two one-sided limits.

use super::bogoliubov::{mat2, BogoliubovMatrix, Mat2};
use crate::schedule::ThermalSchedule;
use crate::sparse::C64;

/// One-sided equal-time limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// t₂ → t₁⁻, the t₁ > t₂ branch.
    Lower,
    /// t₂ → t₁⁺, the t₁ < t₂ branch.
    Upper,
}

fn b_at(schedule: &ThermalSchedule, j: usize, t: f64) -> BogoliubovMatrix {
    BogoliubovMatrix {
        n: schedule.n(j, t),
        sigma: schedule.sigma(j),
    }
}

fn d_branch(schedule: &ThermalSchedule, j: usize, t1: f64, t2: f64, side: Side) -> Mat2 {
    let z = C64::new(0.0, 0.0);
    let e = C64::from_polar(1.0, -schedule.phase(j, t1, t2));
    match side {
        Side::Lower => mat2(C64::new(0.0, -1.0) * e, z, z, z),
        Side::Upper => mat2(z, z, z, C64::new(0.0, 1.0) * e),
    }
}

fn branch(t1: f64, t2: f64) -> Option<Side> {
    if t1 > t2 {
        Some(Side::Lower)
    } else if t1 < t2 {
        Some(Side::Upper)
    } else {
        None
    }
}

/// d(t₁,t₂) = diag(−iθ(t₁−t₂), iθ(t₂−t₁)) e^{−i∫_{t₂}^{t₁} ω_j}.
pub fn propagator_d(schedule: &ThermalSchedule, j: usize, t1: f64, t2: f64) -> Mat2 {
    match branch(t1, t2) {
        Some(side) => d_branch(schedule, j, t1, t2, side),
        None => d_branch(schedule, j, t1, t2, Side::Lower) + d_branch(schedule, j, t1, t2, Side::Upper),
    }
}

/// Δ on one branch: B⁻¹(t₁) d B(t₂).
pub fn propagator_delta_branch(schedule: &ThermalSchedule, j: usize, t1: f64, t2: f64, side: Side) -> Mat2 {
    b_at(schedule, j, t1).complex_inverse() * d_branch(schedule, j, t1, t2, side) * b_at(schedule, j, t2).complex()
}

/// Δ(t₁,t₂) = B⁻¹(t₁) d(t₁,t₂) B(t₂), with the entrywise equal-time convention.
pub fn propagator_delta(schedule: &ThermalSchedule, j: usize, t1: f64, t2: f64) -> Mat2 {
    match branch(t1, t2) {
        Some(side) => propagator_delta_branch(schedule, j, t1, t2, side),
        None => {
            let lo = propagator_delta_branch(schedule, j, t1, t2, Side::Lower);
            let up = propagator_delta_branch(schedule, j, t1, t2, Side::Upper);
            equal_time_merge(&lo, &up)
        }
    }
}

/// 11 from the lower limit, 22 from the upper, off-diagonal from the lower.
pub fn equal_time_merge(lower: &Mat2, upper: &Mat2) -> Mat2 {
    mat2(lower[(0, 0)], lower[(0, 1)], lower[(1, 0)], upper[(1, 1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::Statistics;
    use crate::schedule::{Curve, ModeSchedule};
    use crate::tfd::max_abs2;

    #[test]
    fn d_examples() {
        let s = ThermalSchedule::constant(&[Statistics::Boson], &[0.3], &[2.0]);
        let d = propagator_d(&s, 0, 1.0, 0.0);
        assert!((d[(0, 0)] - C64::new(0.0, -1.0) * C64::from_polar(1.0, -2.0)).norm() < 1e-15);
        assert_eq!(d[(1, 1)], C64::new(0.0, 0.0));
        assert_eq!(propagator_d(&s, 0, 0.0, 1.0)[(0, 0)], C64::new(0.0, 0.0));
        let s = ThermalSchedule::new(vec![ModeSchedule::new(
            Statistics::Boson,
            Curve::constant(0.0),
            Curve::Linear { value: 0.0, slope: 1.0 },
        )]);
        let d = propagator_d(&s, 0, 1.0, 0.0);
        assert!((d[(0, 0)] - C64::new(0.0, -1.0) * C64::from_polar(1.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn vacuum_delta() {
        let s = ThermalSchedule::constant(&[Statistics::Boson], &[0.0], &[1.5]);
        let dl = propagator_delta(&s, 0, 2.0, 1.0);
        assert!((dl[(0, 0)] - C64::new(0.0, -1.0) * C64::from_polar(1.0, -1.5)).norm() < 1e-15);
        assert_eq!(dl[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn equal_time_entries_are_consistent_limits() {
        let s = ThermalSchedule::constant(&[Statistics::Boson], &[0.7], &[1.0]);
        let eq = propagator_delta(&s, 0, 1.0, 1.0);
        let below = propagator_delta(&s, 0, 1.0, 1.0 - 1e-9);
        let above = propagator_delta(&s, 0, 1.0, 1.0 + 1e-9);
        assert!((eq[(0, 0)] - below[(0, 0)]).norm() < 1e-8);
        assert!((eq[(1, 1)] - above[(1, 1)]).norm() < 1e-8);
        // off-diagonal entries are continuous across t₁ = t₂
        assert!((below[(0, 1)] - above[(0, 1)]).norm() < 1e-8);
        assert!((below[(1, 0)] - above[(1, 0)]).norm() < 1e-8);
        assert!((eq[(0, 1)] - C64::new(0.0, 0.7)).norm() < 1e-15);
    }

    #[test]
    fn thermal_causality() {
        let mk = |late: f64| {
            ThermalSchedule::new(vec![ModeSchedule::new(
                Statistics::Boson,
                Curve::hermite(vec![0.0, 1.0, 2.0], vec![0.5, 0.5, late], vec![0.0, 0.0, 0.0]).unwrap(),
                Curve::constant(1.0),
            )])
        };
        let (a, b) = (mk(0.9), mk(2.0));
        for (t1, t2) in [(1.8, 0.5), (1.9, 1.0)] {
            assert_eq!(propagator_delta(&a, 0, t1, t2), propagator_delta(&b, 0, t1, t2));
        }
        assert!(max_abs2(&(propagator_delta(&a, 0, 0.5, 1.8) - propagator_delta(&b, 0, 0.5, 1.8))) == 0.0);
    }
}
