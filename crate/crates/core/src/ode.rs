//! Adaptive Dormand–Prince 5(4) integrator for real or complex state vectors.

use crate::error::{Result, TfdError};
use num_complex::Complex64;
use std::ops::{Add, Mul};

/// Scalar field of an ODE state.
pub trait OdeScalar: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn modulus(self) -> f64;
}

impl OdeScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl OdeScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen from the grid spacing when `None`.
    pub h_init: Option<f64>,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        OdeOptions {
            rtol,
            atol,
            ..Default::default()
        }
    }
}

/// Counters from one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Differences between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine<T: OdeScalar>(out: &mut [T], y: &[T], h: f64, terms: &[(f64, &[T])]) {
    for i in 0..y.len() {
        let mut acc = T::zero();
        for (c, k) in terms {
            acc = acc + k[i] * *c;
        }
        out[i] = y[i] + acc * h;
    }
}

/// Integrates y' = f(t, y) and returns the state at each grid time.
///
/// Steps are clipped so every grid time is hit exactly. `accept` may veto an
/// otherwise acceptable step (for example on a bound violation); the step is
/// then halved.
pub fn integrate<T, F, A>(
    mut rhs: F,
    grid: &[f64],
    y0: &[T],
    opts: &OdeOptions,
    mut accept: A,
) -> Result<(Vec<Vec<T>>, OdeStats)>
where
    T: OdeScalar,
    F: FnMut(f64, &[T], &mut [T]),
    A: FnMut(f64, &[T]) -> bool,
{
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TfdError::Config("integration grid must be strictly increasing".into()));
    }
    let n = y0.len();
    let mut stats = OdeStats::default();
    let mut out = Vec::with_capacity(grid.len());
    let mut y = y0.to_vec();
    if grid.is_empty() {
        return Ok((out, stats));
    }
    out.push(y.clone());
    let mut t = grid[0];
    let span = grid[grid.len() - 1] - grid[0];
    let mut h = opts
        .h_init
        .unwrap_or_else(|| if grid.len() > 1 { (grid[1] - grid[0]) * 0.01 } else { 1e-3 })
        .min(opts.h_max);
    let mut k: Vec<Vec<T>> = vec![vec![T::zero(); n]; 7];
    let mut tmp = vec![T::zero(); n];
    let mut y_new = vec![T::zero(); n];
    rhs(t, &y, &mut k[0]);
    stats.evaluations += 1;
    let mut vetoes = 0usize;

    for &target in &grid[1..] {
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(TfdError::Integration {
                    t,
                    reason: format!("step budget {} exhausted", opts.max_steps),
                });
            }
            let remaining = target - t;
            let last = h >= remaining * (1.0 - 1e-12);
            let h_step = if last { remaining } else { h };
            if h_step < opts.h_min && !last {
                return Err(TfdError::Integration {
                    t,
                    reason: format!("step size underflow (h = {h_step:e})"),
                });
            }
            let (k1, rest) = k.split_first_mut().unwrap();
            let (k2, rest) = rest.split_first_mut().unwrap();
            let (k3, rest) = rest.split_first_mut().unwrap();
            let (k4, rest) = rest.split_first_mut().unwrap();
            let (k5, rest) = rest.split_first_mut().unwrap();
            let (k6, rest) = rest.split_first_mut().unwrap();
            let k7 = &mut rest[0];

            combine(&mut tmp, &y, h_step, &[(A21, k1)]);
            rhs(t + C2 * h_step, &tmp, k2);
            combine(&mut tmp, &y, h_step, &[(A31, k1), (A32, k2)]);
            rhs(t + C3 * h_step, &tmp, k3);
            combine(&mut tmp, &y, h_step, &[(A41, k1), (A42, k2), (A43, k3)]);
            rhs(t + C4 * h_step, &tmp, k4);
            combine(&mut tmp, &y, h_step, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
            rhs(t + C5 * h_step, &tmp, k5);
            combine(&mut tmp, &y, h_step, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
            rhs(t + h_step, &tmp, k6);
            combine(&mut y_new, &y, h_step, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
            let t_new = if last { target } else { t + h_step };
            rhs(t_new, &y_new, k7);
            stats.evaluations += 6;

            let mut err2 = 0.0;
            for i in 0..n {
                let e = (*k1)[i] * E1 + (*k3)[i] * E3 + (*k4)[i] * E4 + (*k5)[i] * E5 + (*k6)[i] * E6 + (*k7)[i] * E7;
                let scale = opts.atol + opts.rtol * y[i].modulus().max(y_new[i].modulus());
                let r = e.modulus() * h_step / scale;
                err2 += r * r;
            }
            let err = if n > 0 { (err2 / n as f64).sqrt() } else { 0.0 };
            if !err.is_finite() {
                return Err(TfdError::Integration {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }
            if err <= 1.0 {
                if !accept(t_new, &y_new) {
                    vetoes += 1;
                    stats.rejected += 1;
                    if vetoes > 60 {
                        return Err(TfdError::Integration {
                            t,
                            reason: "state constraint violated persistently".into(),
                        });
                    }
                    h = h_step * 0.5;
                    continue;
                }
                vetoes = 0;
                stats.accepted += 1;
                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                let (first, rest) = k.split_first_mut().unwrap();
                first.copy_from_slice(&rest[5]);
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // Do not let the clipped final step shrink the working step.
                let base = if last { h.max(h_step) } else { h_step };
                h = (base * factor).min(opts.h_max).min(span.max(f64::MIN_POSITIVE));
            } else {
                stats.rejected += 1;
                let factor = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                h = h_step * factor;
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

/// Convenience wrapper without a state constraint.
pub fn solve<T, F>(rhs: F, grid: &[f64], y0: &[T], opts: &OdeOptions) -> Result<Vec<Vec<T>>>
where
    T: OdeScalar,
    F: FnMut(f64, &[T], &mut [T]),
{
    integrate(rhs, grid, y0, opts, |_, _| true).map(|(ys, _)| ys)
}
