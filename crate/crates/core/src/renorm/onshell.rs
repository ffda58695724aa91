//! Causal on-shell transform of a two-time self-energy and the bracketed
//! root solve for the on-shell energy.

use crate::error::{Result, TfdError};
use crate::sparse::C64;
use crate::tfd::{KernelKind, Mat2, TwoTimeKernel};

/// S^{μν}[ω;t] = ∫₀^T dτ S_r(t,t−τ) e^{i∫_{t−τ}^t ω} + ∫_{−T}^0 dτ S_a(t+τ,t) e^{i∫_t^{t+τ} ω}
/// on the kernel grid with trapezoid weights. Only entries with both
/// arguments ≤ t are read. `phase(a, b)` is ∫_a^b ω.
pub fn onshell_transform(kernel: &TwoTimeKernel, it: usize, t_mem: f64, phase: impl Fn(f64, f64) -> f64) -> Result<Mat2> {
    if kernel.kind != KernelKind::S && kernel.kind != KernelKind::Sigma {
        return Err(TfdError::Config(format!("on-shell transform needs a self-energy kernel, got {:?}", kernel.kind)));
    }
    let grid = kernel.grid;
    if it >= grid.len {
        return Err(TfdError::History(format!("time index {it} beyond grid of {}", grid.len)));
    }
    if !(t_mem > 0.0) {
        return Err(TfdError::Config("memory window must be positive".into()));
    }
    let k_max = (t_mem / grid.step).round() as usize;
    if k_max == 0 || k_max > it {
        return Err(TfdError::History(format!(
            "window {t_mem} needs {k_max} past samples, {it} available"
        )));
    }
    let t = grid.time(it);
    let mut out = Mat2::zeros();
    for k in 0..=k_max {
        let w = if k == 0 || k == k_max { 0.5 * grid.step } else { grid.step };
        let u = grid.time(it - k);
        let e = C64::from_polar(1.0, phase(u, t));
        let mut ret = *kernel.get(it, it - k);
        let mut adv = *kernel.get(it - k, it);
        if k == 0 {
            // S¹¹ ∝ θ(τ) and S²² ∝ θ(−τ) split the merged equal-time value
            ret[(1, 1)] = C64::new(0.0, 0.0);
            adv[(0, 0)] = C64::new(0.0, 0.0);
        }
        out += ret * (e * w) + adv * (e.conj() * w);
    }
    Ok(out)
}

/// Root of a real function near `guess` inside guess ± half_width.
///
/// The bracket is scanned outward from the guess and the sign change closest
/// to it is refined by Illinois false position until |f| ≤ tol.
pub fn equilibrium_onshell_solve(f: impl Fn(f64) -> f64, guess: f64, half_width: f64, tol: f64) -> Result<f64> {
    const SCAN: usize = 64;
    if !(half_width > 0.0) {
        return Err(TfdError::Config("bracket half width must be positive".into()));
    }
    let f0 = f(guess);
    if f0.abs() <= tol {
        return Ok(guess);
    }
    let mut scan = vec![(guess, f0)];
    let (mut left, mut right) = ((guess, f0), (guess, f0));
    let mut bracket = None;
    for i in 1..=SCAN {
        let d = half_width * i as f64 / SCAN as f64;
        let l = (guess - d, f(guess - d));
        let r = (guess + d, f(guess + d));
        scan.push(l);
        scan.push(r);
        if r.1.signum() != right.1.signum() {
            bracket = Some((right, r));
        } else if l.1.signum() != left.1.signum() {
            bracket = Some((l, left));
        }
        if bracket.is_some() {
            break;
        }
        left = l;
        right = r;
    }
    let Some(((mut a, mut fa), (mut b, mut fb))) = bracket else {
        scan.sort_by(|x, y| x.0.total_cmp(&y.0));
        return Err(TfdError::NoBracket {
            lo: guess - half_width,
            hi: guess + half_width,
            scan,
        });
    };
    let mut side = 0;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c);
        if fc.abs() <= tol || (b - a).abs() <= 4.0 * f64::EPSILON * c.abs().max(1.0) {
            return Ok(c);
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Ok((a * fb - b * fa) / (fb - fa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tfd::{mat2, TimeGrid};

    fn stationary(grid: TimeGrid, delta: f64, gamma: f64) -> TwoTimeKernel {
        // S¹¹(τ) = −iθ(τ)e^{−iΔτ−γτ}, S²² = S¹¹*(−τ), S¹² = i e^{−iΔτ−γ|τ|}
        TwoTimeKernel::from_fn((0, 0), KernelKind::S, grid, |t1, t2| {
            let tau = t1 - t2;
            let i = C64::new(0.0, 1.0);
            let e = C64::from_polar((-gamma * tau.abs()).exp(), -delta * tau);
            let s11 = if tau >= 0.0 { -i * e } else { C64::new(0.0, 0.0) };
            let s22 = if tau <= 0.0 { i * e } else { C64::new(0.0, 0.0) };
            mat2(s11, i * e, C64::new(0.0, 0.0), s22)
        })
    }

    #[test]
    fn linear_root() {
        let w = equilibrium_onshell_solve(|k| k - 2.0, 1.7, 1.0, 1e-14).unwrap();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn nearest_root_and_no_bracket() {
        let w = equilibrium_onshell_solve(|k| (k - 1.0) * (k - 1.3) * (k - 0.5), 1.1, 1.0, 1e-14).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
        match equilibrium_onshell_solve(|k| k * k + 1.0, 0.0, 1.0, 1e-12) {
            Err(TfdError::NoBracket { scan, .. }) => assert_eq!(scan.len(), 129),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_kernel() {
        let grid = TimeGrid::new(0.0, 0.1, 50).unwrap();
        let k = TwoTimeKernel::zeros((0, 0), KernelKind::S, grid);
        assert_eq!(onshell_transform(&k, 40, 3.0, |a, b| b - a).unwrap(), Mat2::zeros());
    }

    #[test]
    fn stationary_kernel_matches_fourier_transform() {
        let (delta, gamma, k0, h) = (1.2, 0.8, 1.0, 0.05);
        let grid = TimeGrid::new(0.0, h, 801).unwrap();
        let kern = stationary(grid, delta, gamma);
        let s = onshell_transform(&kern, 800, 30.0, |a, b| k0 * (b - a)).unwrap();
        let i = C64::new(0.0, 1.0);
        // trapezoid sum of ∫₀^∞ e^{(i(k0−Δ)−γ)τ} dτ in closed form
        let r = C64::new(-gamma, k0 - delta).scale(h).exp();
        let half = (r + 1.0) / (C64::new(1.0, 0.0) - r) * (0.5 * h);
        let s11 = -i * half;
        let s12 = i * (half + half.conj());
        assert!((s[(0, 0)] - s11).norm() < 1e-10);
        assert!((s[(0, 1)] - s12).norm() < 1e-10);
        assert!((s[(1, 1)] - s11.conj()).norm() < 1e-10);
        assert_eq!(s[(1, 0)], C64::new(0.0, 0.0));
        // and the continuum transform to O(h²)
        let exact = -i / C64::new(gamma, -(k0 - delta));
        assert!((s[(0, 0)] - exact).norm() < 0.1 * h * h);
    }

    #[test]
    fn s12_reduces_to_twice_imaginary_part() {
        let grid = TimeGrid::new(0.0, 0.05, 200).unwrap();
        let kern = stationary(grid, 1.1, 0.3);
        let phase = |a: f64, b: f64| 0.9 * (b - a) + 0.05 * (b * b - a * a);
        let s = onshell_transform(&kern, 180, 6.0, phase).unwrap();
        let t = grid.time(180);
        let k_max = 120;
        let mut x = C64::new(0.0, 0.0);
        for k in 0..=k_max {
            let w = if k == 0 || k == k_max { 0.025 } else { 0.05 };
            x += kern.get(180, 180 - k)[(0, 1)] * C64::from_polar(w, phase(grid.time(180 - k), t));
        }
        assert!((s[(0, 1)] - C64::new(0.0, 2.0 * x.im)).norm() < 1e-13);
    }

    #[test]
    fn causal_in_later_arguments() {
        let grid = TimeGrid::new(0.0, 0.05, 100).unwrap();
        let kern = stationary(grid, 1.1, 0.3);
        let mut bumped = kern.clone();
        for a in 0..100 {
            for b in 61..100 {
                bumped.set(a, b, mat2(C64::new(9.0, 1.0), C64::new(3.0, 0.0), C64::new(0.0, 0.0), C64::new(5.0, 2.0)));
                bumped.set(b, a, mat2(C64::new(7.0, 1.0), C64::new(3.0, 4.0), C64::new(0.0, 0.0), C64::new(5.0, 2.0)));
            }
        }
        let a = onshell_transform(&kern, 60, 2.0, |a, b| b - a).unwrap();
        let b = onshell_transform(&bumped, 60, 2.0, |a, b| b - a).unwrap();
        assert_eq!(a, b);
        assert!(matches!(onshell_transform(&kern, 10, 2.0, |a, b| b - a), Err(TfdError::History(_))));
    }
}
