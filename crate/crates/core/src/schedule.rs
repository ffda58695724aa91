//! Time-dependent macroscopic parameters n_j(t), ω_j(t), γ_j(t).

use crate::error::{Result, TfdError};
use crate::liouville::Statistics;
use serde::{Deserialize, Serialize};

/// A scalar function of time with analytic derivative and integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Curve {
    Constant {
        value: f64,
    },
    /// value + slope·t
    Linear {
        value: f64,
        slope: f64,
    },
    /// asymptote + amplitude·e^{−rate·t}
    Exponential {
        asymptote: f64,
        amplitude: f64,
        rate: f64,
    },
    /// Piecewise cubic Hermite through (t, y, y') knots; constant outside.
    Hermite {
        knots: Vec<f64>,
        values: Vec<f64>,
        slopes: Vec<f64>,
    },
}

impl Curve {
    pub fn constant(value: f64) -> Self {
        Curve::Constant { value }
    }

    pub fn hermite(knots: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() || knots.len() != slopes.len() {
            return Err(TfdError::Config("hermite curve needs equal-length, non-empty knot arrays".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(TfdError::Config("hermite knots must be strictly increasing".into()));
        }
        Ok(Curve::Hermite { knots, values, slopes })
    }

    /// Interval of definition.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Curve::Hermite { knots, .. } => (knots[0], knots[knots.len() - 1]),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Curve::Constant { value } => *value,
            Curve::Linear { value, slope } => value + slope * t,
            Curve::Exponential { asymptote, amplitude, rate } => asymptote + amplitude * (-rate * t).exp(),
            Curve::Hermite { knots, values, slopes } => match segment(knots, t) {
                Seg::Before => values[0],
                Seg::After => values[values.len() - 1],
                Seg::Inside(k) => {
                    let h = knots[k + 1] - knots[k];
                    let s = (t - knots[k]) / h;
                    let (s2, s3) = (s * s, s * s * s);
                    (2.0 * s3 - 3.0 * s2 + 1.0) * values[k]
                        + (s3 - 2.0 * s2 + s) * h * slopes[k]
                        + (-2.0 * s3 + 3.0 * s2) * values[k + 1]
                        + (s3 - s2) * h * slopes[k + 1]
                }
            },
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Curve::Constant { .. } => 0.0,
            Curve::Linear { slope, .. } => *slope,
            Curve::Exponential { amplitude, rate, .. } => -rate * amplitude * (-rate * t).exp(),
            Curve::Hermite { knots, values, slopes } => match segment(knots, t) {
                Seg::Before | Seg::After => 0.0,
                Seg::Inside(k) => {
                    let h = knots[k + 1] - knots[k];
                    let s = (t - knots[k]) / h;
                    let s2 = s * s;
                    ((6.0 * s2 - 6.0 * s) * values[k]
                        + (3.0 * s2 - 4.0 * s + 1.0) * h * slopes[k]
                        + (-6.0 * s2 + 6.0 * s) * values[k + 1]
                        + (3.0 * s2 - 2.0 * s) * h * slopes[k + 1])
                        / h
                }
            },
        }
    }

    /// ∫_a^b of the curve.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Curve::Constant { value } => value * (b - a),
            Curve::Linear { value, slope } => value * (b - a) + 0.5 * slope * (b * b - a * a),
            Curve::Exponential { asymptote, amplitude, rate } => {
                if *rate == 0.0 {
                    (asymptote + amplitude) * (b - a)
                } else {
                    asymptote * (b - a) + amplitude * ((-rate * a).exp() - (-rate * b).exp()) / rate
                }
            }
            Curve::Hermite { .. } => self.hermite_antiderivative(b) - self.hermite_antiderivative(a),
        }
    }

    fn hermite_antiderivative(&self, t: f64) -> f64 {
        let Curve::Hermite { knots, values, slopes } = self else {
            unreachable!()
        };
        let partial = |k: usize, s: f64| {
            let h = knots[k + 1] - knots[k];
            let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
            h * ((0.5 * s4 - s3 + s) * values[k]
                + (0.25 * s4 - 2.0 * s3 / 3.0 + 0.5 * s2) * h * slopes[k]
                + (-0.5 * s4 + s3) * values[k + 1]
                + (0.25 * s4 - s3 / 3.0) * h * slopes[k + 1])
        };
        let t0 = knots[0];
        if t <= t0 {
            return values[0] * (t - t0);
        }
        let mut acc = 0.0;
        for k in 0..knots.len() - 1 {
            if t >= knots[k + 1] {
                acc += partial(k, 1.0);
            } else {
                return acc + partial(k, (t - knots[k]) / (knots[k + 1] - knots[k]));
            }
        }
        acc + values[values.len() - 1] * (t - knots[knots.len() - 1])
    }
}

enum Seg {
    Before,
    After,
    Inside(usize),
}

fn segment(knots: &[f64], t: f64) -> Seg {
    let last = knots.len() - 1;
    if last == 0 || t < knots[0] {
        return if last == 0 && t >= knots[0] { Seg::After } else { Seg::Before };
    }
    if t >= knots[last] {
        return if t == knots[last] { Seg::Inside(last - 1) } else { Seg::After };
    }
    // partition_point gives the first knot > t.
    Seg::Inside(knots.partition_point(|&k| k <= t) - 1)
}

/// Parameters of one mode along a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSchedule {
    pub statistics: Statistics,
    pub occupation: Curve,
    pub energy: Curve,
    #[serde(default = "zero_curve")]
    pub gamma: Curve,
}

fn zero_curve() -> Curve {
    Curve::constant(0.0)
}

impl ModeSchedule {
    pub fn new(statistics: Statistics, occupation: Curve, energy: Curve) -> Self {
        ModeSchedule {
            statistics,
            occupation,
            energy,
            gamma: zero_curve(),
        }
    }

    pub fn sigma(&self) -> f64 {
        self.statistics.sigma()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalSchedule {
    pub modes: Vec<ModeSchedule>,
}

impl ThermalSchedule {
    pub fn new(modes: Vec<ModeSchedule>) -> Self {
        ThermalSchedule { modes }
    }

    /// Constant occupations and energies.
    pub fn constant(statistics: &[Statistics], n: &[f64], omega: &[f64]) -> Self {
        ThermalSchedule {
            modes: statistics
                .iter()
                .zip(n)
                .zip(omega)
                .map(|((&s, &n), &w)| ModeSchedule::new(s, Curve::constant(n), Curve::constant(w)))
                .collect(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn n(&self, j: usize, t: f64) -> f64 {
        self.modes[j].occupation.value(t)
    }

    pub fn ndot(&self, j: usize, t: f64) -> f64 {
        self.modes[j].occupation.derivative(t)
    }

    pub fn omega(&self, j: usize, t: f64) -> f64 {
        self.modes[j].energy.value(t)
    }

    pub fn gamma(&self, j: usize, t: f64) -> f64 {
        self.modes[j].gamma.value(t)
    }

    pub fn sigma(&self, j: usize) -> f64 {
        self.modes[j].sigma()
    }

    /// ∫_{t2}^{t1} ω_j.
    pub fn phase(&self, j: usize, t1: f64, t2: f64) -> f64 {
        self.modes[j].energy.integral(t2, t1)
    }

    /// Checks coverage of [start, end] and occupation bounds on a sample grid.
    pub fn validate(&self, start: f64, end: f64) -> Result<()> {
        for (j, m) in self.modes.iter().enumerate() {
            for c in [&m.occupation, &m.energy, &m.gamma] {
                let (a, b) = c.support();
                if a > start || b < end {
                    return Err(TfdError::ScheduleCoverage { start, end });
                }
            }
            let samples = 256;
            for k in 0..=samples {
                let t = start + (end - start) * k as f64 / samples as f64;
                let n = m.occupation.value(t);
                let upper = if m.statistics.is_fermion() { 1.0 } else { f64::INFINITY };
                if !(n >= 0.0 && n <= upper) {
                    return Err(TfdError::OccupationBound { mode: j, t, value: n });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_relaxation() {
        let c = Curve::Exponential {
            asymptote: 1.0,
            amplitude: -0.5,
            rate: 1.0,
        };
        assert!((c.value(0.0) - 0.5).abs() < 1e-15);
        assert!((c.derivative(0.0) - 0.5).abs() < 1e-15);
        let exact = 2.0 - 0.5 * (1.0 - (-2.0f64).exp());
        assert!((c.integral(0.0, 2.0) - exact).abs() < 1e-14);
    }

    #[test]
    fn hermite_reproduces_cubic() {
        let f = |t: f64| 1.0 + t - 0.5 * t * t + 0.25 * t * t * t;
        let df = |t: f64| 1.0 - t + 0.75 * t * t;
        let knots = vec![0.0, 0.3, 1.0, 1.7];
        let c = Curve::hermite(knots.clone(), knots.iter().map(|&t| f(t)).collect(), knots.iter().map(|&t| df(t)).collect())
            .unwrap();
        for &t in &[0.0, 0.1, 0.5, 1.2, 1.7] {
            assert!((c.value(t) - f(t)).abs() < 1e-13);
            assert!((c.derivative(t) - df(t)).abs() < 1e-12);
        }
        let antider = |t: f64| t + 0.5 * t * t - t * t * t / 6.0 + t.powi(4) / 16.0;
        assert!((c.integral(0.2, 1.5) - (antider(1.5) - antider(0.2))).abs() < 1e-13);
    }

    #[test]
    fn coverage_and_bounds() {
        let s = ThermalSchedule::new(vec![ModeSchedule::new(
            Statistics::Fermion,
            Curve::Linear { value: 0.5, slope: 0.2 },
            Curve::constant(1.0),
        )]);
        assert!(s.validate(0.0, 2.0).is_ok());
        assert!(matches!(s.validate(0.0, 3.0), Err(TfdError::OccupationBound { .. })));
        let h = Curve::hermite(vec![0.0, 1.0], vec![0.1, 0.2], vec![0.0, 0.0]).unwrap();
        let s = ThermalSchedule::new(vec![ModeSchedule::new(Statistics::Boson, h, Curve::constant(1.0))]);
        assert!(matches!(s.validate(0.0, 2.0), Err(TfdError::ScheduleCoverage { .. })));
    }
}
