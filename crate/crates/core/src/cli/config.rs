//! Scenario configuration: TOML text with dotted sections, validated and
//! hashed together with the seed.

use crate::error::{Result, TfdError};
use crate::kinetics::RelaxMode;
use crate::liouville::{ModeSpec, Statistics};
use crate::perturbation::{Channel, InteractionModel};
use crate::schedule::{Curve, ModeSchedule, ThermalSchedule};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunKind {
    VerifyAlgebra,
    Evolve,
    Propagators,
    Transport,
    RenormCompare,
}

impl RunKind {
    pub const ALL: [RunKind; 5] = [
        RunKind::VerifyAlgebra,
        RunKind::Evolve,
        RunKind::Propagators,
        RunKind::Transport,
        RunKind::RenormCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RunKind::VerifyAlgebra => "verify-algebra",
            RunKind::Evolve => "evolve",
            RunKind::Propagators => "propagators",
            RunKind::Transport => "transport",
            RunKind::RenormCompare => "renorm-compare",
        }
    }
}

impl fmt::Display for RunKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RunKind {
    type Err = TfdError;
    fn from_str(s: &str) -> Result<Self> {
        RunKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| TfdError::Config(format!("unknown run kind '{s}'")))
    }
}

/// One mode: statistics, bare energy, cutoff and its schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub statistics: Statistics,
    pub omega: f64,
    /// Boson cutoff; ignored for fermions.
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    /// n(t); defaults to a constant 0.
    #[serde(default)]
    pub occupation: Option<Curve>,
    /// ω(t); defaults to the bare energy.
    #[serde(default)]
    pub energy: Option<Curve>,
    #[serde(default)]
    pub gamma: Option<Curve>,
}

fn default_cutoff() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InteractionConfig {
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub channels: Vec<Channel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    /// Pass threshold for identity residuals.
    #[serde(default = "default_check")]
    pub check: f64,
}

fn default_rtol() -> f64 {
    1e-10
}
fn default_atol() -> f64 {
    1e-12
}
fn default_check() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: default_rtol(),
            atol: default_atol(),
            check: default_check(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_degree")]
    pub max_degree: usize,
    /// Residual threshold for the algebra identities.
    #[serde(default = "default_algebra_tol")]
    pub tol: f64,
}

fn default_samples() -> usize {
    8
}
fn default_degree() -> usize {
    3
}
fn default_algebra_tol() -> f64 {
    1e-12
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        AlgebraConfig {
            samples: default_samples(),
            max_degree: default_degree(),
            tol: default_algebra_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    Geometric,
    /// Geometric with weight moved between the two lowest levels of mode 0.
    Perturbed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_outputs")]
    pub outputs: usize,
    #[serde(default)]
    pub initial: InitialState,
    /// Fraction of the level-1 weight of mode 0 moved to level 0 for a
    /// perturbed start.
    #[serde(default = "default_perturbation")]
    pub perturbation: f64,
    /// Threshold on the deviation from the geometric form for a geometric start.
    #[serde(default = "default_geometric_tol")]
    pub geometric_tol: f64,
}

fn default_geometric_tol() -> f64 {
    1e-8
}

fn default_t_end() -> f64 {
    5.0
}
fn default_outputs() -> usize {
    11
}
fn default_perturbation() -> f64 {
    0.05
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            t_end: default_t_end(),
            outputs: default_outputs(),
            initial: InitialState::default(),
            perturbation: default_perturbation(),
            geometric_tol: default_geometric_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorConfig {
    #[serde(default)]
    pub mode: usize,
    #[serde(default)]
    pub start: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Tolerance of the sandwich vs direct comparison.
    #[serde(default = "default_prop_tol")]
    pub tol: f64,
}

fn default_step() -> f64 {
    0.25
}
fn default_points() -> usize {
    20
}
fn default_prop_tol() -> f64 {
    1e-6
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        PropagatorConfig {
            mode: 0,
            start: 0.0,
            step: default_step(),
            points: default_points(),
            tol: default_prop_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportConfig {
    /// Initial occupations; defaults to the schedule at t = 0.
    #[serde(default)]
    pub n0: Option<Vec<f64>>,
    #[serde(default = "default_transport_end")]
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_relax_mode")]
    pub mode: RelaxMode,
    /// Lorentzian width / kernel damping; default 0.05 × smallest spacing.
    #[serde(default)]
    pub broadening: Option<f64>,
    /// Memory window; default 8/broadening.
    #[serde(default)]
    pub memory_window: Option<f64>,
    /// Required final distance to the fitted equilibrium.
    #[serde(default = "default_gap_tol")]
    pub gap_tol: f64,
}

fn default_transport_end() -> f64 {
    200.0
}
fn default_dt() -> f64 {
    1.0
}
fn default_relax_mode() -> RelaxMode {
    RelaxMode::Markovian
}
fn default_gap_tol() -> f64 {
    1e-4
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig {
            n0: None,
            t_end: default_transport_end(),
            dt: default_dt(),
            mode: default_relax_mode(),
            broadening: None,
            memory_window: None,
            gap_tol: default_gap_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenormConfig {
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Couplings of the λ-sweep.
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    /// Self-energy continuum of the spectral demo: centre, half width, and
    /// weight per λ² (mode 0).
    #[serde(default = "default_satellite")]
    pub satellite: [f64; 3],
    #[serde(default = "default_kappa_points")]
    pub kappa_points: usize,
    /// Allowed deviation of the shift exponent from 2.
    #[serde(default = "default_exp_tol")]
    pub shift_exponent_tol: f64,
    #[serde(default = "default_gap_exp_tol")]
    pub gap_exponent_tol: f64,
    /// Memory window and step of the time-domain equilibrium check.
    #[serde(default = "default_renorm_window")]
    pub memory_window: f64,
    #[serde(default = "default_renorm_step")]
    pub step: f64,
    /// Energies of the time-domain stationarity check; defaults to the bare
    /// energies. The Lorentzian kernel is only stationary at a thermal state
    /// when the channels are resonant.
    #[serde(default)]
    pub condition_energies: Option<Vec<f64>>,
}

fn default_beta() -> f64 {
    1.0
}
fn default_lambdas() -> Vec<f64> {
    vec![0.005, 0.01, 0.02, 0.04]
}
fn default_satellite() -> [f64; 3] {
    [1.8, 0.3, 1.0]
}
fn default_kappa_points() -> usize {
    20_001
}
fn default_exp_tol() -> f64 {
    0.1
}
fn default_gap_exp_tol() -> f64 {
    0.2
}
fn default_renorm_window() -> f64 {
    20.0
}
fn default_renorm_step() -> f64 {
    0.05
}

impl Default for RenormConfig {
    fn default() -> Self {
        RenormConfig {
            beta: default_beta(),
            lambdas: default_lambdas(),
            satellite: default_satellite(),
            kappa_points: default_kappa_points(),
            shift_exponent_tol: default_exp_tol(),
            gap_exponent_tol: default_gap_exp_tol(),
            memory_window: default_renorm_window(),
            step: default_renorm_step(),
            condition_energies: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Optional; must agree with the subcommand when present.
    #[serde(default)]
    pub kind: Option<RunKind>,
    #[serde(default)]
    pub seed: u64,
    pub modes: Vec<ModeConfig>,
    #[serde(default)]
    pub interaction: InteractionConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub algebra: AlgebraConfig,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default)]
    pub propagators: PropagatorConfig,
    #[serde(default)]
    pub transport: TransportConfig,
    #[serde(default)]
    pub renorm: RenormConfig,
}

/// Environment variables that override tolerance knobs.
pub const ENV_OVERRIDES: [(&str, &str); 4] = [
    ("TFD_RTOL", "tolerances.rtol"),
    ("TFD_ATOL", "tolerances.atol"),
    ("TFD_CHECK_TOL", "tolerances.check"),
    ("TFD_ALGEBRA_TOL", "algebra.tol"),
];

impl ScenarioConfig {
    /// Parses TOML; errors carry the line, column and field from the parser.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| TfdError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TfdError::Config(m));
        if self.modes.is_empty() {
            return bad("no modes defined".into());
        }
        for (j, m) in self.modes.iter().enumerate() {
            if !m.omega.is_finite() {
                return bad(format!("modes[{j}].omega is not finite"));
            }
            if m.statistics == Statistics::Boson && m.cutoff == 0 {
                return bad(format!("modes[{j}].cutoff must be at least 1"));
            }
        }
        let k = self.modes.len();
        for (i, c) in self.interaction.channels.iter().enumerate() {
            if [c.j, c.k, c.l, c.m].iter().any(|&x| x >= k) {
                return bad(format!("interaction.channels[{i}] references an undefined mode"));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.rtol", t.rtol),
            ("tolerances.atol", t.atol),
            ("tolerances.check", t.check),
            ("algebra.tol", self.algebra.tol),
            ("propagators.tol", self.propagators.tol),
            ("propagators.step", self.propagators.step),
            ("transport.t_end", self.transport.t_end),
            ("transport.dt", self.transport.dt),
            ("transport.gap_tol", self.transport.gap_tol),
            ("evolve.t_end", self.evolve.t_end),
            ("renorm.beta", self.renorm.beta),
            ("renorm.memory_window", self.renorm.memory_window),
            ("renorm.step", self.renorm.step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if let Some(b) = self.transport.broadening {
            if !(b > 0.0) {
                return bad("transport.broadening must be positive".into());
            }
        }
        if let Some(w) = self.transport.memory_window {
            if !(w > 0.0) {
                return bad("transport.memory_window must be positive".into());
            }
        }
        if let Some(n0) = &self.transport.n0 {
            if n0.len() != k {
                return bad(format!("transport.n0 has {} entries for {k} modes", n0.len()));
            }
        }
        if let Some(w) = &self.renorm.condition_energies {
            if w.len() != k {
                return bad(format!("renorm.condition_energies has {} entries for {k} modes", w.len()));
            }
        }
        if self.evolve.initial == InitialState::Perturbed && !(0.0..=1.0).contains(&self.evolve.perturbation) {
            return bad("evolve.perturbation must lie in [0, 1]".into());
        }
        if self.propagators.mode >= k {
            return bad(format!("propagators.mode {} is undefined", self.propagators.mode));
        }
        if self.propagators.points < 1 || self.evolve.outputs < 2 {
            return bad("propagators.points ≥ 1 and evolve.outputs ≥ 2 required".into());
        }
        if self.renorm.lambdas.len() < 2 || self.renorm.lambdas.iter().any(|l| !(*l > 0.0)) {
            return bad("renorm.lambdas needs at least two positive couplings".into());
        }
        Ok(())
    }

    /// Applies tolerance overrides from `lookup` (normally the environment).
    pub fn apply_overrides(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<()> {
        for (var, field) in ENV_OVERRIDES {
            let Some(raw) = lookup(var) else { continue };
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| TfdError::Config(format!("{var}={raw} is not a number")))?;
            match field {
                "tolerances.rtol" => self.tolerances.rtol = v,
                "tolerances.atol" => self.tolerances.atol = v,
                "tolerances.check" => self.tolerances.check = v,
                _ => self.algebra.tol = v,
            }
        }
        self.validate()
    }

    pub fn mode_specs(&self) -> Vec<ModeSpec> {
        self.modes
            .iter()
            .map(|m| match m.statistics {
                Statistics::Boson => ModeSpec::boson(m.omega, m.cutoff),
                Statistics::Fermion => ModeSpec::fermion(m.omega),
            })
            .collect()
    }

    pub fn statistics(&self) -> Vec<Statistics> {
        self.modes.iter().map(|m| m.statistics).collect()
    }

    pub fn omega(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.omega).collect()
    }

    pub fn schedule(&self) -> ThermalSchedule {
        ThermalSchedule::new(
            self.modes
                .iter()
                .map(|m| ModeSchedule {
                    statistics: m.statistics,
                    occupation: m.occupation.clone().unwrap_or(Curve::constant(0.0)),
                    energy: m.energy.clone().unwrap_or(Curve::constant(m.omega)),
                    gamma: m.gamma.clone().unwrap_or(Curve::constant(0.0)),
                })
                .collect(),
        )
    }

    pub fn model(&self) -> Result<InteractionModel> {
        InteractionModel::new(self.interaction.lambda, self.statistics(), &self.interaction.channels)
    }

    /// SHA-256 of the canonical JSON form of the effective config and seed.
    pub fn hash(&self, seed: u64) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(canonical.as_bytes());
        h.update(seed.to_le_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[[modes]]\nstatistics = \"boson\"\nomega = 1.0\n";

    #[test]
    fn minimal_config_and_defaults() {
        let c = ScenarioConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.modes[0].cutoff, 8);
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.schedule().omega(0, 3.0), 1.0);
    }

    #[test]
    fn parse_errors_name_the_location() {
        let e = ScenarioConfig::parse("[[modes]]\nstatistics = \"boson\"\nomega = \"x\"\n").unwrap_err();
        let TfdError::Config(msg) = e else { panic!() };
        assert!(msg.contains("line 3"), "{msg}");
        let e = ScenarioConfig::parse(&format!("{MINIMAL}[tolerances]\nrtoll = 1.0\n")).unwrap_err();
        assert!(e.to_string().contains("rtoll"));
        let e = ScenarioConfig::parse(&format!("{MINIMAL}[tolerances]\nrtol = -1.0\n")).unwrap_err();
        assert!(e.to_string().contains("tolerances.rtol"));
        let bad_channel = format!("{MINIMAL}[interaction]\nlambda = 0.1\nchannels = [{{ j = 0, k = 0, l = 0, m = 3, v = 1.0 }}]\n");
        assert!(ScenarioConfig::parse(&bad_channel).is_err());
    }

    #[test]
    fn overrides_and_hash() {
        let mut c = ScenarioConfig::parse(MINIMAL).unwrap();
        let h0 = c.hash(0);
        assert_eq!(h0, ScenarioConfig::parse(MINIMAL).unwrap().hash(0));
        assert_ne!(h0, c.hash(1));
        c.apply_overrides(|v| (v == "TFD_RTOL").then(|| "1e-6".to_string())).unwrap();
        assert_eq!(c.tolerances.rtol, 1e-6);
        assert_ne!(c.hash(0), h0);
        assert!(c.apply_overrides(|v| (v == "TFD_ATOL").then(|| "abc".to_string())).is_err());
        assert!(c.apply_overrides(|v| (v == "TFD_ATOL").then(|| "-1".to_string())).is_err());
    }

    #[test]
    fn kinds_round_trip() {
        for k in RunKind::ALL {
            assert_eq!(k.name().parse::<RunKind>().unwrap(), k);
        }
        assert!("nope".parse::<RunKind>().is_err());
    }
}
