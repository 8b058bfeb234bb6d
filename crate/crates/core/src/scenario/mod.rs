//! Scenario files and the report runner behind the `tvfj` command line.
//!
//! A scenario is a TOML document naming an innate vector, a schedule and
//! analysis settings:
//!
//! ```toml
//! name = "two-agent"
//! innate = [0.2, 0.8]
//!
//! [schedule]
//! kind = "periodic"
//! phases = [
//!   { susceptibility = [0.5, 1.0], weights = [[0.5, 0.5], [1.0, 0.0]] },
//! ]
//!
//! [analysis]
//! horizon = 100
//! epsilon = 0.1
//! w_threshold = 0.5
//! window = "period"
//! ```
//!
//! Schedule kinds are `explicit`, `periodic`, `semi_periodic`, `trust` and
//! `preset`. Presets (`example1`, `example2`, `example3`) fill in the agent
//! count and innate vector.

mod report;
mod table;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use report::{
    run, CertificationReport, DecompositionReport, OmegaReport, PerturbationOutcome, PhaseReport,
    Report, ReportBundle, RobustnessReport, RunOptions, SimulationSummary, Table, Verb,
};
pub use table::format_sig;

use crate::dynamics::presets::{
    example2_innate, example3_schedule, Example1, Example2, Example3Variant,
};
use crate::dynamics::{
    AdjacencySchedule, Perturbation, Schedule, ScheduleKind, SusceptibilityRule, TrustConfig,
};
use crate::error::{Error, Result};
use crate::stochastic::{
    matrix_from_rows, FactorPair, InfluenceMatrix, Matrix, OpinionVector, SusceptibilityMatrix,
};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TVFJ_OUT_DIR";

pub const DEFAULT_HORIZON: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agents: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub innate: Option<Vec<f64>>,
    /// Defaults to the innate vector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub permit_vanishing_susceptibility: bool,
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub susceptibility: Vec<f64>,
    pub weights: Vec<Vec<f64>>,
    /// Rescale nonzero weight rows to sum to one before validation.
    #[serde(default, skip_serializing_if = "is_false")]
    pub normalize: bool,
}

impl LayerSpec {
    pub fn from_pair(pair: &FactorPair) -> Self {
        LayerSpec {
            susceptibility: pair.lambda().to_vec(),
            weights: pair.weights().to_rows(),
            normalize: false,
        }
    }

    fn build(&self) -> Result<FactorPair> {
        let lambda = SusceptibilityMatrix::new(self.susceptibility.clone())
            .map_err(|e| e.with_context("susceptibility"))?;
        let m = matrix_from_rows(&self.weights).map_err(|e| e.with_context("weights"))?;
        let w = if self.normalize {
            InfluenceMatrix::normalized(m)
        } else {
            InfluenceMatrix::new(m)
        }
        .map_err(|e| e.with_context("weights"))?;
        FactorPair::new(lambda, w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjacencyMode {
    /// `A[t] = adjacency[t mod len]`.
    #[default]
    Periodic,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    Example1,
    Example2,
    Example3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Explicit {
        layers: Vec<LayerSpec>,
    },
    Periodic {
        phases: Vec<LayerSpec>,
    },
    SemiPeriodic {
        period: usize,
        layers: Vec<LayerSpec>,
    },
    Trust {
        trust: Vec<Vec<f64>>,
        /// 0/1 adjacency matrices.
        adjacency: Vec<Vec<Vec<u8>>>,
        #[serde(default)]
        adjacency_mode: AdjacencyMode,
        rules: Vec<SusceptibilityRule>,
    },
    Preset {
        preset: PresetName,
        /// Network-2 duration for `example2`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        variant: Option<Example3Variant>,
    },
}

/// Window partition used by `certify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowSpec {
    Length(usize),
    Named(NamedWindow),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedWindow {
    /// Switching cycles supplied by the schedule.
    Switching,
    /// The schedule's period or semi-period.
    Period,
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSpec::Length(l) => write!(f, "{l}"),
            WindowSpec::Named(NamedWindow::Switching) => f.write_str("switching"),
            WindowSpec::Named(NamedWindow::Period) => f.write_str("period"),
        }
    }
}

impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "switching" => Ok(WindowSpec::Named(NamedWindow::Switching)),
            "period" => Ok(WindowSpec::Named(NamedWindow::Period)),
            other => match other.parse::<usize>() {
                Ok(l) if l >= 1 => Ok(WindowSpec::Length(l)),
                _ => Err(Error::Parse(format!(
                    "window must be a positive length, \"switching\" or \"period\", got {other:?}"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationMode {
    Constant,
    #[default]
    Periodic,
    Sequence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    #[serde(default)]
    pub mode: PerturbationMode,
    pub matrices: Vec<Vec<Vec<f64>>>,
    /// Rescale so that the largest `‖E[t]‖` equals this fraction of the
    /// robustness threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_fraction: Option<f64>,
}

impl PerturbationSpec {
    pub fn build(&self, scale: f64) -> Result<Perturbation> {
        let mats = self
            .matrices
            .iter()
            .enumerate()
            .map(|(k, rows)| {
                matrix_from_rows(rows)
                    .map(|m| m * scale)
                    .map_err(|e| e.with_context(format!("analysis.perturbation.matrices[{k}]")))
            })
            .collect::<Result<Vec<Matrix>>>()?;
        match self.mode {
            PerturbationMode::Constant => match mats.as_slice() {
                [m] => Ok(Perturbation::Constant(m.clone())),
                _ => Err(Error::validation(format!(
                    "constant perturbation needs exactly one matrix, got {}",
                    mats.len()
                ))
                .with_context("analysis.perturbation")),
            },
            PerturbationMode::Periodic => Ok(Perturbation::Periodic(mats)),
            PerturbationMode::Sequence => Ok(Perturbation::Sequence(mats)),
        }
    }
}

fn default_epsilon() -> f64 {
    0.1
}
fn default_w_threshold() -> f64 {
    0.5
}
fn default_decay_tolerance() -> f64 {
    1e-9
}
fn default_tail_fraction() -> f64 {
    0.25
}
fn default_cluster_tol() -> f64 {
    1e-6
}
fn default_dedup_tol() -> f64 {
    crate::pslti::DEDUP_TOL
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_w_threshold")]
    pub w_threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
    /// The union bound must fall below this to certify decay.
    #[serde(default = "default_decay_tolerance")]
    pub decay_tolerance: f64,
    #[serde(default = "default_tail_fraction")]
    pub tail_fraction: f64,
    #[serde(default = "default_cluster_tol")]
    pub cluster_tol: f64,
    #[serde(default = "default_dedup_tol")]
    pub dedup_tol: f64,
    /// Initial states for zero-input runs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zero_input_initials: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationSpec>,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            horizon: None,
            epsilon: default_epsilon(),
            w_threshold: default_w_threshold(),
            window: None,
            decay_tolerance: default_decay_tolerance(),
            tail_fraction: default_tail_fraction(),
            cluster_tol: default_cluster_tol(),
            dedup_tol: default_dedup_tol(),
            zero_input_initials: Vec::new(),
            perturbation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_true")]
    pub trajectory: bool,
    #[serde(default = "default_true")]
    pub norm_trace: bool,
    #[serde(default = "default_true")]
    pub windows: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            trajectory: true,
            norm_trace: true,
            windows: true,
        }
    }
}

/// A validated scenario: the document plus the resolved schedule and
/// vectors.
#[derive(Debug, Clone)]
pub struct Scenario {
    doc: ScenarioDoc,
    schedule: Schedule,
    innate: OpinionVector,
    initial: OpinionVector,
    zero_input_initials: Vec<OpinionVector>,
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.doc == other.doc
            && self.innate == other.innate
            && self.initial == other.initial
            && self.zero_input_initials == other.zero_input_initials
    }
}

impl Scenario {
    pub fn doc(&self) -> &ScenarioDoc {
        &self.doc
    }

    pub fn name(&self) -> &str {
        &self.doc.name
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn n(&self) -> usize {
        self.schedule.n()
    }

    pub fn innate(&self) -> &OpinionVector {
        &self.innate
    }

    pub fn initial(&self) -> &OpinionVector {
        &self.initial
    }

    pub fn zero_input_initials(&self) -> &[OpinionVector] {
        &self.zero_input_initials
    }

    pub fn analysis(&self) -> &AnalysisSpec {
        &self.doc.analysis
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.doc).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_doc(doc: ScenarioDoc) -> Result<Self> {
        let (schedule, preset_innate) = build_schedule(&doc)?;
        let schedule = if doc.permit_vanishing_susceptibility {
            schedule.permit_vanishing_susceptibility()
        } else {
            schedule
        };
        let n = schedule.n();
        if let Some(a) = doc.agents {
            if a != n {
                return Err(Error::Dimension(format!(
                    "agents = {a} but the schedule has {n} agents"
                )));
            }
        }
        validate_resolution(&schedule)?;
        let innate = match (&doc.innate, preset_innate) {
            (Some(v), _) => opinion(v, n, "innate")?,
            (None, Some(v)) => v,
            (None, None) => {
                return Err(Error::validation("missing field").with_context("innate"));
            }
        };
        let initial = match &doc.initial {
            Some(v) => opinion(v, n, "initial")?,
            None => innate.clone(),
        };
        let zero_input_initials = doc
            .analysis
            .zero_input_initials
            .iter()
            .enumerate()
            .map(|(k, v)| opinion(v, n, &format!("analysis.zero_input_initials[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        check_analysis(&doc.analysis)?;
        Ok(Scenario {
            doc,
            schedule,
            innate,
            initial,
            zero_input_initials,
        })
    }

    /// Default horizon: the scenario's, else the length of a finite
    /// schedule, else [`DEFAULT_HORIZON`].
    pub fn default_horizon(&self) -> usize {
        self.doc
            .analysis
            .horizon
            .or_else(|| self.schedule.length())
            .unwrap_or(DEFAULT_HORIZON)
    }

    /// Default window: switching cycles if the schedule has them, else the
    /// period, else `n` steps.
    pub fn default_window(&self) -> WindowSpec {
        if let Some(w) = self.doc.analysis.window {
            return w;
        }
        if self.schedule.boundaries(1).is_some() {
            WindowSpec::Named(NamedWindow::Switching)
        } else if self.schedule.period().is_some()
            || matches!(self.schedule.kind(), ScheduleKind::SemiPeriodic { .. })
        {
            WindowSpec::Named(NamedWindow::Period)
        } else {
            WindowSpec::Length(self.n().max(1))
        }
    }
}

fn opinion(values: &[f64], n: usize, field: &str) -> Result<OpinionVector> {
    if values.len() != n {
        return Err(Error::Dimension(format!(
            "{field} has length {}, expected {n}",
            values.len()
        )));
    }
    OpinionVector::new(values.to_vec()).map_err(|e| e.with_context(field))
}

fn check_analysis(a: &AnalysisSpec) -> Result<()> {
    let unit = |name: &str, v: f64| -> Result<()> {
        if v > 0.0 && v <= 1.0 {
            Ok(())
        } else {
            Err(Error::validation(format!("{v} must lie in (0, 1]"))
                .with_context(format!("analysis.{name}")))
        }
    };
    unit("epsilon", a.epsilon)?;
    unit("w_threshold", a.w_threshold)?;
    if let Some(WindowSpec::Length(0)) = a.window {
        return Err(Error::validation("window length must be at least 1").with_context("analysis.window"));
    }
    for (name, v) in [
        ("decay_tolerance", a.decay_tolerance),
        ("cluster_tol", a.cluster_tol),
        ("dedup_tol", a.dedup_tol),
    ] {
        if !(v > 0.0) {
            return Err(Error::validation(format!("{v} must be positive"))
                .with_context(format!("analysis.{name}")));
        }
    }
    if !(a.tail_fraction > 0.0 && a.tail_fraction <= 0.5) {
        return Err(Error::validation(format!("{} must lie in (0, 0.5]", a.tail_fraction))
            .with_context("analysis.tail_fraction"));
    }
    if let Some(f) = a.perturbation.as_ref().and_then(|p| p.threshold_fraction) {
        if !(f >= 0.0) {
            return Err(Error::validation(format!("{f} must be nonnegative"))
                .with_context("analysis.perturbation.threshold_fraction"));
        }
    }
    Ok(())
}

fn build_layers(specs: &[LayerSpec], field: &str) -> Result<Vec<FactorPair>> {
    specs
        .iter()
        .enumerate()
        .map(|(t, l)| {
            l.build()
                .map_err(|e| e.at_time(t).with_context(format!("schedule.{field}[{t}]")))
        })
        .collect()
}

fn build_schedule(doc: &ScenarioDoc) -> Result<(Schedule, Option<OpinionVector>)> {
    let schedule = match &doc.schedule {
        ScheduleSpec::Explicit { layers } => Schedule::explicit(build_layers(layers, "layers")?),
        ScheduleSpec::Periodic { phases } => Schedule::periodic(build_layers(phases, "phases")?),
        ScheduleSpec::SemiPeriodic { period, layers } => {
            Schedule::semi_periodic(*period, build_layers(layers, "layers")?)
        }
        ScheduleSpec::Trust {
            trust,
            adjacency,
            adjacency_mode,
            rules,
        } => {
            let trust = matrix_from_rows(trust)
                .and_then(InfluenceMatrix::new)
                .map_err(|e| e.with_context("schedule.trust"))?;
            let adjacency = adjacency
                .iter()
                .enumerate()
                .map(|(k, a)| to_adjacency(a).map_err(|e| e.with_context(format!("schedule.adjacency[{k}]"))))
                .collect::<Result<Vec<_>>>()?;
            let adjacency = match adjacency_mode {
                AdjacencyMode::Periodic => AdjacencySchedule::Periodic(adjacency),
                AdjacencyMode::Explicit => AdjacencySchedule::Explicit(adjacency),
            };
            let config = TrustConfig::new(trust, adjacency, rules.clone())
                .map_err(|e| e.with_context("schedule"))?;
            Ok(Schedule::from_rule(std::sync::Arc::new(config)))
        }
        ScheduleSpec::Preset { preset, d, variant } => {
            return build_preset(*preset, *d, *variant);
        }
    }
    .map_err(|e| e.with_context("schedule"))?;
    Ok((schedule, None))
}

fn build_preset(
    preset: PresetName,
    d: Option<usize>,
    variant: Option<Example3Variant>,
) -> Result<(Schedule, Option<OpinionVector>)> {
    let unused = |field: &str| {
        Error::validation(format!("not used by preset {preset:?}")).with_context(format!("schedule.{field}"))
    };
    match preset {
        PresetName::Example1 => {
            if d.is_some() {
                return Err(unused("d"));
            }
            if variant.is_some() {
                return Err(unused("variant"));
            }
            let s = OpinionVector::new(vec![0.0, 0.5, 1.0])?;
            Ok((Example1.schedule(), Some(s)))
        }
        PresetName::Example2 => {
            if variant.is_some() {
                return Err(unused("variant"));
            }
            let d = d.unwrap_or(2);
            if d == 0 {
                return Err(Error::validation("must be at least 1").with_context("schedule.d"));
            }
            Ok((Example2::new(d).schedule(), Some(example2_innate())))
        }
        PresetName::Example3 => {
            if d.is_some() {
                return Err(unused("d"));
            }
            let v = variant.unwrap_or(Example3Variant::SinglePoint);
            Ok((example3_schedule(v), Some(example2_innate())))
        }
    }
}

fn to_adjacency(rows: &[Vec<u8>]) -> Result<Vec<Vec<bool>>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|&v| match v {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(Error::validation(format!("entry {other} is not 0 or 1"))),
                })
                .collect()
        })
        .collect()
}

/// Resolves every layer a finite or periodic schedule defines, and one
/// adjacency cycle of trust schedules, so that load fails early.
fn validate_resolution(schedule: &Schedule) -> Result<()> {
    let count = match schedule.kind() {
        ScheduleKind::Explicit(l) | ScheduleKind::SemiPeriodic { layers: l, .. } => l.len(),
        ScheduleKind::Periodic(p) => p.len(),
        ScheduleKind::Rule(_) => 1,
    };
    for t in 0..count {
        schedule
            .resolve(t)
            .map_err(|e| e.with_context(format!("schedule (t={t})")))?;
    }
    Ok(())
}

pub fn load_scenario_str(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Scenario::from_doc(doc)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    load_scenario_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// A scenario document for a built-in preset.
pub fn preset_doc(preset: PresetName) -> ScenarioDoc {
    let (name, d, variant) = match preset {
        PresetName::Example1 => ("example1", None, None),
        PresetName::Example2 => ("example2", Some(2), None),
        PresetName::Example3 => ("example3", None, Some(Example3Variant::SinglePoint)),
    };
    ScenarioDoc {
        name: name.into(),
        agents: None,
        innate: None,
        initial: None,
        permit_vanishing_susceptibility: false,
        schedule: ScheduleSpec::Preset { preset, d, variant },
        analysis: AnalysisSpec::default(),
        output: OutputSpec::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PERIODIC: &str = r#"
name = "pair"
innate = [0.2, 0.8]

[schedule]
kind = "periodic"
phases = [
  { susceptibility = [0.5, 1.0], weights = [[0.5, 0.5], [1.0, 0.0]] },
  { susceptibility = [1.0, 0.9], weights = [[0.0, 1.0], [0.5, 0.5]] },
]

[analysis]
horizon = 50
window = "period"
"#;

    #[test]
    fn loads_periodic_scenario() {
        let sc = load_scenario_str(PERIODIC).unwrap();
        assert_eq!(sc.n(), 2);
        assert_eq!(sc.schedule().period(), Some(2));
        assert_eq!(sc.initial(), sc.innate());
        assert_eq!(sc.default_horizon(), 50);
        assert_eq!(sc.default_window(), WindowSpec::Named(NamedWindow::Period));
    }

    #[test]
    fn round_trip_preserves_scenario() {
        let sc = load_scenario_str(PERIODIC).unwrap();
        let again = load_scenario_str(&sc.to_toml().unwrap()).unwrap();
        assert_eq!(sc, again);
        for preset in [PresetName::Example1, PresetName::Example2, PresetName::Example3] {
            let sc = Scenario::from_doc(preset_doc(preset)).unwrap();
            let again = load_scenario_str(&sc.to_toml().unwrap()).unwrap();
            assert_eq!(sc, again);
        }
    }

    #[test]
    fn example2_preset_fills_data() {
        let sc = Scenario::from_doc(preset_doc(PresetName::Example2)).unwrap();
        assert_eq!(sc.n(), 5);
        assert_eq!(sc.innate().as_slice(), &[0.5, 1.0, 1.0, 0.0, 0.0]);
        assert_eq!(sc.default_window(), WindowSpec::Named(NamedWindow::Switching));
        let sc = Scenario::from_doc(preset_doc(PresetName::Example1)).unwrap();
        assert_eq!(sc.n(), 3);
        let p = sc.schedule().resolve(0).unwrap();
        assert!((p.weights().weight(0, 2) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn short_row_is_rejected_with_location() {
        let text = PERIODIC.replace("[[0.0, 1.0], [0.5, 0.5]]", "[[0.0, 0.9], [0.5, 0.5]]");
        let err = load_scenario_str(&text).unwrap_err();
        let msg = err.to_string();
        assert!(err.is_validation());
        assert!(msg.contains("schedule.phases[1]"), "{msg}");
        assert!(msg.contains("t=1"), "{msg}");
    }

    #[test]
    fn zero_row_pairing_is_checked() {
        let text = PERIODIC.replace("susceptibility = [0.5, 1.0]", "susceptibility = [0.0, 1.0]");
        let err = load_scenario_str(&text).unwrap_err();
        assert!(matches!(err, Error::ZeroRowMismatch { time: 0, agent: 0, .. }), "{err}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = load_scenario_str("name = \"x\"\n[schedule\n").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn unknown_fields_and_mismatches_are_rejected() {
        assert!(load_scenario_str(&PERIODIC.replace("horizon = 50", "horizon = 50\nbogus = 1")).is_err());
        let err = load_scenario_str(&PERIODIC.replace("innate = [0.2, 0.8]", "innate = [0.2]")).unwrap_err();
        assert!(err.to_string().contains("innate"), "{err}");
        let err = load_scenario_str(&PERIODIC.replace("innate = [0.2, 0.8]", "innate = [0.2, 1.8]")).unwrap_err();
        assert!(err.to_string().contains("innate"), "{err}");
        assert!(load_scenario_str(&PERIODIC.replace("name = \"pair\"", "name = \"pair\"\nagents = 3")).is_err());
    }

    #[test]
    fn vanishing_susceptibility_needs_opt_in() {
        let text = r#"
name = "anchor"
innate = [0.3, 0.6]
[schedule]
kind = "explicit"
layers = [{ susceptibility = [0.0, 0.0], weights = [[0.0, 0.0], [0.0, 0.0]] }]
"#;
        assert!(matches!(
            load_scenario_str(text),
            Err(Error::VanishingSusceptibility { .. })
        ));
        let text = text.replace("name = \"anchor\"", "name = \"anchor\"\npermit_vanishing_susceptibility = true");
        let sc = load_scenario_str(&text).unwrap();
        assert_eq!(sc.default_horizon(), 1);
    }

    #[test]
    fn trust_schedule_loads() {
        let text = r#"
name = "trust"
innate = [0.5, 1.0, 0.0]
[schedule]
kind = "trust"
trust = [[1.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.0, 0.5, 0.5]]
adjacency = [
  [[1, 0, 0], [1, 1, 0], [0, 1, 1]],
  [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
]
rules = [
  { rule = "fixed", value = 0.0 },
  { rule = "fixed", value = 0.8 },
  { rule = "degree_table", table = [0.0, 1.0, 0.9] },
]
"#;
        let sc = load_scenario_str(text).unwrap();
        let p = sc.schedule().resolve(1).unwrap();
        assert_eq!(p.lambda().lambda(2), 1.0);
        assert_eq!(p.weights().weight(1, 1), 1.0);
        let again = load_scenario_str(&sc.to_toml().unwrap()).unwrap();
        assert_eq!(sc, again);
        let bad = text.replace("[[1, 0, 0], [0, 1, 0], [0, 0, 1]]", "[[1, 0, 0], [0, 2, 0], [0, 0, 1]]");
        assert!(load_scenario_str(&bad).unwrap_err().to_string().contains("adjacency[1]"));
    }

    #[test]
    fn window_spec_parsing() {
        assert_eq!("4".parse::<WindowSpec>().unwrap(), WindowSpec::Length(4));
        assert_eq!(
            "switching".parse::<WindowSpec>().unwrap(),
            WindowSpec::Named(NamedWindow::Switching)
        );
        assert!("0".parse::<WindowSpec>().is_err());
        assert!("weekly".parse::<WindowSpec>().is_err());
        assert_eq!(WindowSpec::Length(3).to_string(), "3");
    }
}
