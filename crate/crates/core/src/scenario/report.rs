use std::path::Path;

use serde::{Deserialize, Serialize};

use super::table::{format_sig, rows_csv, series_csv, trajectory_csv};
use super::{NamedWindow, Scenario, WindowSpec};
use crate::certificates::{
    decay_verdict, defected_window_bound, periodic_certificate, robustness_threshold,
    semi_periodic_constants, semi_periodic_premise, stationary_stability_check, union_bound_trace,
    ExponentialCertificate, RobustnessThreshold, StabilityVerdict,
};
use crate::dynamics::{
    norm_trace, simulate, simulate_perturbed, simulate_perturbed_zero_input, simulate_zero_input,
    PerturbedSystem, ScheduleKind,
};
use crate::error::{Error, Result};
use crate::pslti::{
    build_phase_systems, containment_check, phase_fixed_points, tail_omega_estimate, OmegaEstimate,
};
use crate::stochastic::{matrix_to_rows, max_row_sum_norm, OpinionVector};
use crate::temporal::{scan_partition, scan_windows, DefectReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verb {
    Simulate,
    Certify,
    Decompose,
    Omega,
    Robustness,
}

/// Command-line overrides of the scenario's analysis settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub verb: Verb,
    pub horizon: Option<usize>,
    pub epsilon: Option<f64>,
    pub w_threshold: Option<f64>,
    pub window: Option<WindowSpec>,
}

impl RunOptions {
    pub fn new(verb: Verb) -> Self {
        RunOptions {
            verb,
            horizon: None,
            epsilon: None,
            w_threshold: None,
            window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub final_state: Vec<f64>,
    /// `‖Φ(horizon, 0)‖`.
    pub final_norm: f64,
    /// Final sup-norm of each zero-input run.
    pub zero_input_final_sup: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub windows: Vec<DefectReport>,
    /// Per-window contraction bound, for defected windows.
    pub window_bounds: Vec<Option<f64>>,
    /// Running product of window bounds at each boundary.
    pub union_bound_trace: Vec<f64>,
    /// `‖Φ(b_k, b_0)‖` at each boundary.
    pub measured_norms: Vec<f64>,
    pub verdict: StabilityVerdict,
    /// For single-phase periodic schedules: whether the stationary pair is
    /// weakly defected.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationary_stable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponential: Option<ExponentialCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponential_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub phase: usize,
    pub m: Vec<Vec<f64>>,
    pub n: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<Vec<f64>>,
    /// `‖x* - M x* - N s‖∞`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub period: usize,
    pub phases: Vec<PhaseReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ExponentialCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub estimate: OmegaEstimate,
    pub contained_in_innate_range: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationOutcome {
    pub scale: f64,
    pub max_perturbation_norm: f64,
    pub within_threshold: bool,
    pub zero_input_final_sup: Vec<f64>,
    pub final_state: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub threshold: RobustnessThreshold,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub verb: Verb,
    pub agents: usize,
    pub horizon: usize,
    pub epsilon: f64,
    pub w_threshold: f64,
    pub window: WindowSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certification: Option<CertificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub robustness: Option<RobustnessReport>,
    /// Set when the requested certificate could not be established; the
    /// rest of the report is still valid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_unavailable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub file_name: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub report: Report,
    pub tables: Vec<Table>,
}

impl ReportBundle {
    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `report.json` and every table into `dir`, creating it.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.report_json())?;
        for t in &self.tables {
            std::fs::write(dir.join(&t.file_name), &t.content)?;
        }
        Ok(())
    }

    pub fn table(&self, file_name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.file_name == file_name)
    }
}

struct Settings {
    horizon: usize,
    epsilon: f64,
    w_threshold: f64,
    window: WindowSpec,
}

fn settings(sc: &Scenario, opts: &RunOptions) -> Result<Settings> {
    let s = Settings {
        horizon: opts.horizon.unwrap_or_else(|| sc.default_horizon()),
        epsilon: opts.epsilon.unwrap_or(sc.analysis().epsilon),
        w_threshold: opts.w_threshold.unwrap_or(sc.analysis().w_threshold),
        window: opts.window.unwrap_or_else(|| sc.default_window()),
    };
    for (name, v) in [("epsilon", s.epsilon), ("w_threshold", s.w_threshold)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::validation(format!("{name} = {v} must lie in (0, 1]")));
        }
    }
    if s.horizon == 0 {
        return Err(Error::validation("horizon must be at least 1"));
    }
    if let Some(len) = sc.schedule().length() {
        if s.horizon > len {
            return Err(Error::validation(format!(
                "horizon {} exceeds the {len} layers of the explicit schedule",
                s.horizon
            )));
        }
    }
    Ok(s)
}

/// Runs one verb on a scenario. Output is a pure function of the scenario
/// and options.
pub fn run(sc: &Scenario, opts: &RunOptions) -> Result<ReportBundle> {
    let set = settings(sc, opts)?;
    let mut report = Report {
        scenario: sc.name().to_string(),
        verb: opts.verb,
        agents: sc.n(),
        horizon: set.horizon,
        epsilon: set.epsilon,
        w_threshold: set.w_threshold,
        window: set.window,
        simulation: None,
        certification: None,
        decomposition: None,
        omega: None,
        robustness: None,
        certificate_unavailable: None,
    };
    let mut tables = Vec::new();
    match opts.verb {
        Verb::Simulate => {
            report.simulation = Some(run_simulate(sc, &set, &mut tables)?);
        }
        Verb::Certify => {
            report.certification = Some(run_certify(sc, &set, &mut tables)?);
        }
        Verb::Decompose => {
            let (dec, unavailable) = run_decompose(sc)?;
            report.decomposition = Some(dec);
            report.certificate_unavailable = unavailable;
        }
        Verb::Omega => {
            report.omega = Some(run_omega(sc, &set, &mut tables)?);
        }
        Verb::Robustness => match run_robustness(sc, &set)? {
            Ok(r) => report.robustness = Some(r),
            Err(reason) => report.certificate_unavailable = Some(reason),
        },
    }
    Ok(ReportBundle { report, tables })
}

fn run_simulate(sc: &Scenario, set: &Settings, tables: &mut Vec<Table>) -> Result<SimulationSummary> {
    let out = &sc.doc().output;
    let traj = simulate(sc.initial(), sc.innate(), sc.schedule(), set.horizon)?;
    let norms = norm_trace(sc.schedule(), 0, set.horizon)?;
    let mut zero_sup = Vec::new();
    let mut zero_series = Vec::new();
    for x0 in sc.zero_input_initials() {
        let z = simulate_zero_input(x0, sc.schedule(), set.horizon)?;
        let sup: Vec<f64> = z.iter().map(OpinionVector::sup_norm).collect();
        zero_sup.push(*sup.last().expect("nonempty trajectory"));
        zero_series.push(sup);
    }
    if out.trajectory {
        tables.push(Table {
            file_name: "trajectory.csv".into(),
            content: trajectory_csv(&traj, 0),
        });
    }
    if out.norm_trace {
        tables.push(Table {
            file_name: "norm_trace.csv".into(),
            content: series_csv(&["norm"], &[&norms], 0),
        });
    }
    if !zero_series.is_empty() {
        let names: Vec<String> = (1..=zero_series.len()).map(|k| format!("run{k}")).collect();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let series: Vec<&[f64]> = zero_series.iter().map(Vec::as_slice).collect();
        tables.push(Table {
            file_name: "zero_input_sup.csv".into(),
            content: series_csv(&names, &series, 0),
        });
    }
    Ok(SimulationSummary {
        final_state: traj.last().expect("nonempty trajectory").as_slice().to_vec(),
        final_norm: *norms.last().expect("nonempty trace"),
        zero_input_final_sup: zero_sup,
    })
}

fn scan(sc: &Scenario, set: &Settings) -> Result<Vec<DefectReport>> {
    let graph = sc.schedule().temporal_graph(0, set.horizon)?;
    match set.window {
        WindowSpec::Length(l) => scan_windows(&graph, l, set.epsilon, set.w_threshold),
        WindowSpec::Named(NamedWindow::Period) => {
            let p = period_of(sc).ok_or_else(|| {
                Error::validation("window \"period\" needs a periodic or semi-periodic schedule")
            })?;
            scan_windows(&graph, p, set.epsilon, set.w_threshold)
        }
        WindowSpec::Named(NamedWindow::Switching) => {
            let b = sc.schedule().boundaries(set.horizon).ok_or_else(|| {
                Error::validation("window \"switching\" needs a schedule with switching times")
            })?;
            scan_partition(&graph, &b, set.epsilon, set.w_threshold)
        }
    }
}

fn period_of(sc: &Scenario) -> Option<usize> {
    match sc.schedule().kind() {
        ScheduleKind::Periodic(p) => Some(p.len()),
        ScheduleKind::SemiPeriodic { period, .. } => Some(*period),
        _ => None,
    }
}

/// Exponential certificate for periodic and semi-periodic schedules, or
/// the reason none applies.
fn exponential(sc: &Scenario, set: &Settings) -> Result<std::result::Result<ExponentialCertificate, String>> {
    match sc.schedule().kind() {
        ScheduleKind::Periodic(phases) => match periodic_certificate(phases) {
            Ok(c) => Ok(Ok(c)),
            Err(Error::CertificateUnavailable(m)) => Ok(Err(m)),
            Err(e) => Err(e),
        },
        ScheduleKind::SemiPeriodic { period, .. } => {
            let graph = sc.schedule().temporal_graph(0, set.horizon)?;
            if let Some(start) = semi_periodic_premise(&graph, set.epsilon, set.w_threshold, *period)? {
                return Ok(Err(format!(
                    "window [{start}, {}) of length {period} is not defected; \
                     only the per-window union bound applies",
                    start + period
                )));
            }
            match semi_periodic_constants(set.epsilon, set.w_threshold, *period) {
                Ok(c) => Ok(Ok(c)),
                Err(e) => Ok(Err(e.to_string())),
            }
        }
        _ => Ok(Err(
            "exponential constants need a periodic or semi-periodic schedule".into(),
        )),
    }
}

fn run_certify(sc: &Scenario, set: &Settings, tables: &mut Vec<Table>) -> Result<CertificationReport> {
    let windows = scan(sc, set)?;
    let window_bounds: Vec<Option<f64>> = windows
        .iter()
        .map(|r| defected_window_bound(r).ok().map(|b| b.bound))
        .collect();
    let trace = union_bound_trace(&windows)?;
    let norms = norm_trace(sc.schedule(), 0, set.horizon)?;
    let start = windows.first().map_or(0, |w| w.start);
    let end = windows.last().map_or(start, |w| w.end);
    let from_start = norm_trace(sc.schedule(), start, end)?;
    let measured_norms: Vec<f64> = std::iter::once(start)
        .chain(windows.iter().map(|w| w.end))
        .map(|t| from_start[t - start])
        .collect();
    let verdict = decay_verdict(&windows, &trace, sc.analysis().decay_tolerance);
    let stationary_stable = match sc.schedule().kind() {
        ScheduleKind::Periodic(p) if p.len() == 1 => {
            Some(stationary_stability_check(p[0].weights(), p[0].lambda())?)
        }
        _ => None,
    };
    let (exponential, exponential_note) = match exponential(sc, set)? {
        Ok(c) => (Some(c), None),
        Err(m) => (None, Some(m)),
    };
    let out = &sc.doc().output;
    if out.norm_trace {
        tables.push(Table {
            file_name: "norm_trace.csv".into(),
            content: series_csv(&["norm"], &[&norms], 0),
        });
    }
    if out.windows {
        let rows: Vec<Vec<String>> = windows
            .iter()
            .zip(&window_bounds)
            .zip(trace.iter().skip(1).zip(measured_norms.iter().skip(1)))
            .map(|((w, b), (u, m))| {
                vec![
                    w.start.to_string(),
                    w.end.to_string(),
                    w.is_dtg.to_string(),
                    w.is_wdtg.to_string(),
                    b.map_or_else(String::new, format_sig),
                    format_sig(*u),
                    format_sig(*m),
                ]
            })
            .collect();
        tables.push(Table {
            file_name: "windows.csv".into(),
            content: rows_csv(
                &["start", "end", "is_dtg", "is_wdtg", "bound", "union_bound", "measured_norm"],
                &rows,
            ),
        });
    }
    Ok(CertificationReport {
        windows,
        window_bounds,
        union_bound_trace: trace,
        measured_norms,
        verdict,
        stationary_stable,
        exponential,
        exponential_note,
    })
}

fn run_decompose(sc: &Scenario) -> Result<(DecompositionReport, Option<String>)> {
    let phases = sc
        .schedule()
        .phases()
        .ok_or_else(|| Error::validation("decompose needs a periodic schedule"))?;
    let mut systems = build_phase_systems(phases)?;
    let (certificate, unavailable) = match periodic_certificate(phases) {
        Ok(c) => (Some(c), None),
        Err(Error::CertificateUnavailable(m)) => (None, Some(m)),
        Err(e) => return Err(e),
    };
    let mut omega = None;
    let mut unavailable = unavailable;
    if certificate.is_some() {
        match phase_fixed_points(&mut systems, sc.innate(), sc.analysis().dedup_tol) {
            Ok(est) => omega = Some(est),
            Err(Error::CertificateUnavailable(m)) => unavailable = Some(m),
            Err(e) => return Err(e),
        }
    }
    let s = sc.innate().as_vector();
    let phases = systems
        .iter()
        .map(|sys| {
            let residual = sys.fixed_point.as_ref().map(|x| {
                (x.as_vector() - sys.step(x.as_vector(), s)).amax()
            });
            PhaseReport {
                phase: sys.phase,
                m: matrix_to_rows(&sys.m),
                n: matrix_to_rows(&sys.n),
                fixed_point: sys.fixed_point.as_ref().map(|x| x.as_slice().to_vec()),
                residual,
            }
        })
        .collect();
    Ok((
        DecompositionReport {
            period: systems.len(),
            phases,
            certificate,
            omega,
        },
        unavailable,
    ))
}

fn run_omega(sc: &Scenario, set: &Settings, tables: &mut Vec<Table>) -> Result<OmegaReport> {
    let a = sc.analysis();
    let mut note = None;
    let closed_form = match sc.schedule().phases() {
        Some(phases) => {
            let mut systems = build_phase_systems(phases)?;
            match phase_fixed_points(&mut systems, sc.innate(), a.dedup_tol) {
                Ok(est) => Some(est),
                Err(Error::CertificateUnavailable(m)) => {
                    note = Some(format!("closed form unavailable ({m}); using tail clustering"));
                    None
                }
                Err(e) => return Err(e),
            }
        }
        None => None,
    };
    let estimate = match closed_form {
        Some(est) => est,
        None => {
            let traj = simulate(sc.initial(), sc.innate(), sc.schedule(), set.horizon)?;
            if sc.doc().output.trajectory {
                tables.push(Table {
                    file_name: "trajectory.csv".into(),
                    content: trajectory_csv(&traj, 0),
                });
            }
            tail_omega_estimate(&traj, a.tail_fraction, a.cluster_tol)?
        }
    };
    let rows: Vec<Vec<String>> = estimate
        .points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            std::iter::once(k.to_string())
                .chain(p.as_slice().iter().map(|&v| format_sig(v)))
                .collect()
        })
        .collect();
    let header: Vec<String> = std::iter::once("point".to_string())
        .chain((1..=sc.n()).map(|i| format!("x{i}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    tables.push(Table {
        file_name: "omega.csv".into(),
        content: rows_csv(&header, &rows),
    });
    Ok(OmegaReport {
        contained_in_innate_range: containment_check(&estimate, sc.innate()),
        estimate,
        note,
    })
}

fn run_robustness(
    sc: &Scenario,
    set: &Settings,
) -> Result<std::result::Result<RobustnessReport, String>> {
    let cert = match exponential(sc, set)? {
        Ok(c) => c,
        Err(m) => return Ok(Err(m)),
    };
    let threshold = match robustness_threshold(&cert) {
        Ok(t) => t,
        Err(Error::CertificateUnavailable(m)) => return Ok(Err(m)),
        Err(e) => return Err(e),
    };
    let perturbation = match &sc.analysis().perturbation {
        None => None,
        Some(spec) => {
            let raw = spec.build(1.0)?;
            let raw_max = perturbation_max_norm(&raw, sc.n())?;
            let scale = match spec.threshold_fraction {
                Some(f) if raw_max > 0.0 => f * threshold.threshold / raw_max,
                _ => 1.0,
            };
            let pert = spec.build(scale)?;
            let sys = PerturbedSystem::new(sc.schedule().clone(), pert)
                .map_err(|e| e.with_context("analysis.perturbation"))?;
            let x0s: Vec<OpinionVector> = if sc.zero_input_initials().is_empty() {
                vec![sc.initial().clone()]
            } else {
                sc.zero_input_initials().to_vec()
            };
            let mut zero_sup = Vec::new();
            let mut max_norm: f64 = 0.0;
            for x0 in &x0s {
                let run = simulate_perturbed_zero_input(x0, &sys, set.horizon)
                    .map_err(|e| e.with_context("analysis.perturbation"))?;
                max_norm = run.e_norms.iter().copied().fold(max_norm, f64::max);
                zero_sup.push(run.trajectory.last().expect("nonempty").sup_norm());
            }
            let full = simulate_perturbed(sc.initial(), sc.innate(), &sys, set.horizon)
                .map_err(|e| e.with_context("analysis.perturbation"))?;
            Some(PerturbationOutcome {
                scale,
                max_perturbation_norm: max_norm,
                within_threshold: max_norm < threshold.threshold,
                zero_input_final_sup: zero_sup,
                final_state: full.trajectory.last().expect("nonempty").as_slice().to_vec(),
            })
        }
    };
    Ok(Ok(RobustnessReport {
        threshold,
        perturbation,
    }))
}

fn perturbation_max_norm(p: &crate::dynamics::Perturbation, n: usize) -> Result<f64> {
    use crate::dynamics::Perturbation;
    let mats = match p {
        Perturbation::Zero => return Ok(0.0),
        Perturbation::Constant(m) => std::slice::from_ref(m),
        Perturbation::Sequence(s) | Perturbation::Periodic(s) => s.as_slice(),
    };
    let mut best: f64 = 0.0;
    for m in mats {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Dimension(format!(
                "perturbation is {}x{}, expected {n}x{n}",
                m.nrows(),
                m.ncols()
            )));
        }
        best = best.max(max_row_sum_norm(m)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{load_scenario_str, preset_doc, PresetName};

    fn preset(p: PresetName) -> Scenario {
        Scenario::from_doc(preset_doc(p)).unwrap()
    }

    #[test]
    fn example3_omega_is_single_point() {
        let bundle = run(&preset(PresetName::Example3), &RunOptions::new(Verb::Omega)).unwrap();
        let omega = bundle.report.omega.unwrap();
        assert_eq!(omega.estimate.points.len(), 1);
        let p = omega.estimate.points[0].as_slice();
        let expected = [0.50, 0.59, 0.59, 0.59, 0.59];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 5e-3, "{p:?}");
        }
        assert!(omega.contained_in_innate_range);
    }

    #[test]
    fn example2_switching_windows_are_defected() {
        let mut opts = RunOptions::new(Verb::Certify);
        opts.horizon = Some(500);
        let bundle = run(&preset(PresetName::Example2), &opts).unwrap();
        assert!(bundle.table("windows.csv").is_some());
        let cert = bundle.report.certification.unwrap();
        assert!(cert.windows.iter().all(|w| w.is_dtg));
        for (u, m) in cert.union_bound_trace.iter().zip(&cert.measured_norms) {
            assert!(m <= &(u + 1e-12));
        }
    }

    #[test]
    fn example1_is_inconclusive_and_plateaus() {
        let mut opts = RunOptions::new(Verb::Certify);
        opts.horizon = Some(2000);
        let bundle = run(&preset(PresetName::Example1), &opts).unwrap();
        let cert = bundle.report.certification.unwrap();
        assert_eq!(cert.verdict.label(), "inconclusive");
        assert!(*cert.measured_norms.last().unwrap() > 0.4);
    }

    #[test]
    fn reports_are_deterministic() {
        let sc = preset(PresetName::Example2);
        for verb in [Verb::Simulate, Verb::Certify, Verb::Omega] {
            let a = run(&sc, &RunOptions::new(verb)).unwrap();
            let b = run(&sc, &RunOptions::new(verb)).unwrap();
            assert_eq!(a.report_json(), b.report_json());
            assert_eq!(a.tables, b.tables);
        }
    }

    #[test]
    fn robustness_needs_exponential_certificate() {
        let bundle = run(&preset(PresetName::Example2), &RunOptions::new(Verb::Robustness)).unwrap();
        assert!(bundle.report.certificate_unavailable.is_some());
        let bundle = run(&preset(PresetName::Example3), &RunOptions::new(Verb::Robustness)).unwrap();
        let r = bundle.report.robustness.unwrap();
        assert!(r.threshold.threshold > 0.0);
    }

    #[test]
    fn decompose_rejects_aperiodic_and_reports_unavailable() {
        let err = run(&preset(PresetName::Example1), &RunOptions::new(Verb::Decompose)).unwrap_err();
        assert!(err.is_validation());
        let text = r#"
name = "stuck"
innate = [0.2, 0.8]
[schedule]
kind = "periodic"
phases = [{ susceptibility = [1.0, 1.0], weights = [[0.0, 1.0], [1.0, 0.0]] }]
"#;
        let sc = load_scenario_str(text).unwrap();
        let bundle = run(&sc, &RunOptions::new(Verb::Decompose)).unwrap();
        assert!(bundle.report.certificate_unavailable.is_some());
        assert_eq!(bundle.report.decomposition.unwrap().phases.len(), 1);
    }

    #[test]
    fn perturbation_is_scaled_to_threshold_fraction() {
        let text = r#"
name = "perturbed"
innate = [0.2, 0.8]
[schedule]
kind = "periodic"
phases = [{ susceptibility = [0.5, 0.5], weights = [[0.5, 0.5], [0.5, 0.5]] }]
[analysis]
horizon = 400
zero_input_initials = [[1.0, 1.0]]
[analysis.perturbation]
mode = "constant"
matrices = [[[0.1, -0.1], [-0.1, 0.1]]]
threshold_fraction = 0.9
"#;
        let sc = load_scenario_str(text).unwrap();
        let r = run(&sc, &RunOptions::new(Verb::Robustness))
            .unwrap()
            .report
            .robustness
            .unwrap();
        let p = r.perturbation.unwrap();
        assert!((p.max_perturbation_norm - 0.9 * r.threshold.threshold).abs() < 1e-12);
        assert!(p.within_threshold);
        assert!(p.zero_input_final_sup[0] < 1e-6);
    }

    #[test]
    fn horizon_beyond_explicit_schedule_is_rejected() {
        let text = r#"
name = "short"
innate = [0.2, 0.8]
[schedule]
kind = "explicit"
layers = [{ susceptibility = [0.5, 0.5], weights = [[0.5, 0.5], [0.5, 0.5]] }]
"#;
        let sc = load_scenario_str(text).unwrap();
        let mut opts = RunOptions::new(Verb::Simulate);
        opts.horizon = Some(2);
        assert!(run(&sc, &opts).is_err());
        opts.horizon = None;
        assert!(run(&sc, &opts).is_ok());
    }
}
