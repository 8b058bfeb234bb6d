//! Numeric stability certificates built on defected-window detection.
//!
//! * Contraction of a defected window: `‖Φ(t_d, t_0)‖ ≤ 1 - ε w^δ`.
//! * Consecutive windows: the product of the per-window bounds.
//! * Exponential stability `‖Φ(t, τ)‖ ≤ c γ^(t-τ)`:
//!   - semi-periodic (every `p_s`-window defected):
//!     `c = (1 - ε w^p_s)^(-p_s)`, `γ = (1 - ε w^p_s)^(1/p_s)`;
//!   - periodic with period `p`: `c = ‖Φ(p,0)‖^(-p)`, `γ = ‖Φ(p,0)‖^(1/p)`.
//! * Robustness: exponential stability survives perturbations with
//!   `‖E[t]‖ < -(γ/c) ln γ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stochastic::{max_row_sum_norm, InfluenceMatrix, SusceptibilityMatrix};
use crate::stochastic::{FactorPair, Matrix};
use crate::temporal::{detect_certificate, DefectReport, TemporalGraphWindow};

/// Agreement required between the generic and specialized threshold forms.
const THRESHOLD_AGREEMENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    /// Single defected window.
    DefectedWindow,
    /// Product over consecutive windows.
    WindowUnion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionBound {
    pub bound: f64,
    pub epsilon: f64,
    pub w_threshold: f64,
    pub delta: usize,
    pub source: BoundSource,
}

/// `1 - ε w^δ` for a window reported as defected.
pub fn defected_window_bound(report: &DefectReport) -> Result<ContractionBound> {
    if !report.is_dtg {
        return Err(Error::CertificateUnavailable(format!(
            "window [{}, {}) is not defected; uncovered agents {:?}",
            report.start, report.end, report.uncovered_agents
        )));
    }
    let delta = report.effective_delta;
    let bound = 1.0 - report.epsilon * report.w_threshold.powi(delta as i32);
    if bound <= 0.0 {
        return Err(Error::CertificateUnavailable(format!(
            "degenerate contraction bound {bound} (ε = {}, w = {}); ε w^δ must be below 1",
            report.epsilon, report.w_threshold
        )));
    }
    Ok(ContractionBound {
        bound,
        epsilon: report.epsilon,
        w_threshold: report.w_threshold,
        delta,
        source: BoundSource::DefectedWindow,
    })
}

fn check_contiguous(reports: &[DefectReport]) -> Result<()> {
    for pair in reports.windows(2) {
        if pair[0].end != pair[1].start {
            return Err(Error::validation(format!(
                "windows [{}, {}) and [{}, {}) are not contiguous",
                pair[0].start, pair[0].end, pair[1].start, pair[1].end
            )));
        }
    }
    Ok(())
}

/// Product of the defected-window bounds; other windows contribute 1.
pub fn window_union_bound(reports: &[DefectReport]) -> Result<f64> {
    Ok(union_bound_trace(reports)?.last().copied().unwrap_or(1.0))
}

/// Running product of the window bounds: entry `k` bounds
/// `‖Φ(end_k, start_0)‖`, with a leading 1 for the empty product.
pub fn union_bound_trace(reports: &[DefectReport]) -> Result<Vec<f64>> {
    check_contiguous(reports)?;
    let mut acc = 1.0;
    let mut trace = vec![acc];
    for r in reports {
        if r.is_dtg {
            acc *= defected_window_bound(r)?.bound;
        }
        trace.push(acc);
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum StabilityVerdict {
    /// The union bound fell below the tolerance within the horizon.
    CertifiedDecaying {
        final_bound: f64,
        dtg_windows: usize,
        windows: usize,
    },
    /// Defected windows keep recurring but the bound has not yet reached
    /// the tolerance.
    CertificateTrend {
        final_bound: f64,
        dtg_windows: usize,
        windows: usize,
        /// Fraction of windows that are defected.
        dtg_rate: f64,
    },
    Inconclusive {
        reason: String,
    },
}

impl StabilityVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            StabilityVerdict::CertifiedDecaying { .. } => "certified-decaying",
            StabilityVerdict::CertificateTrend { .. } => "certificate-trend",
            StabilityVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Finite-horizon reading of "infinitely many defected windows". Never
/// claims stability beyond the data: decay is certified only when the
/// union bound itself is below `tolerance`.
pub fn decay_verdict(
    reports: &[DefectReport],
    bound_trace: &[f64],
    tolerance: f64,
) -> StabilityVerdict {
    let windows = reports.len();
    let dtg_windows = reports.iter().filter(|r| r.is_dtg).count();
    let final_bound = bound_trace.last().copied().unwrap_or(1.0);
    if dtg_windows > 0 && final_bound < tolerance {
        return StabilityVerdict::CertifiedDecaying {
            final_bound,
            dtg_windows,
            windows,
        };
    }
    let wdtg_windows = reports.iter().filter(|r| r.is_wdtg).count();
    let late = &reports[windows / 2..];
    let recurring = late.iter().any(|r| r.is_dtg);
    if dtg_windows == 0 || !recurring {
        let reason = if wdtg_windows > 0 && (late.iter().any(|r| r.is_wdtg)) {
            format!(
                "weakly defected windows recur ({wdtg_windows} of {windows}) but only \
                 {dtg_windows} meet the (ε, w) thresholds and none in the second half of \
                 the horizon; the per-window contraction factors approach 1"
            )
        } else if dtg_windows == 0 {
            format!("no defected windows among {windows}")
        } else {
            format!("defected windows stop recurring ({dtg_windows} of {windows}, none late)")
        };
        return StabilityVerdict::Inconclusive { reason };
    }
    StabilityVerdict::CertificateTrend {
        final_bound,
        dtg_windows,
        windows,
        dtg_rate: dtg_windows as f64 / windows as f64,
    }
}

/// Whether the stationary pair `(W, Λ)` replicated `n` times is weakly
/// defected: every agent is stubborn or hears a stubborn agent within
/// `n` hops.
pub fn stationary_stability_check(
    w: &InfluenceMatrix,
    lambda: &SusceptibilityMatrix,
) -> Result<bool> {
    let n = w.n();
    if n == 0 {
        return Ok(true);
    }
    let pair = FactorPair::new(lambda.clone(), w.clone())?;
    let window = TemporalGraphWindow::from_pairs(0, vec![pair; n])?;
    Ok(detect_certificate(&window, 1.0, 1.0)?.is_wdtg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Every window of length `p_s` is defected.
    SemiPeriodic,
    /// Periodic schedule with a weakly defected period.
    Periodic,
    /// Constants supplied directly.
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialCertificate {
    /// Growth factor `c ≥ 1`.
    pub growth: f64,
    /// Decay rate `γ ∈ (0, 1)`.
    pub decay: f64,
    pub period: usize,
    pub kind: CertificateKind,
    /// Per-period contraction: `1 - ε w^p_s` or `‖Φ(p, 0)‖`.
    pub contraction: f64,
}

impl ExponentialCertificate {
    pub fn generic(growth: f64, decay: f64) -> Self {
        ExponentialCertificate {
            growth,
            decay,
            period: 1,
            kind: CertificateKind::Generic,
            contraction: decay,
        }
    }

    /// `c γ^steps`.
    pub fn envelope(&self, steps: usize) -> f64 {
        self.growth * self.decay.powi(steps as i32)
    }
}

fn from_contraction(contraction: f64, period: usize, kind: CertificateKind) -> ExponentialCertificate {
    let p = period as f64;
    ExponentialCertificate {
        growth: 1.0 / contraction.powf(p),
        decay: contraction.powf(1.0 / p),
        period,
        kind,
        contraction,
    }
}

/// Constants for a semi-periodic defected schedule.
pub fn semi_periodic_constants(epsilon: f64, w_threshold: f64, period: usize) -> Result<ExponentialCertificate> {
    for (name, v) in [("epsilon", epsilon), ("w_threshold", w_threshold)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::validation(format!("{name} = {v} must lie in (0, 1)")));
        }
    }
    if period == 0 {
        return Err(Error::validation("period must be at least 1"));
    }
    let contraction = 1.0 - epsilon * w_threshold.powi(period as i32);
    Ok(from_contraction(contraction, period, CertificateKind::SemiPeriodic))
}

/// Checks that every length-`period` window of `graph` is defected.
/// Returns the first failing window start, if any.
pub fn semi_periodic_premise(
    graph: &TemporalGraphWindow,
    epsilon: f64,
    w_threshold: f64,
    period: usize,
) -> Result<Option<usize>> {
    if period == 0 {
        return Err(Error::validation("period must be at least 1"));
    }
    for start in graph.start()..=graph.end().saturating_sub(period) {
        let window = graph.slice(start, start + period)?;
        if !detect_certificate(&window, epsilon, w_threshold)?.is_dtg {
            return Ok(Some(start));
        }
    }
    Ok(None)
}

/// `Φ(p, 0)` for the phases of a periodic schedule, phase 1 active at `t = 0`.
pub fn period_product(phases: &[FactorPair]) -> Result<Matrix> {
    let n = phases
        .first()
        .map(FactorPair::n)
        .ok_or_else(|| Error::validation("periodic schedule needs at least one phase"))?;
    Ok(crate::stochastic::transition_product(n, 0, phases)?.matrix)
}

/// Constants for a periodic schedule from `‖Φ(p, 0)‖`.
pub fn periodic_certificate(phases: &[FactorPair]) -> Result<ExponentialCertificate> {
    let norm = max_row_sum_norm(&period_product(phases)?)?;
    if norm >= 1.0 {
        return Err(Error::CertificateUnavailable(format!(
            "‖Φ(p,0)‖ = {norm} is not below 1; the period is not weakly defected"
        )));
    }
    if norm <= 0.0 {
        return Err(Error::CertificateUnavailable(
            "‖Φ(p,0)‖ = 0; decay rate is degenerate".into(),
        ));
    }
    Ok(from_contraction(norm, phases.len(), CertificateKind::Periodic))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessThreshold {
    /// `-(γ/c) ln γ`.
    pub threshold: f64,
    /// Closed form in terms of the per-period contraction, for the
    /// semi-periodic and periodic kinds.
    pub specialized: Option<f64>,
    pub derived_from: ExponentialCertificate,
}

/// `-(γ/c) ln γ`, cross-checked against the per-period closed form
/// `-(1/p) r^(p + 1/p) ln r` when the certificate carries one.
pub fn robustness_threshold(cert: &ExponentialCertificate) -> Result<RobustnessThreshold> {
    let gamma = cert.decay;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::CertificateUnavailable(format!(
            "decay rate γ = {gamma} outside (0, 1)"
        )));
    }
    if !(cert.growth > 0.0) {
        return Err(Error::CertificateUnavailable(format!(
            "growth factor c = {} must be positive",
            cert.growth
        )));
    }
    let threshold = -(gamma / cert.growth) * gamma.ln();
    let specialized = match cert.kind {
        CertificateKind::Generic => None,
        CertificateKind::SemiPeriodic | CertificateKind::Periodic => {
            let p = cert.period as f64;
            let r = cert.contraction;
            let closed = -(1.0 / p) * r.powf(p + 1.0 / p) * r.ln();
            if (closed - threshold).abs() > THRESHOLD_AGREEMENT_TOL {
                return Err(Error::validation(format!(
                    "closed-form threshold {closed} disagrees with -(γ/c) ln γ = {threshold}"
                )));
            }
            Some(closed)
        }
    };
    Ok(RobustnessThreshold {
        threshold,
        specialized,
        derived_from: cert.clone(),
    })
}
