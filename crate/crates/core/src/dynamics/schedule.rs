use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::stochastic::FactorPair;
use crate::temporal::TemporalGraphWindow;

/// Resolves `(Λ[t], W[t])` from a rule. Implementations must be pure in `t`.
pub trait ScheduleRule: Send + Sync + fmt::Debug {
    fn n(&self) -> usize;
    fn resolve(&self, t: usize) -> Result<FactorPair>;
    /// Natural window boundaries (e.g. switching cycles) inside `[0, horizon]`.
    fn boundaries(&self, _horizon: usize) -> Option<Vec<usize>> {
        None
    }
}

#[derive(Debug, Clone)]
pub enum ScheduleKind {
    /// `layers[t]` is active at time `t`; resolving past the end is an error.
    Explicit(Vec<FactorPair>),
    /// `phases[t mod p]` is active at time `t`.
    Periodic(Vec<FactorPair>),
    /// Explicit layers declared to have a defected window every `period` steps.
    SemiPeriodic {
        period: usize,
        layers: Vec<FactorPair>,
    },
    Rule(Arc<dyn ScheduleRule>),
}

#[derive(Debug, Clone)]
pub struct Schedule {
    kind: ScheduleKind,
    n: usize,
    allow_vanishing: bool,
}

fn common_size(pairs: &[FactorPair]) -> Result<usize> {
    let n = pairs
        .first()
        .map(FactorPair::n)
        .ok_or_else(|| Error::validation("schedule needs at least one layer"))?;
    if let Some((t, p)) = pairs.iter().enumerate().find(|(_, p)| p.n() != n) {
        return Err(Error::Dimension(format!(
            "layer {t} has {} agents, expected {n}",
            p.n()
        )));
    }
    Ok(n)
}

impl Schedule {
    pub fn explicit(layers: Vec<FactorPair>) -> Result<Self> {
        let n = common_size(&layers)?;
        Ok(Schedule {
            kind: ScheduleKind::Explicit(layers),
            n,
            allow_vanishing: false,
        })
    }

    pub fn periodic(phases: Vec<FactorPair>) -> Result<Self> {
        let n = common_size(&phases)?;
        Ok(Schedule {
            kind: ScheduleKind::Periodic(phases),
            n,
            allow_vanishing: false,
        })
    }

    pub fn semi_periodic(period: usize, layers: Vec<FactorPair>) -> Result<Self> {
        if period == 0 {
            return Err(Error::validation("semi-periodic period must be at least 1"));
        }
        let n = common_size(&layers)?;
        Ok(Schedule {
            kind: ScheduleKind::SemiPeriodic { period, layers },
            n,
            allow_vanishing: false,
        })
    }

    pub fn from_rule(rule: Arc<dyn ScheduleRule>) -> Self {
        Schedule {
            n: rule.n(),
            kind: ScheduleKind::Rule(rule),
            allow_vanishing: false,
        }
    }

    /// Accept steps where `Λ[t] = 0`, which are otherwise rejected.
    pub fn permit_vanishing_susceptibility(mut self) -> Self {
        self.allow_vanishing = true;
        self
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Period `p` for periodic schedules.
    pub fn period(&self) -> Option<usize> {
        match &self.kind {
            ScheduleKind::Periodic(p) => Some(p.len()),
            _ => None,
        }
    }

    /// Phases of a periodic schedule.
    pub fn phases(&self) -> Option<&[FactorPair]> {
        match &self.kind {
            ScheduleKind::Periodic(p) => Some(p),
            _ => None,
        }
    }

    /// Number of resolvable steps for finite schedules.
    pub fn length(&self) -> Option<usize> {
        match &self.kind {
            ScheduleKind::Explicit(l) | ScheduleKind::SemiPeriodic { layers: l, .. } => {
                Some(l.len())
            }
            _ => None,
        }
    }

    pub fn boundaries(&self, horizon: usize) -> Option<Vec<usize>> {
        match &self.kind {
            ScheduleKind::Rule(r) => r.boundaries(horizon),
            _ => None,
        }
    }

    /// `(Λ[t], W[t])`, with the vanishing-susceptibility check applied.
    pub fn resolve(&self, t: usize) -> Result<FactorPair> {
        let pair = match &self.kind {
            ScheduleKind::Explicit(layers) | ScheduleKind::SemiPeriodic { layers, .. } => {
                layers.get(t).cloned().ok_or_else(|| {
                    Error::validation(format!(
                        "schedule has {} layers, cannot resolve t={t}",
                        layers.len()
                    ))
                })?
            }
            ScheduleKind::Periodic(phases) => phases[t % phases.len()].clone(),
            ScheduleKind::Rule(rule) => rule.resolve(t).map_err(|e| e.at_time(t))?,
        };
        if pair.n() != self.n {
            return Err(Error::Dimension(format!(
                "resolved {} agents at t={t}, expected {}",
                pair.n(),
                self.n
            )));
        }
        if !self.allow_vanishing && pair.lambda().is_zero() {
            return Err(Error::VanishingSusceptibility { time: t });
        }
        Ok(pair)
    }

    /// Pairs active over `[from, to)`.
    pub fn pairs(&self, from: usize, to: usize) -> Result<Vec<FactorPair>> {
        (from..to).map(|t| self.resolve(t)).collect()
    }

    pub fn temporal_graph(&self, from: usize, to: usize) -> Result<TemporalGraphWindow> {
        let mut g = TemporalGraphWindow::from_pairs(from, self.pairs(from, to)?)?;
        if g.n() != self.n {
            g = TemporalGraphWindow::new(self.n, from, vec![])?;
        }
        Ok(g)
    }
}
