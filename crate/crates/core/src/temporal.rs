//! Temporal multiplex graphs and the defected-window detectors.
//!
//! Layer `t` has an edge `j → i` whenever `w_ij[t] > 0`: agent `i` listens
//! to agent `j`. An agent is stubborn at `t` when `λ_i[t] < 1` and
//! ε-stubborn when `λ_i[t] ≤ 1 - ε`; an edge is a w-edge when
//! `w_ij[t] ≥ w`.
//!
//! Coverage of a window `[t0, td)` is computed with a forward carrier
//! recursion:
//!
//! ```text
//! C[t0]   = ∅
//! C[t+1]  = { i : i stubborn at t } ∪ { i : ∃ j ∈ C[t], (j → i) qualifies at t }
//! ```
//!
//! The window is defected when `C[td]` holds every agent. Carriers only
//! persist through stubbornness or a qualifying incoming edge (self-loops
//! included), which mirrors how the row-sum deficit moves through
//! `Λ[t] W[t] Φ(t, t0)`. A carrier admitted `m` steps before the window
//! end has row sum at most `1 - ε w^(m-1)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stochastic::{FactorPair, InfluenceMatrix, SusceptibilityMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalLayer {
    pub time: usize,
    pub pair: FactorPair,
}

impl TemporalLayer {
    pub fn new(time: usize, pair: FactorPair) -> Self {
        TemporalLayer { time, pair }
    }

    pub fn n(&self) -> usize {
        self.pair.n()
    }

    pub fn weights(&self) -> &InfluenceMatrix {
        self.pair.weights()
    }

    pub fn susceptibility(&self) -> &SusceptibilityMatrix {
        self.pair.lambda()
    }

    /// `a_ij = (w_ij > 0)`.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.pair.weights().weight(i, j) > 0.0
    }

    /// In-neighbours `N_i[t]` of agent `i`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&j| self.adjacent(i, j))
    }

    pub fn edges(&self) -> impl Iterator<Item = TemporalEdge> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| {
            (0..n).filter_map(move |j| {
                let weight = self.weights().weight(i, j);
                (weight > 0.0).then_some(TemporalEdge {
                    from_agent: j,
                    to_agent: i,
                    time: self.time,
                    weight,
                })
            })
        })
    }
}

/// `(v_j, v_i, t)` with `w_ij[t] > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalEdge {
    pub from_agent: usize,
    pub to_agent: usize,
    pub time: usize,
    pub weight: f64,
}

impl TemporalEdge {
    pub fn is_w_edge(&self, w: f64) -> bool {
        self.weight >= w
    }
}

/// Consecutive layers covering `[start, start + layers.len())`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalGraphWindow {
    n: usize,
    start: usize,
    layers: Vec<TemporalLayer>,
}

impl TemporalGraphWindow {
    pub fn new(n: usize, start: usize, layers: Vec<TemporalLayer>) -> Result<Self> {
        for (k, layer) in layers.iter().enumerate() {
            if layer.time != start + k {
                return Err(Error::validation(format!(
                    "layer {k} has time {}, expected {}",
                    layer.time,
                    start + k
                )));
            }
            if layer.n() != n {
                return Err(Error::Dimension(format!(
                    "layer at t={} has {} agents, expected {n}",
                    layer.time,
                    layer.n()
                )));
            }
        }
        Ok(TemporalGraphWindow { n, start, layers })
    }

    /// Builds a window from pairs, the first active at `start`.
    pub fn from_pairs(start: usize, pairs: Vec<FactorPair>) -> Result<Self> {
        let n = pairs.first().map_or(0, FactorPair::n);
        let layers = pairs
            .into_iter()
            .enumerate()
            .map(|(k, p)| TemporalLayer::new(start + k, p))
            .collect();
        Self::new(n, start, layers)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.start + self.layers.len()
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layers(&self) -> &[TemporalLayer] {
        &self.layers
    }

    pub fn pairs(&self) -> Vec<FactorPair> {
        self.layers.iter().map(|l| l.pair.clone()).collect()
    }

    /// Sub-window over absolute times `[from, to)`.
    pub fn slice(&self, from: usize, to: usize) -> Result<TemporalGraphWindow> {
        if from < self.start || to > self.end() || from > to {
            return Err(Error::validation(format!(
                "slice [{from}, {to}) outside window [{}, {})",
                self.start,
                self.end()
            )));
        }
        Ok(TemporalGraphWindow {
            n: self.n,
            start: from,
            layers: self.layers[from - self.start..to - self.start].to_vec(),
        })
    }
}

/// Which temporal paths count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathKind {
    /// Source stubborn (`λ < 1`), any positive edge.
    SPath,
    /// Source ε-stubborn, every edge a w-edge.
    Influential { epsilon: f64, w: f64 },
}

impl PathKind {
    fn source_ok(&self, lambda: f64) -> bool {
        match *self {
            PathKind::SPath => lambda < 1.0,
            PathKind::Influential { epsilon, .. } => lambda <= 1.0 - epsilon,
        }
    }

    fn edge_ok(&self, weight: f64) -> bool {
        match *self {
            PathKind::SPath => weight > 0.0,
            PathKind::Influential { w, .. } => weight >= w,
        }
    }
}

fn check_agent(window: &TemporalGraphWindow, agent: usize) -> Result<()> {
    if agent >= window.n() {
        return Err(Error::validation(format!(
            "agent index {agent} out of range for {} agents",
            window.n()
        )));
    }
    Ok(())
}

/// Whether a time-respecting path leads from `from` to `to` inside the
/// window. Edge times strictly increase and gaps are allowed; the source
/// must qualify at some time no later than the first edge.
pub fn temporal_paths_exist(
    window: &TemporalGraphWindow,
    from: usize,
    to: usize,
    kind: PathKind,
) -> Result<bool> {
    check_agent(window, from)?;
    check_agent(window, to)?;
    let n = window.n();
    let mut reached = vec![false; n];
    for layer in window.layers() {
        if kind.source_ok(layer.susceptibility().lambda(from)) {
            reached[from] = true;
        }
        // One hop per layer: extend from the set as it stood before this layer.
        let before = reached.clone();
        for i in 0..n {
            if !reached[i] {
                reached[i] = (0..n).any(|j| before[j] && kind.edge_ok(layer.weights().weight(i, j)));
            }
        }
    }
    Ok(reached[to])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub start: usize,
    pub end: usize,
    pub is_dtg: bool,
    pub is_wdtg: bool,
    pub epsilon: f64,
    pub w_threshold: f64,
    /// `C[t]` for `t = start..=end` under the (ε, w) thresholds.
    pub carrier_history: Vec<Vec<usize>>,
    /// Agents outside `C[end]`; empty exactly when `is_dtg`.
    pub uncovered_agents: Vec<usize>,
    /// Earliest layer `k` with `C[k+1]` equal to every agent.
    pub defected_layer: Option<usize>,
    /// `δ = end - start`.
    pub effective_delta: usize,
    /// Set when the window is shorter than requested.
    pub truncated: bool,
}

fn carrier_step(layer: &TemporalLayer, current: &BTreeSet<usize>, kind: PathKind) -> BTreeSet<usize> {
    let n = layer.n();
    (0..n)
        .filter(|&i| {
            kind.source_ok(layer.susceptibility().lambda(i))
                || current
                    .iter()
                    .any(|&j| kind.edge_ok(layer.weights().weight(i, j)))
        })
        .collect()
}

fn check_threshold(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::validation(format!("{name} = {v} must lie in (0, 1]")));
    }
    Ok(())
}

/// Runs the carrier recursion under both the strict (ε, w) thresholds and
/// the weak (stubborn, positive-edge) ones.
pub fn detect_certificate(
    window: &TemporalGraphWindow,
    epsilon: f64,
    w_threshold: f64,
) -> Result<DefectReport> {
    check_threshold("epsilon", epsilon)?;
    check_threshold("w_threshold", w_threshold)?;
    if window.is_empty() {
        return Err(Error::validation("cannot certify an empty window"));
    }
    let n = window.n();
    let strict = PathKind::Influential {
        epsilon,
        w: w_threshold,
    };

    let mut carriers = BTreeSet::new();
    let mut weak = BTreeSet::new();
    let mut history = vec![Vec::new()];
    let mut defected_layer = None;
    for layer in window.layers() {
        carriers = carrier_step(layer, &carriers, strict);
        weak = carrier_step(layer, &weak, PathKind::SPath);
        if defected_layer.is_none() && carriers.len() == n {
            defected_layer = Some(layer.time);
        }
        history.push(carriers.iter().copied().collect());
    }
    let uncovered: Vec<usize> = (0..n).filter(|i| !carriers.contains(i)).collect();
    let is_dtg = uncovered.is_empty();
    Ok(DefectReport {
        start: window.start(),
        end: window.end(),
        is_dtg,
        is_wdtg: weak.len() == n,
        epsilon,
        w_threshold,
        carrier_history: history,
        uncovered_agents: uncovered,
        defected_layer,
        effective_delta: window.len(),
        truncated: false,
    })
}

/// Splits the graph into consecutive disjoint windows of `window_length`
/// layers and certifies each. A trailing remainder, or a graph shorter than
/// one window, yields a report flagged `truncated`.
pub fn scan_windows(
    graph: &TemporalGraphWindow,
    window_length: usize,
    epsilon: f64,
    w_threshold: f64,
) -> Result<Vec<DefectReport>> {
    if window_length == 0 {
        return Err(Error::validation("window length must be at least 1"));
    }
    let mut boundaries: Vec<usize> = (graph.start()..graph.end()).step_by(window_length).collect();
    boundaries.push(graph.end());
    let mut reports = scan_partition(graph, &boundaries, epsilon, w_threshold)?;
    for r in &mut reports {
        if r.effective_delta < window_length {
            log::warn!(
                "window [{}, {}) shorter than requested length {window_length}",
                r.start,
                r.end
            );
            r.truncated = true;
        }
    }
    Ok(reports)
}

/// Certifies the windows `[b_k, b_{k+1})` for consecutive boundaries.
pub fn scan_partition(
    graph: &TemporalGraphWindow,
    boundaries: &[usize],
    epsilon: f64,
    w_threshold: f64,
) -> Result<Vec<DefectReport>> {
    boundaries
        .windows(2)
        .filter(|b| b[1] > b[0])
        .map(|b| detect_certificate(&graph.slice(b[0], b[1])?, epsilon, w_threshold))
        .collect()
}
