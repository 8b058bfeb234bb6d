//! Built-in reference systems.
//!
//! * `example1`: three agents, `W = (1/3)·11ᵀ`, uniform susceptibility
//!   approaching one with summable deficit. Every step contracts, yet
//!   `‖Φ(t, 0)‖` stays bounded away from zero.
//! * `example2`: five agents alternating between two networks, with the
//!   second network entered at times `t_k = t_{k-1} + ⌊ln(t_{k-1} + 1)⌋ + d`
//!   for `d` steps.
//! * `example3`: the period-4 version of `example2`.
//!
//! Index conventions:
//! * `example1` uses `λ[t] = 1 - 1/(t + 2)²`. Starting the deficit at
//!   `1/(t + 1)²` would make `λ[0] = 0` and collapse `Φ` at the first step.
//! * `example2` starts its recursion at `t_0 = 1`, uses the natural
//!   logarithm, and counts entries into the second network from `k = 1`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::schedule::{Schedule, ScheduleRule};
use super::trust::{trust_weights, Adjacency};
use crate::error::Result;
use crate::stochastic::{FactorPair, InfluenceMatrix, Matrix, OpinionVector, SusceptibilityMatrix};

pub fn example2_trust() -> InfluenceMatrix {
    let q = 1.0 / 4.0;
    let t = 1.0 / 3.0;
    InfluenceMatrix::from_rows(&[
        vec![1.0, 0.0, 0.0, 0.0, 0.0],
        vec![q, q, q, q, 0.0],
        vec![0.0, t, t, 0.0, t],
        vec![0.0, t, 0.0, t, t],
        vec![0.0, 0.0, t, t, t],
    ])
    .expect("trust matrix is row-stochastic")
}

fn adjacency(rows: [[u8; 5]; 5]) -> Adjacency {
    rows.iter()
        .map(|r| r.iter().map(|&v| v == 1).collect())
        .collect()
}

/// `(A_1, A_2)`.
pub fn example2_adjacency() -> (Adjacency, Adjacency) {
    let a1 = adjacency([
        [1, 0, 0, 0, 0],
        [0, 1, 0, 1, 0],
        [0, 0, 1, 0, 1],
        [0, 1, 0, 1, 0],
        [0, 0, 1, 0, 1],
    ]);
    let a2 = adjacency([
        [1, 0, 0, 0, 0],
        [1, 0, 1, 0, 0],
        [0, 1, 1, 0, 0],
        [0, 0, 0, 1, 1],
        [0, 0, 0, 1, 1],
    ]);
    (a1, a2)
}

pub fn example2_innate() -> OpinionVector {
    OpinionVector::new(vec![0.5, 1.0, 1.0, 0.0, 0.0]).expect("valid opinions")
}

fn trust_pair(a: &Adjacency, lambda: Vec<f64>) -> Result<FactorPair> {
    let lambda = SusceptibilityMatrix::new(lambda)?;
    let w = trust_weights(&example2_trust(), a, &lambda)?;
    FactorPair::new(lambda, w)
}

/// Network 1 with `Λ_1 = diag(0, 1, 1, 1, 1)`.
pub fn example2_network1() -> FactorPair {
    trust_pair(&example2_adjacency().0, vec![0.0, 1.0, 1.0, 1.0, 1.0]).expect("valid network 1")
}

/// Network 2 with `Λ_2 = diag(0, λ_2, 1, λ_4, 1)`.
pub fn example2_network2(lambda2: f64, lambda4: f64) -> Result<FactorPair> {
    trust_pair(&example2_adjacency().1, vec![0.0, lambda2, 1.0, lambda4, 1.0])
}

/// Entry times into network 2 below `horizon`, starting from `t_0 = 1`.
pub fn example2_switching_times(d: usize, horizon: usize) -> Vec<usize> {
    assert!(d >= 1, "network-2 duration must be at least 1");
    let mut times = Vec::new();
    let mut t = 1usize;
    while t < horizon {
        times.push(t);
        t += ((t + 1) as f64).ln().floor() as usize + d;
    }
    times
}

#[derive(Debug, Clone)]
pub struct Example2 {
    d: usize,
    network1: FactorPair,
}

impl Example2 {
    pub fn new(d: usize) -> Self {
        assert!(d >= 1, "network-2 duration must be at least 1");
        Example2 {
            d,
            network1: example2_network1(),
        }
    }

    pub fn duration(&self) -> usize {
        self.d
    }

    /// Number of entries into network 2 up to and including `t`, when `t`
    /// lies inside a network-2 block.
    pub fn network2_entry(&self, t: usize) -> Option<usize> {
        let mut start = 1usize;
        let mut k = 1usize;
        while start <= t {
            if t < start + self.d {
                return Some(k);
            }
            start += ((start + 1) as f64).ln().floor() as usize + self.d;
            k += 1;
        }
        None
    }

    pub fn schedule(self) -> Schedule {
        Schedule::from_rule(Arc::new(self))
    }
}

fn clamp_unit(name: &str, v: f64) -> f64 {
    if !(0.0..=1.0).contains(&v) {
        log::warn!("{name} = {v} clamped to [0, 1]");
    }
    v.clamp(0.0, 1.0)
}

impl ScheduleRule for Example2 {
    fn n(&self) -> usize {
        5
    }

    fn resolve(&self, t: usize) -> Result<FactorPair> {
        match self.network2_entry(t) {
            None => Ok(self.network1.clone()),
            Some(k) => {
                let k = k as f64;
                let l2 = clamp_unit("λ_2", 0.9 - 1.0 / (1.0 + k));
                let l4 = clamp_unit("λ_4", 1.0 - 1.0 / (1.0 + k));
                example2_network2(l2, l4)
            }
        }
    }

    /// Complete switching cycles `[t_k, t_{k+1})` with `t_{k+1} ≤ horizon`.
    /// The prefix `[0, t_0)` is folded into the first cycle and an
    /// incomplete trailing cycle is dropped. Horizons shorter than one
    /// cycle yield the single window `[0, horizon)`.
    fn boundaries(&self, horizon: usize) -> Option<Vec<usize>> {
        let times = example2_switching_times(self.d, horizon + 1);
        let mut b = vec![0];
        b.extend(times.into_iter().skip(1));
        if b.len() < 2 {
            b.push(horizon);
        }
        Some(b)
    }
}

/// `λ[t] = 1 - 1/(t + 2)²` applied uniformly to `W = (1/3)·11ᵀ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example1;

impl Example1 {
    pub fn lambda(t: usize) -> f64 {
        let k = (t + 2) as f64;
        1.0 - 1.0 / (k * k)
    }

    pub fn schedule(self) -> Schedule {
        Schedule::from_rule(Arc::new(self))
    }
}

impl ScheduleRule for Example1 {
    fn n(&self) -> usize {
        3
    }

    fn resolve(&self, t: usize) -> Result<FactorPair> {
        let w = InfluenceMatrix::new(Matrix::from_element(3, 3, 1.0 / 3.0))?;
        FactorPair::new(SusceptibilityMatrix::uniform(3, Self::lambda(t))?, w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Example3Variant {
    /// `Λ_2 = diag(0, 0.9, 1, 1, 1)`: a single limit point.
    SinglePoint,
    /// `Λ_2 = diag(0, 0.9, 1, 0.9, 1)`: three limit points.
    ThreePoint,
}

/// Phases of the period-4 schedule: network 1, network 2 twice, network 1.
pub fn example3_phases(variant: Example3Variant) -> Vec<FactorPair> {
    let l4 = match variant {
        Example3Variant::SinglePoint => 1.0,
        Example3Variant::ThreePoint => 0.9,
    };
    let n1 = example2_network1();
    let n2 = example2_network2(0.9, l4).expect("valid network 2");
    vec![n1.clone(), n2.clone(), n2, n1]
}

pub fn example3_schedule(variant: Example3Variant) -> Schedule {
    Schedule::periodic(example3_phases(variant)).expect("valid phases")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn switching_time_recursion() {
        let times = example2_switching_times(2, 20);
        // t_1 = 1 + ⌊ln 2⌋ + 2 = 3, t_2 = 3 + ⌊ln 4⌋ + 2 = 6.
        assert_eq!(&times[..3], &[1, 3, 6]);
        for w in times.windows(2) {
            assert!(w[1] - w[0] >= 2);
        }
    }

    #[test]
    fn gaps_grow_without_bound() {
        let times = example2_switching_times(2, 100_000);
        let gaps: Vec<usize> = times.windows(2).map(|w| w[1] - w[0]).collect();
        // Oracle: the gap after t is ⌊ln(t + 1)⌋ + d, nondecreasing in t.
        for (w, g) in times.windows(2).zip(&gaps) {
            assert_eq!(*g, ((w[0] + 1) as f64).ln().floor() as usize + 2);
        }
        assert!(gaps.windows(2).all(|g| g[1] >= g[0]));
        assert_eq!(*gaps.last().unwrap(), 13);
    }

    #[test]
    fn example2_network_membership() {
        let ex = Example2::new(2);
        assert_eq!(ex.network2_entry(0), None);
        assert_eq!(ex.network2_entry(1), Some(1));
        assert_eq!(ex.network2_entry(2), Some(1));
        assert_eq!(ex.network2_entry(3), Some(2));
        assert_eq!(ex.network2_entry(5), None);
        assert_eq!(ex.network2_entry(6), Some(3));
        let p = ex.resolve(1).unwrap();
        assert!((p.lambda().lambda(1) - 0.4).abs() < 1e-15);
        assert!((p.lambda().lambda(3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn example2_boundaries_cover_complete_cycles() {
        let ex = Example2::new(2);
        // t_k = 1, 3, 6, 9, 13, ...
        assert_eq!(ex.boundaries(12), Some(vec![0, 3, 6, 9]));
        assert_eq!(ex.boundaries(13), Some(vec![0, 3, 6, 9, 13]));
        assert_eq!(ex.boundaries(2), Some(vec![0, 2]));
    }

    #[test]
    fn example1_lambda() {
        assert!((Example1::lambda(0) - 0.75).abs() < 1e-15);
        let p = Example1.resolve(2).unwrap();
        assert!((p.lambda().lambda(0) - (1.0 - 1.0 / 16.0)).abs() < 1e-15);
    }
}
