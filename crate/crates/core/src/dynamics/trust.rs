//! Trust-based weights: a fixed trust matrix `Ŵ` renormalized over the
//! neighbours present at time `t`,
//!
//! ```text
//! w_ij[t] = a_ij[t] ŵ_ij / Σ_k a_ik[t] ŵ_ik,     λ_i[t] = f_i(N_i[t]).
//! ```

use serde::{Deserialize, Serialize};

use super::schedule::ScheduleRule;
use crate::error::{Error, Result};
use crate::stochastic::{FactorPair, InfluenceMatrix, Matrix, SusceptibilityMatrix};

pub type Adjacency = Vec<Vec<bool>>;

/// `f_i`: maps an agent's effective neighbourhood to its susceptibility.
/// Every rule returns 0 on the empty neighbourhood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SusceptibilityRule {
    /// `λ` for any nonempty neighbourhood.
    Fixed { value: f64 },
    /// `λ = table[|N_i|]`, clamped to the last entry for larger sets.
    /// Entry 0 is ignored.
    DegreeTable { table: Vec<f64> },
    /// Exact neighbourhood lookup with a fallback value.
    NeighborhoodTable {
        entries: Vec<(Vec<usize>, f64)>,
        default: f64,
    },
}

impl SusceptibilityRule {
    pub fn evaluate(&self, neighborhood: &[usize]) -> f64 {
        if neighborhood.is_empty() {
            return 0.0;
        }
        match self {
            SusceptibilityRule::Fixed { value } => *value,
            SusceptibilityRule::DegreeTable { table } => {
                let idx = neighborhood.len().min(table.len().saturating_sub(1));
                table.get(idx).copied().unwrap_or(0.0)
            }
            SusceptibilityRule::NeighborhoodTable { entries, default } => entries
                .iter()
                .find(|(set, _)| {
                    let mut set = set.clone();
                    set.sort_unstable();
                    set.dedup();
                    set == neighborhood
                })
                .map_or(*default, |(_, v)| *v),
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            SusceptibilityRule::Fixed { value } => vec![*value],
            SusceptibilityRule::DegreeTable { table } => table.clone(),
            SusceptibilityRule::NeighborhoodTable { entries, default } => entries
                .iter()
                .map(|(_, v)| *v)
                .chain(std::iter::once(*default))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdjacencySchedule {
    /// `A[t] = A_{(t mod p) + 1}`.
    Periodic(Vec<Adjacency>),
    Explicit(Vec<Adjacency>),
}

impl AdjacencySchedule {
    pub fn at(&self, t: usize) -> Result<&Adjacency> {
        match self {
            AdjacencySchedule::Periodic(a) => Ok(&a[t % a.len()]),
            AdjacencySchedule::Explicit(a) => a.get(t).ok_or_else(|| {
                Error::validation(format!(
                    "adjacency schedule has {} entries, cannot resolve t={t}",
                    a.len()
                ))
            }),
        }
    }

    fn all(&self) -> &[Adjacency] {
        match self {
            AdjacencySchedule::Periodic(a) | AdjacencySchedule::Explicit(a) => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrustConfig {
    trust: InfluenceMatrix,
    adjacency: AdjacencySchedule,
    rules: Vec<SusceptibilityRule>,
}

impl TrustConfig {
    pub fn new(
        trust: InfluenceMatrix,
        adjacency: AdjacencySchedule,
        rules: Vec<SusceptibilityRule>,
    ) -> Result<Self> {
        let n = trust.n();
        if let Some(i) = (0..n).find(|&i| trust.row_is_zero(i)) {
            return Err(Error::validation(format!(
                "trust matrix row {i} is zero; it must be row-stochastic"
            )));
        }
        if rules.len() != n {
            return Err(Error::Dimension(format!(
                "{} susceptibility rules for {n} agents",
                rules.len()
            )));
        }
        for (i, rule) in rules.iter().enumerate() {
            if rule.values().iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::validation(format!(
                    "susceptibility rule for agent {i} yields a value outside [0, 1]"
                )));
            }
        }
        if adjacency.all().is_empty() {
            return Err(Error::validation("adjacency schedule is empty"));
        }
        for (k, a) in adjacency.all().iter().enumerate() {
            if a.len() != n || a.iter().any(|r| r.len() != n) {
                return Err(Error::Dimension(format!(
                    "adjacency matrix {k} is not {n}x{n}"
                )));
            }
        }
        Ok(TrustConfig {
            trust,
            adjacency,
            rules,
        })
    }

    pub fn n(&self) -> usize {
        self.trust.n()
    }

    pub fn trust(&self) -> &InfluenceMatrix {
        &self.trust
    }

    pub fn adjacency(&self) -> &AdjacencySchedule {
        &self.adjacency
    }

    pub fn rules(&self) -> &[SusceptibilityRule] {
        &self.rules
    }
}

/// Effective neighbourhood `{ j : a_ij = 1, ŵ_ij > 0 }` of agent `i`.
pub fn effective_neighborhood(trust: &InfluenceMatrix, adjacency: &Adjacency, i: usize) -> Vec<usize> {
    (0..trust.n())
        .filter(|&j| adjacency[i][j] && trust.weight(i, j) > 0.0)
        .collect()
}

/// Renormalizes `Ŵ` over the present neighbours. Rows of agents with
/// `λ_i = 0` (including every empty neighbourhood) are zeroed.
pub fn trust_weights(
    trust: &InfluenceMatrix,
    adjacency: &Adjacency,
    lambda: &SusceptibilityMatrix,
) -> Result<InfluenceMatrix> {
    let n = trust.n();
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        if lambda.lambda(i) == 0.0 {
            continue;
        }
        let denom: f64 = (0..n)
            .filter(|&k| adjacency[i][k])
            .map(|k| trust.weight(i, k))
            .sum();
        if denom == 0.0 {
            continue;
        }
        for j in 0..n {
            if adjacency[i][j] {
                w[(i, j)] = trust.weight(i, j) / denom;
            }
        }
    }
    InfluenceMatrix::new(w)
}

/// `(W[t], Λ[t])` under the trust-based rule.
pub fn trust_based_resolve(
    config: &TrustConfig,
    t: usize,
) -> Result<(InfluenceMatrix, SusceptibilityMatrix)> {
    let adjacency = config.adjacency.at(t)?;
    let lambda: Vec<f64> = (0..config.n())
        .map(|i| config.rules[i].evaluate(&effective_neighborhood(&config.trust, adjacency, i)))
        .collect();
    let lambda = SusceptibilityMatrix::new(lambda)?;
    let w = trust_weights(&config.trust, adjacency, &lambda)?;
    Ok((w, lambda))
}

impl ScheduleRule for TrustConfig {
    fn n(&self) -> usize {
        self.trust.n()
    }

    fn resolve(&self, t: usize) -> Result<FactorPair> {
        let (w, lambda) = trust_based_resolve(self, t)?;
        FactorPair::new(lambda, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::presets::{example2_adjacency, example2_trust};

    fn full(n: usize) -> Adjacency {
        vec![vec![true; n]; n]
    }

    #[test]
    fn full_adjacency_keeps_trust_rows() {
        let trust = example2_trust();
        let cfg = TrustConfig::new(
            trust.clone(),
            AdjacencySchedule::Periodic(vec![full(5)]),
            vec![SusceptibilityRule::Fixed { value: 0.7 }; 5],
        )
        .unwrap();
        let (w, lambda) = trust_based_resolve(&cfg, 3).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert!((w.weight(i, j) - trust.weight(i, j)).abs() < 1e-15);
            }
            assert_eq!(lambda.lambda(i), 0.7);
        }
    }

    #[test]
    fn example2_agent2_under_network2() {
        let (_, a2) = example2_adjacency();
        let trust = example2_trust();
        // Direct normalization of ŵ_2 = [1/4, 1/4, 1/4, 1/4, 0] over {v1, v3}.
        let row = [0.25, 0.25, 0.25, 0.25, 0.0];
        let present = [true, false, true, false, false];
        let denom: f64 = (0..5).filter(|&k| present[k]).map(|k| row[k]).sum();
        let expected: Vec<f64> = (0..5)
            .map(|k| if present[k] { row[k] / denom } else { 0.0 })
            .collect();
        assert_eq!(expected, vec![0.5, 0.0, 0.5, 0.0, 0.0]);

        let lambda = SusceptibilityMatrix::new(vec![0.0, 0.4, 1.0, 1.0, 1.0]).unwrap();
        let w = trust_weights(&trust, &a2, &lambda).unwrap();
        for j in 0..5 {
            assert!((w.weight(1, j) - expected[j]).abs() < 1e-15);
        }
        assert!(w.row_is_zero(0));
    }

    #[test]
    fn empty_neighborhood_gives_zero_row_and_lambda() {
        let trust = InfluenceMatrix::from_rows(&[vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap();
        let adj = vec![vec![true, true], vec![true, false]];
        let cfg = TrustConfig::new(
            trust,
            AdjacencySchedule::Explicit(vec![adj]),
            vec![SusceptibilityRule::Fixed { value: 0.8 }; 2],
        )
        .unwrap();
        let (w, lambda) = trust_based_resolve(&cfg, 0).unwrap();
        // Agent 1 only trusts itself but has no self-edge.
        assert_eq!(lambda.lambda(1), 0.0);
        assert!(w.row_is_zero(1));
        assert_eq!(lambda.lambda(0), 0.8);
        assert!(trust_based_resolve(&cfg, 1).is_err());
    }

    #[test]
    fn rules_return_zero_on_empty_set() {
        let rules = [
            SusceptibilityRule::Fixed { value: 0.9 },
            SusceptibilityRule::DegreeTable {
                table: vec![0.3, 0.5, 0.8],
            },
            SusceptibilityRule::NeighborhoodTable {
                entries: vec![(vec![1, 0], 0.2)],
                default: 0.6,
            },
        ];
        for r in &rules {
            assert_eq!(r.evaluate(&[]), 0.0);
        }
        assert_eq!(rules[1].evaluate(&[0]), 0.5);
        assert_eq!(rules[1].evaluate(&[0, 1, 2, 3]), 0.8);
        assert_eq!(rules[2].evaluate(&[0, 1]), 0.2);
        assert_eq!(rules[2].evaluate(&[1]), 0.6);
    }

    #[test]
    fn config_validation() {
        let trust = InfluenceMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let rules = vec![SusceptibilityRule::Fixed { value: 0.5 }; 2];
        assert!(TrustConfig::new(trust, AdjacencySchedule::Periodic(vec![full(2)]), rules.clone()).is_err());
        let trust = InfluenceMatrix::identity(2);
        assert!(TrustConfig::new(trust.clone(), AdjacencySchedule::Periodic(vec![full(3)]), rules.clone()).is_err());
        assert!(TrustConfig::new(
            trust.clone(),
            AdjacencySchedule::Periodic(vec![full(2)]),
            vec![SusceptibilityRule::Fixed { value: 1.5 }; 2]
        )
        .is_err());
        assert!(TrustConfig::new(trust, AdjacencySchedule::Periodic(vec![]), rules).is_err());
    }

    #[test]
    fn resolved_rows_are_stochastic_or_zero() {
        let (a1, a2) = example2_adjacency();
        let cfg = TrustConfig::new(
            example2_trust(),
            AdjacencySchedule::Periodic(vec![a1, a2]),
            vec![SusceptibilityRule::Fixed { value: 0.9 }; 5],
        )
        .unwrap();
        for t in 0..4 {
            let (w, lambda) = trust_based_resolve(&cfg, t).unwrap();
            for i in 0..5 {
                let sum: f64 = (0..5).map(|j| w.weight(i, j)).sum();
                assert!(sum == 0.0 || (sum - 1.0).abs() < 1e-12);
                assert_eq!(sum == 0.0, lambda.lambda(i) == 0.0);
            }
        }
    }
}
