//! Periodic decomposition and ω-limit analysis.
//!
//! A schedule with period `p` splits into `p` time-invariant systems, one
//! per phase. Phase `l` (1-based) is active at `t ≡ l - 1 (mod p)`, and its
//! subsystem advances a full period starting there:
//!
//! ```text
//! x_l[k+1] = M_l x_l[k] + N_l s,     x_l[k] = x[kp + l - 1]
//! M_l = A_{l+p-1} ··· A_{l+1} A_l,   A_j = Λ_j W_j (phase indices mod p)
//! N_l = Σ_j (A_{l+p-1} ··· A_{l+j+1}) (I - Λ_{l+j})
//! ```
//!
//! When `‖Φ(p, 0)‖ < 1` each subsystem has the unique fixed point
//! `x_l* = (I - M_l)^{-1} N_l s`; these points make up the ω-limit set.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::Schedule;
use crate::error::{Error, Result};
use crate::stochastic::{max_row_sum_norm, FactorPair, Matrix, OpinionVector, Vector};

/// Reciprocal condition number below which `I - M_l` counts as singular.
pub const RCOND_MIN: f64 = 1e-12;

/// Default max-norm tolerance for merging coincident limit points.
pub const DEDUP_TOL: f64 = 1e-8;

/// Slack on the convex-hull containment check.
const CONTAINMENT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSystem {
    /// 1-based phase index.
    pub phase: usize,
    pub m: Matrix,
    pub n: Matrix,
    pub fixed_point: Option<OpinionVector>,
}

impl PhaseSystem {
    /// One subsystem step `M x + N s`.
    pub fn step(&self, x: &Vector, s: &Vector) -> Vector {
        &self.m * x + &self.n * s
    }
}

pub fn build_phase_systems(phases: &[FactorPair]) -> Result<Vec<PhaseSystem>> {
    let p = phases.len();
    if p == 0 {
        return Err(Error::validation("periodic schedule needs at least one phase"));
    }
    let dim = phases[0].n();
    if let Some(bad) = phases.iter().position(|f| f.n() != dim) {
        return Err(Error::Dimension(format!(
            "phase {} has {} agents, expected {dim}",
            bad + 1,
            phases[bad].n()
        )));
    }
    let identity = Matrix::identity(dim, dim);
    Ok((0..p)
        .map(|l| {
            let mut m = identity.clone();
            let mut n = Matrix::zeros(dim, dim);
            for j in 0..p {
                let pair = &phases[(l + j) % p];
                let anchor = Matrix::from_diagonal(&pair.lambda().diag().map(|v| 1.0 - v));
                m = pair.factor() * m;
                n = pair.factor() * n + anchor;
            }
            PhaseSystem {
                phase: l + 1,
                m,
                n,
                fixed_point: None,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaMethod {
    ClosedForm,
    TailClustering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaEstimate {
    pub points: Vec<OpinionVector>,
    pub method: OmegaMethod,
    pub tolerance: f64,
    /// For closed-form estimates, the index into `points` of each phase's
    /// fixed point.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phase_points: Vec<usize>,
}

/// Solves `(I - M) x = rhs` by LU with partial pivoting, refusing
/// ill-conditioned systems.
fn solve_fixed_point(m: &Matrix, rhs: &Vector, phase: usize) -> Result<Vector> {
    let dim = m.nrows();
    let a = Matrix::identity(dim, dim) - m;
    let lu = a.clone().lu();
    let singular = || {
        Error::CertificateUnavailable(format!(
            "I - M_{phase} is singular; the phase subsystem has no unique fixed point"
        ))
    };
    let inverse: DMatrix<f64> = lu.try_inverse().ok_or_else(singular)?;
    let rcond = 1.0 / (max_row_sum_norm(&a)? * max_row_sum_norm(&inverse)?);
    if !(rcond >= RCOND_MIN) {
        return Err(Error::CertificateUnavailable(format!(
            "I - M_{phase} is ill-conditioned (rcond {rcond:e})"
        )));
    }
    a.lu().solve(rhs).ok_or_else(singular)
}

/// Fixed points of every phase subsystem, merged within `dedup_tol`.
pub fn phase_fixed_points(
    systems: &mut [PhaseSystem],
    s: &OpinionVector,
    dedup_tol: f64,
) -> Result<OmegaEstimate> {
    // M_1 is Φ(p, 0).
    let first = systems
        .first()
        .ok_or_else(|| Error::validation("no phase systems"))?;
    let norm = max_row_sum_norm(&first.m)?;
    if norm >= 1.0 {
        return Err(Error::CertificateUnavailable(format!(
            "‖Φ(p,0)‖ = {norm} is not below 1; fixed points are not certified"
        )));
    }
    let mut points: Vec<OpinionVector> = Vec::new();
    let mut phase_points = Vec::with_capacity(systems.len());
    for sys in systems.iter_mut() {
        if sys.n.nrows() != s.len() {
            return Err(Error::Dimension(format!(
                "s has length {}, phase systems are {}x{}",
                s.len(),
                sys.n.nrows(),
                sys.n.nrows()
            )));
        }
        let x = solve_fixed_point(&sys.m, &(&sys.n * s.as_vector()), sys.phase)?;
        let x = OpinionVector::from_vector(x);
        sys.fixed_point = Some(x.clone());
        let idx = match points.iter().position(|p| p.max_abs_diff(&x) <= dedup_tol) {
            Some(i) => i,
            None => {
                points.push(x);
                points.len() - 1
            }
        };
        phase_points.push(idx);
    }
    Ok(OmegaEstimate {
        points,
        method: OmegaMethod::ClosedForm,
        tolerance: dedup_tol,
        phase_points,
    })
}

/// `Σ[t] = Σ_{τ<t} Φ(t, τ+1)(I - Λ[τ])`, via
/// `Σ[τ+1] = Λ[τ] W[τ] Σ[τ] + (I - Λ[τ])` from `Σ[0] = 0`.
pub fn sigma_accumulator(schedule: &Schedule, t: usize) -> Result<Matrix> {
    if t == 0 {
        return Err(Error::validation("Σ[t] is defined for t ≥ 1"));
    }
    let n = schedule.n();
    let mut sigma = Matrix::zeros(n, n);
    for tau in 0..t {
        let pair = schedule.resolve(tau)?;
        sigma = pair.factor() * sigma;
        for i in 0..n {
            sigma[(i, i)] += 1.0 - pair.lambda().lambda(i);
        }
    }
    for (i, row) in sigma.row_iter().enumerate() {
        let sum = row.sum();
        if sum > 1.0 + 1e-12 || row.iter().any(|&v| v < 0.0) {
            return Err(Error::validation(format!(
                "Σ[{t}] row {i} is not substochastic (sum {sum})"
            )));
        }
    }
    Ok(sigma)
}

/// Greedy first-fit clustering of the trailing `tail_fraction` of the
/// trajectory: each state joins the first cluster whose seed lies within
/// `cluster_tol` in max-norm. Reports cluster centroids.
pub fn tail_omega_estimate(
    trajectory: &[OpinionVector],
    tail_fraction: f64,
    cluster_tol: f64,
) -> Result<OmegaEstimate> {
    if trajectory.len() < 10 {
        return Err(Error::validation(format!(
            "trajectory of length {} is too short for tail clustering (need ≥ 10)",
            trajectory.len()
        )));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 0.5) {
        return Err(Error::validation(format!(
            "tail fraction {tail_fraction} must lie in (0, 0.5]"
        )));
    }
    let count = ((trajectory.len() as f64 * tail_fraction).ceil() as usize).max(1);
    let tail = &trajectory[trajectory.len() - count..];
    let mut seeds: Vec<&OpinionVector> = Vec::new();
    let mut sums: Vec<Vector> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for x in tail {
        match seeds.iter().position(|s| s.max_abs_diff(x) <= cluster_tol) {
            Some(i) => {
                sums[i] += x.as_vector();
                sizes[i] += 1;
            }
            None => {
                seeds.push(x);
                sums.push(x.as_vector().clone());
                sizes.push(1);
            }
        }
    }
    let points = sums
        .into_iter()
        .zip(sizes)
        .map(|(sum, k)| OpinionVector::from_vector(sum / k as f64))
        .collect();
    Ok(OmegaEstimate {
        points,
        method: OmegaMethod::TailClustering,
        tolerance: cluster_tol,
        phase_points: Vec::new(),
    })
}

/// Whether every estimated point lies entrywise in `[min s, max s]`.
pub fn containment_check(estimate: &OmegaEstimate, s: &OpinionVector) -> bool {
    let (lo, hi) = (s.min() - CONTAINMENT_SLACK, s.max() + CONTAINMENT_SLACK);
    estimate
        .points
        .iter()
        .all(|p| p.as_slice().iter().all(|&v| v >= lo && v <= hi))
}

/// Matches each point of `a` to one of `b` within `tol`, both ways.
pub fn same_point_sets(a: &[OpinionVector], b: &[OpinionVector], tol: f64) -> bool {
    let covered = |xs: &[OpinionVector], ys: &[OpinionVector]| {
        xs.iter().all(|x| ys.iter().any(|y| x.max_abs_diff(y) <= tol))
    };
    covered(a, b) && covered(b, a)
}
