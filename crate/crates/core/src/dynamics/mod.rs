//! Simulation engines for the time-varying model and its special cases:
//! trust-based weights, periodic and semi-periodic schedules, and the
//! perturbed law.

mod perturbed;
pub mod presets;
mod schedule;
mod trust;

pub use perturbed::{
    simulate_perturbed, simulate_perturbed_zero_input, PerturbedRun, PerturbedStep,
    PerturbedSystem, Perturbation,
};
pub use presets::example2_switching_times;
pub use schedule::{Schedule, ScheduleKind, ScheduleRule};
pub use trust::{
    effective_neighborhood, trust_based_resolve, trust_weights, Adjacency, AdjacencySchedule,
    SusceptibilityRule, TrustConfig,
};

use crate::error::{Error, Result};
use crate::stochastic::{max_row_sum_norm, Matrix, OpinionVector};

/// States `x[0..=horizon]`.
pub type Trajectory = Vec<OpinionVector>;

fn check_len(name: &str, v: &OpinionVector, n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::Dimension(format!(
            "{name} has length {}, schedule has {n} agents",
            v.len()
        )));
    }
    Ok(())
}

pub fn simulate(
    x0: &OpinionVector,
    s: &OpinionVector,
    schedule: &Schedule,
    horizon: usize,
) -> Result<Trajectory> {
    check_len("x0", x0, schedule.n())?;
    check_len("s", s, schedule.n())?;
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(x0.clone());
    let mut x = x0.as_vector().clone();
    for t in 0..horizon {
        x = schedule.resolve(t)?.apply(&x, s.as_vector());
        out.push(OpinionVector::from_vector(x.clone()));
    }
    Ok(out)
}

/// `Φ(t, 0) x0` for `t = 0..=horizon`.
pub fn simulate_zero_input(
    x0: &OpinionVector,
    schedule: &Schedule,
    horizon: usize,
) -> Result<Trajectory> {
    simulate(x0, &OpinionVector::zeros(schedule.n()), schedule, horizon)
}

/// `‖Φ(t, from)‖` for `t = from..=to`.
pub fn norm_trace(schedule: &Schedule, from: usize, to: usize) -> Result<Vec<f64>> {
    let n = schedule.n();
    let mut phi = Matrix::identity(n, n);
    let mut trace = Vec::with_capacity(to.saturating_sub(from) + 1);
    trace.push(max_row_sum_norm(&phi)?);
    for t in from..to {
        phi = schedule.resolve(t)?.factor() * &phi;
        trace.push(max_row_sum_norm(&phi)?);
    }
    Ok(trace)
}
