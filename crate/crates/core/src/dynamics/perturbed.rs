//! The perturbed law `x[t+1] = P[t] x[t] + D[t] s` with
//! `P[t] = Λ̄[t] W̄[t] + E[t]` and `D[t] = diag(1 - λ̄_i[t] - Σ_j e_ij[t])`,
//! so that `(P[t] + D[t]) 1 = 1`.

use super::schedule::Schedule;
use crate::error::{Error, Result};
use crate::stochastic::{max_row_sum_norm, Matrix, OpinionVector, Vector, ROW_SUM_TOL};

/// Negative entries of `P` or `D` down to this size are treated as
/// round-off.
const NONNEG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    Zero,
    Constant(Matrix),
    /// `E[t] = seq[t]`; resolving past the end is an error.
    Sequence(Vec<Matrix>),
    /// `E[t] = seq[t mod len]`.
    Periodic(Vec<Matrix>),
}

impl Perturbation {
    pub fn at(&self, t: usize, n: usize) -> Result<Matrix> {
        match self {
            Perturbation::Zero => Ok(Matrix::zeros(n, n)),
            Perturbation::Constant(e) => Ok(e.clone()),
            Perturbation::Sequence(seq) => seq.get(t).cloned().ok_or_else(|| {
                Error::validation(format!(
                    "perturbation sequence has {} entries, cannot resolve t={t}",
                    seq.len()
                ))
            }),
            Perturbation::Periodic(seq) => Ok(seq[t % seq.len()].clone()),
        }
    }

    fn matrices(&self) -> &[Matrix] {
        match self {
            Perturbation::Zero => &[],
            Perturbation::Constant(e) => std::slice::from_ref(e),
            Perturbation::Sequence(s) | Perturbation::Periodic(s) => s,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PerturbedSystem {
    nominal: Schedule,
    perturbation: Perturbation,
}

/// `P[t]`, the diagonal of `D[t]`, and `‖E[t]‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedStep {
    pub p: Matrix,
    pub d: Vector,
    pub e_norm: f64,
}

impl PerturbedSystem {
    pub fn new(nominal: Schedule, perturbation: Perturbation) -> Result<Self> {
        let n = nominal.n();
        if matches!(perturbation, Perturbation::Periodic(ref s) if s.is_empty()) {
            return Err(Error::validation("periodic perturbation needs at least one matrix"));
        }
        if let Some(e) = perturbation
            .matrices()
            .iter()
            .find(|e| e.nrows() != n || e.ncols() != n)
        {
            return Err(Error::Dimension(format!(
                "perturbation is {}x{}, expected {n}x{n}",
                e.nrows(),
                e.ncols()
            )));
        }
        Ok(PerturbedSystem {
            nominal,
            perturbation,
        })
    }

    pub fn nominal(&self) -> &Schedule {
        &self.nominal
    }

    pub fn n(&self) -> usize {
        self.nominal.n()
    }

    /// Builds `P[t]` and `D[t]` and checks nonnegativity and the unit row
    /// sums of `P + D`.
    pub fn resolve(&self, t: usize) -> Result<PerturbedStep> {
        let n = self.n();
        let pair = self.nominal.resolve(t)?;
        let e = self.perturbation.at(t, n)?;
        let p = pair.factor() + &e;
        let mut d = Vector::zeros(n);
        for i in 0..n {
            let e_sum: f64 = e.row(i).iter().sum();
            d[i] = 1.0 - pair.lambda().lambda(i) - e_sum;
        }
        for i in 0..n {
            if d[i] < -NONNEG_TOL {
                return Err(Error::validation(format!(
                    "D[t] entry {i} = {} is negative (t={t})",
                    d[i]
                )));
            }
            if let Some(j) = (0..n).find(|&j| p[(i, j)] < -NONNEG_TOL) {
                return Err(Error::validation(format!(
                    "P[t] entry ({i},{j}) = {} is negative (t={t})",
                    p[(i, j)]
                )));
            }
            let total = p.row(i).sum() + d[i];
            if (total - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::validation(format!(
                    "row {i} of P[t] + D[t] sums to {total} (t={t})"
                )));
            }
        }
        Ok(PerturbedStep {
            e_norm: max_row_sum_norm(&e)?,
            p,
            d,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedRun {
    pub trajectory: Vec<OpinionVector>,
    /// `‖E[t]‖` for `t = 0..horizon`.
    pub e_norms: Vec<f64>,
}

pub fn simulate_perturbed(
    x0: &OpinionVector,
    s: &OpinionVector,
    sys: &PerturbedSystem,
    horizon: usize,
) -> Result<PerturbedRun> {
    let n = sys.n();
    if x0.len() != n || s.len() != n {
        return Err(Error::Dimension(format!(
            "x0/s lengths {}/{} for {n} agents",
            x0.len(),
            s.len()
        )));
    }
    let mut trajectory = Vec::with_capacity(horizon + 1);
    let mut e_norms = Vec::with_capacity(horizon);
    let mut x = x0.as_vector().clone();
    trajectory.push(x0.clone());
    for t in 0..horizon {
        let step = sys.resolve(t)?;
        let mut next = &step.p * &x;
        for i in 0..n {
            next[i] += step.d[i] * s.as_vector()[i];
        }
        x = next;
        e_norms.push(step.e_norm);
        trajectory.push(OpinionVector::from_vector(x.clone()));
    }
    Ok(PerturbedRun {
        trajectory,
        e_norms,
    })
}

/// `x[t+1] = P[t] x[t]`.
pub fn simulate_perturbed_zero_input(
    x0: &OpinionVector,
    sys: &PerturbedSystem,
    horizon: usize,
) -> Result<PerturbedRun> {
    simulate_perturbed(x0, &OpinionVector::zeros(sys.n()), sys, horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::presets::{example3_schedule, Example3Variant};
    use crate::dynamics::simulate;

    fn x0() -> OpinionVector {
        OpinionVector::new(vec![0.1, 0.9, 0.4, 0.7, 0.2]).unwrap()
    }

    #[test]
    fn zero_perturbation_reproduces_nominal_bitwise() {
        let sched = example3_schedule(Example3Variant::ThreePoint);
        let s = crate::dynamics::presets::example2_innate();
        let nominal = simulate(&x0(), &s, &sched, 200).unwrap();
        let sys = PerturbedSystem::new(sched, Perturbation::Zero).unwrap();
        let run = simulate_perturbed(&x0(), &s, &sys, 200).unwrap();
        assert_eq!(run.trajectory, nominal);
        assert!(run.e_norms.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn susceptibility_preserving_perturbation_keeps_d() {
        let sched = example3_schedule(Example3Variant::SinglePoint);
        // v3 listens to itself with weight 1/2 in both networks; shift a
        // little of that onto v1 with zero net row sum.
        let mut e = Matrix::zeros(5, 5);
        e[(2, 2)] = -0.01;
        e[(2, 0)] = 0.01;
        let sys = PerturbedSystem::new(sched.clone(), Perturbation::Constant(e)).unwrap();
        for t in 0..4 {
            let step = sys.resolve(t).unwrap();
            let pair = sched.resolve(t).unwrap();
            for i in 0..5 {
                assert_eq!(step.d[i], 1.0 - pair.lambda().lambda(i));
            }
            assert!((step.e_norm - 0.02).abs() < 1e-15);
        }
    }

    #[test]
    fn negative_p_is_rejected_with_time() {
        let sched = example3_schedule(Example3Variant::SinglePoint);
        let mut e = Matrix::zeros(5, 5);
        // At t=0 (network 1) agent 1 does not listen to agent 3.
        e[(1, 2)] = -0.1;
        e[(1, 1)] = 0.1;
        let sys = PerturbedSystem::new(sched, Perturbation::Sequence(vec![e])).unwrap();
        let err = sys.resolve(0).unwrap_err();
        assert!(err.to_string().contains("t=0"), "{err}");
        assert!(sys.resolve(1).is_err());
    }

    #[test]
    fn negative_d_is_rejected() {
        // Agent 2 has λ = 1 in network 1: any positive net perturbation makes d < 0.
        let sched = example3_schedule(Example3Variant::SinglePoint);
        let mut e = Matrix::zeros(5, 5);
        e[(2, 2)] = 0.05;
        let sys = PerturbedSystem::new(sched, Perturbation::Constant(e)).unwrap();
        assert!(sys.resolve(0).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let sched = example3_schedule(Example3Variant::SinglePoint);
        assert!(PerturbedSystem::new(sched, Perturbation::Constant(Matrix::zeros(2, 2))).is_err());
    }
}
