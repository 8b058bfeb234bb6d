//! Matrix and vector types for the opinion update, the max-row-sum norm, and
//! state transition products.
//!
//! The update law is `x[t+1] = Λ[t] W[t] x[t] + (I - Λ[t]) s`, where `W[t]`
//! is row-stochastic and `Λ[t]` is diagonal with entries in `[0, 1]`. The
//! transition matrix `Φ(t, τ)` is the ordered product of the factors
//! `Λ[k] W[k]` for `k = τ..t`, later factors multiplying on the left.
//!
//! All bounds in this crate use `‖A‖ = max_i Σ_j |a_ij|`. This is the
//! ∞-induced operator norm in the usual naming; some literature calls it the
//! ℓ1-induced norm. The formula is what matters here.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for row-stochasticity checks.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Tolerance for the `[0, 1]` range of opinions and susceptibilities.
const RANGE_TOL: f64 = 1e-9;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Max absolute row sum `max_i Σ_j |m_ij|`.
pub fn max_row_sum_norm(m: &Matrix) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::Dimension("norm of an empty matrix".into()));
    }
    Ok(m.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max))
}

/// Opinions `x[t]` or innate opinions `s`, each entry in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct OpinionVector(Vector);

impl OpinionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(&v) {
                return Err(Error::validation(format!(
                    "opinion entry {i} = {v} outside [0, 1]"
                )));
            }
        }
        Ok(OpinionVector(Vector::from_vec(values)))
    }

    pub fn zeros(n: usize) -> Self {
        OpinionVector(Vector::zeros(n))
    }

    /// Wraps an engine-produced vector. Entries are expected (not checked)
    /// to lie in `[0, 1]`.
    pub(crate) fn from_vector(v: Vector) -> Self {
        OpinionVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Max-norm distance to another vector of the same length.
    pub fn max_abs_diff(&self, other: &OpinionVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for OpinionVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        OpinionVector::new(v)
    }
}

impl From<OpinionVector> for Vec<f64> {
    fn from(v: OpinionVector) -> Self {
        v.0.as_slice().to_vec()
    }
}

/// Nonnegative square matrix whose rows sum to one or are identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix(Matrix);

impl InfluenceMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "influence matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        for (i, row) in m.row_iter().enumerate() {
            let mut sum = 0.0;
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::validation(format!(
                        "weight ({i},{j}) = {v} is negative or not finite"
                    )));
                }
                sum += v;
            }
            if sum != 0.0 && (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::validation(format!(
                    "row {i} sums to {sum}, expected 1 or 0"
                )));
            }
        }
        Ok(InfluenceMatrix(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    /// Scales every nonzero row to sum to one. Only used when the caller
    /// explicitly asks for normalization.
    pub fn normalized(mut m: Matrix) -> Result<Self> {
        for mut row in m.row_iter_mut() {
            let sum: f64 = row.iter().sum();
            if sum > 0.0 {
                row /= sum;
            }
        }
        Self::new(m)
    }

    pub fn identity(n: usize) -> Self {
        InfluenceMatrix(Matrix::identity(n, n))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.0.row(i).iter().all(|&v| v == 0.0)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        matrix_to_rows(&self.0)
    }
}

/// Diagonal susceptibility matrix `Λ = diag(λ_1, ..., λ_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SusceptibilityMatrix(Vector);

impl SusceptibilityMatrix {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        for (i, &v) in diag.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::validation(format!(
                    "susceptibility λ_{i} = {v} outside [0, 1]"
                )));
            }
        }
        Ok(SusceptibilityMatrix(Vector::from_vec(diag)))
    }

    pub fn uniform(n: usize, lambda: f64) -> Result<Self> {
        Self::new(vec![lambda; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn diag(&self) -> &Vector {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.as_slice().to_vec()
    }
}

/// One time step's `(Λ[t], W[t])`, checked for matching size and for the
/// zero-row pairing (`λ_i = 0` exactly when row `i` of `W` is zero).
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    lambda: SusceptibilityMatrix,
    weights: InfluenceMatrix,
    factor: Matrix,
}

impl FactorPair {
    pub fn new(lambda: SusceptibilityMatrix, weights: InfluenceMatrix) -> Result<Self> {
        check_zero_row_pairing(&lambda, &weights, 0)?;
        let factor = scale_rows(weights.as_matrix(), lambda.diag());
        Ok(FactorPair {
            lambda,
            weights,
            factor,
        })
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn lambda(&self) -> &SusceptibilityMatrix {
        &self.lambda
    }

    pub fn weights(&self) -> &InfluenceMatrix {
        &self.weights
    }

    /// The product `Λ W`.
    pub fn factor(&self) -> &Matrix {
        &self.factor
    }

    /// One application of the update law.
    pub fn apply(&self, x: &Vector, s: &Vector) -> Vector {
        let mut y = &self.factor * x;
        for i in 0..y.len() {
            y[i] += (1.0 - self.lambda.lambda(i)) * s[i];
        }
        y
    }
}

fn check_zero_row_pairing(
    lambda: &SusceptibilityMatrix,
    w: &InfluenceMatrix,
    time: usize,
) -> Result<()> {
    if lambda.n() != w.n() {
        return Err(Error::Dimension(format!(
            "susceptibility has {} entries but influence matrix is {}x{}",
            lambda.n(),
            w.n(),
            w.n()
        )));
    }
    for i in 0..w.n() {
        let zero_lambda = lambda.lambda(i) == 0.0;
        let zero_row = w.row_is_zero(i);
        if zero_lambda != zero_row {
            let detail = if zero_lambda {
                "λ_i = 0 but the influence row is nonzero"
            } else {
                "influence row is zero but λ_i > 0"
            };
            return Err(Error::ZeroRowMismatch {
                time,
                agent: i,
                detail: detail.into(),
            });
        }
    }
    Ok(())
}

/// `Λ W`, after checking sizes and the zero-row pairing.
pub fn step_factor(lambda: &SusceptibilityMatrix, w: &InfluenceMatrix) -> Result<Matrix> {
    check_zero_row_pairing(lambda, w, 0)?;
    Ok(scale_rows(w.as_matrix(), lambda.diag()))
}

fn scale_rows(m: &Matrix, d: &Vector) -> Matrix {
    let mut out = m.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        row *= d[i];
    }
    out
}

/// `Φ(t, τ)` together with the norm after each accumulated factor.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionProduct {
    pub matrix: Matrix,
    pub from_time: usize,
    pub to_time: usize,
    pub norm: f64,
    /// `‖Φ(τ + k, τ)‖` for `k = 0..=t-τ`.
    pub norm_history: Vec<f64>,
}

/// Left-accumulates the factors starting at `from_time`. An empty sequence
/// yields the identity of size `n`.
pub fn transition_product(
    n: usize,
    from_time: usize,
    factors: &[FactorPair],
) -> Result<TransitionProduct> {
    let mut phi = Matrix::identity(n, n);
    let mut norm_history = Vec::with_capacity(factors.len() + 1);
    norm_history.push(if n == 0 { 0.0 } else { 1.0 });
    for (k, f) in factors.iter().enumerate() {
        if f.n() != n {
            return Err(Error::Dimension(format!(
                "factor at t={} has size {}, expected {n}",
                from_time + k,
                f.n()
            )));
        }
        phi = f.factor() * &phi;
        norm_history.push(max_row_sum_norm(&phi)?);
    }
    Ok(TransitionProduct {
        norm: *norm_history.last().unwrap(),
        matrix: phi,
        from_time,
        to_time: from_time + factors.len(),
        norm_history,
    })
}

/// Evaluates `x[t] = Φ(t,t0) x0 + Σ_τ Φ(t,τ+1)(I - Λ[τ]) s` directly, with
/// `factors[k]` active at time `t0 + k`.
pub fn closed_form_solution(
    x0: &OpinionVector,
    s: &OpinionVector,
    factors: &[FactorPair],
) -> Result<OpinionVector> {
    let n = x0.len();
    if s.len() != n {
        return Err(Error::Dimension(format!(
            "x0 has length {n} but s has length {}",
            s.len()
        )));
    }
    if let Some(f) = factors.iter().find(|f| f.n() != n) {
        return Err(Error::Dimension(format!(
            "factor of size {} for {n} agents",
            f.n()
        )));
    }
    // Walk backwards so `suffix` is Φ(t, τ+1) when visiting τ.
    let mut suffix = Matrix::identity(n, n);
    let mut anchored = Vector::zeros(n);
    for f in factors.iter().rev() {
        let pulled = s.as_vector().component_mul(&f.lambda().diag().map(|l| 1.0 - l));
        anchored += &suffix * pulled;
        suffix *= f.factor();
    }
    Ok(OpinionVector::from_vector(suffix * x0.as_vector() + anchored))
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(Error::Dimension(format!(
            "row {i} has {} entries, expected {ncols}",
            r.len()
        )));
    }
    Ok(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}
