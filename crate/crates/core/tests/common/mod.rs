//! Seeded random instances and brute-force oracles shared by the property
//! and acceptance tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tvfj_core::{
    FactorPair, InfluenceMatrix, Matrix, OpinionVector, SusceptibilityMatrix, TemporalGraphWindow,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonnegative row summing to one, supported on `1..=n` random columns.
pub fn random_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let k = rng.gen_range(1..=n);
    let mut cols: Vec<usize> = (0..n).collect();
    cols.shuffle(rng);
    let mut row = vec![0.0; n];
    for &j in &cols[..k] {
        row[j] = rng.gen_range(0.05..1.0);
    }
    let sum: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= sum);
    row
}

/// Probabilities for the three kinds of susceptibility entry.
#[derive(Clone, Copy, Debug)]
pub struct PairShape {
    /// `λ = 0` with a zero influence row.
    pub p_zero: f64,
    /// `λ = 1`.
    pub p_one: f64,
}

impl PairShape {
    pub const MIXED: PairShape = PairShape {
        p_zero: 0.1,
        p_one: 0.4,
    };
    pub const STUBBORN: PairShape = PairShape {
        p_zero: 0.05,
        p_one: 0.2,
    };
}

pub fn random_pair(rng: &mut ChaCha8Rng, n: usize, shape: PairShape) -> FactorPair {
    let mut lambda = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let r: f64 = rng.gen();
        let l = if r < shape.p_zero {
            0.0
        } else if r < shape.p_zero + shape.p_one {
            1.0
        } else {
            rng.gen_range(0.01..1.0)
        };
        lambda.push(l);
        rows.push(if l == 0.0 { vec![0.0; n] } else { random_row(rng, n) });
    }
    FactorPair::new(
        SusceptibilityMatrix::new(lambda).unwrap(),
        InfluenceMatrix::from_rows(&rows).unwrap(),
    )
    .unwrap()
}

pub fn random_pairs(rng: &mut ChaCha8Rng, n: usize, len: usize, shape: PairShape) -> Vec<FactorPair> {
    (0..len).map(|_| random_pair(rng, n, shape)).collect()
}

pub fn random_opinion(rng: &mut ChaCha8Rng, n: usize) -> OpinionVector {
    OpinionVector::new((0..n).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

/// Triple-loop product `a * b`.
pub fn naive_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut c = Matrix::zeros(a.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            let mut s = 0.0;
            for k in 0..a.ncols() {
                s += a[(i, k)] * b[(k, j)];
            }
            c[(i, j)] = s;
        }
    }
    c
}

/// `Λ W` entrywise from the definitions.
pub fn naive_factor(pair: &FactorPair) -> Matrix {
    let n = pair.n();
    Matrix::from_fn(n, n, |i, j| pair.lambda().lambda(i) * pair.weights().weight(i, j))
}

/// `Φ` over `pairs`, later factors on the left.
pub fn naive_product(pairs: &[FactorPair], n: usize) -> Matrix {
    let mut phi = Matrix::identity(n, n);
    for p in pairs {
        phi = naive_mul(&naive_factor(p), &phi);
    }
    phi
}

pub fn row_sum_norm(m: &Matrix) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Thresholds of the coverage condition: `(source_ok(λ), edge_ok(w))`.
pub struct Coverage {
    pub source: Box<dyn Fn(f64) -> bool>,
    pub edge: Box<dyn Fn(f64) -> bool>,
}

impl Coverage {
    pub fn strict(epsilon: f64, w: f64) -> Self {
        Coverage {
            source: Box::new(move |l| l <= 1.0 - epsilon),
            edge: Box::new(move |x| x >= w),
        }
    }

    pub fn weak() -> Self {
        Coverage {
            source: Box::new(|l| l < 1.0),
            edge: Box::new(|x| x > 0.0),
        }
    }
}

/// Agents reached at the window end by some walk `a_s, a_{s+1}, ..., a_{d-1}`
/// over consecutive layers: `a_s` qualifies as a source in layer `s` and
/// each later agent hears the previous one through a qualifying edge of
/// its own layer. Enumerates every start layer and every agent sequence.
pub fn covered_by_walks(window: &TemporalGraphWindow, cov: &Coverage) -> Vec<bool> {
    let n = window.n();
    let layers = window.layers();
    let d = layers.len();
    let mut covered = vec![false; n];
    for s in 0..d {
        let steps = d - 1 - s;
        let total = n.pow(steps as u32 + 1);
        for code in 0..total {
            let mut seq = Vec::with_capacity(steps + 1);
            let mut c = code;
            for _ in 0..=steps {
                seq.push(c % n);
                c /= n;
            }
            if !(cov.source)(layers[s].pair.lambda().lambda(seq[0])) {
                continue;
            }
            let ok = (1..=steps).all(|k| {
                let layer = &layers[s + k];
                (cov.edge)(layer.pair.weights().weight(seq[k], seq[k - 1]))
            });
            if ok {
                covered[seq[steps]] = true;
            }
        }
    }
    covered
}

/// Agents that are stubborn or can follow influence edges (`w_ij > 0` means
/// `i` hears `j`) to a stubborn agent.
pub fn bfs_reaches_stubborn(w: &InfluenceMatrix, lambda: &SusceptibilityMatrix) -> Vec<bool> {
    let n = w.n();
    let mut ok: Vec<bool> = (0..n).map(|i| lambda.lambda(i) < 1.0).collect();
    let mut queue: std::collections::VecDeque<usize> = (0..n).filter(|&i| ok[i]).collect();
    while let Some(j) = queue.pop_front() {
        for i in 0..n {
            if !ok[i] && w.weight(i, j) > 0.0 {
                ok[i] = true;
                queue.push_back(i);
            }
        }
    }
    ok
}

/// Layers in which every length-`period` sliding window is defected under
/// `(epsilon, w)`: agent `i` is ε-stubborn whenever `t ≡ o_i (mod period)`
/// and keeps a self-weight of at least `w`.
pub fn semi_periodic_layers(
    rng: &mut ChaCha8Rng,
    n: usize,
    period: usize,
    len: usize,
    epsilon: f64,
    w: f64,
) -> Vec<FactorPair> {
    let offsets: Vec<usize> = (0..n).map(|_| rng.gen_range(0..period)).collect();
    (0..len)
        .map(|t| {
            let mut lambda = Vec::with_capacity(n);
            let mut rows = Vec::with_capacity(n);
            for (i, &o) in offsets.iter().enumerate() {
                let stubborn = t % period == o || rng.gen_bool(0.2);
                let l = if stubborn {
                    rng.gen_range(0.05..=1.0 - epsilon)
                } else {
                    rng.gen_range(1.0 - epsilon..=1.0)
                };
                let base = random_row(rng, n);
                let alpha = rng.gen_range(w..=1.0);
                let row: Vec<f64> = (0..n)
                    .map(|j| (1.0 - alpha) * base[j] + if i == j { alpha } else { 0.0 })
                    .collect();
                lambda.push(l);
                rows.push(row);
            }
            FactorPair::new(
                SusceptibilityMatrix::new(lambda).unwrap(),
                InfluenceMatrix::from_rows(&rows).unwrap(),
            )
            .unwrap()
        })
        .collect()
}
