//! Scalar reference implementations and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64;
use qht::channel::CQChannel;
use qht::operator::Matrix;
use qht::state::PairJson;
use qht::{DensityMatrix, HypothesisPair};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn load_pair(name: &str) -> HypothesisPair {
    let text = std::fs::read_to_string(data(name)).unwrap();
    serde_json::from_str::<PairJson>(&text)
        .unwrap()
        .to_pair()
        .unwrap()
}

pub fn classical(p: &[f64], q: &[f64]) -> HypothesisPair {
    HypothesisPair::new(
        DensityMatrix::classical(p).unwrap(),
        DensityMatrix::classical(q).unwrap(),
    )
    .unwrap()
}

/// Qubit state with Bloch vector `(x, y, z)`.
pub fn qubit(x: f64, y: f64, z: f64) -> DensityMatrix {
    let m = Matrix::from_row_major(
        2,
        vec![
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        ],
    );
    DensityMatrix::new(qht::HermitianOperator::new(m).unwrap()).unwrap()
}

pub fn qubit_pair(r: [f64; 3], s: [f64; 3]) -> HypothesisPair {
    HypothesisPair::new(qubit(r[0], r[1], r[2]), qubit(s[0], s[1], s[2])).unwrap()
}

/// `log Σ p^{1-s} q^s` over the common support, so `φ(0) = log P(q > 0)`.
pub fn scalar_phi(p: &[f64], q: &[f64], s: f64) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0)
        .map(|(&a, &b)| a.powf(1.0 - s) * b.powf(s))
        .sum::<f64>()
        .ln()
}

pub fn scalar_relative_entropy(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| if b == 0.0 { f64::INFINITY } else { a * (a / b).ln() })
        .sum()
}

/// Maximum of a unimodal function on `[lo, hi]`: dense grid, then ternary
/// search on the neighbouring cells.
pub fn scalar_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    scalar_max_grid(f, lo, hi, 20_000)
}

/// Grid search with `n` intervals, then ternary refinement around the best point.
pub fn scalar_max_grid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..=n {
        let v = f(lo + (hi - lo) * i as f64 / n as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let h = (hi - lo) / n as f64;
    let mut a = (lo + h * best_i as f64 - h).max(lo);
    let mut b = (lo + h * best_i as f64 + h).min(hi);
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) < f(m2) {
            a = m1;
        } else {
            b = m2;
        }
    }
    let x = 0.5 * (a + b);
    let v = f(x);
    if v >= best {
        (x, v)
    } else {
        (lo + h * best_i as f64, best)
    }
}

pub fn scalar_chernoff(p: &[f64], q: &[f64]) -> f64 {
    scalar_max(|s| -scalar_phi(p, q, s), 0.0, 1.0).1
}

/// `+∞` below `−φ(1)`, where the objective grows like `1 / (1 − s)`.
pub fn scalar_hoeffding(p: &[f64], q: &[f64], r: f64) -> f64 {
    if r < -scalar_phi(p, q, 1.0) - 1e-12 {
        return f64::INFINITY;
    }
    let cap = 1.0 - 1e-6;
    scalar_max(|s| (-s * r - scalar_phi(p, q, s)) / (1.0 - s), 0.0, cap)
        .1
        .max(0.0)
}

/// Joint distribution of `n` i.i.d. draws, in lexicographic order.
pub fn iid(p: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..n {
        out = out.iter().flat_map(|&a| p.iter().map(move |&b| a * b)).collect();
    }
    out
}

/// Classical Neyman–Pearson: accept outcomes in decreasing likelihood-ratio
/// order until the accepted `P` mass reaches `1 − ε`, splitting the last one.
pub fn scalar_np(p: &[f64], q: &[f64], n: usize, epsilon: f64) -> f64 {
    let pn = iid(p, n);
    let qn = iid(q, n);
    let mut idx: Vec<usize> = (0..pn.len()).filter(|&i| pn[i] > 0.0).collect();
    idx.sort_by(|&i, &j| (pn[j] * qn[i]).total_cmp(&(pn[i] * qn[j])));
    let need = 1.0 - epsilon;
    let mut mass = 0.0;
    let mut beta = 0.0;
    for i in idx {
        if mass + pn[i] <= need {
            mass += pn[i];
            beta += qn[i];
        } else {
            beta += qn[i] * (need - mass) / pn[i];
            break;
        }
    }
    beta
}

/// `max_μ≥0 μ(1 − ε) − Σ (μ p − q)_+`, the dual of the classical trade-off.
pub fn scalar_np_dual(p: &[f64], q: &[f64], n: usize, epsilon: f64) -> f64 {
    let pn = iid(p, n);
    let qn = iid(q, n);
    // The dual is piecewise linear in μ with kinks at q/p.
    let mut kinks: Vec<f64> = pn
        .iter()
        .zip(&qn)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| b / a)
        .collect();
    kinks.push(0.0);
    kinks
        .into_iter()
        .map(|mu| {
            mu * (1.0 - epsilon)
                - pn.iter()
                    .zip(&qn)
                    .map(|(&a, &b)| (mu * a - b).max(0.0))
                    .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `φ_p(s)` of a classical channel `W[x][y]`.
pub fn scalar_channel_phi(w: &[Vec<f64>], p: &[f64], s: f64) -> f64 {
    let k = w[0].len();
    let q: Vec<f64> = (0..k)
        .map(|y| w.iter().zip(p).map(|(row, &px)| px * row[y]).sum())
        .collect();
    w.iter()
        .zip(p)
        .map(|(row, &px)| {
            px * row
                .iter()
                .zip(&q)
                .filter(|(&a, _)| a > 0.0)
                .map(|(&a, &b)| a.powf(1.0 - s) * b.powf(s))
                .sum::<f64>()
        })
        .sum::<f64>()
        .ln()
}

pub fn scalar_channel_exponent(w: &[Vec<f64>], p: &[f64], a: f64) -> f64 {
    // Concave in s, so a coarse grid is enough to seed the refinement.
    scalar_max_grid(|s| -s * a - scalar_channel_phi(w, p, s), 0.0, 1.0, 200)
        .1
        .max(0.0)
}

/// `|a − b|`, zero when both are the same infinity.
pub fn deviation(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

pub fn bsc(crossover: f64) -> Vec<Vec<f64>> {
    vec![vec![1.0 - crossover, crossover], vec![crossover, 1.0 - crossover]]
}

pub fn classical_channel(w: &[Vec<f64>]) -> CQChannel {
    CQChannel::classical(w).unwrap()
}
