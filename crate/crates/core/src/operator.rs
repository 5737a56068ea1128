//! Dense Hermitian linear algebra.
//!
//! Everything downstream (states, tests, block operators) is carried by
//! [`HermitianOperator`]. Spectral work goes through a deterministic cyclic
//! Jacobi eigensolver, so identical inputs always produce bit-identical
//! decompositions.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tensor-power dimension built unless a caller asks for more.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Relative tolerance of the Hermiticity check, scaled by the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the full Frobenius norm.
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Relative tolerance on negative eigenvalues accepted as PSD.
pub const PSD_TOL: f64 = 1e-10;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C1;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Panics if `data.len() != dim * dim`.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), dim * dim, "row-major data has wrong length");
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![C0; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C0 {
                    continue;
                }
                let rk = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(rk) {
                    *o += a * b;
                }
            }
        }
        Matrix { dim: n, data: out }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `Tr[self * rhs]` without forming the product.
    pub fn trace_product(&self, rhs: &Matrix) -> Complex64 {
        assert_eq!(self.dim, rhs.dim, "trace_product dimension mismatch");
        let n = self.dim;
        let mut acc = C0;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * rhs.data[k * n + i];
            }
        }
        acc
    }

    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        let (a, b) = (self.dim, rhs.dim);
        let n = a * b;
        let mut out = vec![C0; n * n];
        for i in 0..a {
            for j in 0..a {
                let x = self.data[i * a + j];
                if x == C0 {
                    continue;
                }
                for k in 0..b {
                    let dst = (i * b + k) * n + j * b;
                    let src = &rhs.data[k * b..(k + 1) * b];
                    for (o, y) in out[dst..dst + b].iter_mut().zip(src) {
                        *o = x * y;
                    }
                }
            }
        }
        Matrix { dim: n, data: out }
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Worst Hermiticity violation as `(row, col, |a_ij - conj(a_ji)|)`.
    pub fn hermitian_defect(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst.2 {
                    worst = (i, j, d);
                }
            }
        }
        worst
    }

    fn hermitian_part(&self) -> Matrix {
        Matrix::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// A finite-dimensional Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: Matrix,
}

impl HermitianOperator {
    /// Validates Hermiticity within `HERMITIAN_TOL * max|entry|` and stores
    /// the exactly Hermitian part.
    pub fn new(m: Matrix) -> Result<Self> {
        if m.dim == 0 {
            return Err(Error::InvalidArgument(
                "operator dimension must be at least 1".into(),
            ));
        }
        let tolerance = HERMITIAN_TOL * m.max_abs();
        let (row, col, deviation) = m.hermitian_defect();
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                row,
                col,
                deviation,
                tolerance,
            });
        }
        Ok(Self {
            m: m.hermitian_part(),
        })
    }

    /// Symmetrizes without validating. For matrices that are Hermitian by
    /// construction up to rounding.
    pub(crate) fn from_hermitian_part(m: Matrix) -> Self {
        Self {
            m: m.hermitian_part(),
        }
    }

    pub fn from_rows(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let dim = re.len();
        if im.len() != dim {
            return Err(Error::Format(format!(
                "imaginary part has {} rows, real part has {dim}",
                im.len()
            )));
        }
        for (i, (r, m)) in re.iter().zip(im).enumerate() {
            if r.len() != dim || m.len() != dim {
                return Err(Error::Format(format!(
                    "ragged row {i}: expected {dim} entries, found re={} im={}",
                    r.len(),
                    m.len()
                )));
            }
        }
        Self::new(Matrix::from_fn(dim, |i, j| Complex64::new(re[i][j], im[i][j])))
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        Self { m }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: Matrix::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: Matrix::zeros(dim),
        }
    }

    /// `|v><v|` for an arbitrary (not necessarily normalized) vector.
    pub fn outer(v: &[Complex64]) -> Self {
        Self {
            m: Matrix::from_fn(v.len(), |i, j| v[i] * v[j].conj()),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Real part of `Tr[self * other]`; exact for a Hermitian pair.
    pub fn trace_with(&self, other: &HermitianOperator) -> f64 {
        self.m.trace_product(&other.m).re
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            m: self.m.add(&other.m),
        })
    }

    pub fn sub(&self, other: &HermitianOperator) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            m: self.m.sub(&other.m),
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            m: self.m.scale(factor),
        }
    }

    pub fn kron(&self, other: &HermitianOperator) -> Self {
        Self {
            m: self.m.kron(&other.m),
        }
    }

    /// Block-diagonal direct sum of the operators, in order.
    pub fn direct_sum(blocks: &[HermitianOperator]) -> Self {
        let dim: usize = blocks.iter().map(|b| b.dim()).sum();
        let mut m = Matrix::zeros(dim);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim() {
                for j in 0..b.dim() {
                    m[(off + i, off + j)] = b.m[(i, j)];
                }
            }
            off += b.dim();
        }
        Self { m }
    }

    /// Product `self * other * self`, Hermitian for Hermitian inputs.
    pub fn sandwich(&self, other: &HermitianOperator) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_hermitian_part(self.m.matmul(&other.m).matmul(&self.m)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.frobenius_norm()
    }

    pub(crate) fn check_dim(&self, other: &HermitianOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn eigendecompose(&self) -> EigenDecomposition {
        jacobi_eigh(&self.m)
    }

    /// Eigendecomposition seeded with the eigenvectors of a nearby operator.
    pub fn eigendecompose_near(&self, nearby: &EigenDecomposition) -> EigenDecomposition {
        jacobi_eigh_from(&self.m, &nearby.vectors)
    }

    /// Operator norm (largest |eigenvalue|).
    pub fn spectral_norm(&self) -> f64 {
        self.eigendecompose().max_abs()
    }

    /// Sum of |eigenvalues|.
    pub fn trace_norm(&self) -> f64 {
        self.eigendecompose().values.iter().map(|v| v.abs()).sum()
    }

    /// `A^t` on the support of a PSD operator. Negative `t` gives the
    /// pseudo-inverse power and `t = 0` the support projector.
    pub fn fractional_power(&self, t: f64) -> Result<Self> {
        self.eigendecompose().power(t)
    }

    /// Spectral projector `{C >= 0}`; numerically zero eigenvalues land here.
    pub fn positive_part_projector(&self) -> Self {
        self.eigendecompose().nonnegative_projector()
    }

    /// Spectral projector `{C < 0}`, the exact complement of
    /// [`Self::positive_part_projector`].
    pub fn negative_part_projector(&self) -> Self {
        let p = self.positive_part_projector();
        Self::identity(self.dim()).sub(&p).expect("same dimension")
    }

    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        self.tensor_power_with_limit(n, DEFAULT_MAX_DIM)
    }

    pub fn tensor_power_with_limit(&self, n: usize, max_dim: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("tensor power needs n >= 1".into()));
        }
        check_tensor_dim(self.dim(), n, max_dim)?;
        let mut out = self.clone();
        for _ in 1..n {
            out = out.kron(self);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> OperatorJson {
        let d = self.dim();
        OperatorJson {
            dim: d,
            re: (0..d)
                .map(|i| (0..d).map(|j| self.m[(i, j)].re).collect())
                .collect(),
            im: (0..d)
                .map(|i| (0..d).map(|j| self.m[(i, j)].im).collect())
                .collect(),
        }
    }
}

impl fmt::Display for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.m[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Checks `dim^n <= max_dim` and returns the tensor dimension.
pub fn check_tensor_dim(dim: usize, n: usize, max_dim: usize) -> Result<usize> {
    let required = (dim as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if required > max_dim as u128 {
        return Err(Error::DimensionGuard {
            required,
            limit: max_dim,
        });
    }
    Ok(required as usize)
}

/// On-disk operator format: row-major real and imaginary parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl OperatorJson {
    pub fn to_operator(&self) -> Result<HermitianOperator> {
        if self.re.len() != self.dim {
            return Err(Error::Format(format!(
                "dim is {} but {} rows were given",
                self.dim,
                self.re.len()
            )));
        }
        if self.im.is_empty() {
            let zeros = vec![vec![0.0; self.dim]; self.dim];
            return HermitianOperator::from_rows(&self.re, &zeros);
        }
        HermitianOperator::from_rows(&self.re, &self.im)
    }
}

/// Eigenvalues in descending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Eigenvalues with `|λ| <= 1e-12 * dim * max|λ|` count as zero.
    pub fn zero_cutoff(&self) -> f64 {
        1e-12 * self.dim() as f64 * self.max_abs()
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// The `k`-th eigenvector.
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let w: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        self.reconstruct_with(&w)
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.reconstruct_with(&self.values)
    }

    fn reconstruct_with(&self, w: &[f64]) -> HermitianOperator {
        let n = self.dim();
        let v = &self.vectors;
        let mut m = Matrix::zeros(n);
        for (k, &wk) in w.iter().enumerate() {
            if wk == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * wk;
                if vik == C0 {
                    continue;
                }
                for j in 0..n {
                    m[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        HermitianOperator::from_hermitian_part(m)
    }

    /// Fails unless every eigenvalue is `>= -PSD_TOL * max|λ|`.
    pub fn check_psd(&self) -> Result<()> {
        let tolerance = -PSD_TOL * self.max_abs().max(f64::MIN_POSITIVE);
        let lo = self.min_value();
        if lo < tolerance {
            return Err(Error::NotPsd {
                eigenvalue: lo,
                tolerance,
            });
        }
        Ok(())
    }

    /// Power on the support; see [`HermitianOperator::fractional_power`].
    pub fn power(&self, t: f64) -> Result<HermitianOperator> {
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("power {t} is not finite")));
        }
        self.check_psd()?;
        let cut = self.zero_cutoff();
        Ok(self.map(|l| if l > cut { l.powf(t) } else { 0.0 }))
    }

    /// Natural logarithm on the support (zero elsewhere).
    pub fn log_on_support(&self) -> Result<HermitianOperator> {
        self.check_psd()?;
        let cut = self.zero_cutoff();
        Ok(self.map(|l| if l > cut { l.ln() } else { 0.0 }))
    }

    pub fn support_projector(&self) -> HermitianOperator {
        let cut = self.zero_cutoff();
        self.map(|l| if l > cut { 1.0 } else { 0.0 })
    }

    pub fn nonnegative_projector(&self) -> HermitianOperator {
        let cut = self.zero_cutoff();
        self.map(|l| if l >= -cut { 1.0 } else { 0.0 })
    }

    pub fn strictly_positive_projector(&self) -> HermitianOperator {
        let cut = self.zero_cutoff();
        self.map(|l| if l > cut { 1.0 } else { 0.0 })
    }

    pub fn strictly_negative_projector(&self) -> HermitianOperator {
        let cut = self.zero_cutoff();
        self.map(|l| if l < -cut { 1.0 } else { 0.0 })
    }
}

/// Cyclic Jacobi for a Hermitian matrix; only the Hermitian part of `a` is used.
pub fn jacobi_eigh(a: &Matrix) -> EigenDecomposition {
    jacobi_sweeps(a.hermitian_part(), Matrix::identity(a.dim))
}

/// Jacobi started from an approximate eigenbasis `guess` (unitary columns).
/// Converges in a few sweeps when `guess` nearly diagonalizes `a`.
pub fn jacobi_eigh_from(a: &Matrix, guess: &Matrix) -> EigenDecomposition {
    assert_eq!(a.dim, guess.dim, "guess dimension mismatch");
    let h = guess.adjoint().matmul(&a.hermitian_part()).matmul(guess);
    jacobi_sweeps(h.hermitian_part(), guess.clone())
}

fn jacobi_sweeps(mut h: Matrix, mut v: Matrix) -> EigenDecomposition {
    let n = h.dim;
    let target = JACOBI_TOL * h.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&h) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut h, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));

    let values: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = Matrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        let phase = canonical_phase((0..n).map(|i| v[(i, k)]));
        for i in 0..n {
            vectors[(i, col)] = v[(i, k)] * phase;
        }
    }
    EigenDecomposition { values, vectors }
}

/// Unit factor making the first significant component real and positive.
fn canonical_phase(column: impl Iterator<Item = Complex64>) -> Complex64 {
    for z in column {
        let r = z.norm();
        if r > 1e-8 {
            return z.conj() / r;
        }
    }
    C1
}

fn off_diagonal_norm(h: &Matrix) -> f64 {
    let n = h.dim;
    let mut acc = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            acc += h[(i, j)].norm_sqr();
        }
    }
    (2.0 * acc).sqrt()
}

/// One unitary rotation zeroing `h[p][q]`; `v` accumulates the rotations.
fn rotate(h: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let n = h.dim;
    let b = h[(p, q)];
    let mag = b.norm();
    if mag == 0.0 {
        return;
    }
    let app = h[(p, p)].re;
    let aqq = h[(q, q)].re;
    // Rotations that cannot change the diagonal in floating point.
    let g = 100.0 * mag;
    if app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
        h[(p, q)] = C0;
        h[(q, p)] = C0;
        return;
    }
    let e = b / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let se = e * s;
    let sec = se.conj();

    let data = &mut h.data;
    // Columns: H <- H G with G = [[c, s e], [-s conj(e), c]].
    for k in 0..n {
        let kp = data[k * n + p];
        let kq = data[k * n + q];
        data[k * n + p] = kp * c - kq * sec;
        data[k * n + q] = kp * se + kq * c;
    }
    // Rows: H <- G† H.
    let (rp, rq) = if p < q {
        let (lo, hi) = data.split_at_mut(q * n);
        (&mut lo[p * n..p * n + n], &mut hi[..n])
    } else {
        unreachable!("p < q")
    };
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (pk, qk) = (*x, *y);
        *x = pk * c - qk * se;
        *y = pk * sec + qk * c;
    }
    data[p * n + p] = Complex64::new(app - t * mag, 0.0);
    data[q * n + q] = Complex64::new(aqq + t * mag, 0.0);
    data[p * n + q] = C0;
    data[q * n + p] = C0;

    let vd = &mut v.data;
    for k in 0..n {
        let kp = vd[k * n + p];
        let kq = vd[k * n + q];
        vd[k * n + p] = kp * c - kq * sec;
        vd[k * n + q] = kp * se + kq * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianOperator {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..dim {
                let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        HermitianOperator::new(m).unwrap()
    }

    fn max_diff(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
        a.matrix().sub(b.matrix()).max_abs()
    }

    #[test]
    fn identity_eigenvalues() {
        let e = HermitianOperator::identity(2).eigendecompose();
        assert_eq!(e.values, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let e = HermitianOperator::diag(&[1.0, 3.0]).eigendecompose();
        assert_eq!(e.values, vec![3.0, 1.0]);
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [1, 2, 3, 6, 17] {
            let h = random_hermitian(dim, &mut rng);
            let e = h.eigendecompose();
            let err = e.reconstruct().sub(&h).unwrap().frobenius_norm();
            assert!(err <= 1e-10 * h.frobenius_norm().max(1.0), "dim {dim}: {err}");
            let vtv = e.vectors.adjoint().matmul(&e.vectors);
            assert!(vtv.sub(&Matrix::identity(dim)).max_abs() <= 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn warm_start_matches_cold_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = random_hermitian(8, &mut rng);
        let k = random_hermitian(8, &mut rng).scale(1e-3);
        let near = h.add(&k).unwrap();
        let warm = near.eigendecompose_near(&h.eigendecompose());
        let cold = near.eigendecompose();
        for (a, b) in warm.values.iter().zip(&cold.values) {
            assert!((a - b).abs() < 1e-12);
        }
        let err = warm.reconstruct().sub(&near).unwrap().frobenius_norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn eigendecomposition_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(5, &mut rng);
        let a = h.eigendecompose();
        let b = h.eigendecompose();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn rejects_non_hermitian_with_location() {
        let mut m = Matrix::identity(3);
        m[(0, 2)] = Complex64::new(0.5, 0.0);
        match HermitianOperator::new(m) {
            Err(Error::NotHermitian { row, col, .. }) => assert_eq!((row, col), (0, 2)),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn rejects_ragged_rows() {
        let re = vec![vec![1.0, 0.0], vec![0.0]];
        let im = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert!(matches!(
            HermitianOperator::from_rows(&re, &im),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn power_of_identity_is_identity() {
        let p = HermitianOperator::identity(3).fractional_power(0.37).unwrap();
        assert!(max_diff(&p, &HermitianOperator::identity(3)) < 1e-14);
    }

    #[test]
    fn square_root_of_diagonal() {
        let p = HermitianOperator::diag(&[4.0, 9.0])
            .fractional_power(0.5)
            .unwrap();
        assert!(max_diff(&p, &HermitianOperator::diag(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn power_of_projector_is_projector() {
        let s = 1.0 / 2f64.sqrt();
        let proj = HermitianOperator::outer(&[Complex64::new(s, 0.0), Complex64::new(0.0, s)]);
        let p = proj.fractional_power(0.3).unwrap();
        assert!(max_diff(&p, &proj) < 1e-12);
        let p0 = proj.fractional_power(0.0).unwrap();
        assert!(max_diff(&p0, &proj) < 1e-12);
        let pinv = proj.fractional_power(-0.5).unwrap();
        assert!(max_diff(&pinv, &proj) < 1e-12);
    }

    #[test]
    fn power_rejects_bad_arguments() {
        let a = HermitianOperator::diag(&[1.0, -0.5]);
        assert!(matches!(a.fractional_power(0.5), Err(Error::NotPsd { .. })));
        let b = HermitianOperator::diag(&[1.0, 0.5]);
        assert!(matches!(
            b.fractional_power(f64::NAN),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn sign_split() {
        let c = HermitianOperator::diag(&[1.0, -1.0]);
        assert!(
            max_diff(
                &c.positive_part_projector(),
                &HermitianOperator::diag(&[1.0, 0.0])
            ) < 1e-15
        );
        assert!(
            max_diff(
                &c.negative_part_projector(),
                &HermitianOperator::diag(&[0.0, 1.0])
            ) < 1e-15
        );
        let psd = HermitianOperator::diag(&[2.0, 0.0, 1.0]);
        assert!(max_diff(&psd.positive_part_projector(), &HermitianOperator::identity(3)) < 1e-15);
    }

    #[test]
    fn projectors_commute_and_split_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in 2..7 {
            let c = random_hermitian(dim, &mut rng);
            let p = c.positive_part_projector();
            let q = c.negative_part_projector();
            let sum = p.add(&q).unwrap();
            assert!(max_diff(&sum, &HermitianOperator::identity(dim)) < 1e-15);
            let pc = p.matrix().matmul(c.matrix());
            let cp = c.matrix().matmul(p.matrix());
            assert!(pc.sub(&cp).max_abs() < 1e-9);
            assert!(p.sandwich(&c).unwrap().trace() >= 0.0);
            assert!(q.sandwich(&c).unwrap().trace() <= 0.0);
        }
    }

    #[test]
    fn tensor_power_of_diagonal() {
        let (a, b) = (0.3, 0.7);
        let t = HermitianOperator::diag(&[a, b]).tensor_power(2).unwrap();
        let expect = HermitianOperator::diag(&[a * a, a * b, b * a, b * b]);
        assert!(max_diff(&t, &expect) < 1e-16);
        let one = HermitianOperator::diag(&[a, b]).tensor_power(1).unwrap();
        assert_eq!(one, HermitianOperator::diag(&[a, b]));
    }

    #[test]
    fn tensor_power_trace_multiplies() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(2, &mut rng);
        let sq = h.sandwich(&HermitianOperator::identity(2)).unwrap();
        let rho = sq.scale(1.0 / sq.trace());
        let t = rho.tensor_power(3).unwrap();
        assert!((t.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_power_guard() {
        let a = HermitianOperator::identity(2);
        match a.tensor_power(13) {
            Err(Error::DimensionGuard { required, limit }) => {
                assert_eq!(required, 8192);
                assert_eq!(limit, DEFAULT_MAX_DIM);
            }
            other => panic!("expected guard error, got {other:?}"),
        }
        assert!(a.tensor_power(12).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(3, &mut rng);
        let text = serde_json::to_string(&h.to_json()).unwrap();
        let back: OperatorJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_operator().unwrap(), h);
    }
}
