//! Density matrices and the divergence family of a hypothesis pair.
//!
//! All spectral quantities of a pair `(ρ, σ)` are evaluated in the joint
//! eigen-data: with `ρ = Σ λ_i |u_i><u_i|` and `σ = Σ μ_j |v_j><v_j|`,
//!
//! ```text
//! Tr ρ^{1-s} σ^s = Σ_{i,j} λ_i^{1-s} μ_j^s |<u_i|v_j>|^2
//! ```
//!
//! restricted to the supports, so an `s`-grid costs `O(d^2)` per point after
//! the two eigendecompositions. Logarithms are natural throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{EigenDecomposition, HermitianOperator, Matrix, OperatorJson};

/// Tolerance on trace and on the most negative eigenvalue of a state.
pub const STATE_TOL: f64 = 1e-10;

/// Weight of a support vector of ρ that may leak into the kernel of σ while
/// the supports still count as nested.
pub const SUPPORT_TOL: f64 = 1e-9;

/// A positive-semidefinite, unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::BadTrace { trace });
        }
        let lo = op.eigendecompose().min_value();
        if lo < -STATE_TOL {
            return Err(Error::NotPsd {
                eigenvalue: lo,
                tolerance: -STATE_TOL,
            });
        }
        Ok(Self { op })
    }

    /// Diagonal state from a probability vector.
    pub fn classical(p: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::diag(p))
    }

    /// `|ψ><ψ|` for the normalized version of `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("pure state vector is zero".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(HermitianOperator::outer(&v))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Skips validation; the caller guarantees a state up to rounding.
    pub(crate) fn new_unchecked(op: HermitianOperator) -> Self {
        Self { op }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }
}

impl TryFrom<&OperatorJson> for DensityMatrix {
    type Error = Error;

    fn try_from(value: &OperatorJson) -> Result<Self> {
        DensityMatrix::new(value.to_operator()?)
    }
}

/// Eigen-data of two states in one basis, shared by every pair quantity.
#[derive(Clone, Debug)]
pub(crate) struct SpectralPair {
    pub rho: EigenDecomposition,
    pub sigma: EigenDecomposition,
    /// `overlap[(i, j)] = <u_i | v_j>`.
    pub overlap: Matrix,
    rho_support: Vec<usize>,
    sigma_support: Vec<usize>,
}

impl SpectralPair {
    pub fn new(rho: EigenDecomposition, sigma: EigenDecomposition) -> Self {
        let overlap = rho.vectors.adjoint().matmul(&sigma.vectors);
        let support = |e: &EigenDecomposition| {
            let cut = e.zero_cutoff();
            (0..e.dim()).filter(|&i| e.values[i] > cut).collect::<Vec<_>>()
        };
        let rho_support = support(&rho);
        let sigma_support = support(&sigma);
        Self {
            rho,
            sigma,
            overlap,
            rho_support,
            sigma_support,
        }
    }

    fn weight(&self, i: usize, j: usize) -> f64 {
        self.overlap[(i, j)].norm_sqr()
    }

    /// Largest weight a support vector of ρ places on the kernel of σ.
    pub fn support_leak(&self) -> f64 {
        let in_sigma: Vec<bool> = {
            let mut v = vec![false; self.sigma.dim()];
            for &j in &self.sigma_support {
                v[j] = true;
            }
            v
        };
        self.rho_support
            .iter()
            .map(|&i| {
                (0..self.sigma.dim())
                    .filter(|&j| !in_sigma[j])
                    .map(|j| self.weight(i, j))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn rho_full_rank(&self) -> bool {
        self.rho_support.len() == self.rho.dim()
    }

    /// `Tr ρ^{1-s} σ^s` on the supports.
    pub fn trace_power(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &i in &self.rho_support {
            let a = self.rho.values[i].powf(1.0 - s);
            for &j in &self.sigma_support {
                acc += a * self.sigma.values[j].powf(s) * self.weight(i, j);
            }
        }
        acc
    }

    /// `(Tr ρ^{1-s}σ^s, d/ds Tr ρ^{1-s}σ^s)`.
    pub fn trace_power_and_derivative(&self, s: f64) -> (f64, f64) {
        let (mut value, mut deriv) = (0.0, 0.0);
        for &i in &self.rho_support {
            let l = self.rho.values[i];
            let a = l.powf(1.0 - s);
            let log_l = l.ln();
            for &j in &self.sigma_support {
                let m = self.sigma.values[j];
                let term = a * m.powf(s) * self.weight(i, j);
                value += term;
                deriv += term * (m.ln() - log_l);
            }
        }
        (value, deriv)
    }

    /// `Tr ρ σ^{s/2} ρ^{-s} σ^{s/2}` with support powers.
    pub fn tilde_trace(&self, s: f64) -> f64 {
        let d = self.rho.dim();
        // σ^{s/2} expressed in the eigenbasis of ρ.
        let mut m = Matrix::zeros(d);
        for &j in &self.sigma_support {
            let w = self.sigma.values[j].powf(0.5 * s);
            for i in 0..d {
                let x = self.overlap[(i, j)] * w;
                for k in 0..d {
                    m[(i, k)] += x * self.overlap[(k, j)].conj();
                }
            }
        }
        let mut acc = 0.0;
        for i in 0..d {
            let li = self.rho.values[i];
            if li <= 0.0 {
                continue;
            }
            for &k in &self.rho_support {
                acc += li * self.rho.values[k].powf(-s) * m[(i, k)].norm_sqr();
            }
        }
        acc
    }

    /// `D(ρ‖σ)` assuming nested supports.
    pub fn relative_entropy_nested(&self) -> f64 {
        let mut acc = 0.0;
        for &i in &self.rho_support {
            let l = self.rho.values[i];
            acc += l * l.ln();
            for &j in &self.sigma_support {
                acc -= l * self.weight(i, j) * self.sigma.values[j].ln();
            }
        }
        acc.max(0.0)
    }
}

/// Ordered pair `(ρ, σ)`: null hypothesis ρ, alternative σ.
#[derive(Clone, Debug)]
pub struct HypothesisPair {
    rho: DensityMatrix,
    sigma: DensityMatrix,
    spectra: SpectralPair,
    support_ok: bool,
}

impl HypothesisPair {
    pub fn new(rho: DensityMatrix, sigma: DensityMatrix) -> Result<Self> {
        if rho.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: sigma.dim(),
            });
        }
        let spectra = SpectralPair::new(rho.op.eigendecompose(), sigma.op.eigendecompose());
        let support_ok = spectra.support_leak() <= SUPPORT_TOL;
        Ok(Self {
            rho,
            sigma,
            spectra,
            support_ok,
        })
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn sigma(&self) -> &DensityMatrix {
        &self.sigma
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// True iff `support(ρ) ⊆ support(σ)`.
    pub fn support_ok(&self) -> bool {
        self.support_ok
    }

    /// True when ρ has no zero eigenvalue, so `ρ^{-s}` needs no support convention.
    pub fn rho_full_rank(&self) -> bool {
        self.spectra.rho_full_rank()
    }

    pub fn rho_spectrum(&self) -> &EigenDecomposition {
        &self.spectra.rho
    }

    pub fn sigma_spectrum(&self) -> &EigenDecomposition {
        &self.spectra.sigma
    }

    /// The same states with the hypotheses exchanged.
    pub fn swapped(&self) -> Result<Self> {
        Self::new(self.sigma.clone(), self.rho.clone())
    }

    /// True when `Tr ρσ = 0`: every exponent is infinite.
    pub fn orthogonal_supports(&self) -> bool {
        self.spectra.trace_power(0.5) <= 0.0
    }

    /// `D(ρ‖σ) = Tr ρ(log ρ − log σ)` in nats; `+∞` when the support of ρ
    /// is not contained in the support of σ.
    pub fn relative_entropy(&self) -> f64 {
        if !self.support_ok {
            return f64::INFINITY;
        }
        self.spectra.relative_entropy_nested()
    }

    /// `φ(s) = log Tr ρ^{1-s} σ^s`.
    pub fn phi(&self, s: f64) -> Result<f64> {
        check_unit(s)?;
        let tr = self.spectra.trace_power(s);
        if tr <= 0.0 {
            return Err(degenerate(s, tr));
        }
        Ok(tr.ln())
    }

    /// Analytic `φ'(s)`; at the endpoints this is the one-sided derivative.
    pub fn phi_prime(&self, s: f64) -> Result<f64> {
        check_unit(s)?;
        let (tr, d) = self.spectra.trace_power_and_derivative(s);
        if tr <= 0.0 {
            return Err(degenerate(s, tr));
        }
        Ok(d / tr)
    }

    /// `log Tr ρ σ^{s/2} ρ^{-s} σ^{s/2}`, with `ρ^{-s}` taken on the support
    /// of ρ. Check [`Self::rho_full_rank`] before comparing against φ.
    pub fn phi_tilde(&self, s: f64) -> Result<f64> {
        check_unit(s)?;
        let tr = self.spectra.tilde_trace(s);
        if tr <= 0.0 {
            return Err(degenerate(s, tr));
        }
        Ok(tr.ln())
    }

    pub fn to_json(&self) -> PairJson {
        PairJson {
            rho: self.rho.op.to_json(),
            sigma: self.sigma.op.to_json(),
        }
    }
}

pub(crate) fn check_unit(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("s = {s} is outside [0, 1]")));
    }
    Ok(())
}

fn degenerate(s: f64, tr: f64) -> Error {
    Error::DegenerateSupport(format!("Tr ρ^(1-s) σ^s = {tr:e} at s = {s}"))
}

/// Pair file: `{"rho": <operator>, "sigma": <operator>}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairJson {
    pub rho: OperatorJson,
    pub sigma: OperatorJson,
}

impl PairJson {
    pub fn to_pair(&self) -> Result<HypothesisPair> {
        HypothesisPair::new((&self.rho).try_into()?, (&self.sigma).try_into()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classical_pair(p: &[f64], q: &[f64]) -> HypothesisPair {
        HypothesisPair::new(
            DensityMatrix::classical(p).unwrap(),
            DensityMatrix::classical(q).unwrap(),
        )
        .unwrap()
    }

    fn plus_vs_mixed() -> HypothesisPair {
        let h = Complex64::new(1.0, 0.0);
        HypothesisPair::new(
            DensityMatrix::pure(&[h, h]).unwrap(),
            DensityMatrix::maximally_mixed(2),
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_states() {
        assert!(matches!(
            DensityMatrix::classical(&[0.5, 0.6]),
            Err(Error::BadTrace { .. })
        ));
        assert!(matches!(
            DensityMatrix::classical(&[1.2, -0.2]),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let r = HypothesisPair::new(
            DensityMatrix::maximally_mixed(2),
            DensityMatrix::maximally_mixed(3),
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn identical_states() {
        let pair = classical_pair(&[0.7, 0.3], &[0.7, 0.3]);
        assert!(pair.relative_entropy().abs() < 1e-15);
        for s in [0.0, 0.3, 1.0] {
            assert!(pair.phi(s).unwrap().abs() < 1e-15);
            assert!(pair.phi_prime(s).unwrap().abs() < 1e-15);
            assert!(pair.phi_tilde(s).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn disjoint_supports_are_infinite() {
        let pair = classical_pair(&[1.0, 0.0], &[0.0, 1.0]);
        assert!(!pair.support_ok());
        assert_eq!(pair.relative_entropy(), f64::INFINITY);
        assert!(pair.orthogonal_supports());
        assert!(matches!(pair.phi(0.5), Err(Error::DegenerateSupport(_))));
    }

    #[test]
    fn pure_state_closed_form() {
        let pair = plus_vs_mixed();
        assert!(pair.support_ok());
        for s in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let expect = -s * 2f64.ln();
            assert!((pair.phi(s).unwrap() - expect).abs() < 1e-12, "s={s}");
        }
        assert!((pair.relative_entropy() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn s_outside_unit_interval() {
        let pair = classical_pair(&[0.7, 0.3], &[0.4, 0.6]);
        assert!(matches!(pair.phi(1.5), Err(Error::InvalidArgument(_))));
        assert!(matches!(pair.phi_tilde(-0.1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn singular_rho_flag() {
        let pair = classical_pair(&[1.0, 0.0], &[0.5, 0.5]);
        assert!(!pair.rho_full_rank());
        assert!(pair.support_ok());
        assert!(classical_pair(&[0.9, 0.1], &[0.5, 0.5]).rho_full_rank());
    }

    #[test]
    fn pair_json_round_trip() {
        let pair = plus_vs_mixed();
        let text = serde_json::to_string(&pair.to_json()).unwrap();
        let back: PairJson = serde_json::from_str(&text).unwrap();
        let again = back.to_pair().unwrap();
        assert_eq!(again.rho(), pair.rho());
        assert_eq!(again.sigma(), pair.sigma());
    }
}
