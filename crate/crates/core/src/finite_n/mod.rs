//! Finite-`n` experiments on tensor powers of a hypothesis pair.
//!
//! The threshold tests compare per-copy powers of the two hypotheses,
//!
//! ```text
//! T = { (σ^{⊗n} e^{-na})^p − (ρ^{⊗n})^p < 0 },   p = 1 − s (s ≤ 1/2) or p = s (s > 1/2),
//! ```
//!
//! and obey `Tr σ^{⊗n} T ≤ e^{n(1−s)a + nφ(s)}` and
//! `Tr ρ^{⊗n}(I − T) ≤ e^{−nsa + nφ(s)}`. Everything here measures those
//! errors exactly on the `d^n`-dimensional space.

mod neyman_pearson;
mod trace_inequalities;

pub use neyman_pearson::{np_tradeoff, np_tradeoff_oriented, optimal_beta_at, NeymanPearson, Orientation};
pub use trace_inequalities::{
    power_difference_gap, power_difference_suite, split_trace_gap, split_trace_suite, GapSuite, SuiteRow,
    TraceGap,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{hoeffding_bound, stein_exponent};
use crate::operator::{check_tensor_dim, HermitianOperator, DEFAULT_MAX_DIM};
use crate::state::{check_unit, HypothesisPair};

/// Eigenvalue slack allowed outside `[0, 1]` for a test.
pub const TEST_TOL: f64 = 1e-10;
/// Distance of projector eigenvalues from `{0, 1}`.
pub const PROJECTOR_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Projector,
    Randomized,
}

/// An operator `0 ≤ T ≤ I` on `n` copies; `T` accepts the null hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct TestOperator {
    op: HermitianOperator,
    copies: usize,
    kind: TestKind,
}

impl TestOperator {
    /// Validates the spectrum against `kind`.
    pub fn new(op: HermitianOperator, copies: usize, kind: TestKind) -> Result<Self> {
        let e = op.eigendecompose();
        let (hi, lo) = (e.values[0], e.min_value());
        if lo < -TEST_TOL || hi > 1.0 + TEST_TOL {
            return Err(Error::InvalidArgument(format!(
                "test spectrum [{lo:e}, {hi:e}] leaves [0, 1]"
            )));
        }
        if kind == TestKind::Projector {
            let off = e
                .values
                .iter()
                .map(|&v| v.abs().min((v - 1.0).abs()))
                .fold(0.0, f64::max);
            if off > PROJECTOR_TOL {
                return Err(Error::InvalidArgument(format!(
                    "projector eigenvalue is {off:e} away from {{0, 1}}"
                )));
            }
        }
        Ok(Self { op, copies, kind })
    }

    pub(crate) fn new_unchecked(op: HermitianOperator, copies: usize, kind: TestKind) -> Self {
        Self { op, copies, kind }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn kind(&self) -> TestKind {
        self.kind
    }

    pub fn complement(&self) -> TestOperator {
        let id = HermitianOperator::identity(self.op.dim());
        Self {
            op: id.sub(&self.op).expect("same dimension"),
            copies: self.copies,
            kind: self.kind,
        }
    }

    /// `‖T² − T‖_max`.
    pub fn idempotency_defect(&self) -> f64 {
        let m = self.op.matrix();
        m.matmul(m).sub(m).max_abs()
    }
}

/// First-kind error `α = Tr ρ^{⊗n}(I − T)` and second-kind `β = Tr σ^{⊗n} T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorPair {
    pub alpha: f64,
    pub beta: f64,
}

/// Which of the two threshold-test forms is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestForm {
    /// `s ≤ 1/2`, both operators raised to `1 − s`.
    Lower,
    /// `s > 1/2`, both operators raised to `s`.
    Upper,
}

impl TestForm {
    pub fn for_parameter(s: f64) -> Self {
        if s <= 0.5 {
            TestForm::Lower
        } else {
            TestForm::Upper
        }
    }
}

/// `(ρ^{⊗n}, σ^{⊗n})` for one `n`.
pub(crate) fn tensor_powers(
    n: usize,
    pair: &HypothesisPair,
) -> Result<(HermitianOperator, HermitianOperator)> {
    Ok((
        pair.rho().op().tensor_power(n)?,
        pair.sigma().op().tensor_power(n)?,
    ))
}

/// Projector test at threshold `a` and parameter `s ∈ [0, 1]`.
pub fn build_test(n: usize, a: f64, s: f64, pair: &HypothesisPair) -> Result<TestOperator> {
    check_unit(s)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument(format!("threshold a = {a} is not finite")));
    }
    check_tensor_dim(pair.dim(), n, DEFAULT_MAX_DIM)?;
    let p = match TestForm::for_parameter(s) {
        TestForm::Lower => 1.0 - s,
        TestForm::Upper => s,
    };
    // Per-copy powers, then tensor: (A^p)^{⊗n} = (A^{⊗n})^p.
    let x = pair
        .sigma_spectrum()
        .power(p)?
        .tensor_power(n)?
        .scale((-(n as f64) * a * p).exp());
    let y = pair.rho_spectrum().power(p)?.tensor_power(n)?;
    let diff = x.sub(&y)?;
    let proj = diff.eigendecompose().strictly_negative_projector();
    Ok(TestOperator::new_unchecked(proj, n, TestKind::Projector))
}

pub fn error_pair(test: &TestOperator, pair: &HypothesisPair) -> Result<ErrorPair> {
    let n = test.copies();
    let (rho_n, sigma_n) = tensor_powers(n, pair)?;
    error_pair_with(test, &rho_n, &sigma_n)
}

pub(crate) fn error_pair_with(
    test: &TestOperator,
    rho_n: &HermitianOperator,
    sigma_n: &HermitianOperator,
) -> Result<ErrorPair> {
    test.op().check_dim(rho_n)?;
    Ok(ErrorPair {
        alpha: rho_n.trace() - rho_n.trace_with(test.op()),
        beta: sigma_n.trace_with(test.op()),
    })
}

/// Achieved errors of one test form against its two exponential bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormCheck {
    pub form: TestForm,
    pub parameter: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `e^{−n u a + nφ(u)}`.
    pub alpha_bound: f64,
    /// `e^{n(1−u)a + nφ(u)}`.
    pub beta_bound: f64,
}

impl FormCheck {
    pub fn alpha_slack(&self) -> f64 {
        self.alpha_bound - self.alpha
    }

    pub fn beta_slack(&self) -> f64 {
        self.beta_bound - self.beta
    }
}

/// Both test forms at `u = min(s, 1−s)` and `t = max(s, 1−s)`, giving the
/// four slacks of one `(n, a, s)` cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub n: usize,
    pub a: f64,
    pub s: f64,
    pub lower: FormCheck,
    pub upper: FormCheck,
}

impl BoundCheck {
    pub fn slacks(&self) -> [f64; 4] {
        [
            self.lower.beta_slack(),
            self.lower.alpha_slack(),
            self.upper.beta_slack(),
            self.upper.alpha_slack(),
        ]
    }

    pub fn min_slack(&self) -> f64 {
        self.slacks().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.min_slack() >= -tol
    }
}

fn form_check(
    n: usize,
    a: f64,
    u: f64,
    pair: &HypothesisPair,
    rho_n: &HermitianOperator,
    sigma_n: &HermitianOperator,
) -> Result<FormCheck> {
    let test = build_test(n, a, u, pair)?;
    let errs = error_pair_with(&test, rho_n, sigma_n)?;
    let phi = pair.phi(u)?;
    let nf = n as f64;
    Ok(FormCheck {
        form: TestForm::for_parameter(u),
        parameter: u,
        alpha: errs.alpha,
        beta: errs.beta,
        alpha_bound: (-nf * u * a + nf * phi).exp(),
        beta_bound: (nf * (1.0 - u) * a + nf * phi).exp(),
    })
}

pub fn verify_exponential_bounds(n: usize, a: f64, s: f64, pair: &HypothesisPair) -> Result<BoundCheck> {
    check_unit(s)?;
    let (rho_n, sigma_n) = tensor_powers(n, pair)?;
    let u = s.min(1.0 - s);
    let t = s.max(1.0 - s);
    Ok(BoundCheck {
        n,
        a,
        s,
        lower: form_check(n, a, u, pair, &rho_n, &sigma_n)?,
        upper: form_check(n, a, t, pair, &rho_n, &sigma_n)?,
    })
}

/// Finite-`n` test at threshold `a = φ'(s_r)` for the Hoeffding optimum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingAchievability {
    pub n: usize,
    pub rate: f64,
    pub s_r: f64,
    pub a: f64,
    pub exponent: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl HoeffdingAchievability {
    /// `e^{−n H(r)}`.
    pub fn alpha_bound(&self) -> f64 {
        (-(self.n as f64) * self.exponent).exp()
    }

    /// `e^{−n r}`.
    pub fn beta_bound(&self) -> f64 {
        (-(self.n as f64) * self.rate).exp()
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        self.alpha <= self.alpha_bound() * (1.0 + rel_tol) && self.beta <= self.beta_bound() * (1.0 + rel_tol)
    }
}

pub fn hoeffding_achievability(n: usize, r: f64, pair: &HypothesisPair) -> Result<HoeffdingAchievability> {
    let point = hoeffding_bound(r, pair)?;
    if point.diverged {
        return Err(Error::InvalidArgument(format!(
            "Hoeffding bound diverges at r = {r}; no finite threshold"
        )));
    }
    let s_r = point.s_star;
    let a = pair.phi_prime(s_r)?;
    let test = build_test(n, a, s_r, pair)?;
    let errs = error_pair(&test, pair)?;
    Ok(HoeffdingAchievability {
        n,
        rate: r,
        s_r,
        a,
        exponent: point.value,
        alpha: errs.alpha,
        beta: errs.beta,
    })
}

/// One row of the Stein convergence table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinRow {
    pub n: usize,
    pub beta_star: f64,
    /// `−(1/n) log β*_n(ε)`.
    pub exponent: f64,
}

/// Achievability test at `a = −D + margin` for one `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinAchievability {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_bound: f64,
    pub beta_bound: f64,
}

/// Parameters of the small-`s` achievability argument.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinArgument {
    pub margin: f64,
    pub a: f64,
    pub s: f64,
    /// `−s a + φ(s)`, negative for a decaying first-kind error.
    pub alpha_rate: f64,
    /// `(1 − s) a + φ(s)`.
    pub beta_rate: f64,
    /// `−(D − margin)(1 − s)`, which `beta_rate` must undercut.
    pub beta_target: f64,
}

impl SteinArgument {
    pub fn holds(&self) -> bool {
        self.alpha_rate < 0.0 && self.beta_rate < self.beta_target
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinStudy {
    pub epsilon: f64,
    pub relative_entropy: f64,
    pub rows: Vec<SteinRow>,
    pub argument: Option<SteinArgument>,
    pub achievability: Vec<SteinAchievability>,
}

/// Margin below `D` used for the achievability threshold, as a fraction of `D`.
pub const STEIN_MARGIN_FRACTION: f64 = 0.25;

/// `−(1/n) log β*_n(ε)` for `n = 1..=n_max`, plus the threshold tests at
/// `a = −D + margin`.
pub fn stein_convergence(epsilon: f64, n_max: usize, pair: &HypothesisPair) -> Result<SteinStudy> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    check_tensor_dim(pair.dim(), n_max, DEFAULT_MAX_DIM)?;
    let d = stein_exponent(pair);
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let np = np_tradeoff(n, epsilon, pair)?;
        rows.push(SteinRow {
            n,
            beta_star: np.beta,
            exponent: -np.beta.ln() / n as f64,
        });
    }

    let mut argument = None;
    let mut achievability = Vec::new();
    if d.is_finite() && d > 0.0 {
        let margin = STEIN_MARGIN_FRACTION * d;
        let a = -d + margin;
        let arg = best_stein_parameter(a, margin, d, pair)?;
        for n in 1..=n_max {
            let test = build_test(n, a, arg.s, pair)?;
            let errs = error_pair(&test, pair)?;
            let nf = n as f64;
            achievability.push(SteinAchievability {
                n,
                alpha: errs.alpha,
                beta: errs.beta,
                alpha_bound: (nf * arg.alpha_rate).exp(),
                beta_bound: (nf * arg.beta_rate).exp(),
            });
        }
        argument = Some(arg);
    }

    Ok(SteinStudy {
        epsilon,
        relative_entropy: d,
        rows,
        argument,
        achievability,
    })
}

/// Picks `s ∈ (0, 1/2]` with the fastest first-kind decay among those that
/// satisfy both rate conditions.
fn best_stein_parameter(a: f64, margin: f64, d: f64, pair: &HypothesisPair) -> Result<SteinArgument> {
    let mut best: Option<SteinArgument> = None;
    for k in 1..=500 {
        let s = k as f64 / 1000.0;
        let phi = pair.phi(s)?;
        let cand = SteinArgument {
            margin,
            a,
            s,
            alpha_rate: -s * a + phi,
            beta_rate: (1.0 - s) * a + phi,
            beta_target: -(d - margin) * (1.0 - s),
        };
        if !cand.holds() {
            continue;
        }
        if best.is_none_or(|b| cand.alpha_rate < b.alpha_rate) {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| {
        Error::InvalidArgument("no s in (0, 1/2] satisfies the achievability conditions".into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::DensityMatrix;
    use num_complex::Complex64;

    fn classical(p: &[f64], q: &[f64]) -> HypothesisPair {
        HypothesisPair::new(
            DensityMatrix::classical(p).unwrap(),
            DensityMatrix::classical(q).unwrap(),
        )
        .unwrap()
    }

    fn qubit(bloch: [f64; 3]) -> DensityMatrix {
        let [x, y, z] = bloch;
        let m = crate::operator::Matrix::from_row_major(
            2,
            vec![
                Complex64::new((1.0 + z) / 2.0, 0.0),
                Complex64::new(x / 2.0, -y / 2.0),
                Complex64::new(x / 2.0, y / 2.0),
                Complex64::new((1.0 - z) / 2.0, 0.0),
            ],
        );
        DensityMatrix::new(HermitianOperator::new(m).unwrap()).unwrap()
    }

    fn noncommuting() -> HypothesisPair {
        HypothesisPair::new(qubit([0.0, 0.0, 0.6]), qubit([0.5, 0.2, -0.1])).unwrap()
    }

    #[test]
    fn identical_states_give_empty_test() {
        let pair = classical(&[0.6, 0.4], &[0.6, 0.4]);
        let t = build_test(1, 0.0, 0.3, &pair).unwrap();
        assert_eq!(t.op().matrix().max_abs(), 0.0);
        let e = error_pair(&t, &pair).unwrap();
        assert!((e.alpha - 1.0).abs() < 1e-15 && e.beta == 0.0);
    }

    #[test]
    fn classical_test_is_outcome_indicator() {
        let pair = classical(&[0.9, 0.1], &[0.5, 0.5]);
        let t = build_test(1, 0.0, 0.3, &pair).unwrap();
        // 0.5^0.7 < 0.9^0.7 on the first outcome only.
        assert!(
            t.op()
                .matrix()
                .sub(HermitianOperator::diag(&[1.0, 0.0]).matrix())
                .max_abs()
                < 1e-15
        );
        let e = error_pair(&t, &pair).unwrap();
        assert!((e.alpha - 0.1).abs() < 1e-15);
        assert!((e.beta - 0.5).abs() < 1e-15);
    }

    #[test]
    fn built_test_is_projector() {
        let pair = noncommuting();
        let t = build_test(2, 0.1, 0.4, &pair).unwrap();
        assert_eq!(t.op().dim(), 4);
        assert!(t.idempotency_defect() < 1e-8);
        assert!(TestOperator::new(t.op().clone(), 2, TestKind::Projector).is_ok());
    }

    #[test]
    fn trivial_tests() {
        let pair = noncommuting();
        let id = TestOperator::new(HermitianOperator::identity(2), 1, TestKind::Projector).unwrap();
        let e = error_pair(&id, &pair).unwrap();
        assert!(e.alpha.abs() < 1e-15 && (e.beta - 1.0).abs() < 1e-15);
        let e = error_pair(&id.complement(), &pair).unwrap();
        assert!((e.alpha - 1.0).abs() < 1e-15 && e.beta.abs() < 1e-15);
    }

    #[test]
    fn test_validation() {
        let bad = HermitianOperator::diag(&[1.5, 0.0]);
        assert!(TestOperator::new(bad, 1, TestKind::Randomized).is_err());
        let half = HermitianOperator::diag(&[0.5, 0.0]);
        assert!(TestOperator::new(half.clone(), 1, TestKind::Projector).is_err());
        assert!(TestOperator::new(half, 1, TestKind::Randomized).is_ok());
    }

    #[test]
    fn error_pair_dimension_mismatch() {
        let pair = noncommuting();
        let t = TestOperator::new(HermitianOperator::identity(3), 1, TestKind::Projector).unwrap();
        assert!(matches!(
            error_pair(&t, &pair),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn guard_is_enforced() {
        let pair = noncommuting();
        assert!(matches!(
            build_test(13, 0.0, 0.3, &pair),
            Err(Error::DimensionGuard { .. })
        ));
    }

    #[test]
    fn identical_states_bounds_are_trivial() {
        let pair = classical(&[0.6, 0.4], &[0.6, 0.4]);
        for n in 1..=3 {
            let c = verify_exponential_bounds(n, 0.0, 0.3, &pair).unwrap();
            assert!((c.lower.alpha_bound - 1.0).abs() < 1e-12);
            assert!(c.holds(1e-9));
        }
    }

    #[test]
    fn noncommuting_bounds_small_grid() {
        let pair = noncommuting();
        for n in 1..=3 {
            for s in [0.2, 0.5, 0.8] {
                for a in [-0.2, 0.0, 0.2] {
                    let c = verify_exponential_bounds(n, a, s, &pair).unwrap();
                    assert!(c.holds(1e-9), "n={n} s={s} a={a}: {:?}", c.slacks());
                }
            }
        }
    }

    #[test]
    fn hoeffding_achievability_small_n() {
        let pair = noncommuting();
        for n in 1..=3 {
            let h = hoeffding_achievability(n, 0.02, &pair).unwrap();
            assert!(h.holds(1e-9), "{h:?}");
        }
    }

    #[test]
    fn stein_identical_states() {
        let pair = classical(&[0.6, 0.4], &[0.6, 0.4]);
        let study = stein_convergence(0.1, 3, &pair).unwrap();
        for row in &study.rows {
            let expect = -(0.9f64).ln() / row.n as f64;
            assert!((row.exponent - expect).abs() < 1e-9, "{row:?}");
        }
        assert!(study.argument.is_none());
    }

    #[test]
    fn stein_argument_conditions() {
        let pair = noncommuting();
        let study = stein_convergence(0.1, 3, &pair).unwrap();
        let arg = study.argument.unwrap();
        assert!(arg.holds());
        assert!(arg.s > 0.0 && arg.s <= 0.5);
        for row in &study.achievability {
            assert!(row.alpha <= row.alpha_bound * (1.0 + 1e-9));
            assert!(row.beta <= row.beta_bound * (1.0 + 1e-9));
        }
    }
}
