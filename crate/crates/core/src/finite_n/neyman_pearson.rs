//! Exact optimal trade-off `β*_n(ε) = min { Tr σ^{⊗n} T : Tr ρ^{⊗n}(I − T) ≤ ε }`.
//!
//! The optimum is attained by `{ρ^{⊗n} − λσ^{⊗n} > 0}` randomized on the
//! eigenvectors that cross zero at the optimal `λ`. The first-kind error of
//! `{ρ − λσ > 0}` is nondecreasing in `λ`, so `λ` is bracketed and the two
//! bracketing projectors are mixed to hit `ε` exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{EigenDecomposition, HermitianOperator};
use crate::state::HypothesisPair;

use super::{tensor_powers, ErrorPair, TestKind, TestOperator};

const MAX_REFINEMENTS: usize = 200;
/// Mixing the tests at `λ_lo < λ_hi` overshoots `β*` by at most a factor
/// `λ_hi / λ_lo`, so this is also the relative accuracy of `β`.
const BRACKET_REL_WIDTH: f64 = 1e-11;
const MAX_DOUBLINGS: usize = 80;

/// Which error is constrained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Minimize `Tr σ T` subject to `Tr ρ(I − T) ≤ ε`; its exponent tends to `D(ρ‖σ)`.
    #[default]
    Standard,
    /// Minimize `Tr ρ(I − T)` subject to `Tr σ T ≤ ε`.
    Swapped,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeymanPearson {
    pub n: usize,
    pub epsilon: f64,
    /// The optimal constrained error.
    pub beta: f64,
    /// The achieved value of the constrained error (equals `epsilon`).
    pub alpha: f64,
    /// Multiplier at which the optimal test is randomized.
    pub lambda: f64,
    pub test: TestOperator,
}

impl NeymanPearson {
    pub fn errors(&self) -> ErrorPair {
        ErrorPair {
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

struct Probe {
    lambda: f64,
    alpha: f64,
    beta: f64,
    proj: HermitianOperator,
    eig: Option<EigenDecomposition>,
}

pub fn np_tradeoff(n: usize, epsilon: f64, pair: &HypothesisPair) -> Result<NeymanPearson> {
    np_tradeoff_oriented(n, epsilon, pair, Orientation::Standard)
}

/// With [`Orientation::Swapped`] the roles of the hypotheses are exchanged
/// and the returned test accepts σ.
pub fn np_tradeoff_oriented(
    n: usize,
    epsilon: f64,
    pair: &HypothesisPair,
    orientation: Orientation,
) -> Result<NeymanPearson> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon = {epsilon} is outside (0, 1)"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let (rho_n, sigma_n) = match orientation {
        Orientation::Standard => tensor_powers(n, pair)?,
        Orientation::Swapped => {
            let (r, s) = tensor_powers(n, pair)?;
            (s, r)
        }
    };
    solve(n, epsilon, &rho_n, &sigma_n)
}

/// `{C > 0}` by the exact sign. A cutoff would drop whole clusters whose
/// eigenvalues are small only because their `σ`-weight is, shifting the
/// optimal `λ`; eigenvalues at rounding level cost only their own size.
fn positive_sign_projector(eig: &EigenDecomposition) -> HermitianOperator {
    eig.map(|v| if v > 0.0 { 1.0 } else { 0.0 })
}

/// First-order prediction of the `λ` at which the first-kind error passes
/// `ε`, from one end of the bracket. Each eigenvalue of `ρ − λσ` moves with
/// slope `−<v|σ|v>` and carries first-kind weight `<v|ρ|v>` across zero.
fn predict_crossing(
    end: &Probe,
    above: bool,
    epsilon: f64,
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
) -> Option<f64> {
    let eig = end.eig.as_ref()?;
    let sv = sigma.matrix().matmul(&eig.vectors);
    let rv = rho.matrix().matmul(&eig.vectors);
    let d = eig.dim();
    let quad = |m: &crate::operator::Matrix, k: usize| -> f64 {
        (0..d).map(|i| (eig.vectors[(i, k)].conj() * m[(i, k)]).re).sum()
    };
    let mut moves: Vec<(f64, f64)> = eig
        .values
        .iter()
        .enumerate()
        .filter(|&(_, &c)| (c > 0.0) == above)
        .filter_map(|(k, &c)| {
            let slope = quad(&sv, k);
            (slope > 0.0).then(|| (end.lambda + c / slope, quad(&rv, k)))
        })
        .collect();
    if above {
        moves.sort_by(|x, y| x.0.total_cmp(&y.0));
    } else {
        moves.sort_by(|x, y| y.0.total_cmp(&x.0));
    }
    let mut alpha = end.alpha;
    for (x, w) in moves {
        if above {
            alpha += w;
            if alpha > epsilon {
                return Some(x);
            }
        } else {
            alpha -= w;
            if alpha <= epsilon {
                return Some(x);
            }
        }
    }
    None
}

/// `β*_n(α)` at the first-kind error `α` achieved by some other test; `None`
/// when `α` is outside `(0, 1)`. No test with first-kind error `α` has a
/// smaller second-kind error.
pub fn optimal_beta_at(n: usize, alpha: f64, pair: &HypothesisPair) -> Result<Option<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Ok(None);
    }
    Ok(Some(np_tradeoff(n, alpha, pair)?.beta))
}

fn solve(
    n: usize,
    epsilon: f64,
    rho_n: &HermitianOperator,
    sigma_n: &HermitianOperator,
) -> Result<NeymanPearson> {
    let rho_tr = rho_n.trace();
    let probe = |lambda: f64, warm: Option<&EigenDecomposition>| -> Probe {
        let c = rho_n.sub(&sigma_n.scale(lambda)).expect("same dimension");
        let eig = match warm {
            Some(w) => c.eigendecompose_near(w),
            None => c.eigendecompose(),
        };
        let proj = positive_sign_projector(&eig);
        Probe {
            lambda,
            alpha: rho_tr - rho_n.trace_with(&proj),
            beta: sigma_n.trace_with(&proj),
            proj,
            eig: Some(eig),
        }
    };

    let mut lo = probe(1.0, None);
    let mut hi;
    if lo.alpha <= epsilon {
        hi = None;
        for _ in 0..MAX_DOUBLINGS {
            let p = probe(lo.lambda * 2.0, lo.eig.as_ref());
            if p.alpha > epsilon {
                hi = Some(p);
                break;
            }
            lo = p;
        }
    } else {
        hi = Some(lo);
        lo = probe(0.5, hi.as_ref().and_then(|h| h.eig.as_ref()));
        let mut found = lo.alpha <= epsilon;
        for _ in 0..MAX_DOUBLINGS {
            if found {
                break;
            }
            let p = probe(lo.lambda * 0.5, lo.eig.as_ref());
            hi = Some(lo);
            lo = p;
            found = lo.alpha <= epsilon;
        }
        if !found {
            // {ρ > 0} itself.
            let proj = rho_n.eigendecompose().strictly_positive_projector();
            lo = Probe {
                lambda: 0.0,
                alpha: rho_tr - rho_n.trace_with(&proj),
                beta: sigma_n.trace_with(&proj),
                proj,
                eig: None,
            };
        }
    }

    // No λ pushes α above ε: mix with the rejecting test T = 0 instead.
    let mut hi = hi.unwrap_or_else(|| Probe {
        lambda: f64::INFINITY,
        alpha: rho_tr,
        beta: 0.0,
        proj: HermitianOperator::zeros(rho_n.dim()),
        eig: None,
    });

    if lo.lambda > 0.0 && hi.lambda.is_finite() {
        // Tensor powers cross zero in whole eigenvalue clusters, so α is a
        // step function and bisection gains one bit per probe. Newton steps
        // on the predicted crossing replace it; a midpoint step is taken
        // when they stall.
        let mut stalls = 0;
        for _ in 0..MAX_REFINEMENTS {
            let width = hi.lambda - lo.lambda;
            if width <= BRACKET_REL_WIDTH * hi.lambda {
                break;
            }
            let newton = if stalls >= 2 {
                None
            } else {
                let from_lo = predict_crossing(&lo, true, epsilon, rho_n, sigma_n);
                let from_hi = predict_crossing(&hi, false, epsilon, rho_n, sigma_n);
                match (from_lo, from_hi) {
                    (Some(l), Some(h)) => Some(if l - lo.lambda <= hi.lambda - h { l } else { h }),
                    (l, h) => l.or(h),
                }
            };
            let margin = (0.25 * BRACKET_REL_WIDTH * hi.lambda).min(0.25 * width);
            let mid = match newton {
                Some(x) if x.is_finite() => x.clamp(lo.lambda + margin, hi.lambda - margin),
                _ => {
                    stalls = 0;
                    (lo.lambda * hi.lambda).sqrt()
                }
            };
            if !(mid > lo.lambda && mid < hi.lambda) {
                break;
            }
            let warm = lo.eig.as_ref().or(hi.eig.as_ref());
            let p = probe(mid, warm);
            if p.alpha <= epsilon {
                lo = p;
            } else {
                hi = p;
            }
            if hi.lambda - lo.lambda > 0.5 * width {
                stalls += 1;
            } else {
                stalls = 0;
            }
        }
    }

    // γ·T_lo + (1 − γ)·T_hi has first-kind error exactly ε.
    let span = hi.alpha - lo.alpha;
    let gamma = if span > 0.0 {
        ((hi.alpha - epsilon) / span).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let op = lo.proj.scale(gamma).add(&hi.proj.scale(1.0 - gamma))?;
    let beta = (gamma * lo.beta + (1.0 - gamma) * hi.beta).max(0.0);
    let alpha = gamma * lo.alpha + (1.0 - gamma) * hi.alpha;
    let lambda = if hi.lambda.is_finite() {
        (lo.lambda * hi.lambda).sqrt()
    } else {
        lo.lambda
    };
    Ok(NeymanPearson {
        n,
        epsilon,
        beta,
        alpha,
        lambda,
        test: TestOperator::new_unchecked(op, n, TestKind::Randomized),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::DensityMatrix;

    fn classical(p: &[f64], q: &[f64]) -> HypothesisPair {
        HypothesisPair::new(
            DensityMatrix::classical(p).unwrap(),
            DensityMatrix::classical(q).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identical_states() {
        let pair = classical(&[0.7, 0.3], &[0.7, 0.3]);
        for n in 1..=3 {
            for eps in [0.05, 0.1, 0.5] {
                let np = np_tradeoff(n, eps, &pair).unwrap();
                assert!(
                    (np.beta - (1.0 - eps)).abs() < 1e-12,
                    "n={n} eps={eps}: {}",
                    np.beta
                );
                assert!((np.alpha - eps).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn epsilon_range() {
        let pair = classical(&[0.7, 0.3], &[0.4, 0.6]);
        for eps in [0.0, 1.0, -0.2, f64::NAN] {
            assert!(matches!(
                np_tradeoff(1, eps, &pair),
                Err(Error::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn single_copy_classical() {
        // Likelihood ratios 0.9/0.5 and 0.1/0.5: at ε = 0.05 half of the
        // second outcome is rejected, β = 0.5 + 0.5 * 0.5.
        let pair = classical(&[0.9, 0.1], &[0.5, 0.5]);
        let np = np_tradeoff(1, 0.05, &pair).unwrap();
        assert!((np.beta - 0.75).abs() < 1e-12, "{}", np.beta);
    }

    #[test]
    fn disjoint_supports_reach_zero() {
        let pair = classical(&[1.0, 0.0], &[0.0, 1.0]);
        let np = np_tradeoff(2, 0.1, &pair).unwrap();
        assert!(np.beta.abs() < 1e-12);
    }

    #[test]
    fn swapped_orientation_is_standard_on_swapped_pair() {
        let pair = classical(&[0.8, 0.2], &[0.3, 0.7]);
        let a = np_tradeoff_oriented(2, 0.1, &pair, Orientation::Swapped).unwrap();
        let b = np_tradeoff(2, 0.1, &pair.swapped().unwrap()).unwrap();
        assert!((a.beta - b.beta).abs() < 1e-12);
    }

    #[test]
    fn randomized_test_is_valid() {
        let pair = classical(&[0.8, 0.2], &[0.3, 0.7]);
        let np = np_tradeoff(3, 0.2, &pair).unwrap();
        assert!(TestOperator::new(np.test.op().clone(), 3, TestKind::Randomized).is_ok());
        let e = super::super::error_pair(&np.test, &pair).unwrap();
        assert!((e.alpha - 0.2).abs() < 1e-12);
        assert!((e.beta - np.beta).abs() < 1e-12);
    }
}
