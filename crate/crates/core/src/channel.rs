//! Classical-quantum channels `x ↦ ρ_x` and their random-coding exponent.
//!
//! For an input distribution `p` the averaged output is `σ_p = Σ_x p(x) ρ_x`,
//! the block operators are `R = ⊕_x p(x) ρ_x` and `S_p = ⊕_x p(x) σ_p`, and
//!
//! ```text
//! φ_p(s) = log Tr R^{1-s} S_p^s = log Σ_x p(x) Tr ρ_x^{1-s} σ_p^s.
//! ```
//!
//! Testing `R^{⊗n}` against `N S_p^{⊗n}` with `N = e^{na}` bounds both terms
//! of `2(1 − Tr R^{⊗n} T) + 4N Tr S_p^{⊗n} T` by constants times
//! `e^{n(sa + φ_p(s))}`, so the exponent is `E_p(a) = max_s (−sa − φ_p(s))`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{fmt_f64, LogBase, Optimum};
use crate::finite_n::{build_test, error_pair};
use crate::operator::{
    check_tensor_dim, EigenDecomposition, HermitianOperator, OperatorJson, DEFAULT_MAX_DIM,
};
use crate::optimize::{maximize, GRID_POINTS};
use crate::state::{check_unit, DensityMatrix, HypothesisPair, SpectralPair};

/// Largest alphabet accepted by [`optimize_input`].
pub const MAX_OPTIMIZED_ALPHABET: usize = 8;
/// Coarsest simplex step of the input search.
pub const SIMPLEX_STEP: f64 = 1.0 / 50.0;
const SIMPLEX_MIN_STEP: f64 = 1e-5;
const DISTRIBUTION_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CQChannel {
    letters: Vec<DensityMatrix>,
    spectra: Vec<EigenDecomposition>,
}

impl CQChannel {
    pub fn new(letters: Vec<DensityMatrix>) -> Result<Self> {
        let first = letters
            .first()
            .ok_or_else(|| Error::InvalidArgument("channel needs at least one letter".into()))?;
        let dim = first.dim();
        if let Some(bad) = letters.iter().find(|l| l.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let spectra = letters.iter().map(|l| l.op().eigendecompose()).collect();
        Ok(Self { letters, spectra })
    }

    pub fn letters(&self) -> &[DensityMatrix] {
        &self.letters
    }

    pub fn alphabet_size(&self) -> usize {
        self.letters.len()
    }

    pub fn dim(&self) -> usize {
        self.letters[0].dim()
    }

    /// Diagonal embedding of a classical channel `W[x][y] = P(y|x)`.
    pub fn classical(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| DensityMatrix::classical(r))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

/// A probability vector over the channel inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDistribution(Vec<f64>);

impl InputDistribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument("input distribution is empty".into()));
        }
        if let Some(x) = p.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "probability {x} is negative or not finite"
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self(p))
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_input(channel: &CQChannel, p: &InputDistribution) -> Result<()> {
    if p.len() != channel.alphabet_size() {
        return Err(Error::DimensionMismatch {
            expected: channel.alphabet_size(),
            found: p.len(),
        });
    }
    Ok(())
}

/// `σ_p = Σ_x p(x) ρ_x`.
pub fn sigma_p(channel: &CQChannel, p: &InputDistribution) -> Result<DensityMatrix> {
    check_input(channel, p)?;
    let mut acc = HermitianOperator::zeros(channel.dim());
    for (rho, &px) in channel.letters.iter().zip(p.as_slice()) {
        acc = acc.add(&rho.op().scale(px))?;
    }
    Ok(DensityMatrix::new_unchecked(acc))
}

/// Block-diagonal `(R, S_p)` of dimension `k·d`.
pub fn block_operators(channel: &CQChannel, p: &InputDistribution) -> Result<(DensityMatrix, DensityMatrix)> {
    let avg = sigma_p(channel, p)?;
    let r: Vec<HermitianOperator> = channel
        .letters
        .iter()
        .zip(p.as_slice())
        .map(|(rho, &px)| rho.op().scale(px))
        .collect();
    let s: Vec<HermitianOperator> = p.as_slice().iter().map(|&px| avg.op().scale(px)).collect();
    Ok((
        DensityMatrix::new_unchecked(HermitianOperator::direct_sum(&r)),
        DensityMatrix::new_unchecked(HermitianOperator::direct_sum(&s)),
    ))
}

/// Channel, input distribution and the per-letter spectra against `σ_p`.
struct AtInput<'a> {
    p: &'a [f64],
    letters: Vec<Option<SpectralPair>>,
}

impl<'a> AtInput<'a> {
    fn new(channel: &CQChannel, p: &'a InputDistribution) -> Result<Self> {
        let avg_eig = sigma_p(channel, p)?.op().eigendecompose();
        let letters = channel
            .spectra
            .iter()
            .zip(p.as_slice())
            .map(|(e, &px)| (px > 0.0).then(|| SpectralPair::new(e.clone(), avg_eig.clone())))
            .collect();
        Ok(Self {
            p: p.as_slice(),
            letters,
        })
    }

    fn phi(&self, s: f64) -> Result<f64> {
        let tr: f64 = self
            .letters
            .iter()
            .zip(self.p)
            .filter_map(|(l, &px)| l.as_ref().map(|l| px * l.trace_power(s)))
            .sum();
        if tr <= 0.0 {
            return Err(Error::DegenerateSupport(format!(
                "Σ_x p(x) Tr ρ_x^(1-s) σ_p^s = {tr:e} at s = {s}"
            )));
        }
        Ok(tr.ln())
    }

    fn holevo(&self) -> f64 {
        self.letters
            .iter()
            .zip(self.p)
            .filter_map(|(l, &px)| l.as_ref().map(|l| px * l.relative_entropy_nested()))
            .sum()
    }

    fn exponent(&self, a: f64) -> Optimum {
        let m = maximize(
            |s| -s * a - self.phi(s).unwrap_or(f64::NAN),
            0.0,
            1.0,
            GRID_POINTS,
        );
        Optimum {
            value: m.value.max(0.0),
            s: m.arg,
        }
    }
}

/// `φ_p(s)` by the per-letter sum.
pub fn phi_p(s: f64, channel: &CQChannel, p: &InputDistribution) -> Result<f64> {
    check_unit(s)?;
    AtInput::new(channel, p)?.phi(s)
}

/// `φ_p(s)` evaluated on the block operators, `log Tr R^{1-s} S_p^s`.
pub fn phi_p_block(s: f64, channel: &CQChannel, p: &InputDistribution) -> Result<f64> {
    let (r, sp) = block_operators(channel, p)?;
    HypothesisPair::new(r, sp)?.phi(s)
}

fn check_rate(a: f64) -> Result<()> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "rate a = {a} must be finite and >= 0"
        )));
    }
    Ok(())
}

/// `E_p(a) = max_{0≤s≤1} (−s a − φ_p(s))` with its maximizer.
pub fn channel_exponent(a: f64, channel: &CQChannel, p: &InputDistribution) -> Result<Optimum> {
    check_rate(a)?;
    Ok(AtInput::new(channel, p)?.exponent(a))
}

/// `Σ_x p(x) D(ρ_x‖σ_p)`, the rate at which `E_p` reaches zero.
pub fn holevo_quantity(channel: &CQChannel, p: &InputDistribution) -> Result<f64> {
    Ok(AtInput::new(channel, p)?.holevo())
}

/// Best input distribution found by the simplex search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputOptimum {
    pub p: Vec<f64>,
    pub exponent: f64,
    pub s: f64,
    /// The search is a heuristic; no global optimality is claimed.
    pub heuristic: bool,
}

/// Multi-start coordinate ascent over the simplex: transfers of mass
/// `1/50` between letters, then halving steps down to `1e-5`.
pub fn optimize_input(a: f64, channel: &CQChannel) -> Result<InputOptimum> {
    check_rate(a)?;
    let k = channel.alphabet_size();
    if k > MAX_OPTIMIZED_ALPHABET {
        return Err(Error::InvalidArgument(format!(
            "alphabet size {k} exceeds the optimizer limit {MAX_OPTIMIZED_ALPHABET}"
        )));
    }
    let eval = |p: &[f64]| -> Result<Optimum> {
        let dist = InputDistribution(p.to_vec());
        Ok(AtInput::new(channel, &dist)?.exponent(a))
    };

    let mut starts = vec![vec![1.0 / k as f64; k]];
    for i in 0..k {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        starts.push(v);
    }

    let mut best: Option<(Vec<f64>, Optimum)> = None;
    for start in starts {
        let mut p = start;
        let mut cur = eval(&p)?;
        let mut step = SIMPLEX_STEP;
        while step >= SIMPLEX_MIN_STEP {
            loop {
                let mut improved: Option<(Vec<f64>, Optimum)> = None;
                for from in 0..k {
                    let delta = step.min(p[from]);
                    if delta <= 0.0 {
                        continue;
                    }
                    for to in 0..k {
                        if to == from {
                            continue;
                        }
                        let mut q = p.clone();
                        q[from] -= delta;
                        q[to] += delta;
                        let v = eval(&q)?;
                        let target = improved.as_ref().map_or(cur.value, |(_, o)| o.value);
                        if v.value > target + 1e-13 {
                            improved = Some((q, v));
                        }
                    }
                }
                match improved {
                    Some((q, v)) => {
                        p = q;
                        cur = v;
                    }
                    None => break,
                }
            }
            step /= 2.0;
        }
        if best.as_ref().is_none_or(|(_, b)| cur.value > b.value + 1e-13) {
            best = Some((p, cur));
        }
    }
    let (p, opt) = best.expect("at least one start");
    Ok(InputOptimum {
        p,
        exponent: opt.value,
        s: opt.s,
        heuristic: true,
    })
}

/// Finite-blocklength terms of `2(1 − Tr R^{⊗n} T) + 4N Tr S_p^{⊗n} T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlocklengthReport {
    pub n: usize,
    pub a: f64,
    pub s: f64,
    /// `1 − Tr R^{⊗n} T`.
    pub miss: f64,
    /// `Tr S_p^{⊗n} T`.
    pub false_accept: f64,
    /// `2(1 − Tr R^{⊗n} T)`.
    pub first_term: f64,
    /// `4 N Tr S_p^{⊗n} T`.
    pub second_term: f64,
    /// `e^{n(sa + φ_p(s))}`.
    pub bound: f64,
    /// `−(sa + φ_p(s))`.
    pub exponent_at_s: f64,
    /// `E_p(a)`.
    pub channel_exponent: f64,
}

/// Relative slack allowed on the term bounds.
pub const TERM_TOL: f64 = 1e-9;

impl BlocklengthReport {
    pub fn first_slack(&self) -> f64 {
        2.0 * self.bound - self.first_term
    }

    pub fn second_slack(&self) -> f64 {
        4.0 * self.bound - self.second_term
    }

    /// Each term stays within its constant times the bound.
    pub fn holds(&self) -> bool {
        self.first_term <= 2.0 * self.bound * (1.0 + TERM_TOL)
            && self.second_term <= 4.0 * self.bound * (1.0 + TERM_TOL)
    }

    /// `−(1/n) log` of the sum of both terms.
    pub fn achieved_exponent(&self) -> f64 {
        -(self.first_term + self.second_term).ln() / self.n as f64
    }
}

/// Builds the threshold test of `R^{⊗n}` against `N S_p^{⊗n}` and measures
/// both terms of the coding bound.
pub fn finite_blocklength_check(
    n: usize,
    a: f64,
    s: f64,
    channel: &CQChannel,
    p: &InputDistribution,
) -> Result<BlocklengthReport> {
    check_rate(a)?;
    check_unit(s)?;
    let at = AtInput::new(channel, p)?;
    check_tensor_dim(channel.alphabet_size() * channel.dim(), n, DEFAULT_MAX_DIM)?;
    let (r, sp) = block_operators(channel, p)?;
    let pair = HypothesisPair::new(r, sp)?;
    // σ e^{-na'} = N S_p with N = e^{na} means a' = −a.
    let test = build_test(n, -a, s, &pair)?;
    let errs = error_pair(&test, &pair)?;
    let nf = n as f64;
    let size = (nf * a).exp();
    let phi = at.phi(s)?;
    Ok(BlocklengthReport {
        n,
        a,
        s,
        miss: errs.alpha,
        false_accept: errs.beta,
        first_term: 2.0 * errs.alpha,
        second_term: 4.0 * size * errs.beta,
        bound: (nf * (s * a + phi)).exp(),
        exponent_at_s: -(s * a + phi),
        channel_exponent: at.exponent(a).value,
    })
}

/// `(a, E_p(a), s*)` rows, optionally with an optimized input per rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelCurve {
    pub rows: Vec<ChannelCurveRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelCurveRow {
    pub a: f64,
    pub exponent: f64,
    pub s_star: f64,
    pub p_star: Vec<f64>,
}

impl ChannelCurve {
    pub fn at_input(rates: &[f64], channel: &CQChannel, p: &InputDistribution) -> Result<Self> {
        let at = AtInput::new(channel, p)?;
        let rows = rates
            .iter()
            .map(|&a| {
                check_rate(a)?;
                let o = at.exponent(a);
                Ok(ChannelCurveRow {
                    a,
                    exponent: o.value,
                    s_star: o.s,
                    p_star: p.as_slice().to_vec(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }

    pub fn optimized(rates: &[f64], channel: &CQChannel) -> Result<Self> {
        let rows = rates
            .iter()
            .map(|&a| {
                let o = optimize_input(a, channel)?;
                Ok(ChannelCurveRow {
                    a,
                    exponent: o.exponent,
                    s_star: o.s,
                    p_star: o.p,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }

    /// Columns `a, E, s_star, p_star_0, …`.
    pub fn write_csv<W: Write>(&self, out: W, base: LogBase) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let k = self.rows.first().map_or(0, |r| r.p_star.len());
        let mut header = vec!["a".to_string(), "E".to_string(), "s_star".to_string()];
        header.extend((0..k).map(|i| format!("p_star_{i}")));
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![
                fmt_f64(base.convert(r.a)),
                fmt_f64(base.convert(r.exponent)),
                fmt_f64(r.s_star),
            ];
            rec.extend(r.p_star.iter().map(|&x| fmt_f64(x)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Channel file: `{"letters": [<operator>, …], "p": [..]}` with `p` optional.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelJson {
    pub letters: Vec<OperatorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
}

impl ChannelJson {
    pub fn to_channel(&self) -> Result<(CQChannel, Option<InputDistribution>)> {
        let letters = self
            .letters
            .iter()
            .map(DensityMatrix::try_from)
            .collect::<Result<Vec<_>>>()?;
        let channel = CQChannel::new(letters)?;
        let p = match &self.p {
            Some(p) => {
                let d = InputDistribution::new(p.clone())?;
                check_input(&channel, &d)?;
                Some(d)
            }
            None => None,
        };
        Ok((channel, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn orthogonal_pure() -> CQChannel {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        CQChannel::new(vec![
            DensityMatrix::pure(&[one, zero]).unwrap(),
            DensityMatrix::pure(&[zero, one]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn single_letter() {
        let ch = CQChannel::classical(&[vec![0.3, 0.7]]).unwrap();
        let p = InputDistribution::uniform(1);
        let avg = sigma_p(&ch, &p).unwrap();
        assert_eq!(avg.op(), ch.letters()[0].op());
        let (r, s) = block_operators(&ch, &p).unwrap();
        assert_eq!(r.op(), s.op());
        assert_eq!(channel_exponent(0.2, &ch, &p).unwrap().value, 0.0);
        let opt = optimize_input(0.2, &ch).unwrap();
        assert_eq!(opt.p, vec![1.0]);
        assert!(opt.heuristic);
    }

    #[test]
    fn orthogonal_letters_average_to_mixed() {
        let ch = orthogonal_pure();
        let p = InputDistribution::uniform(2);
        let avg = sigma_p(&ch, &p).unwrap();
        assert!(
            avg.op()
                .sub(&HermitianOperator::identity(2).scale(0.5))
                .unwrap()
                .frobenius_norm()
                < 1e-15
        );
        for s in [0.0, 0.3, 1.0] {
            assert!((phi_p(s, &ch, &p).unwrap() + s * 2f64.ln()).abs() < 1e-12);
        }
        assert!((holevo_quantity(&ch, &p).unwrap() - 2f64.ln()).abs() < 1e-12);
        let e = channel_exponent(0.3, &ch, &p).unwrap();
        assert!((e.value - (2f64.ln() - 0.3)).abs() < 1e-9);
    }

    #[test]
    fn block_assembly_for_diagonal_letters() {
        let ch = CQChannel::classical(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let p = InputDistribution::new(vec![0.25, 0.75]).unwrap();
        let (r, s) = block_operators(&ch, &p).unwrap();
        let q = [0.25 * 0.9 + 0.75 * 0.2, 0.25 * 0.1 + 0.75 * 0.8];
        let r_expect = HermitianOperator::diag(&[0.25 * 0.9, 0.25 * 0.1, 0.75 * 0.2, 0.75 * 0.8]);
        let s_expect = HermitianOperator::diag(&[0.25 * q[0], 0.25 * q[1], 0.75 * q[0], 0.75 * q[1]]);
        assert!(r.op().sub(&r_expect).unwrap().frobenius_norm() < 1e-15);
        assert!(s.op().sub(&s_expect).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(CQChannel::new(vec![]).is_err());
        assert!(CQChannel::new(vec![
            DensityMatrix::maximally_mixed(2),
            DensityMatrix::maximally_mixed(3)
        ])
        .is_err());
        assert!(InputDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(InputDistribution::new(vec![1.5, -0.5]).is_err());
        let ch = orthogonal_pure();
        assert!(sigma_p(&ch, &InputDistribution::uniform(3)).is_err());
        assert!(channel_exponent(-0.1, &ch, &InputDistribution::uniform(2)).is_err());
    }

    #[test]
    fn alphabet_guard() {
        let rows: Vec<Vec<f64>> = (0..9).map(|_| vec![0.5, 0.5]).collect();
        let ch = CQChannel::classical(&rows).unwrap();
        assert!(matches!(optimize_input(0.1, &ch), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn blocklength_identical_letters() {
        let ch = CQChannel::classical(&[vec![0.6, 0.4], vec![0.6, 0.4]]).unwrap();
        let p = InputDistribution::uniform(2);
        let rep = finite_blocklength_check(2, 0.1, 0.3, &ch, &p).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert_eq!(rep.channel_exponent, 0.0);
    }

    #[test]
    fn channel_json() {
        let text = r#"{"letters": [{"dim": 2, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]},
                                   {"dim": 2, "re": [[0, 0], [0, 1]]}], "p": [0.5, 0.5]}"#;
        let parsed: ChannelJson = serde_json::from_str(text).unwrap();
        let (ch, p) = parsed.to_channel().unwrap();
        assert_eq!(ch.alphabet_size(), 2);
        assert_eq!(p.unwrap().as_slice(), &[0.5, 0.5]);
    }
}
