//! The two trace inequalities behind the threshold tests, as measurable gaps.
//!
//! For PSD `X, Y` and `0 ≤ s ≤ 1/2`:
//!
//! ```text
//! Tr X^s Y^{1-s} ≥ Tr {X^{1-s} − Y^{1-s} ≥ 0} Y + Tr {X^{1-s} − Y^{1-s} < 0} X
//! ```
//!
//! and for PSD `A, B` and `0 ≤ t ≤ 1`: `Tr {A − B ≥ 0} B (A^t − B^t) ≥ 0`.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::fmt_f64;
use crate::operator::HermitianOperator;
use crate::random::{random_psd, random_rank};
use rand::Rng;

/// Relative tolerance of both gap checks.
pub const GAP_TOL: f64 = 1e-10;

/// A signed gap and the scaled tolerance it is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceGap {
    pub gap: f64,
    pub tolerance: f64,
}

impl TraceGap {
    pub fn holds(&self) -> bool {
        self.gap >= -self.tolerance
    }
}

/// LHS − RHS of the first inequality; tolerance `1e-10 (‖X‖_tr + ‖Y‖_tr)`.
pub fn split_trace_gap(x: &HermitianOperator, y: &HermitianOperator, s: f64) -> Result<TraceGap> {
    if !(0.0..=0.5).contains(&s) {
        return Err(Error::InvalidArgument(format!("s = {s} is outside [0, 1/2]")));
    }
    x.check_dim(y)?;
    let ex = x.eigendecompose();
    let ey = y.eigendecompose();
    ex.check_psd()?;
    ey.check_psd()?;

    let lhs = ex.power(s)?.trace_with(&ey.power(1.0 - s)?);
    let diff = ex.power(1.0 - s)?.sub(&ey.power(1.0 - s)?)?;
    let nonneg = diff.eigendecompose().nonnegative_projector();
    let neg = HermitianOperator::identity(x.dim()).sub(&nonneg)?;
    let rhs = nonneg.trace_with(y) + neg.trace_with(x);

    let trace_norm = |e: &crate::operator::EigenDecomposition| e.values.iter().map(|v| v.abs()).sum::<f64>();
    Ok(TraceGap {
        gap: lhs - rhs,
        tolerance: GAP_TOL * (trace_norm(&ex) + trace_norm(&ey)),
    })
}

/// `Tr {A − B ≥ 0} B (A^t − B^t)`; tolerance `1e-10 ‖B‖_tr (‖A‖^t + ‖B‖^t)`.
pub fn power_difference_gap(a: &HermitianOperator, b: &HermitianOperator, t: f64) -> Result<TraceGap> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} is outside [0, 1]")));
    }
    a.check_dim(b)?;
    let ea = a.eigendecompose();
    let eb = b.eigendecompose();
    ea.check_psd()?;
    eb.check_psd()?;

    let proj = a.sub(b)?.eigendecompose().nonnegative_projector();
    let powers = ea.power(t)?.sub(&eb.power(t)?)?;
    let pb = proj.matrix().matmul(b.matrix());
    let value = pb.trace_product(powers.matrix()).re;

    let b_tr: f64 = eb.values.iter().map(|v| v.abs()).sum();
    Ok(TraceGap {
        gap: value,
        tolerance: GAP_TOL * b_tr * (ea.max_abs().powf(t) + eb.max_abs().powf(t)),
    })
}

/// One randomized instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub seed: u64,
    pub trial: usize,
    pub dim: usize,
    pub rank_x: usize,
    pub rank_y: usize,
    pub parameter: f64,
    pub gap: f64,
    pub tolerance: f64,
}

impl SuiteRow {
    pub fn passed(&self) -> bool {
        self.gap >= -self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSuite {
    pub name: String,
    pub seed: u64,
    pub rows: Vec<SuiteRow>,
}

impl GapSuite {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.passed()).count()
    }

    pub fn worst(&self) -> Option<&SuiteRow> {
        self.rows
            .iter()
            .min_by(|a, b| (a.gap / a.tolerance).total_cmp(&(b.gap / b.tolerance)))
    }

    pub fn rank_deficient(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.rank_x < r.dim || r.rank_y < r.dim)
            .count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "suite",
            "seed",
            "trial",
            "dim",
            "rank_x",
            "rank_y",
            "parameter",
            "gap",
            "tolerance",
            "pass",
        ])?;
        for r in &self.rows {
            w.write_record([
                self.name.clone(),
                r.seed.to_string(),
                r.trial.to_string(),
                r.dim.to_string(),
                r.rank_x.to_string(),
                r.rank_y.to_string(),
                fmt_f64(r.parameter),
                fmt_f64(r.gap),
                fmt_f64(r.tolerance),
                r.passed().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Independent random scale so the two operators are not trace-matched.
fn scale<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-1.5f64..1.5).exp()
}

fn run_suite(
    name: &str,
    seed: u64,
    trials_per_dim: usize,
    dims: &[usize],
    param_hi: f64,
    gap: impl Fn(&HermitianOperator, &HermitianOperator, f64) -> Result<TraceGap>,
) -> Result<GapSuite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(trials_per_dim * dims.len());
    for &dim in dims {
        for trial in 0..trials_per_dim {
            let rank_x = random_rank(dim, &mut rng);
            let rank_y = random_rank(dim, &mut rng);
            let x = random_psd(dim, rank_x, &mut rng).scale(scale(&mut rng));
            let y = random_psd(dim, rank_y, &mut rng).scale(scale(&mut rng));
            let parameter = rng.random_range(0.0..=param_hi);
            let g = gap(&x, &y, parameter)?;
            rows.push(SuiteRow {
                seed,
                trial,
                dim,
                rank_x,
                rank_y,
                parameter,
                gap: g.gap,
                tolerance: g.tolerance,
            });
        }
    }
    Ok(GapSuite {
        name: name.to_string(),
        seed,
        rows,
    })
}

/// Random instances of the first inequality, `s` uniform in `[0, 1/2]`.
pub fn split_trace_suite(seed: u64, trials_per_dim: usize, dims: &[usize]) -> Result<GapSuite> {
    run_suite("split_trace", seed, trials_per_dim, dims, 0.5, split_trace_gap)
}

/// Random instances of the second inequality, `t` uniform in `[0, 1]`.
pub fn power_difference_suite(seed: u64, trials_per_dim: usize, dims: &[usize]) -> Result<GapSuite> {
    run_suite(
        "power_difference",
        seed,
        trials_per_dim,
        dims,
        1.0,
        power_difference_gap,
    )
}
