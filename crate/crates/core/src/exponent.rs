//! Asymptotic exponents of a hypothesis pair: Stein, Chernoff, the
//! Hoeffding-type bound `sup_s (−s r − φ(s)) / (1 − s)`, the comparison bound
//! built from φ̃, and the critical-point relations of the Hoeffding optimum.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{maximize, GRID_POINTS};
use crate::state::HypothesisPair;

/// Upper end of the `s` search; the objective is singular at `s = 1`.
pub const S_CAP: f64 = 1.0 - 1e-6;

/// Values above this many nats that still rise at [`S_CAP`] are reported as `+∞`.
pub const DIVERGENCE_CEILING: f64 = 1e3;

/// Distance from the ends of `[0, S_CAP]` below which an optimizer counts as
/// a boundary optimum.
pub const INTERIOR_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

impl LogBase {
    /// Converts a value in nats to this base.
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            LogBase::Nats => nats,
            LogBase::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

/// `D(ρ‖σ)`, the optimal exponent of the second-kind error under a constant
/// constraint on the first kind.
pub fn stein_exponent(pair: &HypothesisPair) -> f64 {
    pair.relative_entropy()
}

/// Maximizer and value of a scalar optimization over `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub value: f64,
    pub s: f64,
}

/// `max_{0≤s≤1} −φ(s)`.
pub fn chernoff_bound(pair: &HypothesisPair) -> Optimum {
    if pair.orthogonal_supports() {
        return Optimum {
            value: f64::INFINITY,
            s: 0.5,
        };
    }
    let m = maximize(|s| -pair.phi(s).unwrap_or(f64::NAN), 0.0, 1.0, GRID_POINTS);
    Optimum {
        value: m.value.max(0.0),
        s: m.arg,
    }
}

/// One point of an exponent curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub rate: f64,
    /// Exponent in nats; `+∞` when `diverged`.
    pub value: f64,
    pub s_star: f64,
    pub diverged: bool,
}

/// `(−s r − f(s)) / (1 − s)` for a generating function `f`.
pub fn hoeffding_objective(r: f64, s: f64, f_s: f64) -> f64 {
    (-s * r - f_s) / (1.0 - s)
}

fn rate_bound(r: f64, pair: &HypothesisPair, f: impl Fn(f64) -> Result<f64>) -> Result<BoundPoint> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("rate r = {r} must be >= 0")));
    }
    if pair.orthogonal_supports() {
        return Ok(BoundPoint {
            rate: r,
            value: f64::INFINITY,
            s_star: S_CAP,
            diverged: true,
        });
    }
    let objective = |s: f64| match f(s) {
        Ok(v) => hoeffding_objective(r, s, v),
        Err(_) => f64::NAN,
    };
    let m = maximize(objective, 0.0, S_CAP, GRID_POINTS);
    if m.at_upper_edge(GRID_POINTS) && m.value > DIVERGENCE_CEILING && m.rising_at_upper_edge() {
        return Ok(BoundPoint {
            rate: r,
            value: f64::INFINITY,
            s_star: S_CAP,
            diverged: true,
        });
    }
    Ok(BoundPoint {
        rate: r,
        value: m.value.max(0.0),
        s_star: m.arg,
        diverged: false,
    })
}

/// Lower bound on the first-kind exponent when the second-kind exponent is
/// at least `r`: `sup_{0≤s<1} (−s r − φ(s)) / (1 − s)`.
pub fn hoeffding_bound(r: f64, pair: &HypothesisPair) -> Result<BoundPoint> {
    rate_bound(r, pair, |s| pair.phi(s))
}

/// The same optimization with φ̃ in place of φ.
pub fn tilde_bound(r: f64, pair: &HypothesisPair) -> Result<BoundPoint> {
    rate_bound(r, pair, |s| pair.phi_tilde(s))
}

/// Maximizer `s_r` of the Hoeffding objective.
pub fn critical_s(r: f64, pair: &HypothesisPair) -> Result<f64> {
    Ok(hoeffding_bound(r, pair)?.s_star)
}

/// Residuals of the two critical-point relations at `s_r`:
/// `r = (s_r − 1)φ'(s_r) − φ(s_r)` and `H(r) = s_r φ'(s_r) − φ(s_r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendreResiduals {
    pub rate: f64,
    pub s_r: f64,
    pub bound: f64,
    pub rate_residual: f64,
    pub value_residual: f64,
}

/// `None` when the optimizer sits on the boundary, where the relations do
/// not apply.
pub fn legendre_residuals(r: f64, pair: &HypothesisPair) -> Result<Option<LegendreResiduals>> {
    let point = hoeffding_bound(r, pair)?;
    let s = point.s_star;
    if point.diverged || s <= INTERIOR_MARGIN || s >= S_CAP - INTERIOR_MARGIN {
        return Ok(None);
    }
    let phi = pair.phi(s)?;
    let dphi = pair.phi_prime(s)?;
    Ok(Some(LegendreResiduals {
        rate: r,
        s_r: s,
        bound: point.value,
        rate_residual: (r - ((s - 1.0) * dphi - phi)).abs(),
        value_residual: (point.value - (s * dphi - phi)).abs(),
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Hoeffding,
    Tilde,
}

/// An exponent curve over an increasing rate grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentCurve {
    pub kind: CurveKind,
    pub points: Vec<BoundPoint>,
}

impl ExponentCurve {
    pub fn hoeffding(rates: &[f64], pair: &HypothesisPair) -> Result<Self> {
        Self::build(CurveKind::Hoeffding, rates, pair)
    }

    pub fn tilde(rates: &[f64], pair: &HypothesisPair) -> Result<Self> {
        Self::build(CurveKind::Tilde, rates, pair)
    }

    fn build(kind: CurveKind, rates: &[f64], pair: &HypothesisPair) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::InvalidArgument("rate grid is empty".into()));
        }
        if rates.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "rate grid must be strictly increasing".into(),
            ));
        }
        let points = rates
            .iter()
            .map(|&r| match kind {
                CurveKind::Hoeffding => hoeffding_bound(r, pair),
                CurveKind::Tilde => tilde_bound(r, pair),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kind, points })
    }

    /// True when values never increase along the grid (up to `slack`).
    pub fn is_nonincreasing(&self, slack: f64) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].value <= w[0].value + slack || w[0].value == f64::INFINITY)
    }

    /// CSV with columns `r, bound, s_star, flag`.
    pub fn write_csv<W: Write>(&self, out: W, base: LogBase) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "bound", "s_star", "flag"])?;
        for p in &self.points {
            w.write_record([
                fmt_f64(base.convert(p.rate)),
                fmt_f64(base.convert(p.value)),
                fmt_f64(p.s_star),
                if p.diverged { "infinite" } else { "finite" }.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fixed formatting so reports are byte-stable.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.12e}")
    }
}
