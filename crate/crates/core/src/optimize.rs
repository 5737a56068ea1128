//! One-dimensional maximization on a closed interval.
//!
//! A uniform grid locates the best cell; golden-section search then refines
//! inside the two cells around it. The grid protects against capture by a
//! local maximum when the objective is not known to be unimodal.

/// Default number of grid points.
pub const GRID_POINTS: usize = 1001;

const GOLDEN_ITERS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
    /// Index of the best grid point.
    pub grid_index: usize,
    /// Objective at the last grid point and its left neighbour.
    pub edge: (f64, f64),
}

impl Maximum {
    /// True when the best grid point is the upper end of the interval.
    pub fn at_upper_edge(&self, points: usize) -> bool {
        self.grid_index + 1 == points
    }

    /// True when the objective is still increasing into the upper end.
    pub fn rising_at_upper_edge(&self) -> bool {
        self.edge.0 > self.edge.1
    }
}

/// Maximizes `f` on `[lo, hi]`. NaN values count as `-∞`.
pub fn maximize(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> Maximum {
    assert!(points >= 3, "grid needs at least three points");
    assert!(hi > lo, "empty interval");
    let eval = |x: f64| {
        let y = f(x);
        if y.is_nan() {
            f64::NEG_INFINITY
        } else {
            y
        }
    };
    let step = (hi - lo) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points)
        .map(|i| if i + 1 == points { hi } else { lo + step * i as f64 })
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| eval(x)).collect();

    let mut best = 0;
    for i in 1..points {
        if ys[i] > ys[best] {
            best = i;
        }
    }
    let edge = (ys[points - 1], ys[points - 2]);
    let mut out = Maximum {
        arg: xs[best],
        value: ys[best],
        grid_index: best,
        edge,
    };
    if !ys[best].is_finite() {
        return out;
    }

    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(points - 1)];
    let (x, y) = golden(&eval, a, b);
    if y > out.value {
        out.arg = x;
        out.value = y;
    }
    out
}

fn golden(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERS {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
