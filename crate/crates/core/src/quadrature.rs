//! One-dimensional quadrature used for the analytic graphon families.

use serde::{Deserialize, Serialize};

/// Default absolute tolerance for adaptive integration.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

const INITIAL_PANELS: usize = 16;
const MAX_DEPTH: u32 = 40;

/// A numerical value together with an error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error_bound: f64,
    /// False when refinement stopped at the depth cap before meeting the tolerance.
    pub converged: bool,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_bound: 0.0,
            converged: true,
        }
    }
}

/// Adaptive trapezoid rule on `[a, b]`.
///
/// Each panel is compared with its two half-panels; the difference divided by
/// three is the panel's error estimate. Panels are split until the estimate
/// falls below their share of `tol`.
pub fn adaptive_trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Estimate {
    if !(b > a) {
        return Estimate::exact(0.0);
    }
    let h = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = tol / INITIAL_PANELS as f64;
    let mut acc = Estimate::exact(0.0);
    let mut left = a;
    let mut f_left = f(a);
    for k in 0..INITIAL_PANELS {
        let right = if k + 1 == INITIAL_PANELS {
            b
        } else {
            a + h * (k + 1) as f64
        };
        let f_right = f(right);
        let whole = 0.5 * (right - left) * (f_left + f_right);
        let part = refine(&f, left, right, f_left, f_right, whole, panel_tol, 0);
        acc.value += part.value;
        acc.error_bound += part.error_bound;
        acc.converged &= part.converged;
        left = right;
        f_left = f_right;
    }
    acc
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Estimate {
    let m = 0.5 * (a + b);
    let fm = f(m);
    let left = 0.5 * (m - a) * (fa + fm);
    let right = 0.5 * (b - m) * (fm + fb);
    let halves = left + right;
    let err = (halves - whole).abs() / 3.0;
    if err <= tol {
        return Estimate {
            value: halves,
            error_bound: err,
            converged: true,
        };
    }
    if depth >= MAX_DEPTH {
        return Estimate {
            value: halves,
            error_bound: err,
            converged: false,
        };
    }
    let l = refine(f, a, m, fa, fm, left, 0.5 * tol, depth + 1);
    let r = refine(f, m, b, fm, fb, right, 0.5 * tol, depth + 1);
    Estimate {
        value: l.value + r.value,
        error_bound: l.error_bound + r.error_bound,
        converged: l.converged && r.converged,
    }
}

/// Nodes and weights of the 5-point Gauss-Legendre rule on `[-1, 1]`.
const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

/// Tensor 5x5 Gauss-Legendre integral of `f` over `[x0, x1] x [y0, y1]`.
pub fn gauss_legendre_2d<F: Fn(f64, f64) -> f64>(f: F, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let (hx, cx) = (0.5 * (x1 - x0), 0.5 * (x1 + x0));
    let (hy, cy) = (0.5 * (y1 - y0), 0.5 * (y1 + y0));
    let mut sum = 0.0;
    for &(tx, wx) in &GL5 {
        let x = cx + hx * tx;
        for &(ty, wy) in &GL5 {
            sum += wx * wy * f(x, cy + hy * ty);
        }
    }
    sum * hx * hy
}
