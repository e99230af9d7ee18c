use crate::error::{Error, Result};
use crate::graphon::StepGraphon;

/// Relative mass distortions below this are treated as exact.
const EXACT_DISTORTION: f64 = 1e-12;
const UNIT: f64 = 1e-3;

/// Two graphons re-expressed on blocks of one common mass.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub left: StepGraphon,
    pub right: StepGraphon,
    /// Original block of each refined block; `None` for zero padding.
    pub left_parent: Vec<Option<usize>>,
    pub right_parent: Vec<Option<usize>>,
    pub quantum: f64,
    /// Certified bound on the cut-distance change caused by rounding masses.
    pub perturbation_bound: f64,
}

/// Block counts after rounding to multiples of `q`, and the distortion slack.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantization {
    pub counts: Vec<usize>,
    /// Largest relative amount by which the original masses exceed `min(original, rounded)`.
    pub eps_original: f64,
    /// Largest relative amount by which the rounded masses exceed `min(original, rounded)`.
    pub eps_rounded: f64,
    pub bound: f64,
}

/// Rounds every block mass to the nearest positive multiple of `q`.
///
/// With `μ⁻ = min(μ, μ_q)` blockwise, both `μ⁻ ≤ μ ≤ (1 + ε₁) μ⁻` and
/// `μ⁻ ≤ μ_q ≤ (1 + ε₂) μ⁻` hold, so the cut distance between `W` on `μ`
/// and on `μ_q` is at most `3 (ε₁ + ε₂) ‖W‖_{L¹(μ⁻)}`.
pub fn quantize(w: &StepGraphon, q: f64) -> Quantization {
    let n = w.num_blocks();
    let mut counts = Vec::with_capacity(n);
    let mut low = Vec::with_capacity(n);
    let (mut eps_original, mut eps_rounded) = (0.0f64, 0.0f64);
    for &m in w.masses() {
        let k = ((m / q).round() as usize).max(1);
        let rounded = k as f64 * q;
        let lo = m.min(rounded);
        let mut e1 = m / lo - 1.0;
        let mut e2 = rounded / lo - 1.0;
        if e1 < EXACT_DISTORTION {
            e1 = 0.0;
        }
        if e2 < EXACT_DISTORTION {
            e2 = 0.0;
        }
        eps_original = eps_original.max(e1);
        eps_rounded = eps_rounded.max(e2);
        counts.push(k);
        low.push(lo);
    }
    let mut norm = 0.0;
    for i in 0..n {
        for j in 0..n {
            norm += w.value(i, j).abs() * low[i] * low[j];
        }
    }
    let eps = eps_original + eps_rounded;
    Quantization {
        counts,
        eps_original,
        eps_rounded,
        bound: if eps == 0.0 { 0.0 } else { 3.0 * eps * norm },
    }
}

/// Largest `q` such that every mass is (up to a relative `1e−9`) an integer
/// multiple of `q`; failing that, the integer gcd of the masses measured in
/// units of `10⁻³`, capped by the smallest mass.
pub fn default_quantum(masses: &[f64]) -> f64 {
    let Some(&smallest) = masses.iter().min_by(|a, b| a.total_cmp(b)) else {
        return 1.0;
    };
    let largest = masses.iter().fold(0.0f64, |a, &b| a.max(b));
    let tol = 1e-9 * largest;
    let g = masses.iter().skip(1).fold(masses[0], |g, &m| float_gcd(g, m, tol));
    if g >= 1e-6 * largest
        && masses.iter().all(|&m| {
            let r = m / g;
            (r - r.round()).abs() <= 1e-9 * r.max(1.0)
        })
    {
        return g;
    }
    let units: Vec<u64> = masses
        .iter()
        .map(|&m| ((m / UNIT).round() as u64).max(1))
        .collect();
    let g = units.iter().skip(1).fold(units[0], |g, &u| int_gcd(g, u));
    (g as f64 * UNIT).min(smallest)
}

fn float_gcd(mut a: f64, mut b: f64, tol: f64) -> f64 {
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    while b > tol {
        let mut r = a - (a / b).floor() * b;
        if b - r <= tol {
            r = 0.0;
        }
        a = b;
        b = r;
    }
    a
}

fn int_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Splits both graphons into blocks of mass `q` and pads the shorter one
/// with zero blocks so both carry the same number of blocks.
pub fn common_refinement(
    w1: &StepGraphon,
    w2: &StepGraphon,
    quantum: Option<f64>,
) -> Result<Refinement> {
    let smallest = w1
        .masses()
        .iter()
        .chain(w2.masses())
        .fold(f64::INFINITY, |a, &b| a.min(b));
    let q = match quantum {
        Some(q) => {
            if !(q > 0.0 && q.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "mass quantum must be positive, got {q}"
                )));
            }
            if q > smallest {
                return Err(Error::QuantumTooLarge { quantum: q, smallest });
            }
            q
        }
        None => {
            let all: Vec<f64> = w1.masses().iter().chain(w2.masses()).copied().collect();
            default_quantum(&all)
        }
    };
    let q1 = quantize(w1, q);
    let q2 = quantize(w2, q);
    let n1: usize = q1.counts.iter().sum();
    let n2: usize = q2.counts.iter().sum();
    let n = n1.max(n2);
    let expand = |w: &StepGraphon, counts: &[usize], own: usize| {
        let split = w.split_into_quanta(counts, q);
        let padded = split
            .extended_with_zero_blocks(&vec![q; n - own])
            .expect("padding masses are positive")
            .with_ambient_infinite(true);
        let parent: Vec<Option<usize>> = counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat(Some(i)).take(c))
            .chain(std::iter::repeat(None).take(n - own))
            .collect();
        (padded, parent)
    };
    let (left, left_parent) = expand(w1, &q1.counts, n1);
    let (right, right_parent) = expand(w2, &q2.counts, n2);
    Ok(Refinement {
        left,
        right,
        left_parent,
        right_parent,
        quantum: q,
        perturbation_bound: q1.bound + q2.bound,
    })
}
