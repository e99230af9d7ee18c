use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::StepGraphon;
use crate::rng::stream_rng;

/// Largest block count accepted by exact cut-norm enumeration.
pub const EXACT_CUT_NORM_LIMIT: usize = 26;

const HEURISTIC_STARTS: usize = 32;
const HEURISTIC_ROUNDS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutNormMode {
    Exact,
    Heuristic,
}

/// Cut norm together with the block sets attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutNorm {
    pub value: f64,
    /// Blocks forming `U`.
    pub rows: Vec<usize>,
    /// Blocks forming `V`.
    pub cols: Vec<usize>,
    /// False when the value is a heuristic lower bound on the supremum.
    pub exact: bool,
}

/// `sup_{U,V} |∫_{U×V} W|` of a step graphon.
///
/// The supremum is attained on unions of blocks. Exact mode walks all `2^n`
/// row sets in Gray-code order while maintaining the column sums
/// `c_j = Σ_{i∈U} a_ij m_i m_j`; the best `V` for a fixed `U` takes either
/// all positive or all negative columns. Heuristic mode alternates between
/// the two best responses from random starts.
pub fn cut_norm(w: &StepGraphon, mode: CutNormMode, seed: u64) -> Result<CutNorm> {
    let n = w.num_blocks();
    let m = w.masses();
    let weights: Vec<f64> = (0..n * n)
        .map(|p| w.values()[p] * m[p / n] * m[p % n])
        .collect();
    cut_norm_weighted(&weights, n, mode, seed)
}

/// Cut norm of the square matrix `b` (row-major, entries `∫_{I_i×I_j} W`).
pub fn cut_norm_weighted(b: &[f64], n: usize, mode: CutNormMode, seed: u64) -> Result<CutNorm> {
    debug_assert_eq!(b.len(), n * n);
    if n == 0 {
        return Ok(CutNorm {
            value: 0.0,
            rows: Vec::new(),
            cols: Vec::new(),
            exact: true,
        });
    }
    match mode {
        CutNormMode::Exact => {
            if n > EXACT_CUT_NORM_LIMIT {
                return Err(Error::ExactLimit {
                    what: "cut norm",
                    blocks: n,
                    limit: EXACT_CUT_NORM_LIMIT,
                    cost: 2f64.powi(n as i32) * 2.0 * n as f64,
                });
            }
            Ok(exact(b, n))
        }
        CutNormMode::Heuristic => Ok(heuristic(b, n, seed)),
    }
}

/// Exact if the block count allows, heuristic otherwise.
pub fn cut_norm_auto(b: &[f64], n: usize, seed: u64) -> CutNorm {
    let mode = if n <= EXACT_CUT_NORM_LIMIT {
        CutNormMode::Exact
    } else {
        CutNormMode::Heuristic
    };
    cut_norm_weighted(b, n, mode, seed).expect("mode matches block count")
}

fn best_columns(c: &[f64]) -> (f64, bool) {
    let (mut pos, mut neg) = (0.0, 0.0);
    for &x in c {
        if x > 0.0 {
            pos += x;
        } else {
            neg -= x;
        }
    }
    if pos >= neg {
        (pos, true)
    } else {
        (neg, false)
    }
}

fn exact(b: &[f64], n: usize) -> CutNorm {
    let high_bits = n.min(6);
    let low_bits = n - high_bits;
    let chunks = 1usize << high_bits;
    // each chunk fixes the top bits of the row mask and Gray-codes the rest
    let best = (0..chunks)
        .into_par_iter()
        .map(|hi| {
            let mut c = vec![0.0; n];
            for i in 0..high_bits {
                if hi >> i & 1 == 1 {
                    let row = low_bits + i;
                    for j in 0..n {
                        c[j] += b[row * n + j];
                    }
                }
            }
            let base = (hi as u64) << low_bits;
            let mut gray: u64 = 0;
            let (v, _) = best_columns(&c);
            let mut best = (v, base);
            for step in 1u64..(1u64 << low_bits) {
                let bit = step.trailing_zeros() as usize;
                gray ^= 1 << bit;
                let row = &b[bit * n..(bit + 1) * n];
                if gray >> bit & 1 == 1 {
                    c.iter_mut().zip(row).for_each(|(x, r)| *x += r);
                } else {
                    c.iter_mut().zip(row).for_each(|(x, r)| *x -= r);
                }
                let (v, _) = best_columns(&c);
                let mask = base | gray;
                if v > best.0 || (v == best.0 && mask < best.1) {
                    best = (v, mask);
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    let rows: Vec<usize> = (0..n).filter(|&i| best.1 >> i & 1 == 1).collect();
    witness_from_rows(b, n, rows, true)
}

/// Recomputes the column sums for `rows` directly and picks the best columns.
fn witness_from_rows(b: &[f64], n: usize, rows: Vec<usize>, exact: bool) -> CutNorm {
    let mut c = vec![0.0; n];
    for &i in &rows {
        for j in 0..n {
            c[j] += b[i * n + j];
        }
    }
    let (_, positive) = best_columns(&c);
    let cols: Vec<usize> = (0..n)
        .filter(|&j| if positive { c[j] > 0.0 } else { c[j] < 0.0 })
        .collect();
    let value = rect_sum(b, n, &rows, &cols).abs();
    CutNorm {
        value,
        rows,
        cols,
        exact,
    }
}

fn rect_sum(b: &[f64], n: usize, rows: &[usize], cols: &[usize]) -> f64 {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| b[i * n + j]).sum::<f64>())
        .sum()
}

fn heuristic(b: &[f64], n: usize, seed: u64) -> CutNorm {
    let mut best: Option<CutNorm> = None;
    for start in 0..HEURISTIC_STARTS {
        let mut rng = stream_rng(seed, start as u64);
        let init: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
        for sign in [1.0, -1.0] {
            let mut cols = init.clone();
            let mut value = f64::NEG_INFINITY;
            let mut rows = vec![false; n];
            for _ in 0..HEURISTIC_ROUNDS {
                // rows maximizing sign * Σ_{U×V}
                for i in 0..n {
                    let r: f64 = (0..n).filter(|&j| cols[j]).map(|j| b[i * n + j]).sum();
                    rows[i] = sign * r > 0.0;
                }
                for j in 0..n {
                    let c: f64 = (0..n).filter(|&i| rows[i]).map(|i| b[i * n + j]).sum();
                    cols[j] = sign * c > 0.0;
                }
                let u: Vec<usize> = (0..n).filter(|&i| rows[i]).collect();
                let v: Vec<usize> = (0..n).filter(|&j| cols[j]).collect();
                let next = sign * rect_sum(b, n, &u, &v);
                if next <= value {
                    break;
                }
                value = next;
            }
            let u: Vec<usize> = (0..n).filter(|&i| rows[i]).collect();
            let v: Vec<usize> = (0..n).filter(|&j| cols[j]).collect();
            let cand = CutNorm {
                value: rect_sum(b, n, &u, &v).abs(),
                rows: u,
                cols: v,
                exact: false,
            };
            if best.as_ref().is_none_or(|bst| cand.value > bst.value) {
                best = Some(cand);
            }
        }
    }
    best.expect("at least one start")
}

/// Reference implementation: every pair of block subsets.
pub fn cut_norm_brute_force(w: &StepGraphon) -> f64 {
    let n = w.num_blocks();
    assert!(n <= 12, "brute force limited to 12 blocks");
    let m = w.masses();
    let mut best: f64 = 0.0;
    for u in 0u32..(1 << n) {
        for v in 0u32..(1 << n) {
            let mut s = 0.0;
            for i in 0..n {
                if u >> i & 1 == 0 {
                    continue;
                }
                for j in 0..n {
                    if v >> j & 1 == 1 {
                        s += w.value(i, j) * m[i] * m[j];
                    }
                }
            }
            best = best.max(s.abs());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonnegative_kernel_equals_l1() {
        let w = StepGraphon::new(vec![1.0, 2.0], vec![vec![0.5, 0.2], vec![0.2, 0.1]], false)
            .unwrap();
        let c = cut_norm(&w, CutNormMode::Exact, 0).unwrap();
        assert!((c.value - w.l1_norm()).abs() < 1e-15);
        assert_eq!(c.rows, vec![0, 1]);
    }

    #[test]
    fn signed_two_block_example() {
        let w = StepGraphon::new(vec![1.0, 1.0], vec![vec![1.0, -1.0], vec![-1.0, 1.0]], false)
            .unwrap();
        let c = cut_norm(&w, CutNormMode::Exact, 0).unwrap();
        assert_eq!(c.value, 1.0);
        assert_eq!(c.rows, vec![0]);
        assert_eq!(c.cols, vec![0]);
        assert_eq!(cut_norm_brute_force(&w), 1.0);
    }

    #[test]
    fn zero_graphon() {
        let c = cut_norm(&StepGraphon::zero(false), CutNormMode::Exact, 0).unwrap();
        assert_eq!(c.value, 0.0);
    }

    #[test]
    fn exact_limit_reports_cost() {
        let n = EXACT_CUT_NORM_LIMIT + 1;
        let w = StepGraphon::from_flat(vec![1.0; n], vec![0.0; n * n], false).unwrap();
        assert!(matches!(
            cut_norm(&w, CutNormMode::Exact, 0),
            Err(Error::ExactLimit { blocks: 27, .. })
        ));
        assert!(cut_norm(&w, CutNormMode::Heuristic, 0).is_ok());
    }

    #[test]
    fn heuristic_is_lower_bound() {
        let w = StepGraphon::new(
            vec![0.5, 1.0, 0.7],
            vec![
                vec![0.3, -0.8, 0.1],
                vec![-0.8, 0.5, -0.2],
                vec![0.1, -0.2, -0.9],
            ],
            false,
        )
        .unwrap();
        let e = cut_norm(&w, CutNormMode::Exact, 0).unwrap();
        let h = cut_norm(&w, CutNormMode::Heuristic, 5).unwrap();
        assert!(!h.exact);
        assert!(h.value <= e.value + 1e-15);
        assert!((e.value - cut_norm_brute_force(&w)).abs() < 1e-12);
    }
}
