use serde::{Deserialize, Serialize};

use super::cutnorm::{cut_norm, CutNormMode};
use crate::error::{Error, Result};
use crate::graphon::{Partition, StepGraphon};
use crate::rng::derive_seed;

/// Block counts up to which witnesses are found by exact enumeration.
pub const WEAK_REGULARITY_EXACT_BLOCKS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakRegularity {
    /// Classes as unions of the input blocks.
    pub partition: Partition,
    pub classes: usize,
    /// `‖W − W_P‖_□`, exact when [`Self::exact`] is set.
    pub residual: f64,
    pub exact: bool,
    /// Splits attempted.
    pub evaluations: u64,
}

/// Greedy weak-regularity partition of the blocks of `w` into at most `k` classes.
///
/// Starting from a single class, each step takes a cut-norm witness `(U, V)`
/// of `W − W_P`, tries splitting every class along `U` and along `V`, and
/// keeps the split with the smallest new residual provided it does not
/// increase the residual. The process stops at `k` classes, when no split
/// is left, or when `budget` split evaluations are used. Every step is
/// deterministic, so the run for `k` is a prefix of the run for `k + 1`.
pub fn weak_regularity_partition(
    w: &StepGraphon,
    k: usize,
    budget: u64,
    seed: u64,
) -> Result<WeakRegularity> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one class".into()));
    }
    let n = w.num_blocks();
    let exact = n <= WEAK_REGULARITY_EXACT_BLOCKS;
    let mut class = vec![0usize; n];
    let mut classes = usize::from(n > 0);
    let mut evaluations = 0u64;
    let (mut residual, mut witness) = residual_of(w, &class, classes, exact, seed, 0)?;
    let mut step = 0u64;
    while classes < k && residual > 0.0 && evaluations < budget {
        step += 1;
        let mut best: Option<(f64, Vec<usize>, (Vec<usize>, Vec<usize>))> = None;
        'search: for set in [&witness.0, &witness.1] {
            for c in 0..classes {
                let mut inside = vec![false; n];
                set.iter().for_each(|&i| inside[i] = true);
                let members: Vec<usize> = (0..n).filter(|&i| class[i] == c).collect();
                let moved = members.iter().filter(|&&i| inside[i]).count();
                if moved == 0 || moved == members.len() {
                    continue;
                }
                if evaluations >= budget {
                    break 'search;
                }
                let mut next = class.clone();
                members
                    .iter()
                    .filter(|&&i| inside[i])
                    .for_each(|&i| next[i] = classes);
                let (r, wit) = residual_of(w, &next, classes + 1, exact, seed, step)?;
                evaluations += 1;
                if best.as_ref().is_none_or(|b| r < b.0) {
                    best = Some((r, next, wit));
                }
            }
        }
        match best {
            Some((r, next, wit)) if r <= residual => {
                residual = r;
                class = next;
                witness = wit;
                classes += 1;
            }
            _ => break,
        }
    }
    Ok(WeakRegularity {
        partition: Partition::Blocks {
            cell_of_block: class,
        },
        classes,
        residual,
        exact,
        evaluations,
    })
}

/// Cut norm of `W − W_P` and its witness.
fn residual_of(
    w: &StepGraphon,
    class: &[usize],
    classes: usize,
    exact: bool,
    seed: u64,
    step: u64,
) -> Result<(f64, (Vec<usize>, Vec<usize>))> {
    if classes == 0 {
        return Ok((0.0, (Vec::new(), Vec::new())));
    }
    let averaged = w.average_over_partition(&Partition::Blocks {
        cell_of_block: class.to_vec(),
    })?;
    let n = w.num_blocks();
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            values.push(w.value(i, j) - averaged.value(class[i], class[j]));
        }
    }
    let diff = StepGraphon::from_flat(w.masses().to_vec(), values, w.ambient_infinite())?;
    let mode = if exact {
        CutNormMode::Exact
    } else {
        CutNormMode::Heuristic
    };
    let c = cut_norm(&diff, mode, derive_seed(seed, &[step]))?;
    let value = if c.value < 1e-14 { 0.0 } else { c.value };
    Ok((value, (c.rows, c.cols)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::metrics::canonical_graphon;

    #[test]
    fn constant_needs_one_class() {
        let w = StepGraphon::from_flat(vec![0.5; 3], vec![0.4; 9], false).unwrap();
        let r = weak_regularity_partition(&w, 1, 100, 0).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.classes, 1);
    }

    #[test]
    fn recovers_two_blocks() {
        let w = StepGraphon::new(
            vec![0.25, 0.5, 0.25, 0.5],
            vec![
                vec![0.9, 0.1, 0.9, 0.1],
                vec![0.1, 0.5, 0.1, 0.5],
                vec![0.9, 0.1, 0.9, 0.1],
                vec![0.1, 0.5, 0.1, 0.5],
            ],
            false,
        )
        .unwrap();
        let r = weak_regularity_partition(&w, 2, 100, 0).unwrap();
        assert_eq!(r.residual, 0.0);
        let Partition::Blocks { cell_of_block } = &r.partition else {
            unreachable!()
        };
        assert_eq!(cell_of_block[0], cell_of_block[2]);
        assert_eq!(cell_of_block[1], cell_of_block[3]);
        assert_ne!(cell_of_block[0], cell_of_block[1]);
    }

    #[test]
    fn complete_bipartite_splits_sides() {
        let w = canonical_graphon(&generators::complete_bipartite(3, 3));
        let r = weak_regularity_partition(&w, 2, 100, 0).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn residual_does_not_increase() {
        let w = canonical_graphon(&generators::cycle(7));
        let mut last = f64::INFINITY;
        for k in 1..=7 {
            let r = weak_regularity_partition(&w, k, 1000, 3).unwrap();
            assert!(r.residual <= last);
            last = r.residual;
        }
    }
}
