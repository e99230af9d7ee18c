use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cutnorm::{cut_norm_weighted, CutNormMode, EXACT_CUT_NORM_LIMIT};
use super::refinement::common_refinement;
use crate::error::{Error, Result};
use crate::graphon::StepGraphon;
use crate::rng::stream_rng;

/// Largest refined block count for exhaustive permutation search.
pub const EXACT_PERMUTATION_LIMIT: usize = 8;
/// Largest nonzero block count per side for exhaustive block pairing.
pub const EXACT_PAIRING_LIMIT: usize = 6;
/// Largest refined block count accepted by annealing.
pub const ANNEAL_BLOCK_LIMIT: usize = 512;
/// Annealing uses the exact cut norm as objective up to this many blocks.
pub const ANNEAL_EXACT_OBJECTIVE: usize = 16;

const RESTARTS: u64 = 4;
const COOLING: f64 = 1e-3;
const OBJECTIVE_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// Exhaustive search over block alignments.
    Exact,
    /// Simulated annealing over block permutations.
    Anneal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistanceOptions {
    pub mode: DistanceMode,
    /// Objective evaluations allowed to annealing, split over the restarts.
    pub budget: u64,
    pub seed: u64,
    /// Common block mass for refinement; chosen automatically when absent.
    pub quantum: Option<f64>,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self {
            mode: DistanceMode::Exact,
            budget: 20_000,
            seed: 0,
            quantum: None,
        }
    }
}

impl DistanceOptions {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn anneal(budget: u64, seed: u64) -> Self {
        Self {
            mode: DistanceMode::Anneal,
            budget,
            seed,
            quantum: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportMode {
    /// The value equals the distance.
    Exact,
    /// The value is attained by an explicit alignment and bounds the distance from above.
    UpperBound,
}

/// One cell of a block coupling: a piece of the left block and of the right
/// block glued together, or a piece of one side matched with the other's zero tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingCell {
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub mass: f64,
}

/// Alignment attaining the reported value. Block indices refer to the inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Both inputs vanish.
    Trivial,
    /// Equal-mass refinement where refined left block `i` sits on refined right
    /// block `permutation[i]`; `left_blocks[i]` names the input block refined
    /// block `i` came from (`None` for zero padding).
    Permutation {
        permutation: Vec<usize>,
        left_blocks: Vec<Option<usize>>,
        right_blocks: Vec<Option<usize>>,
    },
    Coupling { cells: Vec<CouplingCell> },
}

impl Witness {
    /// Input-block permutation when the refinement kept every block whole.
    pub fn block_permutation(&self) -> Option<Vec<usize>> {
        let Witness::Permutation {
            permutation,
            left_blocks,
            right_blocks,
        } = self
        else {
            return None;
        };
        let mut out = Vec::with_capacity(permutation.len());
        for (i, &p) in permutation.iter().enumerate() {
            match (left_blocks[i], right_blocks[p]) {
                (Some(l), Some(r)) if l == out.len() => out.push(r),
                (None, None) => {}
                _ => return None,
            }
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: f64,
    pub mode: ReportMode,
    pub witness: Witness,
    /// Part of `value` accounting for rounding block masses to a common quantum.
    pub quantization_error: f64,
    /// Objective evaluations used.
    pub budget_spent: u64,
    /// False when the objective itself was only estimated from below.
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Objective {
    Cut,
    L1,
}

/// Cut distance `δ_□(W₁, W₂)` between step graphons on σ-finite spaces,
/// each trivially extended by a zero tail.
///
/// Exact mode tries two alignments and reports the smaller value:
/// permutations of a common equal-mass refinement (up to
/// [`EXACT_PERMUTATION_LIMIT`] refined blocks, plus the rounding slack when
/// masses are not multiples of the quantum), and couplings that glue paired
/// blocks along their common mass and send the excess to the other side's
/// zero tail (up to [`EXACT_PAIRING_LIMIT`] nonzero blocks per side).
/// The result is [`ReportMode::Exact`] only for a slack-free refinement.
pub fn cut_distance(
    w1: &StepGraphon,
    w2: &StepGraphon,
    options: &DistanceOptions,
) -> Result<DistanceReport> {
    distance(w1, w2, Objective::Cut, options)
}

/// `inf_φ ‖W₁ − W₂^φ‖₁` over the same alignments as [`cut_distance`].
pub fn invariant_l1_distance(
    w1: &StepGraphon,
    w2: &StepGraphon,
    options: &DistanceOptions,
) -> Result<DistanceReport> {
    distance(w1, w2, Objective::L1, options)
}

struct Candidate {
    value: f64,
    slack: f64,
    witness: Witness,
    spent: u64,
    certified: bool,
    exact: bool,
}

fn distance(
    w1: &StepGraphon,
    w2: &StepGraphon,
    objective: Objective,
    options: &DistanceOptions,
) -> Result<DistanceReport> {
    let (a, kept_a) = w1.without_zero_blocks();
    let (b, kept_b) = w2.without_zero_blocks();
    if a.num_blocks() == 0 && b.num_blocks() == 0 {
        return Ok(DistanceReport {
            value: 0.0,
            mode: ReportMode::Exact,
            witness: Witness::Trivial,
            quantization_error: 0.0,
            budget_spent: 0,
            certified: true,
        });
    }
    let r = common_refinement(&a, &b, options.quantum)?;
    let n = r.left.num_blocks();
    let lift = |parents: &[Option<usize>], kept: &[usize]| -> Vec<Option<usize>> {
        parents.iter().map(|p| p.map(|i| kept[i])).collect()
    };
    let left_blocks = lift(&r.left_parent, &kept_a);
    let right_blocks = lift(&r.right_parent, &kept_b);

    let mut refined: Option<Candidate> = None;
    match options.mode {
        DistanceMode::Exact => {
            if n <= EXACT_PERMUTATION_LIMIT {
                let (value, perm, spent) = best_permutation(&r.left, &r.right, objective);
                refined = Some(Candidate {
                    value: value + r.perturbation_bound,
                    slack: r.perturbation_bound,
                    witness: Witness::Permutation {
                        permutation: perm,
                        left_blocks,
                        right_blocks,
                    },
                    spent,
                    certified: true,
                    exact: r.perturbation_bound == 0.0,
                });
            }
        }
        DistanceMode::Anneal => {
            if n > ANNEAL_BLOCK_LIMIT {
                return Err(Error::ExactLimit {
                    what: "annealed distance",
                    blocks: n,
                    limit: ANNEAL_BLOCK_LIMIT,
                    cost: options.budget as f64 * (n * n) as f64,
                });
            }
            let (value, perm, spent, certified) =
                anneal(&r.left, &r.right, objective, options.budget, options.seed);
            refined = Some(Candidate {
                value: value + r.perturbation_bound,
                slack: r.perturbation_bound,
                witness: Witness::Permutation {
                    permutation: perm,
                    left_blocks,
                    right_blocks,
                },
                spent,
                certified,
                exact: false,
            });
        }
    }

    let needs_pairing = refined.as_ref().is_none_or(|c| !c.exact);
    let pairing = if needs_pairing
        && options.mode == DistanceMode::Exact
        && a.num_blocks().max(b.num_blocks()) <= EXACT_PAIRING_LIMIT
    {
        let (value, cells, spent) = best_pairing(&a, &b, objective);
        let cells = cells
            .into_iter()
            .map(|c| CouplingCell {
                left: c.left.map(|i| kept_a[i]),
                right: c.right.map(|j| kept_b[j]),
                mass: c.mass,
            })
            .collect();
        Some(Candidate {
            value,
            slack: 0.0,
            witness: Witness::Coupling { cells },
            spent,
            certified: true,
            exact: false,
        })
    } else {
        None
    };

    let spent = refined.as_ref().map_or(0, |c| c.spent) + pairing.as_ref().map_or(0, |c| c.spent);
    let best = match (refined, pairing) {
        (Some(x), Some(y)) => {
            if y.value < x.value {
                y
            } else {
                x
            }
        }
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => {
            let cost = (1..=n).map(|k| k as f64).product::<f64>() * 2f64.powi(n as i32);
            return Err(Error::ExactLimit {
                what: "distance",
                blocks: n,
                limit: EXACT_PERMUTATION_LIMIT,
                cost,
            });
        }
    };
    Ok(DistanceReport {
        value: best.value,
        mode: if best.exact {
            ReportMode::Exact
        } else {
            ReportMode::UpperBound
        },
        witness: best.witness,
        quantization_error: best.slack,
        budget_spent: spent,
        certified: best.certified,
    })
}

/// Objective value of `a − b^σ` on equal-mass blocks of mass `q`.
fn aligned_objective(
    a: &StepGraphon,
    b: &StepGraphon,
    perm: &[usize],
    objective: Objective,
    heuristic: bool,
) -> (f64, bool) {
    let n = a.num_blocks();
    let q = a.masses().first().copied().unwrap_or(0.0);
    let w = q * q;
    let mut diff = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            diff.push((a.value(i, j) - b.value(perm[i], perm[j])) * w);
        }
    }
    match objective {
        Objective::L1 => (diff.iter().map(|d| d.abs()).sum(), true),
        Objective::Cut => {
            let mode = if heuristic {
                CutNormMode::Heuristic
            } else {
                CutNormMode::Exact
            };
            let c = cut_norm_weighted(&diff, n, mode, OBJECTIVE_SEED)
                .expect("block count checked by caller");
            (c.value, c.exact)
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn better(x: &(f64, Vec<usize>), y: &(f64, Vec<usize>)) -> bool {
    x.0 < y.0 || (x.0 == y.0 && x.1 < y.1)
}

/// Minimum over all permutations; ties resolve to the lexicographically smallest.
fn best_permutation(
    a: &StepGraphon,
    b: &StepGraphon,
    objective: Objective,
) -> (f64, Vec<usize>, u64) {
    let n = a.num_blocks();
    if n == 0 {
        return (0.0, Vec::new(), 0);
    }
    let (value, perm, count) = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut rest: Vec<usize> = (0..n).filter(|&k| k != first).collect();
            let mut best = (f64::INFINITY, Vec::new());
            let mut count = 0u64;
            loop {
                let mut perm = Vec::with_capacity(n);
                perm.push(first);
                perm.extend_from_slice(&rest);
                let (v, _) = aligned_objective(a, b, &perm, objective, false);
                count += 1;
                let cand = (v, perm);
                if better(&cand, &best) {
                    best = cand;
                }
                if !next_permutation(&mut rest) {
                    break;
                }
            }
            (best.0, best.1, count)
        })
        .reduce(
            || (f64::INFINITY, Vec::new(), 0),
            |x, y| {
                let count = x.2 + y.2;
                let (v, p) = if better(&(y.0, y.1.clone()), &(x.0, x.1.clone())) {
                    (y.0, y.1)
                } else {
                    (x.0, x.1)
                };
                (v, p, count)
            },
        );
    (value, perm, count)
}

/// Minimum over block pairings with excess mass coupled to the zero tail.
fn best_pairing(
    a: &StepGraphon,
    b: &StepGraphon,
    objective: Objective,
) -> (f64, Vec<CouplingCell>, u64) {
    let (na, nb) = (a.num_blocks(), b.num_blocks());
    let slots = na.max(nb);
    let mut sigma: Vec<usize> = (0..slots).collect();
    let mut best: Option<(f64, Vec<CouplingCell>)> = None;
    let mut count = 0u64;
    loop {
        let cells = pairing_cells(a, b, &sigma);
        let v = coupled_objective(a, b, &cells, objective);
        count += 1;
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, cells));
        }
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    let (v, cells) = best.expect("at least one pairing");
    (v, cells, count)
}

fn pairing_cells(a: &StepGraphon, b: &StepGraphon, sigma: &[usize]) -> Vec<CouplingCell> {
    let (na, nb) = (a.num_blocks(), b.num_blocks());
    let mut cells = Vec::new();
    let mut push = |left, right, mass: f64| {
        if mass > 0.0 {
            cells.push(CouplingCell { left, right, mass });
        }
    };
    for (i, &j) in sigma.iter().enumerate() {
        let l = (i < na).then_some(i);
        let r = (j < nb).then_some(j);
        match (l, r) {
            (Some(i), Some(j)) => {
                let (p, q) = (a.masses()[i], b.masses()[j]);
                let common = p.min(q);
                push(Some(i), Some(j), common);
                push(Some(i), None, p - common);
                push(None, Some(j), q - common);
            }
            (Some(i), None) => push(Some(i), None, a.masses()[i]),
            (None, Some(j)) => push(None, Some(j), b.masses()[j]),
            (None, None) => {}
        }
    }
    cells
}

fn coupled_objective(
    a: &StepGraphon,
    b: &StepGraphon,
    cells: &[CouplingCell],
    objective: Objective,
) -> f64 {
    let n = cells.len();
    let value = |g: &StepGraphon, x: Option<usize>, y: Option<usize>| match (x, y) {
        (Some(x), Some(y)) => g.value(x, y),
        _ => 0.0,
    };
    let mut diff = Vec::with_capacity(n * n);
    for c in cells {
        for d in cells {
            let k = value(a, c.left, d.left) - value(b, c.right, d.right);
            diff.push(k * c.mass * d.mass);
        }
    }
    match objective {
        Objective::L1 => diff.iter().map(|d| d.abs()).sum(),
        Objective::Cut => {
            debug_assert!(n <= EXACT_CUT_NORM_LIMIT);
            cut_norm_weighted(&diff, n, CutNormMode::Exact, 0)
                .expect("pairing cells within exact limit")
                .value
        }
    }
}

/// Block order sorting degrees in decreasing order, ties by index.
fn degree_order(w: &StepGraphon) -> Vec<usize> {
    let d = w.degrees();
    let mut order: Vec<usize> = (0..w.num_blocks()).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]).then(i.cmp(&j)));
    order
}

/// Simulated annealing over transpositions of the block permutation.
///
/// Restart 0 starts from the degree-sorted alignment, the others from random
/// permutations. Temperatures cool geometrically from the initial objective
/// value to `10⁻³` of it.
fn anneal(
    a: &StepGraphon,
    b: &StepGraphon,
    objective: Objective,
    budget: u64,
    seed: u64,
) -> (f64, Vec<usize>, u64, bool) {
    let n = a.num_blocks();
    let heuristic = objective == Objective::Cut && n > ANNEAL_EXACT_OBJECTIVE;
    let eval = |p: &[usize]| aligned_objective(a, b, p, objective, heuristic).0;
    let identity: Vec<usize> = (0..n).collect();
    if n < 2 {
        return (eval(&identity), identity, 1, !heuristic);
    }
    let per_restart = (budget / RESTARTS).max(1);
    let mut spent = 0u64;
    let mut best = (f64::INFINITY, identity.clone());
    for restart in 0..RESTARTS {
        let mut rng = stream_rng(seed, restart);
        let mut current = if restart == 0 {
            let (oa, ob) = (degree_order(a), degree_order(b));
            let mut p = vec![0; n];
            for (k, &i) in oa.iter().enumerate() {
                p[i] = ob[k];
            }
            p
        } else {
            let mut p = identity.clone();
            p.shuffle(&mut rng);
            p
        };
        let mut value = eval(&current);
        spent += 1;
        if better(&(value, current.clone()), &best) {
            best = (value, current.clone());
        }
        let t0 = value;
        let steps = per_restart.saturating_sub(1);
        for step in 0..steps {
            if best.0 == 0.0 {
                break;
            }
            let t = t0 * COOLING.powf(step as f64 / steps.max(1) as f64);
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            current.swap(i, j);
            let next = eval(&current);
            spent += 1;
            let delta = next - value;
            if delta <= 0.0 || (t > 0.0 && rng.random::<f64>() < (-delta / t).exp()) {
                value = next;
                if better(&(value, current.clone()), &best) {
                    best = (value, current.clone());
                }
            } else {
                current.swap(i, j);
            }
        }
        if best.0 == 0.0 {
            break;
        }
    }
    (best.0, best.1, spent, !heuristic)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_block() -> StepGraphon {
        StepGraphon::new(vec![1.0, 1.0], vec![vec![0.8, 0.1], vec![0.1, 0.4]], false).unwrap()
    }

    #[test]
    fn swapped_blocks_are_at_distance_zero() {
        let w = two_block();
        let v = w.permuted(&[1, 0]).unwrap();
        let r = cut_distance(&w, &v, &DistanceOptions::exact()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.mode, ReportMode::Exact);
        assert_eq!(r.witness.block_permutation(), Some(vec![1, 0]));
    }

    #[test]
    fn zero_blocks_do_not_matter() {
        let w = two_block();
        let v = w.extended_with_zero_blocks(&[3.0]).unwrap();
        let r = cut_distance(&w, &v, &DistanceOptions::exact()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn distance_to_zero_is_cut_norm() {
        let w = two_block();
        let r = cut_distance(&w, &StepGraphon::zero(true), &DistanceOptions::exact()).unwrap();
        assert!((r.value - w.l1_norm()).abs() < 1e-12);
    }

    #[test]
    fn scaled_masses_use_the_coupling() {
        let w = StepGraphon::constant(1.0, 1.0).unwrap();
        let eps = 0.01;
        let v = w.scale_masses(1.0 + eps).unwrap();
        let r = cut_distance(&w, &v, &DistanceOptions::exact()).unwrap();
        let expected = (1.0 + eps) * (1.0 + eps) - 1.0;
        assert!((r.value - expected).abs() < 1e-12, "{}", r.value);
        assert!(matches!(r.witness, Witness::Coupling { .. }));
        assert_eq!(r.mode, ReportMode::UpperBound);
    }

    #[test]
    fn annealing_recovers_shuffles() {
        let n = 6;
        let values: Vec<f64> = (0..n * n)
            .map(|p| {
                let (i, j) = (p / n, p % n);
                ((i.min(j) * 7 + i.max(j) * 3) % 10) as f64 / 10.0
            })
            .collect();
        let w = StepGraphon::from_flat(vec![0.5; n], values, false).unwrap();
        let v = w.permuted(&[3, 0, 5, 1, 4, 2]).unwrap();
        let r = cut_distance(&w, &v, &DistanceOptions::anneal(4000, 1)).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.certified);
        assert!(r.budget_spent <= 4000);
    }

    #[test]
    fn l1_dominates_cut() {
        let w = two_block();
        let v = StepGraphon::new(vec![1.0, 0.5], vec![vec![0.2, 0.9], vec![0.9, 0.0]], false)
            .unwrap();
        let o = DistanceOptions::exact();
        let c = cut_distance(&w, &v, &o).unwrap();
        let l = invariant_l1_distance(&w, &v, &o).unwrap();
        assert!(c.value <= l.value + 1e-12);
    }

    #[test]
    fn too_many_blocks_reports_cost() {
        let n = 9;
        let w = StepGraphon::from_flat(vec![1.0; n], vec![0.5; n * n], false).unwrap();
        let v = StepGraphon::from_flat(vec![1.0; n], vec![0.25; n * n], false).unwrap();
        assert!(matches!(
            cut_distance(&w, &v, &DistanceOptions::exact()),
            Err(Error::ExactLimit { blocks: 9, .. })
        ));
    }
}
