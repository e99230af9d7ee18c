use serde::{Deserialize, Serialize};

use super::profile::DegreeProfile;
use crate::error::{Error, Result};

/// A symmetric step kernel over consecutive blocks `[b_{i-1}, b_i)` of ℝ₊.
///
/// Block `i` has mass `m_i` and the kernel equals `a_ij` on block `i` × block `j`.
/// When `ambient_infinite` is set the space continues past the last block as a
/// zero-valued tail of infinite mass.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon {
    masses: Vec<f64>,
    values: Vec<f64>,
    ambient_infinite: bool,
}

/// Result of cutting a graphon down to a finite-mass prefix.
#[derive(Debug, Clone)]
pub struct TailTruncation<G> {
    /// Measure of the retained set `U = [0, M]`.
    pub mass_bound: f64,
    pub graphon: G,
    /// `‖W − W·1_{U×U}‖₁`.
    pub residual: f64,
}

/// A finite partition of the support of a step graphon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partition {
    /// Cell index of every block; cells are unions of blocks.
    Blocks { cell_of_block: Vec<usize> },
    /// Cut points `0 = c_0 < c_1 < … < c_k`; cell `i` is `[c_i, c_{i+1})`.
    Boundaries { cuts: Vec<f64> },
}

impl StepGraphon {
    /// Builds a step graphon from a square values matrix.
    pub fn new(masses: Vec<f64>, values: Vec<Vec<f64>>, ambient_infinite: bool) -> Result<Self> {
        let n = masses.len();
        if values.len() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                row: values.len().min(n),
                found: values.len(),
            });
        }
        let mut flat = Vec::with_capacity(n * n);
        for (row, r) in values.iter().enumerate() {
            if r.len() != n {
                return Err(Error::ShapeMismatch {
                    expected: n,
                    row,
                    found: r.len(),
                });
            }
            flat.extend_from_slice(r);
        }
        Self::from_flat(masses, flat, ambient_infinite)
    }

    /// Builds a step graphon from a row-major values buffer.
    pub fn from_flat(masses: Vec<f64>, values: Vec<f64>, ambient_infinite: bool) -> Result<Self> {
        let n = masses.len();
        if values.len() != n * n {
            return Err(Error::InvalidGraphon(format!(
                "expected {} values for {n} blocks, got {}",
                n * n,
                values.len()
            )));
        }
        for (index, &mass) in masses.iter().enumerate() {
            if !(mass > 0.0 && mass.is_finite()) {
                return Err(Error::NonPositiveMass { index, mass });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let a = values[i * n + j];
                if !a.is_finite() {
                    return Err(Error::ValueOutOfRange {
                        row: i,
                        col: j,
                        value: a,
                        lo: f64::MIN,
                        hi: f64::MAX,
                    });
                }
                if j > i && a != values[j * n + i] {
                    return Err(Error::Asymmetric {
                        row: i,
                        col: j,
                        a,
                        b: values[j * n + i],
                    });
                }
            }
        }
        Ok(Self {
            masses,
            values,
            ambient_infinite,
        })
    }

    /// The zero graphon (no blocks).
    pub fn zero(ambient_infinite: bool) -> Self {
        Self {
            masses: Vec::new(),
            values: Vec::new(),
            ambient_infinite,
        }
    }

    /// A single block of the given mass with constant value.
    pub fn constant(mass: f64, value: f64) -> Result<Self> {
        Self::from_flat(vec![mass], vec![value], false)
    }

    pub fn num_blocks(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Row-major values buffer.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.masses.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.masses.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn values_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.num_blocks()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn ambient_infinite(&self) -> bool {
        self.ambient_infinite
    }

    pub fn with_ambient_infinite(mut self, flag: bool) -> Self {
        self.ambient_infinite = flag;
        self
    }

    /// Total mass of the explicit blocks.
    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Cumulative block boundaries `0 = b_0 < b_1 < … < b_n`.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.masses.len() + 1);
        let mut acc = 0.0;
        out.push(acc);
        for &m in &self.masses {
            acc += m;
            out.push(acc);
        }
        out
    }

    /// Index of the block containing `x`, if any.
    pub fn block_at(&self, x: f64) -> Option<usize> {
        if !(x >= 0.0) {
            return None;
        }
        let mut acc = 0.0;
        for (i, &m) in self.masses.iter().enumerate() {
            acc += m;
            if x < acc {
                return Some(i);
            }
        }
        None
    }

    /// `W(x, y)`; zero outside the blocks.
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        match (self.block_at(x), self.block_at(y)) {
            (Some(i), Some(j)) => self.value(i, j),
            _ => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&a| a == 0.0)
    }

    /// `Σ_ij |a_ij| m_i m_j`.
    pub fn l1_norm(&self) -> f64 {
        let n = self.num_blocks();
        let mut total = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.values[i * n + j].abs() * self.masses[j];
            }
            total += row * self.masses[i];
        }
        total
    }

    /// `∫∫ W` (signed).
    pub fn integral(&self) -> f64 {
        self.degrees()
            .iter()
            .zip(&self.masses)
            .map(|(d, m)| d * m)
            .sum()
    }

    /// Block degrees `D_i = Σ_j a_ij m_j`.
    pub fn degrees(&self) -> Vec<f64> {
        let n = self.num_blocks();
        (0..n)
            .map(|i| (0..n).map(|j| self.values[i * n + j] * self.masses[j]).sum())
            .collect()
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let levels = self
            .degrees()
            .into_iter()
            .zip(self.masses.iter().copied())
            .collect();
        DegreeProfile::from_levels(levels, true)
    }

    /// Rejects values outside `[lo, hi]`, naming the first offending entry.
    pub fn check_range(&self, lo: f64, hi: f64) -> Result<()> {
        let n = self.num_blocks();
        for i in 0..n {
            for j in 0..n {
                let value = self.value(i, j);
                if value < lo || value > hi {
                    return Err(Error::ValueOutOfRange {
                        row: i,
                        col: j,
                        value,
                        lo,
                        hi,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn check_probability_valued(&self) -> Result<()> {
        self.check_range(0.0, 1.0)
    }

    /// Largest `|a_ij|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, a| acc.max(a.abs()))
    }

    /// Smallest block prefix `[0, M]` whose complement carries L¹ mass below `eps`.
    pub fn truncate_tail(&self, eps: f64) -> Result<TailTruncation<StepGraphon>> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tail tolerance must be positive, got {eps}"
            )));
        }
        let n = self.num_blocks();
        let total = self.l1_norm();
        if eps >= total {
            return Ok(TailTruncation {
                mass_bound: 0.0,
                graphon: StepGraphon::zero(false),
                residual: total,
            });
        }
        // kept[p] = L¹ mass of the top-left p×p corner
        let mut kept = 0.0;
        for p in 1..=n {
            let i = p - 1;
            let mut border = self.value(i, i).abs() * self.masses[i] * self.masses[i];
            for j in 0..i {
                border += 2.0 * self.value(i, j).abs() * self.masses[i] * self.masses[j];
            }
            kept += border;
            let residual = (total - kept).max(0.0);
            if residual < eps || p == n {
                let residual = if p == n { 0.0 } else { residual };
                let graphon = self.restrict_prefix(p);
                return Ok(TailTruncation {
                    mass_bound: graphon.total_mass(),
                    graphon,
                    residual,
                });
            }
        }
        unreachable!("loop returns at p == n")
    }

    /// Restriction to the first `k` blocks, as a graphon on `[0, b_k]`.
    pub fn restrict_prefix(&self, k: usize) -> StepGraphon {
        let idx: Vec<usize> = (0..k.min(self.num_blocks())).collect();
        self.select(&idx).with_ambient_infinite(false)
    }

    /// Graphon whose block `i` is block `order[i]` of `self`. Indices may repeat.
    pub fn select(&self, order: &[usize]) -> StepGraphon {
        let n = self.num_blocks();
        let k = order.len();
        let mut values = Vec::with_capacity(k * k);
        for &i in order {
            for &j in order {
                values.push(self.values[i * n + j]);
            }
        }
        StepGraphon {
            masses: order.iter().map(|&i| self.masses[i]).collect(),
            values,
            ambient_infinite: self.ambient_infinite,
        }
    }

    /// Relabels blocks: block `i` of the result is block `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<StepGraphon> {
        let n = self.num_blocks();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidArgument(
                "block relabeling must be a permutation".into(),
            ));
        }
        Ok(self.select(perm))
    }

    /// Same kernel with block masses replaced.
    pub fn with_masses(&self, masses: Vec<f64>) -> Result<StepGraphon> {
        if masses.len() != self.num_blocks() {
            return Err(Error::InvalidArgument(format!(
                "expected {} masses, got {}",
                self.num_blocks(),
                masses.len()
            )));
        }
        Self::from_flat(masses, self.values.clone(), self.ambient_infinite)
    }

    /// Multiplies every block mass by `factor`.
    pub fn scale_masses(&self, factor: f64) -> Result<StepGraphon> {
        self.with_masses(self.masses.iter().map(|m| m * factor).collect())
    }

    /// Appends zero-valued blocks with the given masses.
    pub fn extended_with_zero_blocks(&self, extra: &[f64]) -> Result<StepGraphon> {
        let n = self.num_blocks();
        let k = n + extra.len();
        let mut values = vec![0.0; k * k];
        for i in 0..n {
            values[i * k..i * k + n].copy_from_slice(self.row(i));
        }
        let mut masses = self.masses.clone();
        masses.extend_from_slice(extra);
        Self::from_flat(masses, values, self.ambient_infinite)
    }

    /// Drops blocks whose row is identically zero; returns the kept block indices.
    ///
    /// Such blocks only contribute to the trivial extension, so cut and L¹
    /// distances are unchanged by removing them.
    pub fn without_zero_blocks(&self) -> (StepGraphon, Vec<usize>) {
        let kept: Vec<usize> = (0..self.num_blocks())
            .filter(|&i| self.row(i).iter().any(|&a| a != 0.0))
            .collect();
        (self.select(&kept), kept)
    }

    /// Splits block `i` into `counts[i]` blocks of mass `quantum` each.
    pub fn split_into_quanta(&self, counts: &[usize], quantum: f64) -> StepGraphon {
        let order: Vec<usize> = counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat(i).take(c))
            .collect();
        let mut out = self.select(&order);
        out.masses.iter_mut().for_each(|m| *m = quantum);
        out
    }

    /// Re-expresses the graphon on blocks cut at the given points.
    ///
    /// Returns the refined graphon and the parent block of every new block
    /// (`None` for zero-valued padding added past the last block).
    pub fn refine_at(&self, points: &[f64]) -> Result<(StepGraphon, Vec<Option<usize>>)> {
        let bounds = self.boundaries();
        let total = *bounds.last().unwrap_or(&0.0);
        let mut cuts: Vec<f64> = bounds.clone();
        for &p in points {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidPartition(format!("invalid cut point {p}")));
            }
            cuts.push(p);
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
        let end = *cuts.last().unwrap_or(&0.0);
        if end > total + 1e-12 * (1.0 + total) && !self.ambient_infinite {
            return Err(Error::InvalidPartition(format!(
                "cut point {end} lies beyond the finite space of mass {total}"
            )));
        }
        let mut masses = Vec::new();
        let mut parent = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi - lo <= 0.0 {
                continue;
            }
            let mid = 0.5 * (lo + hi);
            masses.push(hi - lo);
            parent.push(if mid < total { self.block_at(mid) } else { None });
        }
        let k = masses.len();
        let mut values = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                if let (Some(i), Some(j)) = (parent[a], parent[b]) {
                    values[a * k + b] = self.value(i, j);
                }
            }
        }
        let refined = Self::from_flat(masses, values, self.ambient_infinite)?;
        Ok((refined, parent))
    }

    /// `W_𝒫`: the average of `W` over every pair of partition cells.
    pub fn average_over_partition(&self, partition: &Partition) -> Result<StepGraphon> {
        match partition {
            Partition::Blocks { cell_of_block } => self.average_over_cells(cell_of_block),
            Partition::Boundaries { cuts } => {
                if cuts.len() < 2 {
                    return Err(Error::InvalidPartition("need at least two cut points".into()));
                }
                if cuts[0] != 0.0 {
                    return Err(Error::InvalidPartition("first cut point must be 0".into()));
                }
                for (k, w) in cuts.windows(2).enumerate() {
                    if !(w[1] > w[0]) {
                        return Err(Error::ZeroMassCell { cell: k });
                    }
                }
                let last = *cuts.last().unwrap();
                let total = self.total_mass();
                if last < total * (1.0 - 1e-12) {
                    return Err(Error::InvalidPartition(format!(
                        "cells cover [0, {last}] but the support extends to {total}"
                    )));
                }
                let (refined, _) = self.refine_at(cuts)?;
                let bounds = refined.boundaries();
                let cell_of_block: Vec<usize> = bounds
                    .windows(2)
                    .map(|w| {
                        let mid = 0.5 * (w[0] + w[1]);
                        cuts.windows(2)
                            .position(|c| mid >= c[0] && mid < c[1])
                            .unwrap_or(cuts.len() - 2)
                    })
                    .collect();
                refined.average_over_cells(&cell_of_block)
            }
        }
    }

    fn average_over_cells(&self, cell_of_block: &[usize]) -> Result<StepGraphon> {
        let n = self.num_blocks();
        if cell_of_block.len() != n {
            return Err(Error::InvalidPartition(format!(
                "assignment has {} entries for {n} blocks",
                cell_of_block.len()
            )));
        }
        let cells = cell_of_block.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut cell_mass = vec![0.0; cells];
        for (i, &c) in cell_of_block.iter().enumerate() {
            cell_mass[c] += self.masses[i];
        }
        if let Some(cell) = cell_mass.iter().position(|&m| m <= 0.0) {
            return Err(Error::ZeroMassCell { cell });
        }
        let mut sums = vec![0.0; cells * cells];
        for i in 0..n {
            let ci = cell_of_block[i];
            for j in 0..n {
                let cj = cell_of_block[j];
                sums[ci * cells + cj] += self.value(i, j) * self.masses[i] * self.masses[j];
            }
        }
        let mut values = vec![0.0; cells * cells];
        for a in 0..cells {
            for b in a..cells {
                let v = sums[a * cells + b] / (cell_mass[a] * cell_mass[b]);
                values[a * cells + b] = v;
                values[b * cells + a] = v;
            }
        }
        Self::from_flat(cell_mass, values, self.ambient_infinite)
    }

    /// Rescales the measure by `‖W‖₁^{-1/2}` so that the result has unit L¹ norm.
    ///
    /// The zero graphon maps to the zero graphon.
    pub fn stretch(&self) -> StepGraphon {
        let norm = self.l1_norm();
        if norm == 0.0 {
            return StepGraphon::zero(true);
        }
        let factor = norm.powf(-0.5);
        StepGraphon {
            masses: self.masses.iter().map(|m| m * factor).collect(),
            values: self.values.clone(),
            ambient_infinite: true,
        }
    }

    /// Pointwise difference of two graphons on identical blocks.
    pub fn difference(&self, other: &StepGraphon) -> Result<StepGraphon> {
        if self.masses != other.masses {
            return Err(Error::InvalidArgument(
                "difference requires identical block masses".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(StepGraphon {
            masses: self.masses.clone(),
            values,
            ambient_infinite: self.ambient_infinite || other.ambient_infinite,
        })
    }
}
