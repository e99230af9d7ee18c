use serde::{Deserialize, Serialize};

use super::profile::DegreeProfile;
use super::step::{StepGraphon, TailTruncation};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_trapezoid, gauss_legendre_2d, Estimate, DEFAULT_TOLERANCE};

/// Largest number of grid cells accepted by [`AnalyticGraphon::discretize`].
pub const MAX_GRID_CELLS: usize = 4096;

const PROFILE_CELLS: usize = 1024;
const TAIL_GRID: usize = 1024;
const UNIFORM_SIMPLEX_CELLS: usize = 64;

/// Power-law feature weight `f` of the Caron-Fox kernel `1 − exp(−f(x) f(y))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PowerLaw {
    /// `c (1 + x)^{−γ}`
    ShiftedPower { c: f64, gamma: f64 },
    /// `c min(1, x^{−γ})`
    CappedPower { c: f64, gamma: f64 },
}

impl PowerLaw {
    pub fn validate(&self) -> Result<()> {
        let (c, gamma) = self.params();
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidGraphon(format!(
                "power-law scale must be positive, got {c}"
            )));
        }
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidGraphon(format!(
                "power-law exponent must exceed 1 for an integrable kernel, got {gamma}"
            )));
        }
        Ok(())
    }

    fn params(&self) -> (f64, f64) {
        match *self {
            PowerLaw::ShiftedPower { c, gamma } | PowerLaw::CappedPower { c, gamma } => (c, gamma),
        }
    }

    pub fn gamma(&self) -> f64 {
        self.params().1
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            PowerLaw::ShiftedPower { c, gamma } => c * (1.0 + x).powf(-gamma),
            PowerLaw::CappedPower { c, gamma } => {
                if x <= 1.0 {
                    c
                } else {
                    c * x.powf(-gamma)
                }
            }
        }
    }

    /// `∫_0^∞ f`.
    pub fn total_integral(&self) -> f64 {
        match *self {
            PowerLaw::ShiftedPower { c, gamma } => c / (gamma - 1.0),
            PowerLaw::CappedPower { c, gamma } => c * gamma / (gamma - 1.0),
        }
    }

    /// `∫_x^∞ f`.
    pub fn tail_integral(&self, x: f64) -> f64 {
        match *self {
            PowerLaw::ShiftedPower { c, gamma } => c * (1.0 + x).powf(1.0 - gamma) / (gamma - 1.0),
            PowerLaw::CappedPower { c, gamma } => {
                if x >= 1.0 {
                    c * x.powf(1.0 - gamma) / (gamma - 1.0)
                } else {
                    c * (1.0 - x) + c / (gamma - 1.0)
                }
            }
        }
    }

    /// Upper bound on the L¹ mass of the Caron-Fox kernel outside `[0, x]²`,
    /// from `1 − e^{−uv} ≤ uv`.
    pub fn residual_bound(&self, x: f64) -> f64 {
        let total = self.total_integral();
        let head = total - self.tail_integral(x);
        (total * total - head * head).max(0.0)
    }
}

#[inline]
fn caron_kernel(f: &PowerLaw, x: f64, y: f64) -> f64 {
    -(-(f.value(x) * f.value(y))).exp_m1()
}

fn caron_degree(f: &PowerLaw, x: f64, x_max: f64, tol: f64) -> Estimate {
    let fx = f.value(x);
    adaptive_trapezoid(|y| -(-(fx * f.value(y))).exp_m1(), 0.0, x_max, tol)
}

fn caron_norm(f: &PowerLaw, x_max: f64, tol: f64) -> Estimate {
    let inner_tol = tol / (2.0 * x_max.max(1.0));
    let worst_inner = std::cell::Cell::new(0.0f64);
    let converged = std::cell::Cell::new(true);
    let outer = adaptive_trapezoid(
        |x| {
            let d = caron_degree(f, x, x_max, inner_tol);
            worst_inner.set(worst_inner.get().max(d.error_bound));
            converged.set(converged.get() && d.converged);
            d.value
        },
        0.0,
        x_max,
        0.5 * tol,
    );
    Estimate {
        value: outer.value,
        error_bound: outer.error_bound + x_max * worst_inner.get(),
        converged: outer.converged && converged.get(),
    }
}

/// Boundary curve `y = f(x)` of a region-indicator graphon `1[y ≤ f(x)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Boundary {
    /// `f(x) = x^{−1/a}` on `(0, 1]` and `x^{−a}` on `[1, ∞)`, `a > 1`.
    ///
    /// `f` is a decreasing involution, so `y ≤ f(x)` iff `x ≤ f(y)`. The test
    /// is evaluated as `ψ(ln x) + ψ(ln y) ≤ 0` with `ψ(t) = t` for `t ≤ 0` and
    /// `a t` for `t > 0`, which is symmetric in floating point.
    PowerInvolution { a: f64 },
}

impl Boundary {
    pub fn validate(&self) -> Result<()> {
        let Boundary::PowerInvolution { a } = *self;
        if !(a > 1.0 && a.is_finite()) {
            return Err(Error::InvalidGraphon(format!(
                "boundary exponent must exceed 1, got {a}"
            )));
        }
        Ok(())
    }

    pub fn exponent(&self) -> f64 {
        let Boundary::PowerInvolution { a } = *self;
        a
    }

    /// `f(x)`, with `f(0) = ∞`.
    pub fn value(&self, x: f64) -> f64 {
        let a = self.exponent();
        if x <= 0.0 {
            f64::INFINITY
        } else if x <= 1.0 {
            x.powf(-1.0 / a)
        } else {
            x.powf(-a)
        }
    }

    #[inline]
    fn psi(&self, t: f64) -> f64 {
        if t <= 0.0 {
            t
        } else {
            self.exponent() * t
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        if x <= 0.0 || y <= 0.0 {
            return true;
        }
        self.psi(x.ln()) + self.psi(y.ln()) <= 0.0
    }

    /// `∫_0^x f`.
    pub fn primitive(&self, x: f64) -> f64 {
        let a = self.exponent();
        if x <= 0.0 {
            0.0
        } else if x <= 1.0 {
            a / (a - 1.0) * x.powf((a - 1.0) / a)
        } else if x.is_infinite() {
            self.full_norm()
        } else {
            a / (a - 1.0) + (1.0 - x.powf(1.0 - a)) / (a - 1.0)
        }
    }

    /// `‖1[y ≤ f(x)]‖₁ = ∫ f`.
    pub fn full_norm(&self) -> f64 {
        let a = self.exponent();
        (a + 1.0) / (a - 1.0)
    }

    /// `∫_0^X min(f(x), X) dx`, the L¹ norm of the kernel restricted to `[0, X]²`.
    pub fn truncated_norm(&self, x_max: f64) -> f64 {
        if x_max <= 0.0 {
            return 0.0;
        }
        let knee = x_max.min(self.value(x_max));
        x_max * knee + self.primitive(x_max) - self.primitive(knee)
    }

    /// `∫_{x0}^{x1} clamp(f(x) − y0, 0, y1 − y0) dx`: the area of the region
    /// inside the rectangle `[x0, x1] × [y0, y1]`.
    pub fn cell_area(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
        let full_until = self.value(y1);
        let zero_from = self.value(y0);
        let a_end = x1.min(full_until);
        let mut area = (a_end - x0).max(0.0) * (y1 - y0);
        let lo = x0.max(full_until);
        let hi = x1.min(zero_from);
        if hi > lo {
            area += self.primitive(hi) - self.primitive(lo) - y0 * (hi - lo);
        }
        area.max(0.0)
    }
}

/// Measure on the simplex of membership weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SimplexMeasure {
    /// Uniform probability measure on `{w ∈ ℝ^k_{≥0} : Σ w = 1}`.
    Uniform { k: usize },
    /// Atoms at the given weight vectors with the given masses.
    Cells {
        weights: Vec<Vec<f64>>,
        masses: Vec<f64>,
    },
}

impl SimplexMeasure {
    pub fn dimension(&self) -> usize {
        match self {
            SimplexMeasure::Uniform { k } => *k,
            SimplexMeasure::Cells { weights, .. } => weights.first().map_or(0, Vec::len),
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            SimplexMeasure::Uniform { .. } => 1.0,
            SimplexMeasure::Cells { masses, .. } => masses.iter().sum(),
        }
    }

    /// `∫ w_k dν` for every coordinate `k`.
    pub fn weight_integrals(&self) -> Vec<f64> {
        match self {
            SimplexMeasure::Uniform { k } => vec![1.0 / *k as f64; *k],
            SimplexMeasure::Cells { weights, masses } => {
                let k = self.dimension();
                let mut out = vec![0.0; k];
                for (w, m) in weights.iter().zip(masses) {
                    for (o, x) in out.iter_mut().zip(w) {
                        *o += m * x;
                    }
                }
                out
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SimplexMeasure::Uniform { k } => {
                if *k < 1 {
                    return Err(Error::InvalidGraphon("simplex dimension must be at least 1".into()));
                }
            }
            SimplexMeasure::Cells { weights, masses } => {
                if weights.is_empty() || weights.len() != masses.len() {
                    return Err(Error::InvalidGraphon(
                        "simplex cells need one mass per weight vector".into(),
                    ));
                }
                let k = weights[0].len();
                for (index, (w, &m)) in weights.iter().zip(masses).enumerate() {
                    if !(m > 0.0 && m.is_finite()) {
                        return Err(Error::NonPositiveMass { index, mass: m });
                    }
                    let sum: f64 = w.iter().sum();
                    if w.len() != k || w.iter().any(|&x| !(x >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                        return Err(Error::InvalidGraphon(format!(
                            "simplex cell {index} is not a probability vector of length {k}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Finite cell decomposition: `(mean weight vector, mass)` per cell.
    fn cells(&self, family: &'static str) -> Result<Vec<(Vec<f64>, f64)>> {
        match self {
            SimplexMeasure::Cells { weights, masses } => Ok(weights
                .iter()
                .cloned()
                .zip(masses.iter().copied())
                .collect()),
            SimplexMeasure::Uniform { k: 1 } => Ok(vec![(vec![1.0], 1.0)]),
            SimplexMeasure::Uniform { k: 2 } => Ok(uniform_segment_cells(UNIFORM_SIMPLEX_CELLS)),
            SimplexMeasure::Uniform { k } => Err(Error::UnsupportedFamily {
                family,
                reason: format!("no finite cell decomposition for the uniform {k}-simplex"),
            }),
        }
    }
}

/// `r` equal-mass cells of the segment `{(t, 1 − t)}`, each represented by its mean.
fn uniform_segment_cells(r: usize) -> Vec<(Vec<f64>, f64)> {
    (0..r)
        .map(|c| {
            let t = (c as f64 + 0.5) / r as f64;
            (vec![t, 1.0 - t], 1.0 / r as f64)
        })
        .collect()
}

/// `K × K` component kernels of a mixed-membership graphon.
#[derive(Debug, Clone, PartialEq)]
pub enum Components {
    /// Step kernels over a shared block list; `kernels[k1 * K + k2]` is the
    /// row-major `n × n` value buffer of `W_{k1 k2}`.
    Step {
        masses: Vec<f64>,
        kernels: Vec<Vec<f64>>,
    },
    /// Caron-Fox kernels; `f[k1 * K + k2]` is the weight of `W_{k1 k2}`.
    CaronFox { f: Vec<PowerLaw> },
}

/// Mixed-membership graphon on `Δ × ℝ₊`:
/// `W((w, x), (w', x')) = Σ_{k1,k2} w_{k1} w'_{k2} W_{k1 k2}(x, x')`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedMembership {
    simplex: SimplexMeasure,
    components: Components,
}

impl MixedMembership {
    pub fn new(simplex: SimplexMeasure, components: Components) -> Result<Self> {
        simplex.validate()?;
        let k = simplex.dimension();
        match &components {
            Components::Step { masses, kernels } => {
                if kernels.len() != k * k {
                    return Err(Error::InvalidGraphon(format!(
                        "expected {} component kernels, got {}",
                        k * k,
                        kernels.len()
                    )));
                }
                let n = masses.len();
                for (index, &mass) in masses.iter().enumerate() {
                    if !(mass > 0.0 && mass.is_finite()) {
                        return Err(Error::NonPositiveMass { index, mass });
                    }
                }
                for (c, kern) in kernels.iter().enumerate() {
                    if kern.len() != n * n {
                        return Err(Error::InvalidGraphon(format!(
                            "component {c} has {} values, expected {}",
                            kern.len(),
                            n * n
                        )));
                    }
                    if let Some(p) = kern.iter().position(|v| !(0.0..=1.0).contains(v)) {
                        return Err(Error::ValueOutOfRange {
                            row: p / n,
                            col: p % n,
                            value: kern[p],
                            lo: 0.0,
                            hi: 1.0,
                        });
                    }
                }
                for k1 in 0..k {
                    for k2 in 0..k {
                        let a = &kernels[k1 * k + k2];
                        let b = &kernels[k2 * k + k1];
                        for i in 0..n {
                            for j in 0..n {
                                if a[i * n + j] != b[j * n + i] {
                                    return Err(Error::Asymmetric {
                                        row: i,
                                        col: j,
                                        a: a[i * n + j],
                                        b: b[j * n + i],
                                    });
                                }
                            }
                        }
                    }
                }
            }
            Components::CaronFox { f } => {
                if f.len() != k * k {
                    return Err(Error::InvalidGraphon(format!(
                        "expected {} component weights, got {}",
                        k * k,
                        f.len()
                    )));
                }
                for p in f {
                    p.validate()?;
                }
                for k1 in 0..k {
                    for k2 in 0..k1 {
                        if f[k1 * k + k2] != f[k2 * k + k1] {
                            return Err(Error::InvalidGraphon(format!(
                                "component weights ({k1}, {k2}) and ({k2}, {k1}) differ"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { simplex, components })
    }

    pub fn simplex(&self) -> &SimplexMeasure {
        &self.simplex
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    pub fn k(&self) -> usize {
        self.simplex.dimension()
    }

    fn evaluate_ordered(&self, a: &[f64], b: &[f64], x_max: f64) -> f64 {
        let k = self.k();
        let (wa, xa) = (&a[..k], a[k]);
        let (wb, xb) = (&b[..k], b[k]);
        match &self.components {
            Components::Step { masses, kernels } => {
                let (Some(i), Some(j)) = (block_index(masses, xa), block_index(masses, xb)) else {
                    return 0.0;
                };
                let n = masses.len();
                let mut sum = 0.0;
                for k1 in 0..k {
                    for k2 in 0..k {
                        sum += wa[k1] * wb[k2] * kernels[k1 * k + k2][i * n + j];
                    }
                }
                sum
            }
            Components::CaronFox { f } => {
                if xa > x_max || xb > x_max {
                    return 0.0;
                }
                let mut sum = 0.0;
                for k1 in 0..k {
                    for k2 in 0..k {
                        sum += wa[k1] * wb[k2] * caron_kernel(&f[k1 * k + k2], xa, xb);
                    }
                }
                sum
            }
        }
    }

    fn component_norms(&self, x_max: f64, tol: f64) -> Vec<Estimate> {
        match &self.components {
            Components::Step { masses, kernels } => {
                let n = masses.len();
                kernels
                    .iter()
                    .map(|kern| {
                        let mut total = 0.0;
                        for i in 0..n {
                            for j in 0..n {
                                total += kern[i * n + j] * masses[i] * masses[j];
                            }
                        }
                        Estimate::exact(total)
                    })
                    .collect()
            }
            Components::CaronFox { f } => {
                let k = self.k();
                let mut out = vec![Estimate::exact(0.0); k * k];
                for k1 in 0..k {
                    for k2 in k1..k {
                        let e = caron_norm(&f[k1 * k + k2], x_max, tol / (k * k) as f64);
                        out[k1 * k + k2] = e;
                        out[k2 * k + k1] = e;
                    }
                }
                out
            }
        }
    }

    fn l1_norm(&self, x_max: f64) -> Estimate {
        let k = self.k();
        let e = self.simplex.weight_integrals();
        let norms = self.component_norms(x_max, DEFAULT_TOLERANCE);
        let mut out = Estimate::exact(0.0);
        for k1 in 0..k {
            for k2 in 0..k {
                let w = e[k1] * e[k2];
                let n = norms[k1 * k + k2];
                out.value += w * n.value;
                out.error_bound += w * n.error_bound;
                out.converged &= n.converged;
            }
        }
        out
    }

    fn residual_bound(&self, x_max: f64) -> f64 {
        match &self.components {
            Components::Step { .. } => 0.0,
            Components::CaronFox { f } => {
                let k = self.k();
                let e = self.simplex.weight_integrals();
                let mut total = 0.0;
                for k1 in 0..k {
                    for k2 in 0..k {
                        total += e[k1] * e[k2] * f[k1 * k + k2].residual_bound(x_max);
                    }
                }
                total
            }
        }
    }

    fn degree_profile(&self, x_max: f64) -> Result<DegreeProfile> {
        let k = self.k();
        let cells = self.simplex.cells("mixed_membership")?;
        let e = self.simplex.weight_integrals();
        // line cells with D_{k1 k2} on each
        let (widths, comp_degrees, exact): (Vec<f64>, Vec<Vec<f64>>, bool) = match &self.components {
            Components::Step { masses, kernels } => {
                let n = masses.len();
                let degs = kernels
                    .iter()
                    .map(|kern| {
                        (0..n)
                            .map(|i| (0..n).map(|j| kern[i * n + j] * masses[j]).sum())
                            .collect()
                    })
                    .collect();
                (masses.clone(), degs, true)
            }
            Components::CaronFox { f } => {
                let edges = profile_grid(x_max);
                let widths = edges.windows(2).map(|w| w[1] - w[0]).collect();
                let degs = f
                    .iter()
                    .map(|p| {
                        edges
                            .windows(2)
                            .map(|w| caron_degree(p, 0.5 * (w[0] + w[1]), x_max, 1e-8).value)
                            .collect()
                    })
                    .collect();
                (widths, degs, false)
            }
        };
        let mut levels = Vec::with_capacity(cells.len() * widths.len());
        for (w, cell_mass) in &cells {
            for (b, width) in widths.iter().enumerate() {
                let mut d = 0.0;
                for k1 in 0..k {
                    for k2 in 0..k {
                        d += w[k1] * e[k2] * comp_degrees[k1 * k + k2][b];
                    }
                }
                levels.push((d, cell_mass * width));
            }
        }
        let exact = exact && matches!(self.simplex, SimplexMeasure::Cells { .. });
        Ok(DegreeProfile::from_levels(levels, exact))
    }

    fn flatten(&self) -> Result<StepGraphon> {
        let Components::Step { masses, kernels } = &self.components else {
            return Err(Error::UnsupportedFamily {
                family: "mixed_membership",
                reason: "Caron-Fox components have no finite block form; use discretize on the components".into(),
            });
        };
        let cells = self.simplex.cells("mixed_membership")?;
        let k = self.k();
        let n = masses.len();
        let total = cells.len() * n;
        let mut out_masses = Vec::with_capacity(total);
        for (_, cm) in &cells {
            for m in masses {
                out_masses.push(cm * m);
            }
        }
        let mut values = vec![0.0; total * total];
        for (c1, (w1, _)) in cells.iter().enumerate() {
            for (c2, (w2, _)) in cells.iter().enumerate().skip(c1) {
                for i in 0..n {
                    for j in 0..n {
                        let mut v = 0.0;
                        for k1 in 0..k {
                            for k2 in 0..k {
                                v += w1[k1] * w2[k2] * kernels[k1 * k + k2][i * n + j];
                            }
                        }
                        let r = c1 * n + i;
                        let s = c2 * n + j;
                        values[r * total + s] = v;
                        values[s * total + r] = v;
                    }
                }
            }
        }
        StepGraphon::from_flat(out_masses, values, false)
    }
}

fn block_index(masses: &[f64], x: f64) -> Option<usize> {
    if !(x >= 0.0) {
        return None;
    }
    let mut acc = 0.0;
    for (i, &m) in masses.iter().enumerate() {
        acc += m;
        if x < acc {
            return Some(i);
        }
    }
    None
}

/// Grid edges on `[0, x_max]`, quadratically refined towards 0.
fn profile_grid(x_max: f64) -> Vec<f64> {
    (0..=PROFILE_CELLS)
        .map(|i| {
            let t = i as f64 / PROFILE_CELLS as f64;
            x_max * t * t
        })
        .collect()
}

/// Disjoint intervals `I_k` of ℝ₊ with connection probabilities `p_{kl}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalBlocks {
    intervals: Vec<(f64, f64)>,
    probs: Vec<f64>,
    kept: usize,
}

impl IntervalBlocks {
    pub fn new(
        intervals: Vec<(f64, f64)>,
        probs: Vec<Vec<f64>>,
        truncation_count: Option<usize>,
    ) -> Result<Self> {
        let n = intervals.len();
        for (index, &(a, b)) in intervals.iter().enumerate() {
            if !(a >= 0.0 && b > a && b.is_finite()) {
                return Err(Error::NonPositiveMass {
                    index,
                    mass: b - a,
                });
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| intervals[i].0.total_cmp(&intervals[j].0));
        for w in order.windows(2) {
            if intervals[w[0]].1 > intervals[w[1]].0 {
                return Err(Error::InvalidGraphon(format!(
                    "intervals {} and {} overlap",
                    w[0], w[1]
                )));
            }
        }
        let step = StepGraphon::new(
            intervals.iter().map(|&(a, b)| b - a).collect(),
            probs,
            true,
        )?;
        step.check_probability_valued()?;
        let kept = truncation_count.map_or(n, |k| k.min(n));
        Ok(Self {
            intervals,
            probs: step.values().to_vec(),
            kept,
        })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals[..self.kept]
    }

    pub fn all_intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn probabilities(&self) -> Vec<Vec<f64>> {
        let n = self.intervals.len();
        (0..n).map(|i| self.probs[i * n..(i + 1) * n].to_vec()).collect()
    }

    pub fn truncation_count(&self) -> usize {
        self.kept
    }

    fn index_of(&self, x: f64) -> Option<usize> {
        self.intervals()
            .iter()
            .position(|&(a, b)| x >= a && x < b)
    }

    fn prob(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.intervals.len() + j]
    }

    /// The retained intervals as consecutive blocks, in the given order.
    pub fn as_step(&self) -> StepGraphon {
        let full = StepGraphon::from_flat(
            self.intervals.iter().map(|&(a, b)| b - a).collect(),
            self.probs.clone(),
            true,
        )
        .expect("validated on construction");
        if self.kept == self.intervals.len() {
            full
        } else {
            full.restrict_prefix(self.kept).with_ambient_infinite(true)
        }
    }

    fn full_norm(&self) -> f64 {
        StepGraphon::from_flat(
            self.intervals.iter().map(|&(a, b)| b - a).collect(),
            self.probs.clone(),
            true,
        )
        .expect("validated on construction")
        .l1_norm()
    }

    fn end(&self) -> f64 {
        self.intervals().iter().fold(0.0, |acc, &(_, b)| acc.max(b))
    }
}

/// The closed set of analytic graphon families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    CaronFox { f: PowerLaw },
    RegionIndicator { boundary: Boundary },
    InfiniteBlock(IntervalBlocks),
    MixedMembership(MixedMembership),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::CaronFox { .. } => "caron_fox",
            Family::RegionIndicator { .. } => "region_indicator",
            Family::InfiniteBlock(_) => "infinite_block",
            Family::MixedMembership(_) => "mixed_membership",
        }
    }
}

/// User-supplied truncation request: a cutoff, a residual target, or both.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_l1_residual: Option<f64>,
}

/// Resolved truncation: the cutoff in use and the L¹ mass it discards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub x_max: f64,
    /// Upper bound on `‖W − W·1_{[0,x_max]²}‖₁` for the untruncated kernel.
    pub l1_residual: f64,
    pub requested: TruncationSpec,
}

/// Graphon from one of the closed-form families, cut off at a finite `x_max`.
///
/// [`evaluate`](Self::evaluate) is zero beyond the cutoff, so every derived
/// quantity (norms, degrees, samples) refers to the truncated kernel; the
/// discarded mass is recorded in [`Truncation::l1_residual`].
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticGraphon {
    family: Family,
    truncation: Truncation,
}

impl AnalyticGraphon {
    pub fn caron_fox(f: PowerLaw, truncation: TruncationSpec) -> Result<Self> {
        f.validate()?;
        let t = resolve_truncation(truncation, |x| f.residual_bound(x))?;
        Ok(Self {
            family: Family::CaronFox { f },
            truncation: t,
        })
    }

    pub fn region_indicator(boundary: Boundary, truncation: TruncationSpec) -> Result<Self> {
        boundary.validate()?;
        let t = resolve_truncation(truncation, |x| {
            (boundary.full_norm() - boundary.truncated_norm(x)).max(0.0)
        })?;
        Ok(Self {
            family: Family::RegionIndicator { boundary },
            truncation: t,
        })
    }

    pub fn infinite_block(blocks: IntervalBlocks) -> Self {
        let kept_norm = blocks.as_step().l1_norm();
        let residual = (blocks.full_norm() - kept_norm).max(0.0);
        let truncation = Truncation {
            x_max: blocks.end(),
            l1_residual: residual,
            requested: TruncationSpec::default(),
        };
        Self {
            family: Family::InfiniteBlock(blocks),
            truncation,
        }
    }

    pub fn mixed_membership(mm: MixedMembership, truncation: TruncationSpec) -> Result<Self> {
        let t = match mm.components() {
            Components::Step { masses, .. } => Truncation {
                x_max: masses.iter().sum(),
                l1_residual: 0.0,
                requested: truncation,
            },
            Components::CaronFox { .. } => resolve_truncation(truncation, |x| mm.residual_bound(x))?,
        };
        Ok(Self {
            family: Family::MixedMembership(mm),
            truncation: t,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }

    pub fn x_max(&self) -> f64 {
        self.truncation.x_max
    }

    /// Number of coordinates of a feature point.
    pub fn feature_dim(&self) -> usize {
        match &self.family {
            Family::MixedMembership(mm) => mm.k() + 1,
            _ => 1,
        }
    }

    /// Whether the underlying space has infinite measure.
    pub fn ambient_infinite(&self) -> bool {
        !matches!(
            &self.family,
            Family::MixedMembership(MixedMembership {
                components: Components::Step { .. },
                ..
            })
        )
    }

    /// `W(x, y)` for feature points `x`, `y`; zero outside the truncated support.
    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> f64 {
        let x_max = self.truncation.x_max;
        match &self.family {
            Family::CaronFox { f } => {
                let (a, b) = (x[0], y[0]);
                if !(a >= 0.0 && b >= 0.0) || a > x_max || b > x_max {
                    return 0.0;
                }
                caron_kernel(f, a, b)
            }
            Family::RegionIndicator { boundary } => {
                let (a, b) = (x[0], y[0]);
                if !(a >= 0.0 && b >= 0.0) || a > x_max || b > x_max {
                    return 0.0;
                }
                boundary.contains(a, b) as u8 as f64
            }
            Family::InfiniteBlock(blocks) => match (blocks.index_of(x[0]), blocks.index_of(y[0])) {
                (Some(i), Some(j)) => blocks.prob(i, j),
                _ => 0.0,
            },
            Family::MixedMembership(mm) => {
                // fixed argument order keeps the result exactly symmetric
                let swap = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne())
                    .is_some_and(|o| o.is_gt());
                if swap {
                    mm.evaluate_ordered(y, x, x_max)
                } else {
                    mm.evaluate_ordered(x, y, x_max)
                }
            }
        }
    }

    /// `‖W‖₁` of the truncated kernel.
    pub fn l1_norm(&self) -> Estimate {
        self.l1_norm_with_tolerance(DEFAULT_TOLERANCE)
    }

    pub fn l1_norm_with_tolerance(&self, tol: f64) -> Estimate {
        let x_max = self.truncation.x_max;
        match &self.family {
            Family::CaronFox { f } => caron_norm(f, x_max, tol),
            Family::RegionIndicator { boundary } => Estimate::exact(boundary.truncated_norm(x_max)),
            Family::InfiniteBlock(blocks) => Estimate::exact(blocks.as_step().l1_norm()),
            Family::MixedMembership(mm) => mm.l1_norm(x_max),
        }
    }

    /// `D_W(x)` of the truncated kernel.
    pub fn degree(&self, x: &[f64]) -> Result<Estimate> {
        let x_max = self.truncation.x_max;
        match &self.family {
            Family::CaronFox { f } => Ok(if x[0] > x_max || x[0] < 0.0 {
                Estimate::exact(0.0)
            } else {
                caron_degree(f, x[0], x_max, DEFAULT_TOLERANCE)
            }),
            Family::RegionIndicator { boundary } => Ok(Estimate::exact(
                if x[0] > x_max || x[0] < 0.0 {
                    0.0
                } else {
                    boundary.value(x[0]).min(x_max)
                },
            )),
            Family::InfiniteBlock(blocks) => {
                let step = blocks.as_step();
                Ok(Estimate::exact(
                    blocks.index_of(x[0]).map_or(0.0, |i| step.degrees()[i]),
                ))
            }
            Family::MixedMembership(_) => Err(Error::UnsupportedFamily {
                family: "mixed_membership",
                reason: "pointwise degrees are only tabulated through degree_profile".into(),
            }),
        }
    }

    /// Tabulated `λ ↦ μ({D_W > λ})`.
    pub fn degree_profile(&self) -> Result<DegreeProfile> {
        let x_max = self.truncation.x_max;
        match &self.family {
            Family::CaronFox { f } => {
                let edges = profile_grid(x_max);
                let levels = edges
                    .windows(2)
                    .map(|w| {
                        let mid = 0.5 * (w[0] + w[1]);
                        (caron_degree(f, mid, x_max, 1e-8).value, w[1] - w[0])
                    })
                    .collect();
                Ok(DegreeProfile::from_levels(levels, false))
            }
            Family::RegionIndicator { boundary } => {
                let edges = profile_grid(x_max);
                // cell average of min(f, X) is exact through cell_area
                let levels = edges
                    .windows(2)
                    .map(|w| {
                        let width = w[1] - w[0];
                        (boundary.cell_area(w[0], w[1], 0.0, x_max) / width, width)
                    })
                    .collect();
                Ok(DegreeProfile::from_levels(levels, false))
            }
            Family::InfiniteBlock(blocks) => Ok(blocks.as_step().degree_profile()),
            Family::MixedMembership(mm) => mm.degree_profile(x_max),
        }
    }

    /// Largest `k` such that `D_W ∈ L^k` of the untruncated kernel is decided
    /// by the family's tail exponents, if known.
    pub fn star_moment_finite(&self, k: u32) -> Option<bool> {
        match &self.family {
            // D_W(x) ~ f(x) ∫f at infinity and bounded near 0
            Family::CaronFox { f } => Some(k as f64 * f.gamma() > 1.0),
            // D_W = f: x^{-1/a} near 0 and x^{-a} at infinity
            Family::RegionIndicator { boundary } => {
                let a = boundary.exponent();
                Some((k as f64) / a < 1.0 && (k as f64) * a > 1.0)
            }
            Family::InfiniteBlock(_) => Some(true),
            Family::MixedMembership(mm) => match mm.components() {
                Components::Step { .. } => Some(true),
                Components::CaronFox { .. } => None,
            },
        }
    }

    /// Smallest grid point `M` with `‖W − W·1_{[0,M]²}‖₁ < ε` for the truncated kernel.
    pub fn truncate_tail(&self, eps: f64) -> Result<TailTruncation<AnalyticGraphon>> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tail tolerance must be positive, got {eps}"
            )));
        }
        let x_max = self.truncation.x_max;
        match &self.family {
            Family::CaronFox { .. } | Family::RegionIndicator { .. } => {
                let total = self.l1_norm().value;
                let residual_at = |m: f64| -> f64 {
                    let cut = self.with_x_max(m);
                    (total - cut.l1_norm().value).max(0.0)
                };
                // residual is nonincreasing in M, so bisect over grid indices
                let (mut lo, mut hi) = (0usize, TAIL_GRID);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if residual_at(x_max * mid as f64 / TAIL_GRID as f64) < eps {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                let m = x_max * lo as f64 / TAIL_GRID as f64;
                let residual = if lo == TAIL_GRID { 0.0 } else { residual_at(m) };
                Ok(TailTruncation {
                    mass_bound: m,
                    graphon: self.with_x_max(m),
                    residual,
                })
            }
            Family::InfiniteBlock(blocks) => {
                let step = blocks.as_step();
                let cut = step.truncate_tail(eps)?;
                let kept = cut.graphon.num_blocks();
                let mut trimmed = blocks.clone();
                trimmed.kept = kept;
                let graphon = AnalyticGraphon::infinite_block(trimmed);
                Ok(TailTruncation {
                    mass_bound: graphon.x_max(),
                    graphon,
                    residual: cut.residual,
                })
            }
            Family::MixedMembership(_) => Err(Error::UnsupportedFamily {
                family: "mixed_membership",
                reason: "tail truncation acts on the line coordinate only; flatten first".into(),
            }),
        }
    }

    fn with_x_max(&self, m: f64) -> AnalyticGraphon {
        let extra = match &self.family {
            Family::CaronFox { f } => f.residual_bound(m),
            Family::RegionIndicator { boundary } => boundary.full_norm() - boundary.truncated_norm(m),
            _ => self.truncation.l1_residual,
        };
        AnalyticGraphon {
            family: self.family.clone(),
            truncation: Truncation {
                x_max: m,
                l1_residual: extra.max(0.0),
                requested: TruncationSpec {
                    x_max: Some(m),
                    target_l1_residual: None,
                },
            },
        }
    }

    /// Step approximation on a grid of width `grid_step` over `[0, x_max]`.
    ///
    /// Cell values are cell averages. The error estimate is the L¹ distance
    /// between this approximation and the one on the grid of half the width.
    pub fn discretize(&self, grid_step: f64) -> Result<Discretization> {
        if !(grid_step > 0.0 && grid_step.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid step must be positive, got {grid_step}"
            )));
        }
        let x_max = self.truncation.x_max;
        let cells_f = (x_max / grid_step).ceil();
        if cells_f > MAX_GRID_CELLS as f64 {
            return Err(Error::GridTooFine {
                cells: cells_f.min(usize::MAX as f64) as usize,
                limit: MAX_GRID_CELLS,
            });
        }
        let n = cells_f as usize;
        if n == 0 {
            return Ok(Discretization {
                graphon: StepGraphon::zero(self.ambient_infinite()),
                l1_error: 0.0,
            });
        }
        let cell_integral: Box<dyn Fn(f64, f64, f64, f64) -> f64 + Sync> = match &self.family {
            Family::CaronFox { f } => {
                let f = *f;
                Box::new(move |x0, x1, y0, y1| {
                    gauss_legendre_2d(|x, y| caron_kernel(&f, x, y), x0, x1, y0, y1)
                })
            }
            Family::RegionIndicator { boundary } => {
                let b = *boundary;
                Box::new(move |x0, x1, y0, y1| b.cell_area(x0, x1, y0, y1))
            }
            Family::InfiniteBlock(blocks) => {
                let blocks = blocks.clone();
                Box::new(move |x0, x1, y0, y1| {
                    let iv = blocks.intervals();
                    let mut sum = 0.0;
                    for (i, &(a, b)) in iv.iter().enumerate() {
                        let ox = (x1.min(b) - x0.max(a)).max(0.0);
                        if ox == 0.0 {
                            continue;
                        }
                        for (j, &(c, d)) in iv.iter().enumerate() {
                            let oy = (y1.min(d) - y0.max(c)).max(0.0);
                            sum += blocks.prob(i, j) * ox * oy;
                        }
                    }
                    sum
                })
            }
            Family::MixedMembership(_) => {
                return Err(Error::UnsupportedFamily {
                    family: "mixed_membership",
                    reason: "use flatten_to_line for product-space families".into(),
                })
            }
        };

        let mut fine_edges = Vec::with_capacity(2 * n + 1);
        for i in 0..=2 * n {
            fine_edges.push((i as f64 * 0.5 * grid_step).min(x_max));
        }
        let m = 2 * n;
        let fine: Vec<f64> = {
            use rayon::prelude::*;
            let rows: Vec<Vec<f64>> = (0..m)
                .into_par_iter()
                .map(|i| {
                    (i..m)
                        .map(|j| {
                            cell_integral(fine_edges[i], fine_edges[i + 1], fine_edges[j], fine_edges[j + 1])
                        })
                        .collect()
                })
                .collect();
            let mut full = vec![0.0; m * m];
            for (i, row) in rows.into_iter().enumerate() {
                for (off, v) in row.into_iter().enumerate() {
                    let j = i + off;
                    full[i * m + j] = v;
                    full[j * m + i] = v;
                }
            }
            full
        };
        let fine_width: Vec<f64> = fine_edges.windows(2).map(|w| w[1] - w[0]).collect();
        let masses: Vec<f64> = (0..n)
            .map(|i| fine_width[2 * i] + fine_width[2 * i + 1])
            .collect();
        let mut values = vec![0.0; n * n];
        let mut error = 0.0;
        for i in 0..n {
            for j in i..n {
                let mut integral = 0.0;
                for a in 2 * i..2 * i + 2 {
                    for b in 2 * j..2 * j + 2 {
                        integral += fine[a * m + b];
                    }
                }
                let v = if masses[i] > 0.0 && masses[j] > 0.0 {
                    (integral / (masses[i] * masses[j])).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                values[i * n + j] = v;
                values[j * n + i] = v;
                let mut cell_err = 0.0;
                for a in 2 * i..2 * i + 2 {
                    for b in 2 * j..2 * j + 2 {
                        let area = fine_width[a] * fine_width[b];
                        if area > 0.0 {
                            cell_err += (fine[a * m + b] / area - v).abs() * area;
                        }
                    }
                }
                error += if i == j { cell_err } else { 2.0 * cell_err };
            }
        }
        // a final zero-width cell can only arise from rounding of x_max / grid_step
        let keep: Vec<usize> = (0..n).filter(|&i| masses[i] > 0.0).collect();
        let graphon = StepGraphon::from_flat(masses, values, self.ambient_infinite())?.select(&keep);
        Ok(Discretization {
            graphon,
            l1_error: error,
        })
    }

    /// Exact step form of the block-structured families on consecutive intervals of ℝ₊.
    pub fn flatten_to_line(&self) -> Result<StepGraphon> {
        match &self.family {
            Family::InfiniteBlock(blocks) => Ok(blocks.as_step()),
            Family::MixedMembership(mm) => mm.flatten(),
            other => Err(Error::UnsupportedFamily {
                family: other.name(),
                reason: "kernel is not piecewise constant; use discretize".into(),
            }),
        }
    }
}

/// Output of [`AnalyticGraphon::discretize`].
#[derive(Debug, Clone)]
pub struct Discretization {
    pub graphon: StepGraphon,
    pub l1_error: f64,
}

fn resolve_truncation<F: Fn(f64) -> f64>(spec: TruncationSpec, residual: F) -> Result<Truncation> {
    if let Some(x) = spec.x_max {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidGraphon(format!("x_max must be positive, got {x}")));
        }
    }
    if let Some(eps) = spec.target_l1_residual {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidGraphon(format!(
                "target L1 residual must be positive, got {eps}"
            )));
        }
    }
    let x_max = match (spec.x_max, spec.target_l1_residual) {
        (None, None) => {
            return Err(Error::InvalidGraphon(
                "infinite-support family needs x_max or target_l1_residual".into(),
            ))
        }
        (Some(x), None) => x,
        (given, Some(eps)) => {
            let needed = smallest_cutoff(&residual, eps)?;
            given.map_or(needed, |x| x.max(needed))
        }
    };
    Ok(Truncation {
        x_max,
        l1_residual: residual(x_max),
        requested: spec,
    })
}

/// Smallest `x` with `residual(x) ≤ eps` for a nonincreasing residual.
fn smallest_cutoff<F: Fn(f64) -> f64>(residual: &F, eps: f64) -> Result<f64> {
    if residual(0.0) <= eps {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while residual(hi) > eps {
        hi *= 2.0;
        if hi > 1e15 {
            return Err(Error::InvalidGraphon(format!(
                "no cutoff below 1e15 reaches residual {eps}"
            )));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shifted(c: f64, gamma: f64) -> PowerLaw {
        PowerLaw::ShiftedPower { c, gamma }
    }

    #[test]
    fn caron_fox_value_at_origin() {
        let w = AnalyticGraphon::caron_fox(
            shifted(1.0, 2.0),
            TruncationSpec {
                x_max: Some(10.0),
                target_l1_residual: None,
            },
        )
        .unwrap();
        let expected = 1.0 - (-1.0f64).exp();
        assert!((w.evaluate(&[0.0], &[0.0]) - expected).abs() < 1e-15);
        assert_eq!(w.evaluate(&[11.0], &[0.0]), 0.0);
    }

    #[test]
    fn rejects_nonintegrable_exponent() {
        assert!(AnalyticGraphon::caron_fox(shifted(1.0, 1.0), TruncationSpec::default()).is_err());
    }

    #[test]
    fn target_residual_sets_cutoff() {
        let f = shifted(1.0, 2.0);
        let w = AnalyticGraphon::caron_fox(
            f,
            TruncationSpec {
                x_max: None,
                target_l1_residual: Some(0.01),
            },
        )
        .unwrap();
        let t = w.truncation();
        assert!(t.l1_residual <= 0.01);
        assert!(f.residual_bound(t.x_max * 0.99) > 0.01);
        // both given: the larger cutoff wins
        let w = AnalyticGraphon::caron_fox(
            f,
            TruncationSpec {
                x_max: Some(5.0),
                target_l1_residual: Some(0.01),
            },
        )
        .unwrap();
        assert!(w.x_max() > 5.0);
    }

    #[test]
    fn caron_norm_matches_series_for_small_weights() {
        // tiny c: 1 - e^{-uv} ≈ uv, so the norm is ≈ (∫_0^X f)^2
        let f = shifted(1e-3, 3.0);
        let w = AnalyticGraphon::caron_fox(
            f,
            TruncationSpec {
                x_max: Some(4.0),
                target_l1_residual: None,
            },
        )
        .unwrap();
        let head = f.total_integral() - f.tail_integral(4.0);
        let e = w.l1_norm_with_tolerance(1e-12);
        assert!(((e.value - head * head) / (head * head)).abs() < 1e-3, "{e:?}");
    }

    #[test]
    fn region_norm_closed_forms() {
        let b = Boundary::PowerInvolution { a: 2.0 };
        assert_eq!(b.full_norm(), 3.0);
        // X >= 1
        let x: f64 = 4.0;
        let expected = x.powf(-1.0) + 3.0 * (1.0 - x.powf(-1.0));
        assert!((b.truncated_norm(x) - expected).abs() < 1e-12);
        // X < 1
        assert!((b.truncated_norm(0.5) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn region_cell_area_matches_quadrature() {
        let b = Boundary::PowerInvolution { a: 2.0 };
        for &(x0, x1, y0, y1) in &[
            (0.0, 0.5, 0.0, 0.5),
            (0.2, 1.5, 0.7, 2.0),
            (1.0, 3.0, 0.0, 0.3),
            (0.01, 0.02, 3.0, 9.0),
        ] {
            let q = adaptive_trapezoid(
                |x| (b.value(x) - y0).clamp(0.0, y1 - y0),
                x0,
                x1,
                1e-10,
            );
            assert!((b.cell_area(x0, x1, y0, y1) - q.value).abs() < 1e-6, "{x0} {x1} {y0} {y1}");
        }
    }

    #[test]
    fn region_membership_is_symmetric_and_matches_curve() {
        let b = Boundary::PowerInvolution { a: 2.0 };
        assert!(b.contains(0.25, 1.9));
        assert!(!b.contains(0.25, 2.1));
        assert!(b.contains(2.0, 0.24));
        assert!(!b.contains(2.0, 0.26));
    }

    #[test]
    fn infinite_block_flatten_is_relabeling() {
        let blocks = IntervalBlocks::new(
            vec![(0.0, 1.0), (1.0, 3.0)],
            vec![vec![1.0, 0.0], vec![0.0, 0.0]],
            None,
        )
        .unwrap();
        let w = AnalyticGraphon::infinite_block(blocks);
        let s = w.flatten_to_line().unwrap();
        assert_eq!(s.masses(), &[1.0, 2.0]);
        assert_eq!(s.values(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.l1_norm(), w.l1_norm().value);
    }

    #[test]
    fn infinite_block_truncation_count_records_residual() {
        let blocks = IntervalBlocks::new(
            vec![(0.0, 1.0), (1.0, 2.0)],
            vec![vec![1.0, 0.5], vec![0.5, 0.5]],
            Some(1),
        )
        .unwrap();
        let w = AnalyticGraphon::infinite_block(blocks);
        assert_eq!(w.l1_norm().value, 1.0);
        assert!((w.truncation().l1_residual - 1.5).abs() < 1e-15);
        assert_eq!(w.evaluate(&[1.5], &[0.5]), 0.0);
    }

    #[test]
    fn constant_discretizes_exactly() {
        let blocks = IntervalBlocks::new(vec![(0.0, 1.0)], vec![vec![0.5]], None).unwrap();
        let w = AnalyticGraphon::infinite_block(blocks);
        let d = w.discretize(0.5).unwrap();
        assert_eq!(d.graphon.num_blocks(), 2);
        assert!(d.graphon.values().iter().all(|&v| (v - 0.5).abs() < 1e-15));
        assert!(d.l1_error.abs() < 1e-15);
    }

    #[test]
    fn caron_discretize_block_count_and_error() {
        let w = AnalyticGraphon::caron_fox(
            shifted(1.0, 2.0),
            TruncationSpec {
                x_max: Some(4.0),
                target_l1_residual: None,
            },
        )
        .unwrap();
        let coarse = w.discretize(0.5).unwrap();
        assert_eq!(coarse.graphon.num_blocks(), 8);
        assert!(coarse.l1_error > 0.0);
        let finer = w.discretize(0.25).unwrap();
        assert!(finer.l1_error <= coarse.l1_error);
        assert!((coarse.graphon.l1_norm() - w.l1_norm().value).abs() < 1e-5);
    }

    #[test]
    fn discretize_rejects_huge_grid() {
        let w = AnalyticGraphon::region_indicator(
            Boundary::PowerInvolution { a: 2.0 },
            TruncationSpec {
                x_max: Some(100.0),
                target_l1_residual: None,
            },
        )
        .unwrap();
        assert!(matches!(w.discretize(0.001), Err(Error::GridTooFine { .. })));
    }

    #[test]
    fn mixed_membership_flatten_three_cells() {
        let masses = vec![1.0, 1.0];
        let kernels = vec![
            vec![0.9, 0.1, 0.1, 0.9],
            vec![0.2, 0.3, 0.4, 0.5],
            vec![0.2, 0.4, 0.3, 0.5],
            vec![0.1, 0.1, 0.1, 0.1],
        ];
        let simplex = SimplexMeasure::Cells {
            weights: vec![vec![1.0, 0.0], vec![0.5, 0.5], vec![0.0, 1.0]],
            masses: vec![1.0 / 3.0; 3],
        };
        let mm = MixedMembership::new(
            simplex,
            Components::Step {
                masses: masses.clone(),
                kernels: kernels.clone(),
            },
        )
        .unwrap();
        let w = AnalyticGraphon::mixed_membership(mm, TruncationSpec::default()).unwrap();
        let s = w.flatten_to_line().unwrap();
        assert_eq!(s.num_blocks(), 6);
        // cell 0 = (1, 0), cell 1 = (0.5, 0.5): block (0, b0) vs (1, b1)
        let expected = 0.5 * kernels[0][1] + 0.5 * kernels[1][1];
        assert!((s.value(0, 3) - expected).abs() < 1e-15);
        assert!((s.l1_norm() - w.l1_norm().value).abs() < 1e-12);
    }

    #[test]
    fn mixed_membership_rejects_inconsistent_transpose() {
        let kernels = vec![vec![0.5], vec![0.2], vec![0.3], vec![0.5]];
        let err = MixedMembership::new(
            SimplexMeasure::Uniform { k: 2 },
            Components::Step {
                masses: vec![1.0],
                kernels,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Asymmetric { .. }));
    }

    #[test]
    fn mixed_evaluate_is_exactly_symmetric() {
        let kernels = vec![
            vec![0.9, 0.1, 0.1, 0.9],
            vec![0.2, 0.3, 0.4, 0.5],
            vec![0.2, 0.4, 0.3, 0.5],
            vec![0.1, 0.7, 0.7, 0.1],
        ];
        let mm = MixedMembership::new(
            SimplexMeasure::Uniform { k: 2 },
            Components::Step {
                masses: vec![1.0, 2.0],
                kernels,
            },
        )
        .unwrap();
        let w = AnalyticGraphon::mixed_membership(mm, TruncationSpec::default()).unwrap();
        let a = [0.3, 0.7, 0.5];
        let b = [0.9, 0.1, 2.5];
        assert_eq!(w.evaluate(&a, &b), w.evaluate(&b, &a));
    }

    #[test]
    fn region_tail_truncation_on_grid() {
        let w = AnalyticGraphon::region_indicator(
            Boundary::PowerInvolution { a: 2.0 },
            TruncationSpec {
                x_max: Some(50.0),
                target_l1_residual: None,
            },
        )
        .unwrap();
        let t = w.truncate_tail(0.5).unwrap();
        assert!(t.residual < 0.5);
        assert!(t.mass_bound < 50.0);
        let tighter = w.truncate_tail(0.1).unwrap();
        assert!(tighter.mass_bound >= t.mass_bound);
        assert!(tighter.residual <= t.residual + 1e-12);
    }

    #[test]
    fn star_moment_exponent_rules() {
        let w = AnalyticGraphon::region_indicator(
            Boundary::PowerInvolution { a: 2.0 },
            TruncationSpec {
                x_max: Some(10.0),
                target_l1_residual: None,
            },
        )
        .unwrap();
        assert_eq!(w.star_moment_finite(1), Some(true));
        assert_eq!(w.star_moment_finite(2), Some(false));
    }
}
