use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::count::count_embeddings;
use super::motif::{MotifGraph, MOTIF_VERTEX_LIMIT};
use crate::error::{Error, Result};
use crate::graph::SampledGraph;
use crate::graphon::{Family, Graphon, StepGraphon};
use crate::rng::stream_rng;

/// Largest number of block assignments summed exactly.
pub const BLOCK_ASSIGNMENT_LIMIT: f64 = 1e8;

const MC_CHUNK: u64 = 4096;

/// `hom(F, G)` and `inj(F, G)` divided by `(2|E(G)|)^{|V(F)|/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledDensity {
    pub h: f64,
    pub h_inj: f64,
    pub hom: u128,
    pub inj: u128,
}

/// Rescaled homomorphism densities of `f` in `g`.
pub fn rescaled_density(f: &MotifGraph, g: &SampledGraph) -> Result<RescaledDensity> {
    let m = g.num_edges();
    if m == 0 {
        return Err(Error::EmptyGraph);
    }
    let c = count_embeddings(f, g)?;
    let denom = edge_scale(2 * m as u128, f.num_vertices());
    Ok(RescaledDensity {
        h: c.hom as f64 / denom,
        h_inj: c.inj as f64 / denom,
        hom: c.hom,
        inj: c.inj,
    })
}

/// `x^{k/2}`, with the integer part of the power taken exactly when it fits.
fn edge_scale(x: u128, k: usize) -> f64 {
    let whole = match x.checked_pow((k / 2) as u32) {
        Some(p) => p as f64,
        None => (x as f64).powi((k / 2) as i32),
    };
    if k % 2 == 1 {
        whole * (x as f64).sqrt()
    } else {
        whole
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    /// Exact sum over block assignments.
    Exact,
    /// Uniform Monte Carlo over the truncated feature region.
    MonteCarlo,
    /// The untruncated integral diverges.
    Divergent,
}

/// `h(F, W) = ‖W‖₁^{−k/2} ∫ Π_{ij∈E(F)} W(x_i, x_j) dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomDensity {
    /// Normalized density; `+∞` for divergent integrals.
    pub value: f64,
    /// The unnormalized integral `t(F, W)`.
    pub integral: f64,
    /// Standard error of `value` (zero when exact).
    pub std_error: f64,
    pub method: DensityMethod,
    pub samples: u64,
}

impl HomDensity {
    pub fn is_infinite(&self) -> bool {
        self.method == DensityMethod::Divergent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HomOptions {
    pub mc_samples: u64,
    pub seed: u64,
}

impl Default for HomOptions {
    fn default() -> Self {
        Self {
            mc_samples: 200_000,
            seed: 0,
        }
    }
}

/// Homomorphism density of `f` in a graphon.
///
/// Step graphons (and explicit infinite block families) are summed exactly
/// over block assignments. For the other analytic families a star motif
/// whose degree moment is known to diverge yields [`DensityMethod::Divergent`];
/// otherwise the integral over the truncated region is estimated by
/// uniform Monte Carlo.
pub fn h_analytic(f: &MotifGraph, w: &Graphon, options: &HomOptions) -> Result<HomDensity> {
    if f.num_vertices() > MOTIF_VERTEX_LIMIT {
        return Err(Error::MotifTooLarge {
            vertices: f.num_vertices(),
            limit: MOTIF_VERTEX_LIMIT,
            cost: f64::INFINITY,
        });
    }
    let step = match w {
        Graphon::Step(s) => Some(s.clone()),
        Graphon::Analytic(a) => match a.family() {
            Family::InfiniteBlock(b) => Some(b.as_step()),
            _ => None,
        },
    };
    if let Some(s) = step {
        return h_step(f, &s);
    }
    let Graphon::Analytic(a) = w else {
        unreachable!("step graphons handled above")
    };
    if let Some(leaves) = f.star_leaves() {
        if a.star_moment_finite(leaves as u32) == Some(false) {
            return Ok(HomDensity {
                value: f64::INFINITY,
                integral: f64::INFINITY,
                std_error: 0.0,
                method: DensityMethod::Divergent,
                samples: 0,
            });
        }
    }
    let norm = a.l1_norm().value;
    if !(norm > 0.0) {
        return Err(Error::InvalidArgument(
            "homomorphism densities need a graphon with positive L1 norm".into(),
        ));
    }
    let (integral, se) = monte_carlo(f, w, options)?;
    let scale = norm.powf(f.num_vertices() as f64 / 2.0);
    Ok(HomDensity {
        value: integral / scale,
        integral,
        std_error: se / scale,
        method: DensityMethod::MonteCarlo,
        samples: options.mc_samples,
    })
}

/// Exact `h(F, W)` for a step graphon.
pub fn h_step(f: &MotifGraph, w: &StepGraphon) -> Result<HomDensity> {
    let n = w.num_blocks();
    let k = f.num_vertices();
    let cost = (n as f64).powi(k as i32);
    if cost > BLOCK_ASSIGNMENT_LIMIT {
        return Err(Error::ExactLimit {
            what: "homomorphism density",
            blocks: n,
            limit: BLOCK_ASSIGNMENT_LIMIT.powf(1.0 / k as f64).floor() as usize,
            cost,
        });
    }
    let norm = w.l1_norm();
    if !(norm > 0.0) {
        return Err(Error::InvalidArgument(
            "homomorphism densities need a graphon with positive L1 norm".into(),
        ));
    }
    let integral = step_integral(f, w);
    Ok(HomDensity {
        value: integral / norm.powf(k as f64 / 2.0),
        integral,
        std_error: 0.0,
        method: DensityMethod::Exact,
        samples: 0,
    })
}

/// `Σ_φ Π_{uv∈E(F)} a_{φ(u)φ(v)} Π_u m_{φ(u)}` by backtracking with zero pruning.
fn step_integral(f: &MotifGraph, w: &StepGraphon) -> f64 {
    let order = f.search_order();
    let n = w.num_blocks();
    (0..n)
        .into_par_iter()
        .map(|b| {
            let mut blocks = vec![0usize; order.len()];
            blocks[0] = b;
            w.masses()[b] * assign(&order, w, 1, &mut blocks)
        })
        .sum()
}

fn assign(order: &[(usize, Vec<usize>)], w: &StepGraphon, pos: usize, blocks: &mut [usize]) -> f64 {
    if pos == order.len() {
        return 1.0;
    }
    let earlier = &order[pos].1;
    let mut total = 0.0;
    for b in 0..w.num_blocks() {
        let mut p = w.masses()[b];
        for &e in earlier {
            p *= w.value(blocks[e], b);
            if p == 0.0 {
                break;
            }
        }
        if p != 0.0 {
            blocks[pos] = b;
            total += p * assign(order, w, pos + 1, blocks);
        }
    }
    total
}

/// Integral over the sampling region and its standard error.
fn monte_carlo(f: &MotifGraph, w: &Graphon, options: &HomOptions) -> Result<(f64, f64)> {
    let samples = options.mc_samples;
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "Monte Carlo needs at least two samples".into(),
        ));
    }
    let region = w.sampling_region();
    let k = f.num_vertices();
    let volume = region.mass().powi(k as i32);
    let chunks = samples.div_ceil(MC_CHUNK);
    let (sum, sum_sq) = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<(f64, f64)> {
            let mut rng = stream_rng(options.seed, c);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            let mut points = Vec::with_capacity(k);
            for _ in 0..count {
                points.clear();
                for _ in 0..k {
                    points.push(region.sample(&mut rng)?);
                }
                let p: f64 = f
                    .edges()
                    .iter()
                    .map(|&(u, v)| w.evaluate(&points[u], &points[v]))
                    .product();
                s += p;
                s2 += p * p;
            }
            Ok((s, s2))
        })
        .try_reduce(|| (0.0, 0.0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok((mean * volume, (var / n).sqrt() * volume))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finiteness {
    Finite,
    Infinite,
    /// The tail exponents of the family do not decide the question.
    Unknown,
}

/// `∫ D_W^k` together with whether the untruncated integral is finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarMoment {
    pub finiteness: Finiteness,
    /// Moment of the (truncated) degree function.
    pub estimate: f64,
    pub exact: bool,
}

/// Degree moment `h(F_k, W) ‖W‖₁^{(k+1)/2} = ∫ D_W^k` of the `k`-leaf star.
pub fn star_moment(w: &Graphon, k: u32) -> Result<StarMoment> {
    if k == 0 {
        return Err(Error::InvalidArgument("star moments need k >= 1".into()));
    }
    let profile = w.degree_profile()?;
    let finiteness = match w {
        Graphon::Step(_) => Finiteness::Finite,
        Graphon::Analytic(a) => match a.star_moment_finite(k) {
            Some(true) => Finiteness::Finite,
            Some(false) => Finiteness::Infinite,
            None => Finiteness::Unknown,
        },
    };
    Ok(StarMoment {
        finiteness,
        estimate: profile.moment(k),
        exact: profile.is_exact(),
    })
}
