use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde_json::Value;

use super::config::ExperimentConfig;
use super::families::{sparse_clique_size, GraphFamily};
use super::report::{median, Check, ExperimentReport, Record};
use crate::error::{Error, Result};
use crate::generators;
use crate::graphon::{Graphon, GraphonSpec, StepGraphon};
use crate::homomorphisms::{
    count_embeddings, count_embeddings_brute_force, h_analytic, h_step, rescaled_density,
    HomOptions, MotifGraph,
};
use crate::metrics::{
    cut_distance, cut_norm, cut_norm_brute_force, graph_graphon_distance_estimate, Alignment,
    CutNormMode, DistanceOptions, ReportMode,
};
use crate::regularity::{graph_degree_stats, required_m, M_GRID_END, M_GRID_RATIO};
use crate::rng::{derive_seed, pair_uniform, stream_rng};
use crate::sampling::{sample_graphon_process, sample_sequential, xi_box_counts, RegionSchedule};

type Runner = fn(&ExperimentConfig, Option<&Path>) -> Result<ExperimentReport>;

/// A named experiment with its default configuration.
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Acceptance criterion reproduced by the default configuration.
    pub criterion: Option<u8>,
    /// `(metric, meaning)` for every metric written to the CSV.
    pub metrics: &'static [(&'static str, &'static str)],
    /// `(key, meaning)` of the entries read from `params`.
    pub params: &'static [(&'static str, &'static str)],
    defaults: fn() -> ExperimentConfig,
    run: Runner,
}

impl CatalogEntry {
    pub fn default_config(&self) -> ExperimentConfig {
        (self.defaults)()
    }
}

/// Value recorded when a required `M` exceeds the search grid.
pub const BEYOND_GRID: f64 = M_GRID_END * M_GRID_RATIO;

const DEFAULT_SEED: u64 = 2026;

static CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "edge_growth",
        summary: "Edge counts of graphon processes grow like T²‖W‖₁/2.",
        criterion: Some(1),
        metrics: &[
            ("edge_ratio", "2|E(G_T)| / T² per replica; parameter T"),
            ("target", "‖W‖₁"),
        ],
        params: &[("tolerance", "relative tolerance on the mean edge ratio (0.05)")],
        defaults: || config("edge_growth", Some(constant(1.0)), &[30.0], &[], 200, &[]),
        run: edge_growth,
    },
    CatalogEntry {
        name: "density_convergence",
        summary: "Rescaled injective motif densities of G_T approach h(F, W).",
        criterion: Some(2),
        metrics: &[
            ("h_inj", "inj(F, G_T) / (2|E|)^{|V(F)|/2} per replica; parameter T"),
            ("target", "h(F, W)"),
        ],
        params: &[
            ("motif", "motif name or inline edge list (triangle)"),
            ("tolerance", "relative tolerance on the mean (0.1)"),
            ("mc_samples", "Monte Carlo samples for analytic targets (200000)"),
        ],
        defaults: || config("density_convergence", Some(constant(0.5)), &[60.0], &[], 50, &[]),
        run: density_convergence,
    },
    CatalogEntry {
        name: "cut_norm_oracle",
        summary: "Exact cut norms agree with brute force over all subset pairs.",
        criterion: Some(3),
        metrics: &[
            ("abs_error", "|exact − brute force| per random graphon"),
            ("cut_norm", "exact cut norm per random graphon"),
        ],
        params: &[
            ("max_blocks", "largest block count (6)"),
            ("tolerance", "largest allowed error (1e-12)"),
        ],
        defaults: || config("cut_norm_oracle", None, &[], &[], 100, &[]),
        run: cut_norm_oracle,
    },
    CatalogEntry {
        name: "permutation_zero",
        summary: "Block-shuffled copies are at cut distance zero, witnessed by the inverse shuffle.",
        criterion: Some(4),
        metrics: &[
            ("distance", "exact cut distance to the shuffled copy"),
            ("witness_inverts_shuffle", "1 when the witness is the inverse shuffle"),
            ("exact", "1 when the distance is reported as exact"),
        ],
        params: &[("blocks", "number of equal-mass blocks (7)")],
        defaults: || config("permutation_zero", None, &[], &[], 20, &[]),
        run: permutation_zero,
    },
    CatalogEntry {
        name: "metric_convergence",
        summary: "Stretched cut distance estimates between G_T and W shrink as T grows.",
        criterion: Some(5),
        metrics: &[("distance", "distance estimate per replica; parameter T")],
        params: &[
            ("alignment", "feature_oracle or degree_sort (feature_oracle)"),
            ("threshold", "bound on the median at the last horizon (0.1)"),
        ],
        defaults: || {
            config("metric_convergence", Some(constant(0.5)), &[10.0, 20.0, 40.0], &[], 20, &[])
        },
        run: metric_convergence,
    },
    CatalogEntry {
        name: "sequential_dichotomy",
        summary: "Sequential arrivals keep gaining edges iff Σ μ(S_n)^{-1} diverges.",
        criterion: Some(6),
        metrics: &[
            ("edges_linear", "|E(G_N)| with S_n = [0, n]; parameter N"),
            ("edges_exponential", "|E(G_N)| with S_n = [0, 2^n]; parameter N"),
        ],
        params: &[
            ("growth", "least ratio of mean linear edge counts, last over first N (2)"),
            ("stability", "largest change of the mean exponential edge count (0.2)"),
        ],
        defaults: || {
            config("sequential_dichotomy", Some(constant(1.0)), &[], &[100, 1000], 50, &[])
        },
        run: sequential_dichotomy,
    },
    CatalogEntry {
        name: "tail_dichotomy",
        summary: "Clique-plus-isolated graphs have uniformly regular tails; sparse Erdős–Rényi graphs do not.",
        criterion: Some(7),
        metrics: &[
            ("clique_m", "smallest grid M for the clique family; parameter n"),
            ("er_m", "smallest grid M for the Erdős–Rényi family; parameter n"),
        ],
        params: &[
            ("alpha", "Erdős–Rényi edge probability is n^{alpha−1} (0.5)"),
            ("eps", "tail tolerance (0.1)"),
            ("growth", "least ratio of Erdős–Rényi M, last over first n (1.5)"),
        ],
        defaults: || config("tail_dichotomy", None, &[], &[1000, 10_000], 1, &[]),
        run: tail_dichotomy,
    },
    CatalogEntry {
        name: "degree_tail",
        summary: "Normalized counts of high-degree vertices approach the stretched degree tail of W.",
        criterion: Some(8),
        metrics: &[
            ("normalized_count", "|{v : deg v > λ√(2|E|)}| / √(2|E|); parameter T"),
            ("target", "μ_s({D_{W^s} > λ}) of the stretched graphon"),
        ],
        params: &[
            ("lambda", "degree threshold (0.5)"),
            ("tolerance", "relative tolerance on the mean (0.1)"),
        ],
        defaults: || config("degree_tail", Some(constant(0.5)), &[50.0], &[], 50, &[]),
        run: degree_tail,
    },
    CatalogEntry {
        name: "bounded_degree_null",
        summary: "Cycles have vanishing rescaled path densities with the closed form 4n/(2n)^{3/2}.",
        criterion: Some(9),
        metrics: &[
            ("h_path3", "rescaled density of the 3-vertex path in C_n; parameter n"),
            ("abs_error", "|h − 4n/(2n)^{3/2}|; parameter n"),
            ("brute_force_mismatch", "count difference against brute force on C_6"),
        ],
        params: &[("bound", "strict bound on h at the largest n (0.02)")],
        defaults: || config("bounded_degree_null", None, &[], &[10_000], 1, &[]),
        run: bounded_degree_null,
    },
    CatalogEntry {
        name: "edge_density_identity",
        summary: "The rescaled edge density is identically one for graphs and graphons.",
        criterion: Some(10),
        metrics: &[
            ("graph_error", "|h(K₂, G) − 1| per random graph"),
            ("graphon_error", "|h(K₂, W) − 1| per random step graphon"),
        ],
        params: &[("graphons", "number of random step graphons (50)")],
        defaults: || config("edge_density_identity", None, &[], &[], 100, &[]),
        run: edge_density_identity,
    },
    CatalogEntry {
        name: "exchangeability",
        summary: "Box counts of the edge measure are invariant under interval permutations.",
        criterion: Some(11),
        metrics: &[
            ("edges_process", "edges of the graphon process per replica"),
            ("edges_control", "edges of the time-inhomogeneous control per replica"),
            ("p_value_process", "permutation-test p-value; parameter permutation index"),
            ("p_value_control", "permutation-test p-value; parameter permutation index"),
        ],
        params: &[
            ("bins", "number of time intervals (8)"),
            ("permutations", "number of fixed interval permutations (3)"),
            ("resamples", "sign-flip resamples per test (999)"),
            ("level", "test level (0.01)"),
        ],
        defaults: || config("exchangeability", Some(constant(0.5)), &[40.0], &[], 200, &[]),
        run: exchangeability,
    },
    CatalogEntry {
        name: "metric_axioms",
        summary: "Exact cut distances are symmetric and satisfy the triangle inequality.",
        criterion: Some(12),
        metrics: &[
            ("symmetry_gap", "largest |d(a, b) − d(b, a)| per random triple"),
            ("triangle_excess", "largest d(a, c) − d(a, b) − d(b, c) per random triple"),
        ],
        params: &[("max_blocks", "largest block count (6)")],
        defaults: || config("metric_axioms", None, &[], &[], 50, &[]),
        run: metric_axioms,
    },
    CatalogEntry {
        name: "perturbation_bound",
        summary: "Inflating all masses by 1 + ε moves a graphon by at most 3ε‖W‖₁ in cut distance.",
        criterion: Some(13),
        metrics: &[
            ("distance", "exact-mode cut distance to the inflated copy; parameter ε"),
            ("ratio", "distance / (3ε‖W‖₁); parameter ε"),
        ],
        params: &[
            ("epsilons", "mass inflations ([0.01, 0.05])"),
            ("max_blocks", "largest block count (5)"),
        ],
        defaults: || config("perturbation_bound", None, &[], &[], 20, &[]),
        run: perturbation_bound,
    },
    CatalogEntry {
        name: "avg_degree_growth",
        summary: "Graphon processes have unbounded average degree; perfect matchings have irregular tails.",
        criterion: None,
        metrics: &[
            ("avg_degree", "average degree of G_T; parameter T"),
            ("matching_m", "smallest grid M for a perfect matching; parameter m"),
        ],
        params: &[
            ("matchings", "perfect matching sizes ([100, 400])"),
            ("eps", "tail tolerance for matchings (0.5)"),
        ],
        defaults: || {
            config("avg_degree_growth", Some(constant(0.5)), &[10.0, 20.0, 40.0, 80.0], &[], 20, &[])
        },
        run: avg_degree_growth,
    },
];

pub fn catalog() -> &'static [CatalogEntry] {
    CATALOG
}

pub fn find(name: &str) -> Result<&'static CatalogEntry> {
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownExperiment(name.to_string()))
}

/// Runs a configured experiment; spec paths resolve against the working directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_in(config, None)
}

/// Runs a configured experiment with spec paths relative to `base`.
pub fn run_experiment_in(config: &ExperimentConfig, base: Option<&Path>) -> Result<ExperimentReport> {
    let entry = find(&config.experiment)?;
    config.validate(base)?;
    (entry.run)(config, base)
}

/// Human-readable description of an experiment and its CSV output.
pub fn describe(name: &str) -> Result<String> {
    let e = find(name)?;
    let mut out = format!("{}\n  {}\n", e.name, e.summary);
    if let Some(c) = e.criterion {
        out.push_str(&format!("  acceptance criterion: {c}\n"));
    }
    out.push_str("\nCSV columns: replica,parameter,metric,value\nmetrics:\n");
    for (m, meaning) in e.metrics {
        out.push_str(&format!("  {m}: {meaning}\n"));
    }
    if !e.params.is_empty() {
        out.push_str("\nparams:\n");
        for (p, meaning) in e.params {
            out.push_str(&format!("  {p}: {meaning}\n"));
        }
    }
    out.push_str("\ndefault config:\n");
    out.push_str(&e.default_config().to_json());
    out.push('\n');
    Ok(out)
}

fn constant(value: f64) -> GraphonSpec {
    GraphonSpec::Step {
        masses: vec![1.0],
        values: vec![vec![value]],
        ambient_infinite: false,
    }
}

fn config(
    name: &str,
    graphon: Option<GraphonSpec>,
    horizons: &[f64],
    sizes: &[usize],
    replicas: usize,
    params: &[(&str, Value)],
) -> ExperimentConfig {
    ExperimentConfig {
        experiment: name.to_string(),
        graphon: graphon.map(super::config::GraphonSource::Inline),
        horizons: horizons.to_vec(),
        sizes: sizes.to_vec(),
        replicas,
        seed: DEFAULT_SEED,
        output: None,
        params: params
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect::<BTreeMap<_, _>>(),
    }
}

fn horizons_or(c: &ExperimentConfig, default: &[f64]) -> Vec<f64> {
    if c.horizons.is_empty() {
        default.to_vec()
    } else {
        c.horizons.clone()
    }
}

fn sizes_or(c: &ExperimentConfig, default: &[usize]) -> Vec<usize> {
    if c.sizes.is_empty() {
        default.to_vec()
    } else {
        c.sizes.clone()
    }
}

fn replica_seed(c: &ExperimentConfig, coords: &[u64]) -> u64 {
    derive_seed(c.seed, coords)
}

fn record(replica: usize, parameter: f64, metric: &str, value: f64) -> Record {
    Record {
        replica,
        parameter,
        metric: metric.to_string(),
        value,
    }
}

fn values_of<'a>(records: &'a [Record], metric: &'a str, parameter: f64) -> impl Iterator<Item = f64> + 'a {
    records
        .iter()
        .filter(move |r| r.metric == metric && r.parameter == parameter)
        .map(|r| r.value)
}

fn mean_of(records: &[Record], metric: &str, parameter: f64) -> f64 {
    let (s, n) = values_of(records, metric, parameter).fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    s / n as f64
}

fn median_of(records: &[Record], metric: &str, parameter: f64) -> f64 {
    median(&values_of(records, metric, parameter).collect::<Vec<_>>())
}

fn max_of(records: &[Record], metric: &str) -> f64 {
    records
        .iter()
        .filter(|r| r.metric == metric)
        .map(|r| r.value)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(records: &[Record], metric: &str) -> f64 {
    records
        .iter()
        .filter(|r| r.metric == metric)
        .map(|r| r.value)
        .fold(f64::INFINITY, f64::min)
}

fn require_step(w: &Graphon, experiment: &str) -> Result<StepGraphon> {
    w.as_step().cloned().ok_or_else(|| {
        Error::InvalidConfig(format!("{experiment} needs a step graphon"))
    })
}

/// Runs `f` for every replica in parallel, keeping replica order.
fn per_replica<F>(replicas: usize, f: F) -> Result<Vec<Record>>
where
    F: Fn(usize) -> Result<Vec<Record>> + Sync + Send,
{
    let chunks = (0..replicas)
        .into_par_iter()
        .map(f)
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn symmetric_matrix<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let x = rng.random_range(lo..=hi);
            v[i * n + j] = x;
            v[j * n + i] = x;
        }
    }
    v
}

fn edge_growth(c: &ExperimentConfig, base: Option<&Path>) -> Result<ExperimentReport> {
    let w = c.graphon_or(constant(1.0), base)?;
    let tol = c.param_f64("tolerance", 0.05)?;
    let horizons = horizons_or(c, &[30.0]);
    let target = w.l1_norm().value;
    let mut records = vec![record(0, 0.0, "target", target)];
    for (ti, &t) in horizons.iter().enumerate() {
        records.extend(per_replica(c.replicas, |r| {
            let seed = replica_seed(c, &[r as u64, ti as u64]);
            let trace = sample_graphon_process(&w, t, seed, false)?;
            Ok(vec![record(r, t, "edge_ratio", 2.0 * trace.edges.len() as f64 / (t * t))])
        })?);
    }
    let checks = horizons
        .iter()
        .map(|&t| {
            Check::within(
                format!("mean edge ratio at T={t}"),
                mean_of(&records, "edge_ratio", t),
                Some(target * (1.0 - tol)),
                Some(target * (1.0 + tol)),
            )
        })
        .collect();
    Ok(ExperimentReport::new(c, records, checks))
}

fn density_convergence(c: &ExperimentConfig, base: Option<&Path>) -> Result<ExperimentReport> {
    let w = c.graphon_or(constant(0.5), base)?;
    let motif = MotifGraph::parse(c.param_str("motif", "triangle")?)?;
    let tol = c.param_f64("tolerance", 0.1)?;
    let horizons = horizons_or(c, &[60.0]);
    let target = if w.l1_norm().value == 0.0 {
        0.0
    } else {
        let options = HomOptions {
            mc_samples: c.param_usize("mc_samples", 200_000)? as u64,
            seed: replica_seed(c, &[u64::MAX]),
        };
        let h = h_analytic(&motif, &w, &options)?;
        if h.is_infinite() {
            return Err(Error::InvalidConfig(
                "the motif density of this graphon diverges".into(),
            ));
        }
        h.value
    };
    let mut records = vec![record(0, 0.0, "target", target)];
    for (ti, &t) in horizons.iter().enumerate() {
        records.extend(per_replica(c.replicas, |r| {
            let seed = replica_seed(c, &[r as u64, ti as u64]);
            let g = sample_graphon_process(&w, t, seed, false)?.graph();
            let h = if g.num_edges() == 0 {
                0.0
            } else {
                rescaled_density(&motif, &g)?.h_inj
            };
            Ok(vec![record(r, t, "h_inj", h)])
        })?);
    }
    let checks = horizons
        .iter()
        .map(|&t| {
            Check::at_most(
                format!("|mean h_inj − h(F, W)| at T={t}"),
                (mean_of(&records, "h_inj", t) - target).abs(),
                tol * target,
            )
        })
        .collect();
    Ok(ExperimentReport::new(c, records, checks))
}

fn cut_norm_oracle(c: &ExperimentConfig, _: Option<&Path>) -> Result<ExperimentReport> {
    let max_blocks = c.param_usize("max_blocks", 6)?.clamp(1, 8);
    let tol = c.param_f64("tolerance", 1e-12)?;
    let records = per_replica(c.replicas, |r| {
        let mut rng = stream_rng(replica_seed(c, &[r as u64]), 0);
        let n = rng.random_range(1..=max_blocks);
        let masses: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let values = symmetric_matrix(&mut rng, n, -1.0, 1.0);
        let w = StepGraphon::from_flat(masses, values, false)?;
        let exact = cut_norm(&w, CutNormMode::Exact, 0)?.value;
        let brute = cut_norm_brute_force(&w);
        Ok(vec![
            record(r, n as f64, "abs_error", (exact - brute).abs()),
            record(r, n as f64, "cut_norm", exact),
        ])
    })?;
    let checks = vec![Check::at_most("largest |exact − brute force|", max_of(&records, "abs_error"), tol)];
    Ok(ExperimentReport::new(c, records, checks))
}

fn permutation_zero(c: &ExperimentConfig, _: Option<&Path>) -> Result<ExperimentReport> {
    let n = c.param_usize("blocks", 7)?;
    if n == 0 || n > crate::metrics::EXACT_PERMUTATION_LIMIT {
        return Err(Error::InvalidConfig(format!(
            "blocks must lie in 1..={}",
            crate::metrics::EXACT_PERMUTATION_LIMIT
        )));
    }
    let records = per_replica(c.replicas, |r| {
        let mut rng = stream_rng(replica_seed(c, &[r as u64]), 0);
        let values = symmetric_matrix(&mut rng, n, 0.0, 1.0);
        let w = StepGraphon::from_flat(vec![1.0 / n as f64; n], values, false)?;
        let mut shuffle: Vec<usize> = (0..n).collect();
        shuffle.shuffle(&mut rng);
        let v = w.permuted(&shuffle)?;
        let report = cut_distance(&w, &v, &DistanceOptions::exact())?;
        let mut inverse = vec![0; n];
        for (i, &s) in shuffle.iter().enumerate() {
            inverse[s] = i;
        }
        let inverts = report.witness.block_permutation() == Some(inverse);
        Ok(vec![
            record(r, 0.0, "distance", report.value),
            record(r, 0.0, "witness_inverts_shuffle", f64::from(u8::from(inverts))),
            record(r, 0.0, "exact", f64::from(u8::from(report.mode == ReportMode::Exact))),
        ])
    })?;
    let checks = vec![
        Check::at_most("largest distance", max_of(&records, "distance"), 1e-12),
        Check::at_least("witness inverts every shuffle", min_of(&records, "witness_inverts_shuffle"), 1.0),
    ];
    Ok(ExperimentReport::new(c, records, checks))
}

fn metric_convergence(c: &ExperimentConfig, base: Option<&Path>) -> Result<ExperimentReport> {
    let w = c.graphon_or(constant(0.5), base)?;
    let step = require_step(&w, "metric_convergence")?;
    let alignment: Alignment = serde_json::from_value(Value::from(
        c.param_str("alignment", "feature_oracle")?,
    ))
    .map_err(|_| Error::InvalidConfig("alignment must be feature_oracle or degree_sort".into()))?;
    let threshold = c.param_f64("threshold", 0.1)?;
    let horizons = horizons_or(c, &[10.0, 20.0, 40.0]);
    let mut records = Vec::new();
    for (ti, &t) in horizons.iter().enumerate() {
        records.extend(per_replica(c.replicas, |r| {
            let seed = replica_seed(c, &[r as u64, ti as u64]);
            let trace = sample_graphon_process(&w, t, seed, !w.ambient_infinite())?;
            let e = graph_graphon_distance_estimate(&trace, &step, alignment)?;
            Ok(vec![record(r, t, "distance", e.value)])
        })?);
    }
    let medians: Vec<f64> = horizons
        .iter()
        .map(|&t| median_of(&records, "distance", t))
        .collect();
    let violations = medians.windows(2).filter(|m| m[1] >= m[0]).count();
    let checks = vec![
        Check::at_most("non-decreasing median steps", violations as f64, 0.0),
        Check::below(
            "median at the last horizon",
            *medians.last().expect("at least one horizon"),
            threshold,
        ),
    ];
    Ok(ExperimentReport::new(c, records, checks))
}

fn sequential_dichotomy(c: &ExperimentConfig, base: Option<&Path>) -> Result<ExperimentReport> {
    let w = c.graphon_or(constant(1.0), base)?;
    let sizes = sizes_or(c, &[100, 1000]);
    let growth = c.param_f64("growth", 2.0)?;
    let stability = c.param_f64("stability", 0.2)?;
    let steps = *sizes.iter().max().expect("sizes are nonempty");
    let schedules = [
        ("edges_linear", RegionSchedule::Linear { c: 1.0 }),
        ("edges_exponential", RegionSchedule::Exponential { c: 1.0 }),
    ];
    let records = per_replica(c.replicas, |r| {
        let mut out = Vec::new();
        for (si, (metric, schedule)) in schedules.iter().enumerate() {
            let seed = replica_seed(c, &[r as u64, si as u64]);
            let sample = sample_sequential(&w, *schedule, steps, seed)?;
            for &n in &sizes {
                out.push(record(r, n as f64, metric, sample.num_edges_at(n) as f64));
            }
        }
        Ok(out)
    })?;
    let (first, last) = (sizes[0] as f64, *sizes.last().expect("nonempty") as f64);
    let checks = vec![
        Check::at_least(
            "linear schedule: mean edges ratio, last over first N",
            mean_of(&records, "edges_linear", last) / mean_of(&records, "edges_linear", first),
            growth,
        ),
        Check::below(
            "exponential schedule: |change of mean edges|",
            (mean_of(&records, "edges_exponential", last)
                - mean_of(&records, "edges_exponential", first))
            .abs(),
            stability,
        ),
    ];
    Ok(ExperimentReport::new(c, records, checks))
}

fn tail_dichotomy(c: &ExperimentConfig, _: Option<&Path>) -> Result<ExperimentReport> {
    let sizes = sizes_or(c, &[1000, 10_000]);
    let alpha = c.param_f64("alpha", 0.5)?;
    let eps = c.param_f64("eps", 0.1)?;
    let growth = c.param_f64("growth", 1.5)?;
    let er = GraphFamily::parse(&format!("er_example1:alpha={alpha}:n=1"))?;
    let clique_m: Vec<f64> = sizes
        .par_iter()
        .map(|&n| {
            let g = generators::clique_plus_isolated(n, sparse_clique_size(n));
            Ok(required_m(&g, eps)?.unwrap_or(BEYOND_GRID))
        })
        .collect::<Result<_>>()?;
    let records = per_replica(c.replicas, |r| {
        let mut out = Vec::new();
        for (&n, &m) in sizes.iter().zip(&clique_m) {
            out.push(record(r, n as f64, "clique_m", m));
            let g = er.member(n, replica_seed(c, &[r as u64]));
            out.push(record(r, n as f64, "er_m", required_m(&g, eps)?.unwrap_or(BEYOND_GRID)));
        }
        Ok(out)
    })?;
    let (first, last) = (sizes[0] as f64, *sizes.last().expect("nonempty") as f64);
    let clique_means: Vec<f64> = sizes
        .iter()
        .map(|&n| mean_of(&records, "clique_m", n as f64))
        .collect();
    let spread = clique_means.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - clique_means.iter().copied().fold(f64::INFINITY, f64::min);
    let checks = vec![
        Check::at_most("clique family: spread of M across n", spread, 0.0),
        Check::below("clique family: M inside the grid", max_of(&records, "clique_m"), BEYOND_GRID),
        Check::at_least(
            "Erdős–Rényi family: M ratio, last over first n",
            mean_of(&records, "er_m", last) / mean_of(&records, "er_m", first),
            growth,
        ),
    ];
    Ok(ExperimentReport::new(c, records, checks))
}

/// `μ_s({D_{W^s} > λ})` for the stretched step graphon.
fn stretched_tail_mass(w: &StepGraphon, lambda: f64) -> f64 {
    let s = w.stretch();
    let d = s.degrees();
    s.masses()
        .iter()
        .zip(&d)
        .filter(|&(_, &di)| di > lambda)
        .map(|(m, _)| m)
        .sum()
}

fn degree_tail(c: &ExperimentConfig, base: Option<&Path>) -> Result<ExperimentReport> {
    let w = c.graphon_or(constant(0.5), base)?;
    let step = require_step(&w, "degree_tail")?;
    let lambda = c.param_f64("lambda", 0.5)?;
    let tol = c.param_f64("tolerance", 0.1)?;
    let horizons = horizons_or(c, &[50.0]);
    let target = stretched_tail_mass(&step, lambda);
    let mut records = vec![record(0, 0.0, "target", target)];
    for (ti, &t) in horizons.iter().enumerate() {
        records.extend(per_replica(c.replicas, |r| {
            let seed = replica_seed(c, &[r as u64, ti as u64]);
            let g = sample_graphon_process(&w, t, seed, false)?.graph();
            let v = if g.num_edges() == 0 {
                0.0
            } else {
                graph_degree_stats(&g, &[lambda])?.normalized_counts[0]
            };
            Ok(vec![record(r, t, "normalized_count", v)])
        })?);
    }
    let checks = horizons
        .iter()
        .map(|&t| {
            Check::at_most(
                format!("|mean count − target| at T={t}"),
                (mean_of(&records, "normalized_count", t) - target).abs(),
                tol * target,
            )
        })
        .collect();
    Ok(ExperimentReport::new(c, records, checks))
}

fn bounded_degree_null(c: &ExperimentConfig, _: Option<&Path>) -> Result<ExperimentReport> {
    let sizes = sizes_or(c, &[10_000]);
    let bound = c.param_f64("bound", 0.02)?;
    let path3 = MotifGraph::path(3);
    let mut records = Vec::new();
    for &n in &sizes {
        if n < 3 {
            return Err(Error::InvalidConfig("cycles need at least 3 vertices".into()));
        }
        let h = rescaled_density(&path3, &generators::cycle(n))?.h;
        let expected = 4.0 * n as f64 / (2.0 * n as f64).powf(1.5);
        records.push(record(0, n as f64, "h_path3", h));
        records.push(record(0, n as f64, "abs_error", (h - expected).abs()));
    }
    let c6 = generators::cycle(6);
    let fast = count_embeddings(&path3, &c6)?;
    let slow = count_embeddings_brute_force(&path3, &c6);
    let mismatch = fast.hom.abs_diff(slow.hom) + fast.inj.abs_diff(slow.inj);
    records.push(record(0, 6.0, "brute_force_mismatch", mismatch as f64));
    let largest = *sizes.iter().max().expect("nonempty") as f64;
    let checks = vec![
        Check::at_most("largest |h − closed form|", max_of(&records, "abs_error"), 1e-9),
        Check::below("h at the largest n", mean_of(&records, "h_path3", largest), bound),
        Check::at_most("brute-force mismatch on C_6", mismatch as f64, 0.0),
    ];
    Ok(ExperimentReport::new(c, records, checks))
}

fn edge_density_identity(c: &ExperimentConfig, _: Option<&Path>) -> Result<ExperimentReport> {
    let graphons = c.param_usize("graphons", 50)?;
    let edge = MotifGraph::edge();
    let mut records = per_replica(c.replicas, |r| {
        let mut rng = stream_rng(replica_seed(c, &[0, r as u64]), 0);
        let n = rng.random_range(2..=40);
        let p = rng.random_range(0.05..1.0);
        let mut attempt = 0u64;
        let g = loop {
            let g = generators::erdos_renyi(n, p, replica_seed(c, &[0, r as u64, attempt]));
            if g.num_edges() > 0 {
                break g;
            }
            attempt += 1;
        };
        let h = rescaled_density(&edge, &g)?.h;
        Ok(vec![record(r, 0.0, "graph_error", (h - 1.0).abs())])
    })?;
    records.extend(per_replica(graphons, |r| {
        let mut rng = stream_rng(replica_seed(c, &[1, r as u64]), 0);
        let n = rng.random_range(1..=5);
        let masses: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let mut values = symmetric_matrix(&mut rng, n, 0.0, 1.0);
        // keep the norm away from zero
        values[0] = values[0].max(0.1);
        let w = StepGraphon::from_flat(masses, values, false)?;
        let h = h_step(&edge, &w)?.value;
        Ok(vec![record(r, 0.0, "graphon_error", (h - 1.0).abs())])
    })?);
    let checks = vec![
        Check::at_most("largest graph error", max_of(&records, "graph_error"), 0.0),
        Check::at_most("largest graphon error", max_of(&records, "graphon_error"), 1e-9),
    ];
    Ok(ExperimentReport::new(c, records, checks))
}

/// Box counts of a control process whose pair probability is 0.9 when the
/// later endpoint arrives before `T/2` and 0.1 afterwards.
fn control_box_counts(t: f64, bins: usize, seed: u64) -> Result<Vec<Vec<u64>>> {
    let mut rng = stream_rng(seed, 0);
    let count = Poisson::new(t)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .sample(&mut rng) as usize;
    let births: Vec<f64> = (0..count).map(|_| rng.random_range(0.0..t)).collect();
    let edge_seed = derive_seed(seed, &[1]);
    let h = t / bins as f64;
    let cell = |x: f64| ((x / h).floor() as usize).min(bins - 1);
    let mut counts = vec![vec![0u64; bins]; bins];
    for i in 0..count {
        for j in i + 1..count {
            let p = if births[i].max(births[j]) < t / 2.0 { 0.9 } else { 0.1 };
            if pair_uniform(edge_seed, i as u64, j as u64) < p {
                let (a, b) = (cell(births[i]), cell(births[j]));
                counts[a][b] += 1;
                counts[b][a] += 1;
            }
        }
    }
    Ok(counts)
}

/// Sign-flip permutation test of `E C_ij = E C_{σ(i)σ(j)}` over off-diagonal cells.
///
/// Each replica contributes the differences `C_ij − C_{σ(i)σ(j)}`; the
/// statistic is the squared norm of their sum, and the null distribution
/// flips the sign of whole replicas at random.
fn permutation_p_value(counts: &[Vec<Vec<u64>>], sigma: &[usize], resamples: usize, seed: u64) -> f64 {
    let b = sigma.len();
    let diffs: Vec<Vec<f64>> = counts
        .iter()
        .map(|c| {
            let mut d = Vec::with_capacity(b * (b - 1) / 2);
            for i in 0..b {
                for j in i + 1..b {
                    d.push(c[i][j] as f64 - c[sigma[i]][sigma[j]] as f64);
                }
            }
            d
        })
        .collect();
    let len = diffs.first().map_or(0, Vec::len);
    let statistic = |signs: &[f64]| -> f64 {
        let mut sum = vec![0.0; len];
        for (d, s) in diffs.iter().zip(signs) {
            sum.iter_mut().zip(d).for_each(|(a, x)| *a += s * x);
        }
        sum.iter().map(|x| x * x).sum()
    };
    let observed = statistic(&vec![1.0; diffs.len()]);
    let mut rng = stream_rng(seed, 0);
    let mut exceed = 0usize;
    let mut signs = vec![0.0; diffs.len()];
    for _ in 0..resamples {
        signs
            .iter_mut()
            .for_each(|s| *s = if rng.random::<bool>() { 1.0 } else { -1.0 });
        if statistic(&signs) >= observed {
            exceed += 1;
        }
    }
    (1 + exceed) as f64 / (1 + resamples) as f64
}

fn exchangeability(c: &ExperimentConfig, base: Option<&Path>) -> Result<ExperimentReport> {
    let w = c.graphon_or(constant(0.5), base)?;
    let t = horizons_or(c, &[40.0])[0];
    let bins = c.param_usize("bins", 8)?;
    let permutations = c.param_usize("permutations", 3)?;
    let resamples = c.param_usize("resamples", 999)?;
    let level = c.param_f64("level", 0.01)?;
    if bins < 2 {
        return Err(Error::InvalidConfig("need at least two bins".into()));
    }
    let replicas: Vec<(Vec<Vec<u64>>, Vec<Vec<u64>>)> = (0..c.replicas)
        .into_par_iter()
        .map(|r| {
            let trace = sample_graphon_process(&w, t, replica_seed(c, &[0, r as u64]), false)?;
            let process = xi_box_counts(&trace, t / bins as f64, t)?;
            let control = control_box_counts(t, bins, replica_seed(c, &[1, r as u64]))?;
            Ok((process, control))
        })
        .collect::<Result<_>>()?;
    let half_sum = |m: &Vec<Vec<u64>>| m.iter().flatten().sum::<u64>() as f64 / 2.0;
    let mut records = Vec::new();
    for (r, (p, q)) in replicas.iter().enumerate() {
        records.push(record(r, 0.0, "edges_process", half_sum(p)));
        records.push(record(r, 0.0, "edges_control", half_sum(q)));
    }
    let process: Vec<_> = replicas.iter().map(|(p, _)| p.clone()).collect();
    let control: Vec<_> = replicas.iter().map(|(_, q)| q.clone()).collect();
    let mut perm_rng = stream_rng(replica_seed(c, &[2]), 0);
    let identity: Vec<usize> = (0..bins).collect();
    for k in 0..permutations {
        let mut sigma = identity.clone();
        while sigma == identity {
            sigma.shuffle(&mut perm_rng);
        }
        let test_seed = replica_seed(c, &[3, k as u64]);
        let p = permutation_p_value(&process, &sigma, resamples, test_seed);
        let q = permutation_p_value(&control, &sigma, resamples, test_seed);
        records.push(record(0, (k + 1) as f64, "p_value_process", p));
        records.push(record(0, (k + 1) as f64, "p_value_control", q));
    }
    let checks = vec![
        Check::above("process: smallest p-value", min_of(&records, "p_value_process"), level),
        Check::at_most("control: largest p-value", max_of(&records, "p_value_control"), level),
    ];
    Ok(ExperimentReport::new(c, records, checks))
}

fn metric_axioms(c: &ExperimentConfig, _: Option<&Path>) -> Result<ExperimentReport> {
    let max_blocks = c.param_usize("max_blocks", 6)?.clamp(1, crate::metrics::EXACT_PERMUTATION_LIMIT);
    let records = per_replica(c.replicas, |r| {
        let mut rng = stream_rng(replica_seed(c, &[r as u64]), 0);
        let n = rng.random_range(1..=max_blocks);
        let ws = (0..3)
            .map(|_| {
                let values = symmetric_matrix(&mut rng, n, 0.0, 1.0);
                StepGraphon::from_flat(vec![1.0 / n as f64; n], values, false)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut d = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    d[i][j] = cut_distance(&ws[i], &ws[j], &DistanceOptions::exact())?.value;
                }
            }
        }
        let mut symmetry: f64 = 0.0;
        let mut triangle = f64::NEG_INFINITY;
        for i in 0..3 {
            for j in 0..3 {
                symmetry = symmetry.max((d[i][j] - d[j][i]).abs());
                for k in 0..3 {
                    if i != j && j != k && i != k {
                        triangle = triangle.max(d[i][k] - d[i][j] - d[j][k]);
                    }
                }
            }
        }
        Ok(vec![
            record(r, n as f64, "symmetry_gap", symmetry),
            record(r, n as f64, "triangle_excess", triangle),
        ])
    })?;
    let checks = vec![
        Check::at_most("largest symmetry gap", max_of(&records, "symmetry_gap"), 1e-12),
        Check::at_most("largest triangle excess", max_of(&records, "triangle_excess"), 1e-9),
    ];
    Ok(ExperimentReport::new(c, records, checks))
}

fn perturbation_bound(c: &ExperimentConfig, _: Option<&Path>) -> Result<ExperimentReport> {
    let epsilons = c.param_f64_list("epsilons", &[0.01, 0.05])?;
    let max_blocks = c.param_usize("max_blocks", 5)?.clamp(1, crate::metrics::EXACT_PAIRING_LIMIT);
    let records = per_replica(c.replicas, |r| {
        let mut rng = stream_rng(replica_seed(c, &[r as u64]), 0);
        let n = rng.random_range(1..=max_blocks);
        let masses: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.5)).collect();
        let values = symmetric_matrix(&mut rng, n, 0.0, 1.0);
        let w = StepGraphon::from_flat(masses, values, false)?;
        let norm = w.l1_norm();
        let mut out = Vec::new();
        for &eps in &epsilons {
            let v = w.scale_masses(1.0 + eps)?;
            let d = cut_distance(&w, &v, &DistanceOptions::exact())?.value;
            out.push(record(r, eps, "distance", d));
            out.push(record(r, eps, "ratio", d / (3.0 * eps * norm)));
        }
        Ok(out)
    })?;
    let checks = epsilons
        .iter()
        .map(|&eps| {
            let worst = values_of(&records, "ratio", eps).fold(f64::NEG_INFINITY, f64::max);
            Check::at_most(format!("largest distance / (3ε‖W‖₁) at ε={eps}"), worst, 1.0)
        })
        .collect();
    Ok(ExperimentReport::new(c, records, checks))
}

fn avg_degree_growth(c: &ExperimentConfig, base: Option<&Path>) -> Result<ExperimentReport> {
    let w = c.graphon_or(constant(0.5), base)?;
    let horizons = horizons_or(c, &[10.0, 20.0, 40.0, 80.0]);
    let matchings = c.param_f64_list("matchings", &[100.0, 400.0])?;
    let eps = c.param_f64("eps", 0.5)?;
    let mut records = Vec::new();
    for (ti, &t) in horizons.iter().enumerate() {
        records.extend(per_replica(c.replicas, |r| {
            let seed = replica_seed(c, &[r as u64, ti as u64]);
            let g = sample_graphon_process(&w, t, seed, false)?.graph();
            let avg = if g.num_vertices() == 0 {
                0.0
            } else {
                2.0 * g.num_edges() as f64 / g.num_vertices() as f64
            };
            Ok(vec![record(r, t, "avg_degree", avg)])
        })?);
    }
    for &m in &matchings {
        let g = generators::perfect_matching(m as usize);
        records.push(record(0, m, "matching_m", required_m(&g, eps)?.unwrap_or(BEYOND_GRID)));
    }
    let (t0, t1) = (horizons[0], *horizons.last().expect("nonempty"));
    let mut checks = vec![Check::at_least(
        "average degree ratio, last over first T",
        mean_of(&records, "avg_degree", t1) / mean_of(&records, "avg_degree", t0),
        2.0,
    )];
    if let (Some(&m0), Some(&m1)) = (matchings.first(), matchings.last()) {
        if m1 > m0 {
            checks.push(Check::at_least(
                "matching M ratio, last over first m",
                mean_of(&records, "matching_m", m1) / mean_of(&records, "matching_m", m0),
                1.4,
            ));
        }
    }
    Ok(ExperimentReport::new(c, records, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_criterion_has_one_entry() {
        for k in 1..=13u8 {
            let n = catalog().iter().filter(|e| e.criterion == Some(k)).count();
            assert_eq!(n, 1, "criterion {k}");
        }
    }

    #[test]
    fn defaults_name_their_entry() {
        for e in catalog() {
            assert_eq!(e.default_config().experiment, e.name);
            assert!(describe(e.name).unwrap().contains("replica,parameter,metric,value"));
        }
        assert!(matches!(find("nope"), Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn zero_graphon_densities_vanish() {
        let mut c = find("density_convergence").unwrap().default_config();
        c.graphon = Some(super::super::config::GraphonSource::Inline(constant(0.0)));
        c.replicas = 3;
        c.horizons = vec![10.0];
        let r = run_experiment(&c).unwrap();
        assert!(r.passed);
        assert!(r.records.iter().all(|x| x.value == 0.0));
    }

    #[test]
    fn p_values_detect_inhomogeneity() {
        let counts: Vec<_> = (0..60)
            .map(|r| control_box_counts(20.0, 4, r).unwrap())
            .collect();
        let p = permutation_p_value(&counts, &[2, 3, 0, 1], 199, 1);
        assert!(p <= 0.01, "{p}");
    }
}
