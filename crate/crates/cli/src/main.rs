use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use graphonlab::experiments::{self, ExperimentConfig};
use graphonlab::homomorphisms::{h_analytic, rescaled_density, HomOptions, MotifGraph};
use graphonlab::metrics::{
    cut_distance, cut_norm, stretched_cut_distance, CutNormMode, DistanceMode, DistanceOptions,
};
use graphonlab::regularity::{graph_tail_profile, m_grid, sequence_tail_regularity, TailRegularity};
use graphonlab::sampling::sample_graphon_process;
use graphonlab::{experiments::GraphFamily, GraphonSpec, ProcessTrace, StepGraphon};

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "graphonlab", version, about = "Graphons over σ-finite spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graphon process up to time T and write its trace as JSON.
    Sample {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "t")]
        horizon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep isolated vertices (finite sampling regions only).
        #[arg(long)]
        keep_isolated: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cut norm of a step graphon.
    Cutnorm {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = NormMode::Exact)]
        mode: NormMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cut distance between two step graphons.
    Cutdist {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = DistMode::Exact)]
        mode: DistMode,
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mass quantum of the common refinement; chosen from the masses when omitted.
        #[arg(long)]
        quantum: Option<f64>,
        /// Compare the stretched graphons instead.
        #[arg(long)]
        stretched: bool,
    },
    /// Rescaled homomorphism density of a motif in a sampled graph or a graphon.
    Hom {
        /// Motif name (edge, path3, triangle, c4, k4, star_k) or edges like `0-1,1-2`.
        #[arg(long)]
        motif: String,
        /// Trace file of a sampled process.
        #[arg(long, conflicts_with = "spec")]
        graph: Option<PathBuf>,
        /// Snapshot time within the trace; the horizon when omitted.
        #[arg(long, requires = "graph")]
        at: Option<f64>,
        /// Graphon spec file.
        #[arg(long, requires = "analytic")]
        spec: Option<PathBuf>,
        #[arg(long)]
        analytic: bool,
        /// Monte Carlo samples for closed-form families, e.g. 1e6.
        #[arg(long, default_value_t = 2e5)]
        mc: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Tail-regularity profiles of a graph family, written as CSV.
    Tailreg {
        /// Family such as `er_example1:alpha=0.5:n=1000,2000,4000`.
        #[arg(long)]
        graphs: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a catalog experiment; exits 0 iff every check passes.
    Experiment {
        /// Catalog entry; taken from the config when omitted.
        name: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for the CSV, JSON and SVG files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the entry's parameters, CSV metrics and default config.
        #[arg(long)]
        describe: bool,
        /// List catalog entries.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NormMode {
    Exact,
    Heuristic,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistMode {
    Exact,
    Anneal,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_step(path: &Path) -> CliResult<StepGraphon> {
    Ok(GraphonSpec::load(path)?.build()?.to_step()?)
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Sample {
            spec,
            horizon,
            seed,
            keep_isolated,
            out,
        } => {
            let w = GraphonSpec::load(&spec)?.build()?;
            let trace = sample_graphon_process(&w, horizon, seed, keep_isolated)?;
            log::info!(
                "sampled {} vertices and {} edges",
                trace.vertices.len(),
                trace.edges.len()
            );
            emit(&trace.to_json(), out.as_deref())?;
        }
        Command::Cutnorm { spec, mode, seed } => {
            let mode = match mode {
                NormMode::Exact => CutNormMode::Exact,
                NormMode::Heuristic => CutNormMode::Heuristic,
            };
            let c = cut_norm(&load_step(&spec)?, mode, seed)?;
            println!("{}", serde_json::to_string_pretty(&c)?);
        }
        Command::Cutdist {
            a,
            b,
            mode,
            budget,
            seed,
            quantum,
            stretched,
        } => {
            let options = DistanceOptions {
                mode: match mode {
                    DistMode::Exact => DistanceMode::Exact,
                    DistMode::Anneal => DistanceMode::Anneal,
                },
                budget,
                seed,
                quantum,
            };
            let (wa, wb) = (load_step(&a)?, load_step(&b)?);
            let report = if stretched {
                stretched_cut_distance((&wa).into(), (&wb).into(), &options)?
            } else {
                cut_distance(&wa, &wb, &options)?
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Hom {
            motif,
            graph,
            at,
            spec,
            analytic: _,
            mc,
            seed,
        } => {
            let f = MotifGraph::parse(&motif)?;
            let text = match (graph, spec) {
                (Some(path), _) => {
                    let trace = ProcessTrace::load(&path)?;
                    let g = trace.snapshot(at.unwrap_or(trace.horizon), false)?;
                    serde_json::to_string_pretty(&rescaled_density(&f, &g)?)?
                }
                (None, Some(path)) => {
                    if !(mc >= 1.0 && mc.is_finite()) {
                        return Err(format!("--mc must be at least 1, got {mc}").into());
                    }
                    let w = GraphonSpec::load(&path)?.build()?;
                    let options = HomOptions {
                        mc_samples: mc.round() as u64,
                        seed,
                    };
                    let h = h_analytic(&f, &w, &options)?;
                    let mut v = serde_json::to_value(h)?;
                    v["divergent"] = h.is_infinite().into();
                    serde_json::to_string_pretty(&v)?
                }
                (None, None) => return Err("pass --graph or --spec with --analytic".into()),
            };
            println!("{text}");
        }
        Command::Tailreg {
            graphs,
            eps,
            seed,
            out,
        } => {
            let family = GraphFamily::parse(&graphs)?;
            let members = family.members(seed);
            let grid = m_grid();
            let mut csv = String::from("graph_id,n,num_edges,M_grid,share\n");
            for m in &members {
                let p = graph_tail_profile(&m.graph, &grid)?;
                for (mv, share) in p.m_values.iter().zip(&p.shares) {
                    writeln!(csv, "{},{},{},{},{}", m.id, m.size, p.num_edges, mv, share)?;
                }
            }
            emit(csv.trim_end(), out.as_deref())?;
            let list: Vec<_> = members.into_iter().map(|m| m.graph).collect();
            match sequence_tail_regularity(&list, eps)? {
                TailRegularity::Regular { m, per_graph } => {
                    eprintln!("regular at eps={eps}: M={m} (per graph {per_graph:?})")
                }
                TailRegularity::Irregular {
                    witness, per_graph, ..
                } => eprintln!(
                    "no grid M works at eps={eps}; graph {witness} needs more (per graph {per_graph:?})"
                ),
            }
        }
        Command::Experiment {
            name,
            config,
            out,
            describe,
            list,
        } => return experiment(name, config, out, describe, list),
    }
    Ok(ExitCode::SUCCESS)
}

fn experiment(
    name: Option<String>,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    describe: bool,
    list: bool,
) -> CliResult<ExitCode> {
    if list {
        for e in experiments::catalog() {
            println!("{:<24} {}", e.name, e.summary);
        }
        return Ok(ExitCode::SUCCESS);
    }
    let (cfg, base) = match &config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if let Some(n) = &name {
                if *n != cfg.experiment {
                    return Err(format!(
                        "config runs `{}` but `{n}` was requested",
                        cfg.experiment
                    )
                    .into());
                }
            }
            (cfg, path.parent().map(Path::to_path_buf))
        }
        None => {
            let n = name.ok_or("name an experiment or pass --config")?;
            (experiments::find(&n)?.default_config(), None)
        }
    };
    if describe {
        print!("{}", experiments::describe(&cfg.experiment)?);
        return Ok(ExitCode::SUCCESS);
    }
    let report = experiments::run_experiment_in(&cfg, base.as_deref())?;
    for c in &report.checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.observed
        );
    }
    let dir = out.or_else(|| {
        cfg.output.as_ref().map(|o| match &base {
            Some(b) if o.is_relative() => b.join(o),
            _ => o.clone(),
        })
    });
    if let Some(dir) = dir {
        for path in experiments::write_report(&report, &dir)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
