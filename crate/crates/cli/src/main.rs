use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use m0n_core::harness::{default_grid, run_suite, SweepConfig};
use m0n_core::rational::{format_q, parse_q};
use m0n_core::skeleton::{intersection_graph, skeleton_valuation_with_base, trop_of_skeleton_point, SkeletonPoint, SkeletonPointJson};
use m0n_core::trees::{enumerate_stable_trees, forget_leaf, MarkedMetricTree, TreeJson};
use m0n_core::tropical::{
    cone_complex, gauge_fix, local_projection, plucker_vector, pull_back_to_plucker, section_valuation, IndexSet,
};
use m0n_core::valuation::PolyJson;
use m0n_core::Q;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] m0n_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {0}: {1}")]
    Io(String, io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

type CliResult<T> = Result<T, CliError>;

/// What a successful run reports to the shell.
enum Outcome {
    Ok,
    CheckFailed,
}

#[derive(Parser)]
#[command(name = "m0n", version, about = "Tropical and skeleton valuations on the moduli of stable genus-zero curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ListFormat {
    Json,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Section,
    Skeleton,
}

#[derive(Subcommand)]
enum Command {
    /// List every stable tree type on n leaves.
    Trees {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trivalent_only: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: ListFormat,
    },
    /// Print the cone complex of tree types with its facet relation.
    Cones {
        #[arg(long)]
        n: usize,
    },
    /// Print the intersection graph of boundary divisors.
    Graph {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
    },
    /// Embed a metric tree in Plücker coordinates modulo im L.
    Embed {
        /// Tree JSON file, or `-` for standard input.
        #[arg(long)]
        tree: String,
        /// Print the local projection for this base pair instead.
        #[arg(long, value_parser = parse_pair)]
        projection: Option<(usize, usize)>,
        /// Skip the gauge fixing.
        #[arg(long)]
        raw: bool,
    },
    /// Evaluate a polynomial under the section or the skeleton valuation.
    Eval {
        #[arg(long, value_enum)]
        side: Side,
        /// Tree JSON file.
        #[arg(long, conflicts_with = "splits", required_unless_present = "splits")]
        tree: Option<String>,
        /// Skeleton point JSON file.
        #[arg(long)]
        splits: Option<String>,
        /// Polynomial JSON file.
        #[arg(long)]
        poly: String,
        /// Base pair `i,j` (default `1,n`).
        #[arg(long, value_parser = parse_pair)]
        base: Option<(usize, usize)>,
    },
    /// Compare both valuations over every cone in a range of n.
    Compare {
        #[arg(long)]
        n_from: usize,
        #[arg(long)]
        n_to: usize,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random polynomials per point.
        #[arg(long, default_value_t = 10)]
        polys: usize,
        /// Comma-separated positive rationals, e.g. `1,1/2,7/3`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Also print one JSON line per cone.
        #[arg(long)]
        reports: bool,
    },
    /// Forget a marking and stabilize.
    Forget {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        leaf: usize,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `i,j`, got {s:?}"))?;
    let a = a.trim().parse().map_err(|_| format!("bad leaf {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad leaf {b:?}"))?;
    Ok((a, b))
}

fn read_input(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io("standard input".into(), e))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::Io(path.into(), e))
}

fn read_tree(path: &str) -> CliResult<MarkedMetricTree> {
    Ok(TreeJson::parse_metric(&read_input(path)?)?)
}

fn run(cmd: Command, out: &mut impl Write) -> CliResult<Outcome> {
    let mut emit = |s: String| writeln!(out, "{s}").map_err(|e| CliError::Io("standard output".into(), e));
    match cmd {
        Command::Trees { n, trivalent_only, format } => {
            let records: Vec<TreeJson> = enumerate_stable_trees(n)?
                .iter()
                .filter(|t| !trivalent_only || t.is_trivalent())
                .map(TreeJson::from_tree)
                .collect();
            match format {
                ListFormat::Json => emit(serde_json::to_string(&records)?)?,
                ListFormat::Jsonl => {
                    for r in &records {
                        emit(serde_json::to_string(r)?)?;
                    }
                }
            }
        }
        Command::Cones { n } => {
            let c = cone_complex(n)?;
            let cones: Vec<serde_json::Value> = (0..c.cones.len())
                .map(|idx| {
                    let sides: Vec<Vec<usize>> = c.cones[idx].splits.iter().map(|s| s.side()).collect();
                    serde_json::json!({ "id": idx, "dim": c.cones[idx].dim(), "splits": sides, "facets": c.facets(idx) })
                })
                .collect();
            emit(serde_json::to_string(&serde_json::json!({ "n": n, "count_by_dim": c.count_by_dim(), "cones": cones }))?)?;
        }
        Command::Graph { n, format } => {
            let g = intersection_graph(n)?;
            match format {
                GraphFormat::Dot => write!(out, "{}", g.to_dot()).map_err(|e| CliError::Io("standard output".into(), e))?,
                GraphFormat::Json => emit(serde_json::to_string(&g.to_json())?)?,
            }
        }
        Command::Embed { tree, projection, raw } => {
            let t = read_tree(&tree)?;
            let x = plucker_vector(&t);
            match projection {
                Some((i, j)) => {
                    let idx = IndexSet::caterpillar(t.n(), i, j)?;
                    let proj: serde_json::Map<String, serde_json::Value> = local_projection(&x, &idx)
                        .into_iter()
                        .map(|((k, l), v)| (format!("{k},{l}"), format_q(&v).into()))
                        .collect();
                    emit(serde_json::to_string(&proj)?)?;
                }
                None => {
                    let p = if raw { x } else { gauge_fix(&x) };
                    emit(serde_json::to_string(&p.to_json())?)?;
                }
            }
        }
        Command::Eval { side, tree, splits, poly, base } => {
            let f = PolyJson::parse(&read_input(&poly)?)?;
            let (t, point) = match (tree, splits) {
                (Some(path), _) => {
                    let t = read_tree(&path)?;
                    let p = SkeletonPoint::from_metric_tree(&t);
                    (t, p)
                }
                (None, Some(path)) => {
                    let p = SkeletonPointJson::parse(&read_input(&path)?)?;
                    (trop_of_skeleton_point(&p.contract_zeros())?, p)
                }
                (None, None) => return Err(CliError::Usage("one of --tree or --splits is required".into())),
            };
            let n = t.n();
            let base = base.unwrap_or((1, n));
            let value = match side {
                Side::Section => section_valuation(&t, base.0, base.1)?.evaluate(&pull_back_to_plucker(&f, n)?)?,
                Side::Skeleton => skeleton_valuation_with_base(&point, base)?.evaluate(&f)?,
            };
            emit(value.to_string())?;
        }
        Command::Compare { n_from, n_to, samples, seed, polys, grid, jobs, reports } => {
            let grid = match grid {
                Some(g) => g.split(',').map(|s| parse_q(s.trim())).collect::<Result<Vec<Q>, _>>()?,
                None => default_grid(),
            };
            let cfg = SweepConfig { n_from, n_to, samples, grid, polys, seed, jobs };
            let (summary, cones) = run_suite(&cfg)?;
            if reports {
                for r in &cones {
                    emit(serde_json::to_string(r)?)?;
                }
            }
            emit(serde_json::to_string(&serde_json::json!({
                "n": [summary.n.0, summary.n.1],
                "cones": summary.cones,
                "points": summary.points,
                "failures": summary.failures,
                "seed": summary.seed,
            }))?)?;
            if summary.failures > 0 {
                return Ok(Outcome::CheckFailed);
            }
        }
        Command::Forget { tree, leaf } => {
            let t = read_tree(&tree)?;
            emit(serde_json::to_string(&TreeJson::from_metric(&forget_leaf(&t, leaf)?))?)?;
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    match run(cli.command, &mut stdout.lock()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("m0n: {e}");
            ExitCode::from(2)
        }
    }
}
