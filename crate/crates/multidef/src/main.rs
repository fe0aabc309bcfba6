use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use multidef::experiment::{run_experiment, ExperimentConfig};
use multidef::gamefile::{read_game, write_game};
use multidef::graphfile::{partition_to_string, read_partition, read_topology, topology_to_string};
use multidef::report::{analytic_csv, equilibrium_csv, trace_csv, ANALYTIC_HEADER};
use multidef_core::analytic;
use multidef_core::cascade::{CascadeMethod, EXACT_EDGE_CAP};
use multidef_core::games::{node_values, NetworkGame, UniformGame};
use multidef_core::lp::write_lp;
use multidef_core::milp::build_br_milp;
use multidef_core::model::{encode_independent, IndependentParams};
use multidef_core::netgen::{erdos_renyi, grid, partition, preferential_attachment};
use multidef_core::search::{run, Algorithm, SearchConfig};

#[derive(Parser)]
#[command(name = "multidef", version, about = "Multi-defender security games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form equilibrium of a homogeneous independent-target game.
    Analytic(AnalyticArgs),
    /// Approximate an equilibrium of a game file.
    Solve(SolveArgs),
    /// Write a game file.
    Game {
        #[command(subcommand)]
        kind: GameKind,
    },
    /// Generate a topology as an edge list.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Balanced min-cut partition of a topology.
    Partition {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        parts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decentralisation experiments.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Baseline,
    MultiTarget,
    General,
}

#[derive(Args)]
struct AnalyticArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Target value (baseline and multi-target).
    #[arg(long, default_value_t = 1.0)]
    v: f64,
    /// Coverage cost per target.
    #[arg(long)]
    c: f64,
    /// Number of defenders.
    #[arg(long)]
    n: u32,
    /// Targets per defender.
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Utility of an attacked covered target (general model).
    #[arg(long, allow_hyphen_values = true)]
    uc: Option<f64>,
    /// Utility of an attacked uncovered target (general model).
    #[arg(long, allow_hyphen_values = true)]
    uu: Option<f64>,
    /// Utility of an unattacked target (general model).
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
}

impl AnalyticArgs {
    fn params(&self) -> Result<IndependentParams> {
        Ok(match self.model {
            Model::Baseline => IndependentParams::baseline(self.v, self.c, self.n),
            Model::MultiTarget => IndependentParams::multi_target(self.v, self.c, self.n, self.k),
            Model::General => {
                let (Some(uc), Some(uu), Some(omega)) = (self.uc, self.uu, self.omega) else {
                    bail!("the general model needs --uc, --uu and --omega");
                };
                IndependentParams::general(uc, uu, omega, self.c, self.n, self.k)
            }
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    game: PathBuf,
    /// rs, sa, ibr or ribr.
    #[arg(long, default_value = "ribr")]
    alg: String,
    /// Budget in best-response solves.
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Most best-response sweeps per restart.
    #[arg(long, default_value_t = 25)]
    restart_budget: usize,
    /// Relative optimality gap of each best-response solve.
    #[arg(long, default_value_t = 1e-6)]
    rel_gap: f64,
    /// Report file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-point trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the best-response program of `--dump-defender` at the final
    /// profile in LP format.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    dump_defender: usize,
}

#[derive(Subcommand)]
enum GameKind {
    /// Encoded homogeneous independent-target game.
    Independent {
        #[command(flatten)]
        params: AnalyticArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random values in `[0, 1]`, contiguous ownership.
    Uniform {
        #[arg(long)]
        defenders: usize,
        #[arg(long)]
        targets: usize,
        #[arg(long, default_value_t = 0.2)]
        cost: f64,
        /// Every defender values every target.
        #[arg(long)]
        shared: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cascade game on a topology with partitioned ownership.
    Network {
        #[arg(long)]
        graph: PathBuf,
        /// Partition file; the balanced partitioner is used when omitted.
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        parts: usize,
        /// Spread probability on every edge.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.2)]
        cost: f64,
        /// Seed of the node values and the Monte Carlo runs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenKind {
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
    },
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Pa {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ExperimentAction {
    /// Run or resume an experiment.
    Run {
        /// JSON config file, or `desk` / `full` for the presets.
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a preset config.
    Preset {
        #[arg(default_value = "desk")]
        name: String,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn preset(name: &str) -> Option<ExperimentConfig> {
    match name {
        "desk" => Some(ExperimentConfig::desk()),
        "full" => Some(ExperimentConfig::full()),
        _ => None,
    }
}

fn solve(a: &SolveArgs) -> Result<()> {
    let game = read_game(&a.game)?;
    let Some(algorithm) = Algorithm::from_name(&a.alg) else {
        bail!("unknown algorithm {}; use rs, sa, ibr or ribr", a.alg);
    };
    let mut cfg = SearchConfig::new(algorithm, &game);
    cfg.iterations = a.iters;
    cfg.seed = a.seed;
    cfg.tol = a.tol;
    cfg.restart_budget = a.restart_budget;
    cfg.br.rel_gap = a.rel_gap;
    let trace = run(&game, &cfg)?;
    if let Some(path) = &a.trace {
        emit(Some(path), &trace_csv(&trace))?;
    }
    if let Some(path) = &a.dump_lp {
        if a.dump_defender >= game.defender_count() {
            bail!("no defender {}", a.dump_defender);
        }
        let inst = build_br_milp(&game, a.dump_defender, &trace.report.profile, cfg.br.delta, cfg.br.big_m)?;
        emit(Some(path), &write_lp(&inst.lp))?;
    }
    emit(a.out.as_deref(), &equilibrium_csv(&game, &trace.report))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Analytic(a) => {
            let r = analytic::solve(&a.params()?)?;
            println!("{ANALYTIC_HEADER}\n{}", analytic_csv(&r));
        }
        Command::Solve(a) => solve(&a)?,
        Command::Game { kind } => match kind {
            GameKind::Independent { params, out } => write_game(&out, &encode_independent(&params.params()?)?)?,
            GameKind::Uniform {
                defenders,
                targets,
                cost,
                shared,
                seed,
                out,
            } => {
                let spec = UniformGame {
                    defenders,
                    targets,
                    cost,
                    shared_losses: shared,
                };
                write_game(&out, &spec.generate(seed)?)?;
            }
            GameKind::Network {
                graph,
                partition: part_file,
                parts,
                p,
                cost,
                seed,
                samples,
                out,
            } => {
                let t = read_topology(&graph)?;
                let part = match part_file {
                    Some(f) => read_partition(&f, &t)?,
                    None => partition(&t, parts)?,
                };
                let method = CascadeMethod::Auto {
                    cap: EXACT_EDGE_CAP,
                    samples,
                    seed,
                };
                let game = NetworkGame { p, cost, method }.build(&t, &part, &node_values(seed, t.node_count()))?;
                write_game(&out, &game)?;
            }
        },
        Command::Gen { kind, out } => {
            let t = match kind {
                GenKind::Grid { rows, cols } => grid(rows, cols)?,
                GenKind::Er { n, p, seed } => erdos_renyi(n, p, seed)?,
                GenKind::Pa { n, m, seed } => preferential_attachment(n, m, seed)?,
            };
            emit(out.as_deref(), &topology_to_string(&t))?;
        }
        Command::Partition { graph, parts, out } => {
            let t = read_topology(&graph)?;
            emit(out.as_deref(), &partition_to_string(&partition(&t, parts)?))?;
        }
        Command::Experiment { action } => match action {
            ExperimentAction::Run {
                config,
                out,
                workers,
                seed,
            } => {
                let cfg = match preset(&config) {
                    Some(c) => c,
                    None => ExperimentConfig::read(Path::new(&config))?,
                };
                let o = run_experiment(&cfg, &out, workers, seed)?;
                eprintln!(
                    "{} rows, {} cells computed, {} reused, {} failed; results in {}",
                    o.rows.len(),
                    o.computed,
                    o.reused,
                    o.failures.len(),
                    out.display()
                );
                if !o.failures.is_empty() {
                    bail!("{} cells failed", o.failures.len());
                }
            }
            ExperimentAction::Preset { name } => {
                let Some(cfg) = preset(&name) else {
                    bail!("unknown preset {name}; use desk or full");
                };
                println!("{}", serde_json::to_string_pretty(&cfg)?);
            }
        },
    }
    Ok(())
}
