//! Decentralisation sweeps on synthetic networks.
//!
//! A cell is one `(sample, players, p)` combination. Every sample fixes a
//! topology and node values; the nodes are split among the players with the
//! balanced partitioner, utilities come from the cascade model and an
//! equilibrium is approximated by the configured search. The social
//! optimum of a `(sample, p)` pair is the same search run on the
//! single-defender game, which is also the `players = 1` cell.
//!
//! Each finished cell is stored under `cells/` keyed by a hash of its
//! parameters, so an interrupted run resumes where it stopped. The CSV files
//! are rebuilt from the stored cells in a fixed order and do not depend on
//! scheduling. Runtimes go to `timings.csv` only.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use multidef_core::cascade::{CascadeMethod, EXACT_EDGE_CAP};
use multidef_core::games::{node_values, NetworkGame};
use multidef_core::netgen::{
    closeness, erdos_renyi, grid, partition, preferential_attachment, Partition, Topology,
};
use multidef_core::rng::mix;
use multidef_core::search::{run, Algorithm, SearchConfig, SearchTrace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graphfile::{read_partition, read_topology};
use crate::report::{spearman, trace_csv};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologySpec {
    Grid { rows: usize, cols: usize },
    ErdosRenyi { n: usize, p: f64 },
    PreferentialAttachment { n: usize, m: usize },
    /// Edge-list file, optionally with a fixed partition per player count
    /// (`partitions` maps a player count to a partition file).
    File {
        path: PathBuf,
        #[serde(default)]
        partitions: Vec<(usize, PathBuf)>,
    },
}

impl TopologySpec {
    pub fn name(&self) -> &'static str {
        match self {
            TopologySpec::Grid { .. } => "grid",
            TopologySpec::ErdosRenyi { .. } => "erdos_renyi",
            TopologySpec::PreferentialAttachment { .. } => "preferential_attachment",
            TopologySpec::File { .. } => "file",
        }
    }

    pub fn build(&self, seed: u64) -> Result<Topology> {
        Ok(match self {
            TopologySpec::Grid { rows, cols } => grid(*rows, *cols)?,
            TopologySpec::ErdosRenyi { n, p } => erdos_renyi(*n, *p, seed)?,
            TopologySpec::PreferentialAttachment { n, m } => preferential_attachment(*n, *m, seed)?,
            TopologySpec::File { path, .. } => read_topology(path)?,
        })
    }

    fn partition(&self, t: &Topology, players: usize) -> Result<Partition> {
        if let TopologySpec::File { partitions, .. } = self {
            if let Some((_, file)) = partitions.iter().find(|(n, _)| *n == players) {
                let part = read_partition(file, t)?;
                ensure!(part.parts == players, "{} has {} parts, expected {players}", file.display(), part.parts);
                return Ok(part);
            }
        }
        Ok(partition(t, players)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSpec {
    pub algorithm: String,
    /// Budget in best-response solves.
    pub iterations: usize,
    pub tol: f64,
    pub rel_gap: f64,
    pub restart_budget: usize,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            algorithm: "ribr".into(),
            iterations: 3000,
            tol: 1e-6,
            rel_gap: 1e-3,
            restart_budget: 25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CascadeSpec {
    /// Monte Carlo runs for sources with too many uncertain edges.
    pub samples: usize,
    /// Most uncertain reachable edges enumerated exactly.
    pub cap: usize,
}

impl Default for CascadeSpec {
    fn default() -> Self {
        Self {
            samples: 20_000,
            cap: EXACT_EDGE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: TopologySpec,
    pub players: Vec<usize>,
    /// Spread probabilities to sweep.
    pub p: Vec<f64>,
    pub cost: f64,
    pub samples: usize,
    #[serde(default)]
    pub search: SearchSpec,
    #[serde(default)]
    pub cascade: CascadeSpec,
    /// Write a per-cell search trace under `trace/`.
    #[serde(default = "yes")]
    pub trace: bool,
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    /// 16-node grid, players 1 to 16, 10 samples.
    pub fn desk() -> Self {
        Self {
            topology: TopologySpec::Grid { rows: 4, cols: 4 },
            players: vec![1, 2, 4, 8, 16],
            p: vec![0.1, 0.4, 0.7],
            cost: 0.2,
            samples: 10,
            search: SearchSpec::default(),
            cascade: CascadeSpec::default(),
            trace: true,
        }
    }

    /// 64-node grid, players 1 to 64, 40 samples.
    pub fn full() -> Self {
        Self {
            topology: TopologySpec::Grid { rows: 8, cols: 8 },
            players: vec![1, 2, 4, 8, 16, 32, 64],
            samples: 40,
            ..Self::desk()
        }
    }

    pub fn check(&self) -> Result<()> {
        ensure!(self.samples >= 1, "samples must be at least 1");
        ensure!(!self.players.is_empty(), "no player counts given");
        ensure!(!self.p.is_empty(), "no spread probabilities given");
        ensure!(self.p.iter().all(|p| (0.0..=1.0).contains(p)), "spread probabilities must lie in [0, 1]");
        ensure!(self.players.iter().all(|&n| n >= 1), "player counts must be at least 1");
        ensure!(self.cost >= 0.0, "cost must be nonnegative");
        ensure!(self.cascade.samples >= 1, "cascade samples must be at least 1");
        if Algorithm::from_name(&self.search.algorithm).is_none() {
            bail!("unknown algorithm {}", self.search.algorithm);
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("malformed experiment config")?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }
}

/// Seed of sample `s`: fixes the topology, node values and cascade draws.
pub fn sample_seed(master: u64, sample: usize) -> u64 {
    mix(master, &[0x5a4e, sample as u64])
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct CellKey {
    sample: usize,
    players: usize,
    p: f64,
}

/// Stored outcome of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub sample: usize,
    pub seed: u64,
    pub players: usize,
    pub p: f64,
    pub welfare: f64,
    pub avg_coverage: f64,
    pub epsilon: f64,
    pub solves: usize,
    pub coverage: Vec<f64>,
    pub closeness: Vec<f64>,
    pub runtime_ms: f64,
}

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub topology: String,
    pub sample: usize,
    pub seed: u64,
    pub players: usize,
    pub p: f64,
    pub welfare_eq: f64,
    pub welfare_opt: f64,
    pub avg_coverage: f64,
    pub epsilon: f64,
}

impl ExperimentRow {
    pub const HEADER: &'static str =
        "topology,sample,seed,players,p,welfare_eq,welfare_eq_per_player,welfare_opt,welfare_opt_per_player,avg_coverage,epsilon";

    pub fn csv(&self) -> String {
        let n = self.players as f64;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.topology,
            self.sample,
            self.seed,
            self.players,
            self.p,
            self.welfare_eq,
            self.welfare_eq / n,
            self.welfare_opt,
            self.welfare_opt / n,
            self.avg_coverage,
            self.epsilon
        )
    }

    /// Holds when the optimum is at least the equilibrium welfare up to
    /// the players' combined regret.
    pub fn welfare_bound_holds(&self) -> bool {
        self.welfare_opt >= self.welfare_eq - self.epsilon * self.players as f64 - 1e-9
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ExperimentRow>,
    /// Cells per row, in the same order.
    pub cells: Vec<CellResult>,
    pub computed: usize,
    pub reused: usize,
    /// Cells that failed, with the error.
    pub failures: Vec<String>,
}

impl ExperimentOutput {
    pub fn mean(&self, players: usize, p: f64, f: impl Fn(&ExperimentRow) -> f64) -> Option<f64> {
        let vals: Vec<f64> = self.rows.iter().filter(|r| r.players == players && r.p == p).map(f).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    master: u64,
    out: &'a Path,
    fingerprint: String,
}

impl Runner<'_> {
    fn cell_id(&self, key: CellKey) -> String {
        let text = format!("{}|sample={}|players={}|p={}", self.fingerprint, key.sample, key.players, key.p);
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(12).map(|b| format!("{b:02x}")).collect()
    }

    fn cell_path(&self, key: CellKey) -> PathBuf {
        self.out.join("cells").join(format!("{}.json", self.cell_id(key)))
    }

    fn label(key: CellKey) -> String {
        format!("sample{:03}_players{:03}_p{}", key.sample, key.players, key.p)
    }

    fn load(&self, key: CellKey) -> Option<CellResult> {
        let text = fs::read_to_string(self.cell_path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    fn compute(&self, key: CellKey) -> Result<CellResult> {
        let start = Instant::now();
        let seed = sample_seed(self.master, key.sample);
        let topo = self.cfg.topology.build(seed)?;
        let part = self.cfg.topology.partition(&topo, key.players)?;
        let values = node_values(seed, topo.node_count());
        let method = CascadeMethod::Auto {
            cap: self.cfg.cascade.cap,
            samples: self.cfg.cascade.samples,
            seed: mix(seed, &[key.p.to_bits()]),
        };
        let game = NetworkGame {
            p: key.p,
            cost: self.cfg.cost,
            method,
        }
        .build(&topo, &part, &values)?;
        let s = &self.cfg.search;
        let mut search = SearchConfig::new(Algorithm::from_name(&s.algorithm).unwrap(), &game);
        search.iterations = s.iterations;
        search.tol = s.tol;
        search.restart_budget = s.restart_budget;
        search.seed = mix(seed, &[key.players as u64, key.p.to_bits()]);
        search.br.rel_gap = s.rel_gap;
        let trace = run(&game, &search)?;
        let profile = &trace.report.profile;
        let result = CellResult {
            sample: key.sample,
            seed,
            players: key.players,
            p: key.p,
            welfare: trace.report.welfare,
            avg_coverage: profile.average_defense(&game),
            epsilon: trace.report.epsilon,
            solves: trace.solves,
            coverage: (0..game.target_count()).map(|j| profile.coverage(j)).collect(),
            closeness: closeness(&topo),
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        };
        self.store(key, &result, &trace)?;
        Ok(result)
    }

    fn store(&self, key: CellKey, result: &CellResult, trace: &SearchTrace) -> Result<()> {
        if self.cfg.trace {
            let path = self.out.join("trace").join(format!("{}.csv", Self::label(key)));
            fs::write(&path, trace_csv(trace)).with_context(|| format!("writing {}", path.display()))?;
        }
        let path = self.cell_path(key);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string(result)?).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Runs the missing cells in parallel.
    fn fill(&self, keys: &[CellKey]) -> (Vec<Option<CellResult>>, usize, Vec<String>) {
        let outcomes: Vec<(Option<CellResult>, bool, Option<String>)> = keys
            .par_iter()
            .map(|&key| match self.load(key) {
                Some(r) => (Some(r), false, None),
                None => match self.compute(key) {
                    Ok(r) => (Some(r), true, None),
                    Err(e) => {
                        let msg = format!("{}: {e:#}", Self::label(key));
                        eprintln!("cell failed: {msg}");
                        (None, false, Some(msg))
                    }
                },
            })
            .collect();
        let computed = outcomes.iter().filter(|o| o.1).count();
        let failures = outcomes.iter().filter_map(|o| o.2.clone()).collect();
        (outcomes.into_iter().map(|o| o.0).collect(), computed, failures)
    }
}

/// Runs (or resumes) an experiment in `out` with `workers` threads.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path, workers: usize, master: u64) -> Result<ExperimentOutput> {
    cfg.check()?;
    for dir in ["cells", "trace"] {
        fs::create_dir_all(out.join(dir)).with_context(|| format!("creating {}", out.join(dir).display()))?;
    }
    let runner = Runner {
        cfg,
        master,
        out,
        fingerprint: format!(
            "{}|master={master}|cost={}|search={:?}|cascade={:?}",
            serde_json::to_string(&cfg.topology)?,
            cfg.cost,
            cfg.search,
            cfg.cascade
        ),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;

    let pairs: Vec<(usize, f64)> = (0..cfg.samples).flat_map(|s| cfg.p.iter().map(move |&p| (s, p))).collect();
    let opt_keys: Vec<CellKey> = pairs.iter().map(|&(sample, p)| CellKey { sample, players: 1, p }).collect();
    let (optima, opt_done, mut failures) = pool.install(|| runner.fill(&opt_keys));

    let mut keys = Vec::new();
    for &(sample, p) in &pairs {
        for &players in &cfg.players {
            keys.push(CellKey { sample, players, p });
        }
    }
    let rest: Vec<CellKey> = keys.iter().copied().filter(|k| k.players != 1).collect();
    let (others, done, more) = pool.install(|| runner.fill(&rest));
    failures.extend(more);

    let lookup = |key: CellKey| -> Option<&CellResult> {
        if key.players == 1 {
            let i = opt_keys.iter().position(|k| *k == key)?;
            optima[i].as_ref()
        } else {
            let i = rest.iter().position(|k| *k == key)?;
            others[i].as_ref()
        }
    };
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for &key in &keys {
        let opt = lookup(CellKey { players: 1, ..key });
        let (Some(cell), Some(opt)) = (lookup(key), opt) else {
            continue;
        };
        let row = ExperimentRow {
            topology: cfg.topology.name().to_string(),
            sample: key.sample,
            seed: cell.seed,
            players: key.players,
            p: key.p,
            welfare_eq: cell.welfare,
            welfare_opt: opt.welfare,
            avg_coverage: cell.avg_coverage,
            epsilon: cell.epsilon,
        };
        if !row.welfare_bound_holds() {
            eprintln!(
                "warning: {} welfare_opt {} below welfare_eq {} minus regret",
                Runner::label(key),
                row.welfare_opt,
                row.welfare_eq
            );
        }
        rows.push(row);
        cells.push(cell.clone());
    }
    let total = opt_keys.len() + rest.len();
    let output = ExperimentOutput {
        rows,
        cells,
        computed: opt_done + done,
        reused: total - opt_done - done - failures.len(),
        failures,
    };
    write_outputs(cfg, out, master, &output)?;
    Ok(output)
}

fn write_outputs(cfg: &ExperimentConfig, out: &Path, master: u64, o: &ExperimentOutput) -> Result<()> {
    let provenance = format!(
        "# topology: {}\n# master seed: {master}\n# welfare_opt: social optimum approximated by the same search on the single-defender game\n",
        serde_json::to_string(&cfg.topology)?
    );
    let mut results = provenance.clone();
    results.push_str(ExperimentRow::HEADER);
    results.push('\n');
    for row in &o.rows {
        results.push_str(&row.csv());
        results.push('\n');
    }
    let mut centrality = provenance;
    centrality.push_str("topology,sample,players,p,node,closeness,coverage\n");
    let mut timings = String::from("sample,players,p,solves,runtime_ms\n");
    for (row, cell) in o.rows.iter().zip(&o.cells) {
        for (node, (c, q)) in cell.closeness.iter().zip(&cell.coverage).enumerate() {
            writeln!(centrality, "{},{},{},{},{node},{c},{q}", row.topology, row.sample, row.players, row.p).unwrap();
        }
        writeln!(timings, "{},{},{},{},{:.1}", row.sample, row.players, row.p, cell.solves, cell.runtime_ms).unwrap();
    }
    let mut summary = String::from("players,p,cells,welfare_eq,welfare_opt,avg_coverage,epsilon,spearman\n");
    for &p in &cfg.p {
        for &players in &cfg.players {
            let picked: Vec<(&ExperimentRow, &CellResult)> =
                o.rows.iter().zip(&o.cells).filter(|(r, _)| r.players == players && r.p == p).collect();
            if picked.is_empty() {
                continue;
            }
            let k = picked.len() as f64;
            let mean = |f: &dyn Fn(&ExperimentRow) -> f64| picked.iter().map(|(r, _)| f(r)).sum::<f64>() / k;
            let rho: Vec<f64> = picked.iter().filter_map(|(_, c)| spearman(&c.closeness, &c.coverage)).collect();
            let rho = if rho.is_empty() { String::new() } else { (rho.iter().sum::<f64>() / rho.len() as f64).to_string() };
            writeln!(
                summary,
                "{players},{p},{},{},{},{},{},{rho}",
                picked.len(),
                mean(&|r| r.welfare_eq),
                mean(&|r| r.welfare_opt),
                mean(&|r| r.avg_coverage),
                mean(&|r| r.epsilon)
            )
            .unwrap();
        }
    }
    for (name, text) in [
        ("results.csv", results),
        ("centrality.csv", centrality),
        ("summary.csv", summary),
        ("timings.csv", timings),
    ] {
        fs::write(out.join(name), text).with_context(|| format!("writing {name}"))?;
    }
    Ok(())
}
