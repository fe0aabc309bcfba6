//! JSON game files.
//!
//! A game file lists the targets, who owns them and the configurations
//! available on every target, followed by either explicit utility tables or
//! a `cascade` section from which the tables are derived:
//!
//! ```json
//! {
//!   "targets": ["a", "b"],
//!   "owners": [0, 1],
//!   "configs": ["uncovered", "covered"],
//!   "costs": [[0.0, 0.2], [0.0, 0.2]],
//!   "defender_utils": [[[-1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]],
//!   "attacker_vals": [[1.0, 0.0], [1.0, 0.0]],
//!   "offsets": [0.0, 0.0]
//! }
//! ```
//!
//! `defender_utils[i][j][o]` is defender `i`'s utility when target `j` is
//! attacked under configuration `o`, `attacker_vals[j][o]` the attacker's
//! value and `costs[j][o]` what the owner pays for `o`. `offsets` is
//! optional and adds a constant to each defender's utility.
//!
//! With a cascade section the two utility tables are omitted:
//!
//! ```json
//! "cascade": {
//!   "edges": [[0, 1, 0.5]],
//!   "direct": [[1.0, 0.0], [1.0, 0.0]],
//!   "values": [[1.0, 0.0], [0.0, 1.0]],
//!   "attacker_values": [1.0, 1.0],
//!   "samples": 100000,
//!   "seed": 0
//! }
//! ```
//!
//! `edges` are `[from, to, r]`, `direct[j][o]` is the chance an attack on
//! `j` under `o` compromises `j`, and `values[i][t]` is the value of node
//! `t` to defender `i`. `attacker_values` defaults to the column sums of
//! `values`. Sources with at most 20 uncertain reachable edges are
//! enumerated exactly, the rest use `samples` Monte Carlo runs.

use std::path::Path;

use anyhow::{bail, Context, Result};
use multidef_core::cascade::{
    derive_utilities, BaseGame, CascadeMethod, DependencyGraph, Edge, EXACT_EDGE_CAP,
};
use multidef_core::model::{GameTables, InterdependentGame};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub targets: Vec<String>,
    pub owners: Vec<usize>,
    pub configs: Vec<String>,
    pub costs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defender_utils: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attacker_vals: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cascade: Option<CascadeSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeSection {
    pub edges: Vec<(usize, usize, f64)>,
    pub direct: Vec<Vec<f64>>,
    pub values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attacker_values: Option<Vec<f64>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_samples() -> usize {
    100_000
}

impl GameFile {
    pub fn from_game(game: &InterdependentGame) -> Self {
        let t = game.tables();
        let offsets = t.offsets.filter(|o| o.iter().any(|&x| x != 0.0));
        Self {
            targets: t.targets,
            owners: t.owners,
            configs: t.configs,
            costs: t.costs,
            defender_utils: Some(t.defender_utils),
            attacker_vals: Some(t.attacker_vals),
            offsets,
            cascade: None,
        }
    }

    pub fn to_game(&self) -> Result<InterdependentGame> {
        let defenders = self.owners.iter().max().map_or(0, |&d| d + 1);
        match (&self.cascade, &self.defender_utils, &self.attacker_vals) {
            (None, Some(utils), Some(vals)) => Ok(InterdependentGame::new(GameTables {
                targets: self.targets.clone(),
                configs: self.configs.clone(),
                owners: self.owners.clone(),
                defenders: utils.len().max(defenders),
                costs: self.costs.clone(),
                defender_utils: utils.clone(),
                attacker_vals: vals.clone(),
                offsets: self.offsets.clone(),
            })?),
            (Some(c), None, None) => {
                if self.offsets.is_some() {
                    bail!("offsets are not supported together with a cascade section");
                }
                let edges = c.edges.iter().map(|&(from, to, r)| Edge { from, to, r }).collect();
                let graph = DependencyGraph::new(
                    self.targets.len(),
                    edges,
                    c.direct.clone(),
                    c.values.clone(),
                    c.attacker_values.clone(),
                )?;
                let base = BaseGame {
                    targets: self.targets.clone(),
                    configs: self.configs.clone(),
                    owners: self.owners.clone(),
                    defenders: c.values.len(),
                    costs: self.costs.clone(),
                };
                let method = CascadeMethod::Auto {
                    cap: EXACT_EDGE_CAP,
                    samples: c.samples,
                    seed: c.seed,
                };
                Ok(derive_utilities(&graph, &base, method)?)
            }
            (Some(_), _, _) => bail!("a cascade section replaces defender_utils and attacker_vals"),
            _ => bail!("a game needs defender_utils and attacker_vals, or a cascade section"),
        }
    }
}

pub fn parse_game(text: &str) -> Result<InterdependentGame> {
    let file: GameFile = serde_json::from_str(text).context("malformed game file")?;
    file.to_game()
}

pub fn read_game(path: &Path) -> Result<InterdependentGame> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_game(&text).with_context(|| format!("in {}", path.display()))
}

pub fn game_to_json(game: &InterdependentGame) -> String {
    let mut s = serde_json::to_string_pretty(&GameFile::from_game(game)).expect("game tables serialise");
    s.push('\n');
    s
}

pub fn write_game(path: &Path, game: &InterdependentGame) -> Result<()> {
    std::fs::write(path, game_to_json(game)).with_context(|| format!("writing {}", path.display()))
}
