//! Independent-cascade contagion and the utility tables derived from it.
//!
//! An attack on target `j` under configuration `o` directly affects `j`
//! with probability `z[j][o]`. Every affected node then gets one chance to
//! affect each out-neighbour `j'`, succeeding with probability `r(j, j')`.
//! Only the attacked node's configuration matters.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::model::{GameTables, InterdependentGame};
use crate::rng::substream;
use crate::{Error, Result};

/// Default bound on the number of uncertain edges enumerated exactly.
pub const EXACT_EDGE_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DependencyGraph {
    nodes: usize,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    /// `direct[j][o]`
    direct: Vec<Vec<f64>>,
    /// `values[i][t]`: value of target `t` to player `i`.
    values: Vec<Vec<f64>>,
    attacker_values: Vec<f64>,
}

fn unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl DependencyGraph {
    /// `attacker_values` defaults to the sum of all players' values.
    pub fn new(
        nodes: usize,
        edges: Vec<Edge>,
        direct: Vec<Vec<f64>>,
        values: Vec<Vec<f64>>,
        attacker_values: Option<Vec<f64>>,
    ) -> Result<Self> {
        if nodes == 0 {
            return Err(Error::NoTargets);
        }
        let mut out = vec![Vec::new(); nodes];
        for (e, edge) in edges.iter().enumerate() {
            if edge.from >= nodes || edge.to >= nodes {
                return Err(Error::param(format!("edge {e} has an endpoint outside 0..{nodes}")));
            }
            if edge.from == edge.to {
                return Err(Error::param(format!("edge {e} is a self-loop")));
            }
            if !unit(edge.r) {
                return Err(Error::param(format!("edge {e} has probability {} outside [0, 1]", edge.r)));
            }
            out[edge.from].push(e);
        }
        if direct.len() != nodes || direct.is_empty() {
            return Err(Error::param("direct-compromise table needs one row per node"));
        }
        let k = direct[0].len();
        if k == 0 || direct.iter().any(|row| row.len() != k || !row.iter().all(|&z| unit(z))) {
            return Err(Error::param(
                "direct-compromise rows must share a nonzero length and lie in [0, 1]",
            ));
        }
        if values.is_empty()
            || values
                .iter()
                .any(|row| row.len() != nodes || row.iter().any(|&v| !(v >= 0.0) || !v.is_finite()))
        {
            return Err(Error::param("values need one non-negative row of length nodes per player"));
        }
        let attacker_values = match attacker_values {
            Some(v) => {
                if v.len() != nodes || v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::param("attacker values need one finite entry per node"));
                }
                v
            }
            None => (0..nodes).map(|t| values.iter().map(|row| row[t]).sum()).collect(),
        };
        Ok(Self {
            nodes,
            edges,
            out,
            direct,
            values,
            attacker_values,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn config_count(&self) -> usize {
        self.direct[0].len()
    }

    pub fn player_count(&self) -> usize {
        self.values.len()
    }

    pub fn direct(&self, node: usize, config: usize) -> f64 {
        self.direct[node][config]
    }

    pub fn value(&self, player: usize, node: usize) -> f64 {
        self.values[player][node]
    }

    pub fn attacker_value(&self, node: usize) -> f64 {
        self.attacker_values[node]
    }

    /// The same graph with every edge probability replaced by `r`.
    pub fn with_uniform_r(&self, r: f64) -> Result<Self> {
        if !unit(r) {
            return Err(Error::param("edge probability must be in [0, 1]"));
        }
        let mut g = self.clone();
        for e in &mut g.edges {
            e.r = r;
        }
        Ok(g)
    }

    fn check(&self, source: usize, config: usize) -> Result<()> {
        if source >= self.nodes {
            return Err(Error::UnknownTarget(source));
        }
        if config >= self.config_count() {
            return Err(Error::param(format!("unknown configuration {config}")));
        }
        Ok(())
    }

    /// Edges with `0 < r < 1` whose tail is reachable from `source`.
    pub fn uncertain_reachable_edges(&self, source: usize) -> usize {
        let mut seen = vec![false; self.nodes];
        let mut stack = vec![source];
        seen[source] = true;
        let mut count = 0;
        while let Some(v) = stack.pop() {
            for &e in &self.out[v] {
                let edge = self.edges[e];
                if edge.r <= 0.0 {
                    continue;
                }
                if edge.r < 1.0 {
                    count += 1;
                }
                if !seen[edge.to] {
                    seen[edge.to] = true;
                    stack.push(edge.to);
                }
            }
        }
        count
    }
}

/// Probability that each node ends up affected.
#[derive(Debug, Clone, PartialEq)]
pub struct CompromiseProfile {
    pub p: Vec<f64>,
}

impl CompromiseProfile {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.p
            .iter()
            .zip(&other.p)
            .fold(0.0, |w, (a, b)| w.max((a - b).abs()))
    }
}

/// Exact affected probabilities by enumerating live-edge realisations.
///
/// Only edges that can matter are branched on: an edge is decided when its
/// tail becomes affected, edges into already affected nodes are skipped and
/// edges with `r` of 0 or 1 do not branch. The enumeration is refused when
/// more than `cap` uncertain edges are reachable from the source.
pub fn cascade_exact(
    g: &DependencyGraph,
    source: usize,
    config: usize,
    cap: usize,
) -> Result<CompromiseProfile> {
    g.check(source, config)?;
    let reachable = g.uncertain_reachable_edges(source);
    if reachable > cap {
        return Err(Error::CascadeCapExceeded { reachable, cap });
    }
    let mut acc = vec![0.0; g.nodes];
    let mut affected = vec![false; g.nodes];
    affected[source] = true;
    let pending = g.out[source].clone();
    enumerate(g, &mut affected, pending, 1.0, &mut acc);
    let z = g.direct(source, config);
    Ok(CompromiseProfile {
        p: acc.into_iter().map(|x| x * z).collect(),
    })
}

fn enumerate(
    g: &DependencyGraph,
    affected: &mut Vec<bool>,
    mut pending: Vec<usize>,
    prob: f64,
    acc: &mut [f64],
) {
    while let Some(e) = pending.pop() {
        let Edge { to, r, .. } = g.edges[e];
        if affected[to] || r <= 0.0 {
            continue;
        }
        if r < 1.0 {
            enumerate(g, affected, pending.clone(), prob * (1.0 - r), acc);
        }
        affected[to] = true;
        pending.extend_from_slice(&g.out[to]);
        let live = prob * r;
        enumerate(g, affected, pending, live, acc);
        affected[to] = false;
        return;
    }
    for (a, &on) in acc.iter_mut().zip(affected.iter()) {
        if on {
            *a += prob;
        }
    }
}

/// Monte Carlo estimate of the affected probabilities.
///
/// Cascades are sampled conditional on the source being affected and the
/// frequencies are scaled by `z[source][config]`. The generator for a
/// source is the substream `(seed, source)`, so all configurations of a
/// source share the same samples.
pub fn cascade_mc(
    g: &DependencyGraph,
    source: usize,
    config: usize,
    samples: usize,
    seed: u64,
) -> Result<CompromiseProfile> {
    g.check(source, config)?;
    let z = g.direct(source, config);
    let cond = conditional_mc(g, source, samples, seed)?;
    Ok(CompromiseProfile {
        p: cond.into_iter().map(|x| x * z).collect(),
    })
}

fn conditional_mc(g: &DependencyGraph, source: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    if samples == 0 {
        return Err(Error::param("Monte Carlo needs at least one sample"));
    }
    let mut rng = substream(seed, &[source as u64]);
    let mut hits = vec![0u64; g.nodes];
    let mut affected = vec![false; g.nodes];
    let mut stack = Vec::new();
    for _ in 0..samples {
        affected.iter_mut().for_each(|a| *a = false);
        affected[source] = true;
        stack.push(source);
        while let Some(v) = stack.pop() {
            hits[v] += 1;
            for &e in &g.out[v] {
                let Edge { to, r, .. } = g.edges[e];
                if affected[to] || r <= 0.0 {
                    continue;
                }
                if r >= 1.0 || rng.gen::<f64>() < r {
                    affected[to] = true;
                    stack.push(to);
                }
            }
        }
    }
    Ok(hits.into_iter().map(|h| h as f64 / samples as f64).collect())
}

/// How [`derive_utilities`] computes compromise probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CascadeMethod {
    Exact { cap: usize },
    MonteCarlo { samples: usize, seed: u64 },
    /// Exact when a source is within the cap, Monte Carlo otherwise.
    Auto { cap: usize, samples: usize, seed: u64 },
}

/// Ownership, labels and configuration costs of a game whose utilities
/// come from a dependency graph.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseGame {
    pub targets: Vec<String>,
    pub configs: Vec<String>,
    pub owners: Vec<usize>,
    pub defenders: usize,
    pub costs: Vec<Vec<f64>>,
}

/// Builds the game whose utilities are expected cascade losses:
/// `U[i][j][o] = -Σ_t P(t | j, o) v[i][t]` and
/// `V[j][o] = Σ_t P(t | j, o) vA[t]`.
pub fn derive_utilities(
    g: &DependencyGraph,
    base: &BaseGame,
    method: CascadeMethod,
) -> Result<InterdependentGame> {
    let (m, k) = (g.node_count(), g.config_count());
    if base.targets.len() != m || base.configs.len() != k {
        return Err(Error::param("base game shape does not match the dependency graph"));
    }
    if g.player_count() != base.defenders {
        return Err(Error::param("one value row per defender is required"));
    }
    let mut defender_utils = vec![vec![vec![0.0; k]; m]; base.defenders];
    let mut attacker_vals = vec![vec![0.0; k]; m];
    for j in 0..m {
        let cond = conditional_profile(g, j, method)?;
        let loss: Vec<f64> = (0..base.defenders)
            .map(|i| cond.iter().enumerate().map(|(t, p)| p * g.value(i, t)).sum())
            .collect();
        let gain: f64 = cond.iter().enumerate().map(|(t, p)| p * g.attacker_value(t)).sum();
        for o in 0..k {
            let z = g.direct(j, o);
            for i in 0..base.defenders {
                defender_utils[i][j][o] = -(z * loss[i]);
            }
            attacker_vals[j][o] = z * gain;
        }
    }
    InterdependentGame::new(GameTables {
        targets: base.targets.clone(),
        configs: base.configs.clone(),
        owners: base.owners.clone(),
        defenders: base.defenders,
        costs: base.costs.clone(),
        defender_utils,
        attacker_vals,
        offsets: None,
    })
}

/// Affected probabilities given that `source` is affected.
fn conditional_profile(g: &DependencyGraph, source: usize, method: CascadeMethod) -> Result<Vec<f64>> {
    let exact = |cap: usize| -> Result<Vec<f64>> {
        let reachable = g.uncertain_reachable_edges(source);
        if reachable > cap {
            return Err(Error::CascadeCapExceeded { reachable, cap });
        }
        let mut acc = vec![0.0; g.nodes];
        let mut affected = vec![false; g.nodes];
        affected[source] = true;
        enumerate(g, &mut affected, g.out[source].clone(), 1.0, &mut acc);
        Ok(acc)
    };
    match method {
        CascadeMethod::Exact { cap } => exact(cap),
        CascadeMethod::MonteCarlo { samples, seed } => conditional_mc(g, source, samples, seed),
        CascadeMethod::Auto { cap, samples, seed } => match exact(cap) {
            Err(Error::CascadeCapExceeded { .. }) => conditional_mc(g, source, samples, seed),
            other => other,
        },
    }
}
