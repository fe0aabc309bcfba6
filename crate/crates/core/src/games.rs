//! Seeded random games and network games with two configurations per target.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::cascade::{derive_utilities, BaseGame, CascadeMethod, DependencyGraph, Edge};
use crate::model::{GameTables, InterdependentGame, COVERED, UNCOVERED};
use crate::netgen::{Partition, Topology};
use crate::rng::substream;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGame {
    pub defenders: usize,
    pub targets: usize,
    /// Cost of covering a target.
    pub cost: f64,
    /// Every defender values every target (`v[i][j] ~ U[0, 1]` for all
    /// pairs); otherwise only the owner does.
    pub shared_losses: bool,
}

impl UniformGame {
    /// Targets are split into contiguous blocks, one per defender, with
    /// sizes differing by at most one. A covered target is safe; an
    /// uncovered attacked target costs defender `i` its value `v[i][j]`,
    /// and the attacker gains the total loss.
    pub fn generate(&self, seed: u64) -> Result<InterdependentGame> {
        let (n, m) = (self.defenders, self.targets);
        if n == 0 || m < n {
            return Err(Error::param(format!("need 1 <= defenders <= targets, got {n} and {m}")));
        }
        let owners: Vec<usize> = (0..m).map(|j| j * n / m).collect();
        let mut rng = substream(seed, &[0x6a3e, n as u64, m as u64]);
        let mut values = vec![vec![0.0; m]; n];
        for (i, row) in values.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let draw: f64 = rng.gen();
                if self.shared_losses || owners[j] == i {
                    *v = draw;
                }
            }
        }
        InterdependentGame::new(GameTables {
            targets: (0..m).map(|j| format!("t{j}")).collect(),
            configs: vec![UNCOVERED.into(), COVERED.into()],
            owners,
            defenders: n,
            costs: vec![vec![0.0, self.cost]; m],
            defender_utils: values
                .iter()
                .map(|row| row.iter().map(|&v| vec![-v, 0.0]).collect())
                .collect(),
            attacker_vals: (0..m)
                .map(|j| vec![values.iter().map(|row| row[j]).sum(), 0.0])
                .collect(),
            offsets: None,
        })
    }
}

/// Node values `U[0, 1]` for a network of `nodes` nodes.
pub fn node_values(seed: u64, nodes: usize) -> Vec<f64> {
    let mut rng = substream(seed, &[0x7a1e, nodes as u64]);
    (0..nodes).map(|_| rng.gen()).collect()
}

/// A game on a network whose nodes are split among defenders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkGame {
    /// Spread probability on every edge, in both directions.
    pub p: f64,
    /// Cost of covering a node.
    pub cost: f64,
    pub method: CascadeMethod,
}

impl NetworkGame {
    /// An attack on an uncovered node compromises it and spreads; a covered
    /// node stops the attack outright. Each defender loses the values of its
    /// own compromised nodes and the attacker gains the total.
    pub fn build(&self, t: &Topology, part: &Partition, values: &[f64]) -> Result<InterdependentGame> {
        let n = t.node_count();
        if part.assignment.len() != n || values.len() != n {
            return Err(Error::param("partition and values must cover every node"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::param(format!("spread probability {} outside [0, 1]", self.p)));
        }
        let edges = t
            .edges()
            .iter()
            .flat_map(|&(u, v)| [Edge { from: u, to: v, r: self.p }, Edge { from: v, to: u, r: self.p }])
            .collect();
        let owned = (0..part.parts)
            .map(|i| (0..n).map(|j| if part.assignment[j] == i { values[j] } else { 0.0 }).collect())
            .collect();
        let graph = DependencyGraph::new(n, edges, vec![vec![1.0, 0.0]; n], owned, None)?;
        let base = BaseGame {
            targets: (0..n).map(|j| format!("n{j}")).collect(),
            configs: vec![UNCOVERED.into(), COVERED.into()],
            owners: part.assignment.clone(),
            defenders: part.parts,
            costs: vec![vec![0.0, self.cost]; n],
        };
        derive_utilities(&graph, &base, self.method)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_seeding() {
        let spec = UniformGame {
            defenders: 3,
            targets: 7,
            cost: 0.2,
            shared_losses: false,
        };
        let g = spec.generate(4).unwrap();
        assert_eq!(g.owners(), &[0, 0, 0, 1, 1, 2, 2]);
        assert_eq!(g, spec.generate(4).unwrap());
        assert_ne!(g, spec.generate(5).unwrap());
        for j in 0..7 {
            assert_eq!(g.defender_util(0, j, 0) != 0.0, g.owner(j) == 0);
            assert_eq!(g.attacker_val(j, 1), 0.0);
            assert!((g.attacker_val(j, 0) + g.defender_util(g.owner(j), j, 0)).abs() < 1e-15);
        }
        assert!(UniformGame { targets: 2, ..spec }.generate(0).is_err());
    }
}
