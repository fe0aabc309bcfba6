//! Edge-list topology files and partition files.
//!
//! A topology file holds one `u v` pair per line. Lines starting with `#`
//! are comments; `# nodes N` fixes the node count (otherwise it is one more
//! than the largest id) and the first other comment records how the graph
//! was produced. A partition file holds `node part` pairs.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use multidef_core::netgen::{Generator, Partition, Topology};

pub fn topology_to_string(t: &Topology) -> String {
    let mut s = format!("# {}\n# nodes {}\n", t.generator.describe(), t.node_count());
    for (u, v) in t.edges() {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

pub fn parse_topology(text: &str, name: &str) -> Result<Topology> {
    let mut nodes: Option<usize> = None;
    let mut edges = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(n) = comment.trim().strip_prefix("nodes ") {
                nodes = Some(n.trim().parse().with_context(|| format!("line {}: bad node count", no + 1))?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 2 {
            bail!("line {}: expected `u v`", no + 1);
        }
        let u: usize = f[0].parse().with_context(|| format!("line {}: bad node id", no + 1))?;
        let v: usize = f[1].parse().with_context(|| format!("line {}: bad node id", no + 1))?;
        edges.push((u, v));
    }
    let implied = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = nodes.unwrap_or(implied);
    Ok(Topology::new(n, edges, Generator::External { name: name.to_string() })?)
}

pub fn read_topology(path: &Path) -> Result<Topology> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_topology(&text, &path.display().to_string()).with_context(|| format!("in {}", path.display()))
}

pub fn partition_to_string(p: &Partition) -> String {
    let mut s = format!("# parts {} cut {}\n", p.parts, p.cut);
    for (node, part) in p.assignment.iter().enumerate() {
        writeln!(s, "{node} {part}").unwrap();
    }
    s
}

/// Reads `node part` pairs; every node of `t` must appear exactly once.
pub fn parse_partition(text: &str, t: &Topology) -> Result<Partition> {
    let mut assignment: Vec<Option<usize>> = vec![None; t.node_count()];
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 2 {
            bail!("line {}: expected `node part`", no + 1);
        }
        let node: usize = f[0].parse().with_context(|| format!("line {}: bad node id", no + 1))?;
        let part: usize = f[1].parse().with_context(|| format!("line {}: bad part id", no + 1))?;
        match assignment.get_mut(node) {
            Some(slot @ None) => *slot = Some(part),
            Some(Some(_)) => bail!("line {}: node {node} assigned twice", no + 1),
            None => bail!("line {}: node {node} outside the topology", no + 1),
        }
    }
    let assignment: Vec<usize> = assignment
        .into_iter()
        .enumerate()
        .map(|(v, p)| p.with_context(|| format!("node {v} is not assigned")))
        .collect::<Result<_>>()?;
    let parts = assignment.iter().max().map_or(0, |&p| p + 1);
    Ok(Partition::from_assignment(t, assignment, parts)?)
}

pub fn read_partition(path: &Path, t: &Topology) -> Result<Partition> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_partition(&text, t).with_context(|| format!("in {}", path.display()))
}
