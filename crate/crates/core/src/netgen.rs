//! Synthetic topologies, balanced partitioning and closeness centrality.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::rng::{seeded, substream};
use crate::{Error, Result};

/// How a topology was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Grid { rows: usize, cols: usize },
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    PreferentialAttachment { n: usize, m: usize, seed: u64 },
    /// Read from an edge list.
    External { name: String },
}

impl Generator {
    /// One-line description, used as the provenance header of output files.
    pub fn describe(&self) -> String {
        match self {
            Generator::Grid { rows, cols } => format!("grid rows={rows} cols={cols}"),
            Generator::ErdosRenyi { n, p, seed } => format!("erdos_renyi n={n} p={p} seed={seed}"),
            Generator::PreferentialAttachment { n, m, seed } => {
                format!("preferential_attachment n={n} m={m} seed={seed}")
            }
            Generator::External { name } => format!("external {name}"),
        }
    }
}

/// A simple undirected graph on nodes `0..n`. Edges are stored as
/// `(u, v)` with `u < v`, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    pub generator: Generator,
}

impl Topology {
    /// Normalises and validates an edge list.
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>, generator: Generator) -> Result<Self> {
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= nodes || v >= nodes {
                return Err(Error::param(format!("edge ({u}, {v}) outside 0..{nodes}")));
            }
            if u == v {
                return Err(Error::param(format!("self-loop at {u}")));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("duplicate edge"));
        }
        Ok(Self {
            nodes,
            edges: norm,
            generator,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }
}

/// Four-neighbour lattice; node `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> Result<Topology> {
    if rows == 0 || cols == 0 {
        return Err(Error::param("grid dimensions must be at least 1"));
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Topology::new(rows * cols, edges, Generator::Grid { rows, cols })
}

/// G(n, p): every pair independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Topology> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("edge probability must be in [0, 1]"));
    }
    let mut rng = seeded(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Topology::new(n, edges, Generator::ErdosRenyi { n, p, seed })
}

/// Barabási–Albert growth: a clique on the first `m` nodes, then each new
/// node attaches to `m` distinct existing nodes chosen with probability
/// proportional to degree (uniformly while all degrees are zero).
pub fn preferential_attachment(n: usize, m: usize, seed: u64) -> Result<Topology> {
    if m == 0 || n <= m {
        return Err(Error::param("need m >= 1 and n > m"));
    }
    let mut rng = seeded(seed);
    let mut edges = Vec::new();
    let mut degree = vec![0usize; n];
    for u in 0..m {
        for v in u + 1..m {
            edges.push((u, v));
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    for new in m..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        for _ in 0..m {
            let total: usize = (0..new).filter(|v| !chosen.contains(v)).map(|v| degree[v]).sum();
            let pick = if total == 0 {
                let free: Vec<usize> = (0..new).filter(|v| !chosen.contains(v)).collect();
                free[rng.gen_range(0..free.len())]
            } else {
                let mut x = rng.gen_range(0..total);
                let mut pick = 0;
                for v in (0..new).filter(|v| !chosen.contains(v)) {
                    if x < degree[v] {
                        pick = v;
                        break;
                    }
                    x -= degree[v];
                }
                pick
            };
            chosen.push(pick);
        }
        for &v in &chosen {
            edges.push((v, new));
            degree[v] += 1;
            degree[new] += 1;
        }
    }
    Topology::new(n, edges, Generator::PreferentialAttachment { n, m, seed })
}

/// Assignment of nodes to parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub assignment: Vec<usize>,
    pub parts: usize,
    pub cut: usize,
}

impl Partition {
    /// Validates a given assignment (for example one read from a file).
    pub fn from_assignment(t: &Topology, assignment: Vec<usize>, parts: usize) -> Result<Self> {
        if assignment.len() != t.node_count() {
            return Err(Error::param("partition must assign every node"));
        }
        let mut sizes = vec![0usize; parts];
        for &p in &assignment {
            if p >= parts {
                return Err(Error::param(format!("part {p} outside 0..{parts}")));
            }
            sizes[p] += 1;
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::param("every part needs at least one node"));
        }
        let cut = cut_size(t, &assignment);
        Ok(Self {
            assignment,
            parts,
            cut,
        })
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.parts];
        for &p in &self.assignment {
            s[p] += 1;
        }
        s
    }
}

pub fn cut_size(t: &Topology, assignment: &[usize]) -> usize {
    t.edges()
        .iter()
        .filter(|&&(u, v)| assignment[u] != assignment[v])
        .count()
}

const STARTS: usize = 8;

/// Balanced min-cut partition into `parts` parts.
///
/// Candidates come from greedy region growing started at several seeds
/// and, when `parts` is a power of two, from recursive bisection. Each is
/// refined with Kernighan–Lin passes between every pair of parts, and the
/// smallest cut wins. Part sizes differ by at most one.
pub fn partition(t: &Topology, parts: usize) -> Result<Partition> {
    let n = t.node_count();
    if parts == 0 || parts > n {
        return Err(Error::param(format!("cannot split {n} nodes into {parts} parts")));
    }
    let adj = t.adjacency();
    let sizes: Vec<usize> = (0..parts).map(|p| n / parts + usize::from(p < n % parts)).collect();
    let mut best: Option<Vec<usize>> = None;
    let mut best_cut = usize::MAX;
    let mut consider = |mut a: Vec<usize>| {
        refine(&adj, &mut a, parts);
        let c = cut_size(t, &a);
        if c < best_cut {
            best_cut = c;
            best = Some(a);
        }
    };
    for start in 0..STARTS.min(n) {
        let mut rng = substream(0x9a27, &[n as u64, parts as u64, start as u64]);
        let first = if start == 0 { peripheral(&adj, &vec![usize::MAX; n]) } else { rng.gen_range(0..n) };
        consider(grow(&adj, &sizes, first));
    }
    if parts.is_power_of_two() && parts > 1 {
        consider(bisect(&adj, parts));
    }
    let assignment = best.expect("at least one candidate");
    Partition::from_assignment(t, assignment, parts)
}

/// Unassigned node with the fewest unassigned neighbours (lowest index on ties).
fn peripheral(adj: &[Vec<usize>], a: &[usize]) -> usize {
    (0..adj.len())
        .filter(|&v| a[v] == usize::MAX)
        .min_by_key(|&v| (adj[v].iter().filter(|&&u| a[u] == usize::MAX).count(), v))
        .expect("an unassigned node")
}

/// Grows parts one after another, always adding the frontier node with the
/// most edges into the part being grown.
fn grow(adj: &[Vec<usize>], sizes: &[usize], first: usize) -> Vec<usize> {
    let n = adj.len();
    let mut a = vec![usize::MAX; n];
    for (p, &size) in sizes.iter().enumerate() {
        let seed = if p == 0 { first } else { peripheral(adj, &a) };
        a[seed] = p;
        let mut have = 1;
        while have < size {
            let next = (0..n)
                .filter(|&v| a[v] == usize::MAX)
                .map(|v| (adj[v].iter().filter(|&&u| a[u] == p).count(), v))
                .filter(|&(links, _)| links > 0)
                .max_by_key(|&(links, v)| (links, core::cmp::Reverse(v)))
                .map(|(_, v)| v);
            let v = next.unwrap_or_else(|| peripheral(adj, &a));
            a[v] = p;
            have += 1;
        }
    }
    a
}

/// Recursive bisection by region growing within each half.
fn bisect(adj: &[Vec<usize>], parts: usize) -> Vec<usize> {
    let n = adj.len();
    let mut a = vec![0usize; n];
    let mut groups = 1;
    while groups < parts {
        let mut next = vec![0usize; n];
        for g in 0..groups {
            let members: Vec<usize> = (0..n).filter(|&v| a[v] == g).collect();
            let half = members.len() / 2;
            let mut mark = vec![usize::MAX; n];
            for &v in &members {
                mark[v] = usize::MAX - 1;
            }
            // Grow the first half by BFS from a peripheral member.
            let start = *members
                .iter()
                .min_by_key(|&&v| (adj[v].iter().filter(|&&u| mark[u] != usize::MAX).count(), v))
                .unwrap();
            let mut taken = 0;
            let mut queue = VecDeque::from([start]);
            let mut seen = vec![false; n];
            seen[start] = true;
            while taken < half {
                let v = match queue.pop_front() {
                    Some(v) => v,
                    None => {
                        let v = *members.iter().find(|&&v| !seen[v]).unwrap();
                        seen[v] = true;
                        v
                    }
                };
                mark[v] = 0;
                taken += 1;
                for &u in &adj[v] {
                    if mark[u] == usize::MAX - 1 && !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            for &v in &members {
                next[v] = 2 * g + usize::from(mark[v] != 0);
            }
        }
        a = next;
        groups *= 2;
    }
    let mut refined = a;
    refine(adj, &mut refined, parts);
    refined
}

/// Kernighan–Lin passes over every pair of parts until no pass improves.
fn refine(adj: &[Vec<usize>], a: &mut [usize], parts: usize) {
    loop {
        let mut improved = false;
        for p in 0..parts {
            for q in p + 1..parts {
                while kl_pass(adj, a, p, q) {
                    improved = true;
                }
            }
        }
        if !improved {
            return;
        }
    }
}

/// One Kernighan–Lin pass between parts `p` and `q`: tentatively swap the
/// best unlocked pair repeatedly, then keep the prefix of swaps with the
/// largest positive total gain. Returns whether the cut shrank.
fn kl_pass(adj: &[Vec<usize>], a: &mut [usize], p: usize, q: usize) -> bool {
    let n = adj.len();
    let mut work = a.to_vec();
    let mut locked = vec![false; n];
    let d = |work: &[usize], v: usize| -> i64 {
        let own = work[v];
        let other = if own == p { q } else { p };
        adj[v].iter().fold(0i64, |acc, &u| {
            if work[u] == other {
                acc + 1
            } else if work[u] == own {
                acc - 1
            } else {
                acc
            }
        })
    };
    let mut swaps = Vec::new();
    let mut total = 0i64;
    let mut best = (0i64, 0usize);
    loop {
        let mut pick: Option<(i64, usize, usize)> = None;
        for u in (0..n).filter(|&u| work[u] == p && !locked[u]) {
            let du = d(&work, u);
            for v in (0..n).filter(|&v| work[v] == q && !locked[v]) {
                let w = i64::from(adj[u].contains(&v));
                let g = du + d(&work, v) - 2 * w;
                if pick.map_or(true, |(bg, _, _)| g > bg) {
                    pick = Some((g, u, v));
                }
            }
        }
        let Some((g, u, v)) = pick else { break };
        work[u] = q;
        work[v] = p;
        locked[u] = true;
        locked[v] = true;
        total += g;
        swaps.push((u, v));
        if total > best.0 {
            best = (total, swaps.len());
        }
    }
    if best.0 <= 0 {
        return false;
    }
    for &(u, v) in &swaps[..best.1] {
        a[u] = q;
        a[v] = p;
    }
    true
}

/// Harmonic closeness: `Σ_{u ≠ v} 1 / d(u, v)` over reachable `u`,
/// divided by `n - 1`.
pub fn closeness(t: &Topology) -> Vec<f64> {
    let n = t.node_count();
    if n <= 1 {
        return vec![0.0; n];
    }
    let adj = t.adjacency();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    (0..n)
        .map(|s| {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[s] = 0;
            queue.push_back(s);
            let mut sum = 0.0;
            while let Some(v) = queue.pop_front() {
                if v != s {
                    sum += 1.0 / dist[v] as f64;
                }
                for &u in &adj[v] {
                    if dist[u] == usize::MAX {
                        dist[u] = dist[v] + 1;
                        queue.push_back(u);
                    }
                }
            }
            sum / (n - 1) as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        assert_eq!(grid(1, 1).unwrap().edges().len(), 0);
        assert_eq!(grid(2, 2).unwrap().edges().len(), 4);
        assert_eq!(grid(8, 8).unwrap().edges().len(), 2 * 8 * 7);
    }

    #[test]
    fn er_corners() {
        assert_eq!(erdos_renyi(10, 0.0, 1).unwrap().edges().len(), 0);
        assert_eq!(erdos_renyi(10, 1.0, 1).unwrap().edges().len(), 45);
        assert_eq!(erdos_renyi(30, 0.3, 5).unwrap(), erdos_renyi(30, 0.3, 5).unwrap());
    }

    #[test]
    fn pa_counts() {
        let t = preferential_attachment(4, 3, 1).unwrap();
        assert_eq!(t.edges().len(), 6);
        for (n, m) in [(64, 2), (20, 1), (30, 4)] {
            let t = preferential_attachment(n, m, 7).unwrap();
            assert_eq!(t.edges().len(), m * (m - 1) / 2 + m * (n - m));
        }
        assert!(preferential_attachment(3, 3, 0).is_err());
    }

    #[test]
    fn partition_trivial_cases() {
        let t = grid(3, 3).unwrap();
        let p = partition(&t, 1).unwrap();
        assert_eq!(p.cut, 0);
        assert!(p.assignment.iter().all(|&x| x == 0));
        let p = partition(&t, 9).unwrap();
        assert_eq!(p.cut, t.edges().len());
        assert!(partition(&t, 10).is_err());
    }

    #[test]
    fn grid_quadrants() {
        let t = grid(8, 8).unwrap();
        let p = partition(&t, 4).unwrap();
        assert!(p.cut <= 16, "cut {}", p.cut);
        assert_eq!(p.sizes(), vec![16; 4]);
    }

    #[test]
    fn closeness_examples() {
        let star = Topology::new(5, vec![(0, 1), (0, 2), (0, 3), (0, 4)], Generator::External { name: "star".into() }).unwrap();
        assert_eq!(closeness(&star)[0], 1.0);
        let path = Topology::new(4, vec![(0, 1), (1, 2)], Generator::External { name: "path".into() }).unwrap();
        let c = closeness(&path);
        assert_eq!(c[3], 0.0);
        let p3 = Topology::new(3, vec![(0, 1), (1, 2)], Generator::External { name: "p3".into() }).unwrap();
        assert_eq!(closeness(&p3)[0], 0.75);
    }
}
