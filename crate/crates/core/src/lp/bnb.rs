use alloc::boxed::Box;
use alloc::rc::Rc;
use alloc::vec::Vec;

use super::simplex::{Tableau, DEFAULT_PIVOT_LIMIT};
use super::LinearProgram;
use crate::{Error, Result};

/// Integrality tolerance for binaries and general integers.
const INT_TOL: f64 = 1e-6;
/// A warm-started node whose primal solution drifts further than this from
/// feasibility is re-solved from scratch.
const DRIFT_TOL: f64 = 1e-7;
/// A warm-started tableau with an entry larger than this is rebuilt.
const GROWTH_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MipOptions {
    pub node_limit: usize,
    /// Nodes are pruned once their bound is within
    /// `rel_gap * (1 + |incumbent|)` of the incumbent.
    pub rel_gap: f64,
    pub pivot_limit: usize,
    /// Only solutions strictly better than this (by more than the gap) are
    /// of interest; when none exists the result is [`Error::Infeasible`].
    pub cutoff: Option<f64>,
}

impl Default for MipOptions {
    fn default() -> Self {
        Self {
            node_limit: 1_000_000,
            rel_gap: 1e-6,
            pivot_limit: DEFAULT_PIVOT_LIMIT,
            cutoff: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Best proven upper bound on the objective.
    pub bound: f64,
    pub nodes: usize,
}

struct Node {
    tab: Rc<Tableau>,
    bound: f64,
}

/// Depth-first branch and bound over the program's integer variables.
///
/// The most fractional integer variable is branched on; both children are
/// solved immediately (dual simplex from the parent tableau) and the child
/// with the better bound is explored first.
pub fn solve_mip(lp: &LinearProgram, opts: &MipOptions) -> Result<MipSolution> {
    let (best, nodes) = branch_and_bound(lp, opts)?;
    match best {
        Some((x, objective)) => Ok(MipSolution {
            x,
            objective,
            bound: objective,
            nodes,
        }),
        None => Err(Error::Infeasible),
    }
}

/// The search behind [`solve_mip`]; returns the incumbent, if any beat the
/// cutoff, and the number of nodes explored.
pub(crate) fn branch_and_bound(
    lp: &LinearProgram,
    opts: &MipOptions,
) -> Result<(Option<(Vec<f64>, f64)>, usize)> {
    let integers: Vec<usize> = (0..lp.vars.len()).filter(|&j| lp.vars[j].integer).collect();
    let mut root = Tableau::new(lp, opts.pivot_limit)?;
    match root.solve() {
        Ok(()) => {}
        Err(Error::Infeasible) => return Ok((None, 1)),
        Err(e) => return Err(e),
    }
    let root_x = root.solution();
    let root_bound = lp.objective_value(&root_x);

    let mut incumbent: Option<(Vec<f64>, f64)> = None;
    let mut nodes = 1usize;
    let mut stack = alloc::vec![Node {
        tab: Rc::new(root),
        bound: root_bound,
    }];
    let prune = |bound: f64, inc: &Option<(Vec<f64>, f64)>| {
        let best = match (inc, opts.cutoff) {
            (Some((_, b)), Some(c)) => b.max(c),
            (Some((_, b)), None) => *b,
            (None, Some(c)) => c,
            (None, None) => return false,
        };
        bound <= best + opts.rel_gap * (1.0 + best.abs())
    };

    while let Some(node) = stack.pop() {
        if prune(node.bound, &incumbent) {
            continue;
        }
        let bounds = node.tab.bounds();
        let x: Vec<f64> = node
            .tab
            .solution()
            .into_iter()
            .zip(&bounds)
            .map(|(v, &(lo, hi))| v.clamp(lo, hi))
            .collect();
        let branch = integers
            .iter()
            .copied()
            .filter_map(|j| {
                let frac = x[j] - libm::floor(x[j]);
                (frac > INT_TOL && frac < 1.0 - INT_TOL).then(|| (j, (frac - 0.5).abs()))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let Some((j, _)) = branch else {
            let mut xi = x;
            for &j in &integers {
                xi[j] = libm::round(xi[j]);
            }
            let obj = lp.objective_value(&xi);
            if incumbent.as_ref().map_or(true, |(_, best)| obj > *best) {
                incumbent = Some((xi, obj));
            }
            continue;
        };

        let (lo, hi) = bounds[j];
        let down = (lo, libm::floor(x[j]));
        let up = (libm::ceil(x[j]), hi);
        let mut children: Vec<Node> = Vec::with_capacity(2);
        for (clo, chi) in [down, up] {
            nodes += 1;
            if nodes > opts.node_limit {
                return Err(Error::ResourceLimit {
                    what: "branch-and-bound node",
                    limit: opts.node_limit,
                    incumbent: incumbent.map(|(x, objective)| {
                        Box::new(MipSolution {
                            x,
                            objective,
                            bound: f64::NAN,
                            nodes,
                        })
                    }),
                });
            }
            if let Some(child) = solve_child(lp, &node.tab, j, clo, chi, opts)? {
                if !prune(child.bound, &incumbent) {
                    children.push(child);
                }
            }
        }
        children.sort_by(|a, b| a.bound.total_cmp(&b.bound));
        stack.extend(children);
    }

    Ok((incumbent, nodes))
}

fn solve_child(
    lp: &LinearProgram,
    parent: &Rc<Tableau>,
    j: usize,
    lo: f64,
    hi: f64,
    opts: &MipOptions,
) -> Result<Option<Node>> {
    let mut tab = (**parent).clone();
    tab.set_bounds(j, lo, hi);
    let warm = match tab.reoptimize() {
        Ok(()) => true,
        Err(Error::Infeasible) => false,
        Err(e) => return Err(e),
    };
    let mut x = tab.solution();
    // A warm start's infeasibility claim is only trusted after a cold solve.
    if !warm || lp_violation(lp, &tab, &x) > DRIFT_TOL || tab.growth() > GROWTH_LIMIT {
        let bounds = tab.bounds();
        let mut fresh = Tableau::with_bounds(lp, &bounds, opts.pivot_limit)?;
        match fresh.solve() {
            Ok(()) => {}
            Err(Error::Infeasible) => return Ok(None),
            Err(e) => return Err(e),
        }
        tab = fresh;
        x = tab.solution();
    }
    Ok(Some(Node {
        bound: lp.objective_value(&x),
        tab: Rc::new(tab),
    }))
}

/// Row violation plus violation of the node's (possibly tightened) bounds.
fn lp_violation(lp: &LinearProgram, tab: &Tableau, x: &[f64]) -> f64 {
    let rows = lp.max_violation_rows(x);
    tab.bounds()
        .iter()
        .zip(x)
        .fold(rows, |w, (&(lo, hi), &v)| w.max(lo - v).max(v - hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Sense;
    use alloc::vec;

    #[test]
    fn knapsack() {
        // max 5a + 4b + 3c, 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8
        let mut lp = LinearProgram::default();
        let a = lp.add_binary("a");
        let b = lp.add_binary("b");
        let c = lp.add_binary("c");
        lp.add_row("r1", vec![(a, 2.0), (b, 3.0), (c, 1.0)], Sense::Le, 5.0);
        lp.add_row("r2", vec![(a, 4.0), (b, 1.0), (c, 2.0)], Sense::Le, 11.0);
        lp.add_row("r3", vec![(a, 3.0), (b, 4.0), (c, 2.0)], Sense::Le, 8.0);
        lp.objective = vec![(a, 5.0), (b, 4.0), (c, 3.0)];
        let s = solve_mip(&lp, &MipOptions::default()).unwrap();
        // Enumeration oracle.
        let mut best = f64::NEG_INFINITY;
        for mask in 0..8u32 {
            let x: Vec<f64> = (0..3).map(|i| f64::from((mask >> i) & 1)).collect();
            if lp.max_violation(&x) <= 0.0 {
                best = best.max(lp.objective_value(&x));
            }
        }
        assert!((s.objective - best).abs() < 1e-9);
    }

    #[test]
    fn general_integer_and_continuous() {
        // max x + y, 2x + 2y <= 7, x integer in [0, 10], y in [0, 0.6]
        let mut lp = LinearProgram::default();
        let x = lp.add_var("x", 0.0, 10.0);
        lp.vars[x].integer = true;
        let y = lp.add_var("y", 0.0, 0.6);
        lp.add_row("r", vec![(x, 2.0), (y, 2.0)], Sense::Le, 7.0);
        lp.objective = vec![(x, 1.0), (y, 1.0)];
        let s = solve_mip(&lp, &MipOptions::default()).unwrap();
        assert!((s.objective - 3.5).abs() < 1e-9);
        assert!((s.x[x] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_integers() {
        let mut lp = LinearProgram::default();
        let a = lp.add_binary("a");
        lp.add_row("r1", vec![(a, 2.0)], Sense::Eq, 1.0);
        assert_eq!(solve_mip(&lp, &MipOptions::default()), Err(Error::Infeasible));
    }

    #[test]
    fn node_limit_reports_incumbent() {
        let mut lp = LinearProgram::default();
        let xs: Vec<usize> = (0..12).map(|i| lp.add_binary(alloc::format!("x{i}"))).collect();
        lp.add_row(
            "cap",
            xs.iter().map(|&x| (x, 2.0)).collect(),
            Sense::Le,
            11.0,
        );
        lp.objective = xs.iter().enumerate().map(|(i, &x)| (x, 1.0 + 1e-3 * i as f64)).collect();
        let opts = MipOptions {
            node_limit: 3,
            ..MipOptions::default()
        };
        match solve_mip(&lp, &opts) {
            Err(Error::ResourceLimit { what, .. }) => assert!(what.contains("node")),
            other => panic!("expected node limit, got {other:?}"),
        }
        let s = solve_mip(&lp, &MipOptions::default()).unwrap();
        assert!((s.objective - (5.0 + 1e-3 * (7.0 + 8.0 + 9.0 + 10.0 + 11.0))).abs() < 1e-9);
    }
}
