use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{LinearProgram, Sense};
use crate::{Error, Result};

const PIV_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;
const NONBASIC: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

/// Solves a linear program from scratch (integrality is ignored).
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    let mut tab = Tableau::new(lp, DEFAULT_PIVOT_LIMIT)?;
    tab.solve()?;
    let x = tab.solution();
    Ok(LpSolution {
        objective: lp.objective_value(&x),
        x,
    })
}

pub(crate) const DEFAULT_PIVOT_LIMIT: usize = 200_000;

/// Dense bounded-variable simplex tableau.
///
/// Every column is shifted so that its lower bound is zero; `upper` holds
/// the shifted upper bound. Nonbasic columns sit at zero or at `upper`.
#[derive(Debug, Clone)]
pub(crate) struct Tableau {
    rows: usize,
    cols: usize,
    structural: usize,
    artificial_start: usize,
    t: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    row_of: Vec<usize>,
    shift: Vec<f64>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    cost: Vec<f64>,
    d: Vec<f64>,
    pivots: usize,
    pivot_limit: usize,
}

impl Tableau {
    pub(crate) fn new(lp: &LinearProgram, pivot_limit: usize) -> Result<Self> {
        let bounds: Vec<(f64, f64)> = lp.vars.iter().map(|v| (v.lower, v.upper)).collect();
        Self::with_bounds(lp, &bounds, pivot_limit)
    }

    pub(crate) fn with_bounds(
        lp: &LinearProgram,
        bounds: &[(f64, f64)],
        pivot_limit: usize,
    ) -> Result<Self> {
        let ns = lp.vars.len();
        for (v, &(lo, hi)) in lp.vars.iter().zip(bounds) {
            if !lo.is_finite() || hi < lo || hi.is_nan() {
                return Err(Error::param(format!(
                    "variable {} needs a finite lower bound not above its upper bound",
                    v.name
                )));
            }
        }
        let m = lp.rows.len();
        let slacks = lp.rows.iter().filter(|r| r.sense != Sense::Eq).count();

        // Dense row data, shifted right-hand side and slack coefficient.
        let mut dense = vec![0.0; m * ns];
        let mut rhs = vec![0.0; m];
        let mut slack_coef = vec![0.0; m];
        for (i, r) in lp.rows.iter().enumerate() {
            let mut b = r.rhs;
            for &(j, a) in &r.coeffs {
                dense[i * ns + j] += a;
                b -= a * bounds[j].0;
            }
            slack_coef[i] = match r.sense {
                Sense::Le => 1.0,
                Sense::Ge => -1.0,
                Sense::Eq => 0.0,
            };
            if b < 0.0 {
                b = -b;
                slack_coef[i] = -slack_coef[i];
                for a in &mut dense[i * ns..(i + 1) * ns] {
                    *a = -*a;
                }
            }
            rhs[i] = b;
        }
        let needs_art: Vec<bool> = slack_coef.iter().map(|&s| s != 1.0).collect();
        let arts = needs_art.iter().filter(|&&x| x).count();
        let cols = ns + slacks + arts;
        let artificial_start = ns + slacks;

        let mut t = vec![0.0; m * cols];
        let mut basis = vec![0; m];
        let mut row_of = vec![NONBASIC; cols];
        let mut slack = ns;
        let mut art = artificial_start;
        for i in 0..m {
            t[i * cols..i * cols + ns].copy_from_slice(&dense[i * ns..(i + 1) * ns]);
            if slack_coef[i] != 0.0 {
                t[i * cols + slack] = slack_coef[i];
                if !needs_art[i] {
                    basis[i] = slack;
                }
                slack += 1;
            }
            if needs_art[i] {
                t[i * cols + art] = 1.0;
                basis[i] = art;
                art += 1;
            }
            row_of[basis[i]] = i;
        }

        let mut shift = vec![0.0; cols];
        let mut upper = vec![f64::INFINITY; cols];
        for (j, &(lo, hi)) in bounds.iter().enumerate() {
            shift[j] = lo;
            upper[j] = hi - lo;
        }
        let mut cost = vec![0.0; cols];
        for &(j, c) in &lp.objective {
            cost[j] += c;
        }

        Ok(Self {
            rows: m,
            cols,
            structural: ns,
            artificial_start,
            t,
            beta: rhs,
            basis,
            row_of,
            shift,
            upper,
            at_upper: vec![false; cols],
            cost,
            d: vec![0.0; cols],
            pivots: 0,
            pivot_limit,
        })
    }

    /// Two-phase primal simplex from the initial slack/artificial basis.
    pub(crate) fn solve(&mut self) -> Result<()> {
        if self.artificial_start < self.cols {
            let mut phase1 = vec![0.0; self.cols];
            for c in &mut phase1[self.artificial_start..] {
                *c = -1.0;
            }
            self.set_reduced_costs(&phase1);
            self.primal()?;
            let infeasibility: f64 = (self.artificial_start..self.cols)
                .map(|j| self.value_shifted(j))
                .sum();
            if infeasibility > 1e-7 {
                return Err(Error::Infeasible);
            }
            for j in self.artificial_start..self.cols {
                self.upper[j] = 0.0;
                self.at_upper[j] = false;
            }
        }
        let cost = core::mem::take(&mut self.cost);
        self.set_reduced_costs(&cost);
        self.cost = cost;
        self.primal()
    }

    fn set_reduced_costs(&mut self, cost: &[f64]) {
        let cols = self.cols;
        self.d.copy_from_slice(cost);
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * cols..(i + 1) * cols];
                for (d, a) in self.d.iter_mut().zip(row) {
                    *d -= cb * a;
                }
            }
        }
        for i in 0..self.rows {
            self.d[self.basis[i]] = 0.0;
        }
    }

    fn value_shifted(&self, j: usize) -> f64 {
        match self.row_of[j] {
            NONBASIC if self.at_upper[j] => self.upper[j],
            NONBASIC => 0.0,
            r => self.beta[r],
        }
    }

    fn count_pivot(&mut self) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.pivot_limit {
            return Err(Error::ResourceLimit {
                what: "simplex pivot",
                limit: self.pivot_limit,
                incumbent: None,
            });
        }
        Ok(())
    }

    fn primal(&mut self) -> Result<()> {
        let cols = self.cols;
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            let mut enter = NONBASIC;
            let mut best = 0.0;
            for j in 0..cols {
                if self.row_of[j] != NONBASIC || self.upper[j] <= 0.0 {
                    continue;
                }
                let dj = self.d[j];
                let eligible = if self.at_upper[j] {
                    dj < -OPT_TOL
                } else {
                    dj > OPT_TOL
                };
                if !eligible {
                    continue;
                }
                if bland {
                    enter = j;
                    break;
                }
                if dj.abs() > best {
                    best = dj.abs();
                    enter = j;
                }
            }
            if enter == NONBASIC {
                return Ok(());
            }
            self.count_pivot()?;
            let sigma = if self.at_upper[enter] { -1.0 } else { 1.0 };
            let mut theta = self.upper[enter];
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..self.rows {
                let alpha = sigma * self.t[i * cols + enter];
                let b = self.basis[i];
                let (lim, to_upper) = if alpha > PIV_TOL {
                    (self.beta[i].max(0.0) / alpha, false)
                } else if alpha < -PIV_TOL && self.upper[b].is_finite() {
                    ((self.upper[b] - self.beta[i]).max(0.0) / -alpha, true)
                } else {
                    continue;
                };
                // Ties keep a bound flip; among pivots prefer Bland's
                // smallest index or, normally, the largest pivot element.
                let better = if lim < theta - 1e-12 {
                    true
                } else if lim <= theta + 1e-12 {
                    match leave {
                        Some((r, _)) if bland => b < self.basis[r],
                        Some((r, _)) => alpha.abs() > self.t[r * cols + enter].abs(),
                        None => false,
                    }
                } else {
                    false
                };
                if better {
                    theta = lim;
                    leave = Some((i, to_upper));
                }
            }
            if theta.is_infinite() {
                return Err(Error::Unbounded);
            }
            if theta <= 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            let step = sigma * theta;
            for i in 0..self.rows {
                self.beta[i] -= step * self.t[i * cols + enter];
            }
            match leave {
                None => self.at_upper[enter] = !self.at_upper[enter],
                Some((r, to_upper)) => {
                    let start = if self.at_upper[enter] {
                        self.upper[enter]
                    } else {
                        0.0
                    };
                    let leaving = self.basis[r];
                    self.pivot(r, enter);
                    self.beta[r] = start + step;
                    self.at_upper[leaving] = to_upper;
                }
            }
        }
    }

    /// Dual simplex from a dual-feasible basis, then a primal clean-up.
    pub(crate) fn reoptimize(&mut self) -> Result<()> {
        let cols = self.cols;
        loop {
            let mut leave = NONBASIC;
            let mut worst = FEAS_TOL;
            let mut below = false;
            for i in 0..self.rows {
                let b = self.basis[i];
                let lo_viol = -self.beta[i];
                let hi_viol = self.beta[i] - self.upper[b];
                if lo_viol > worst {
                    worst = lo_viol;
                    leave = i;
                    below = true;
                }
                if hi_viol > worst {
                    worst = hi_viol;
                    leave = i;
                    below = false;
                }
            }
            if leave == NONBASIC {
                break;
            }
            self.count_pivot()?;
            let r = leave;
            let mut enter = NONBASIC;
            let mut best_ratio = f64::INFINITY;
            let mut best_alpha = 0.0;
            for j in 0..cols {
                if self.row_of[j] != NONBASIC || self.upper[j] <= 0.0 {
                    continue;
                }
                let a = self.t[r * cols + j];
                // Moving x_j in its feasible direction must push the basic
                // variable back toward the violated bound.
                let ok = match (below, self.at_upper[j]) {
                    (true, false) => a < -PIV_TOL,
                    (true, true) => a > PIV_TOL,
                    (false, false) => a > PIV_TOL,
                    (false, true) => a < -PIV_TOL,
                };
                if !ok {
                    continue;
                }
                let ratio = self.d[j].abs() / a.abs();
                if ratio < best_ratio - 1e-12
                    || (ratio <= best_ratio + 1e-12 && a.abs() > best_alpha)
                {
                    best_ratio = ratio;
                    best_alpha = a.abs();
                    enter = j;
                }
            }
            if enter == NONBASIC {
                return Err(Error::Infeasible);
            }
            let leaving = self.basis[r];
            let target = if below { 0.0 } else { self.upper[leaving] };
            let alpha = self.t[r * cols + enter];
            let delta = (self.beta[r] - target) / alpha;
            let start = if self.at_upper[enter] {
                self.upper[enter]
            } else {
                0.0
            };
            for i in 0..self.rows {
                self.beta[i] -= delta * self.t[i * cols + enter];
            }
            self.pivot(r, enter);
            self.beta[r] = start + delta;
            self.at_upper[leaving] = !below;
        }
        self.primal()
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let cols = self.cols;
        let piv = self.t[r * cols + j];
        {
            let row = &mut self.t[r * cols..(r + 1) * cols];
            let inv = 1.0 / piv;
            for a in row.iter_mut() {
                *a *= inv;
            }
            row[j] = 1.0;
        }
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for other in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
            let f = other[j];
            if f != 0.0 {
                for (a, p) in other.iter_mut().zip(prow.iter()) {
                    *a -= f * p;
                }
                other[j] = 0.0;
            }
        }
        let f = self.d[j];
        if f != 0.0 {
            for (d, p) in self.d.iter_mut().zip(prow.iter()) {
                *d -= f * p;
            }
        }
        self.d[j] = 0.0;
        let old = self.basis[r];
        self.row_of[old] = NONBASIC;
        self.basis[r] = j;
        self.row_of[j] = r;
        self.at_upper[j] = false;
    }

    /// Changes the bounds of a structural column, keeping the basis.
    /// The tableau may become primal infeasible; call [`Tableau::reoptimize`].
    pub(crate) fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        debug_assert!(j < self.structural);
        let cols = self.cols;
        match self.row_of[j] {
            NONBASIC => {
                let old = self.shift[j] + if self.at_upper[j] { self.upper[j] } else { 0.0 };
                self.shift[j] = lo;
                self.upper[j] = hi - lo;
                self.at_upper[j] = self.d[j] > 0.0 && self.upper[j].is_finite();
                let new = lo + if self.at_upper[j] { self.upper[j] } else { 0.0 };
                let delta = new - old;
                if delta != 0.0 {
                    for i in 0..self.rows {
                        self.beta[i] -= delta * self.t[i * cols + j];
                    }
                }
            }
            r => {
                let actual = self.shift[j] + self.beta[r];
                self.shift[j] = lo;
                self.upper[j] = hi - lo;
                self.beta[r] = actual - lo;
            }
        }
    }

    /// Largest tableau entry in absolute value.
    pub(crate) fn growth(&self) -> f64 {
        self.t.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub(crate) fn solution(&self) -> Vec<f64> {
        (0..self.structural)
            .map(|j| self.shift[j] + self.value_shifted(j))
            .collect()
    }

    pub(crate) fn bounds(&self) -> Vec<(f64, f64)> {
        (0..self.structural)
            .map(|j| (self.shift[j], self.shift[j] + self.upper[j]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp2() -> LinearProgram {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
        let mut lp = LinearProgram::default();
        let x = lp.add_var("x", 0.0, 3.0);
        let y = lp.add_var("y", 0.0, f64::INFINITY);
        lp.add_row("c1", vec![(x, 1.0), (y, 1.0)], Sense::Le, 4.0);
        lp.add_row("c2", vec![(x, 1.0), (y, 3.0)], Sense::Le, 6.0);
        lp.objective = vec![(x, 3.0), (y, 2.0)];
        lp
    }

    #[test]
    fn small_lp() {
        let s = solve_lp(&lp2()).unwrap();
        assert!((s.x[0] - 3.0).abs() < 1e-9);
        assert!((s.x[1] - 1.0).abs() < 1e-9);
        assert!((s.objective - 11.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows() {
        // max -x - y, x + y = 2, x - y >= 1, x in [0, 5], y in [-1, 5]
        let mut lp = LinearProgram::default();
        let x = lp.add_var("x", 0.0, 5.0);
        let y = lp.add_var("y", -1.0, 5.0);
        lp.add_row("e", vec![(x, 1.0), (y, 1.0)], Sense::Eq, 2.0);
        lp.add_row("g", vec![(x, 1.0), (y, -1.0)], Sense::Ge, 1.0);
        lp.objective = vec![(x, -1.0), (y, -1.0)];
        let s = solve_lp(&lp).unwrap();
        assert!((s.objective + 2.0).abs() < 1e-9);
        assert!(lp.max_violation(&s.x) < 1e-9);
        // Push y to its lower bound with a tie-breaking objective.
        lp.objective = vec![(x, -1.0), (y, -2.0)];
        let s = solve_lp(&lp).unwrap();
        assert!((s.x[1] - 0.5).abs() < 1e-9 || (s.x[1] + 1.0).abs() < 1e-9);
        assert!(lp.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::default();
        let x = lp.add_var("x", 0.0, 1.0);
        lp.add_row("r", vec![(x, 1.0)], Sense::Ge, 2.0);
        assert_eq!(solve_lp(&lp), Err(Error::Infeasible));
        let mut lp = LinearProgram::default();
        let x = lp.add_var("x", 0.0, f64::INFINITY);
        lp.objective = vec![(x, 1.0)];
        assert_eq!(solve_lp(&lp), Err(Error::Unbounded));
    }

    #[test]
    fn warm_start_matches_cold() {
        let lp = lp2();
        let mut tab = Tableau::new(&lp, DEFAULT_PIVOT_LIMIT).unwrap();
        tab.solve().unwrap();
        tab.set_bounds(0, 0.0, 1.0);
        tab.reoptimize().unwrap();
        let warm = tab.solution();
        let mut cold_lp = lp.clone();
        cold_lp.vars[0].upper = 1.0;
        let cold = solve_lp(&cold_lp).unwrap();
        assert!((lp.objective_value(&warm) - cold.objective).abs() < 1e-9);
        assert!(cold_lp.max_violation(&warm) < 1e-9);
        // Fix y to a value that makes the rows infeasible.
        tab.set_bounds(1, 5.0, 5.0);
        assert_eq!(tab.reoptimize(), Err(Error::Infeasible));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's cycling example (maximisation form).
        let mut lp = LinearProgram::default();
        let x: Vec<usize> = (0..4)
            .map(|i| lp.add_var(alloc::format!("x{i}"), 0.0, f64::INFINITY))
            .collect();
        lp.add_row("r1", vec![(x[0], 0.25), (x[1], -60.0), (x[2], -0.04), (x[3], 9.0)], Sense::Le, 0.0);
        lp.add_row("r2", vec![(x[0], 0.5), (x[1], -90.0), (x[2], -0.02), (x[3], 3.0)], Sense::Le, 0.0);
        lp.add_row("r3", vec![(x[2], 1.0)], Sense::Le, 1.0);
        lp.objective = vec![(x[0], 0.75), (x[1], -150.0), (x[2], 0.02), (x[3], -6.0)];
        let s = solve_lp(&lp).unwrap();
        assert!((s.objective - 0.05).abs() < 1e-9);
    }
}
