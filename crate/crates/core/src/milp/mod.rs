//! One defender's best response under the average-case attacker, as a
//! mixed-integer linear program.
//!
//! Binary `a_j` marks target `j` as part of the attack support. The attacker
//! value `vA` is pinned to the maximum target value, every target within
//! `δ` of it may be in the support, and every target closer than
//! `(1 - δ) / M` must be. The defender's utility is the support average of
//! its per-target utilities; the ratio is linearised exactly with
//! binary-times-continuous products.

mod oracle;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use alloc::boxed::Box;

use crate::lp::{branch_and_bound, solve_lp, LinearProgram, MipOptions, MipSolution, Sense};
use crate::model::{ase_utilities, CoverageProfile, InterdependentGame};
use crate::{Error, Result};

pub use oracle::{grid_best_response, GridResponse};

/// Default attack-indifference tolerance.
pub const DEFAULT_DELTA: f64 = 1e-3;
/// Relative width of the band `(δ, (1 - δ) / M)` that the default `M`
/// leaves between "may be attacked" and "must be attacked".
const BAND: f64 = 1e-3;
/// Allowed gap between the program's utility and the simulated one.
pub const MISMATCH_TOL: f64 = 1e-3;
const MAX_RETRIES: usize = 30;

/// Numerical configuration of the best-response program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrConfig {
    pub delta: f64,
    pub big_m: f64,
    pub node_limit: usize,
    /// Relative optimality gap of the branch and bound.
    pub rel_gap: f64,
    /// Fail with [`Error::UtilityMismatch`] when the program's utility and
    /// the simulated utility disagree by more than [`MISMATCH_TOL`].
    pub strict: bool,
}

impl Default for BrConfig {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            big_m: derived_m(DEFAULT_DELTA),
            node_limit: MipOptions::default().node_limit,
            rel_gap: MipOptions::default().rel_gap,
            strict: false,
        }
    }
}

fn derived_m(delta: f64) -> f64 {
    (1.0 - delta) / (delta * (1.0 + BAND))
}

impl BrConfig {
    /// `δ = 1e-3` and the largest `M` with a narrow infeasible band, with
    /// `δ` shrunk when the game's attacker values spread further than `M - 1`.
    pub fn for_game(game: &InterdependentGame) -> Self {
        let (lo, hi) = game.attacker_value_range();
        let need = (hi - lo) + 1.0;
        let mut cfg = Self::default();
        if need > cfg.big_m {
            cfg.delta = 1.0 / (need * (1.0 + BAND) + 1.0);
            cfg.big_m = derived_m(cfg.delta);
        }
        cfg
    }

    pub fn new(delta: f64, big_m: f64) -> Result<Self> {
        check_delta_m(delta, big_m)?;
        Ok(Self {
            delta,
            big_m,
            ..Self::default()
        })
    }

    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    /// Attacker tie tolerance consistent with the program: the midpoint of
    /// `(δ, (1 - δ) / M)`, so simulated and optimised attack supports agree.
    pub fn tie_tolerance(&self) -> f64 {
        0.5 * (self.delta + (1.0 - self.delta) / self.big_m)
    }
}

fn check_delta_m(delta: f64, big_m: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) || !big_m.is_finite() {
        return Err(Error::MilpConfig(format!("need 0 < δ < 1 and finite M, got δ = {delta}, M = {big_m}")));
    }
    if big_m * delta >= 1.0 - delta {
        return Err(Error::MilpConfig(format!("M·δ = {} must be below 1 - δ = {}", big_m * delta, 1.0 - delta)));
    }
    Ok(())
}

/// Role of each row of the program, in construction order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    /// Own configuration probabilities sum to one.
    Simplex,
    /// At least one target is attacked.
    AttackSome,
    /// An attacked target is within `δ` of the attacker's value.
    Support,
    /// Defines the optimality slack `s_j = vA - value_j`.
    Slack,
    /// A target with slack below `(1 - δ) / M` is attacked.
    Force,
    /// `vA` is at most the value of the target selected by `b_j`.
    Pin,
    /// Some `b_j` selects the maximum.
    PinAny,
    /// Only an attacked target can be the selected maximum.
    PinCut,
    /// Product `y_j = a_j u`.
    ProductU,
    /// Product `w_j = a_j x_j` for an own target.
    ProductX,
    /// `Σ y_j = Σ w_j`.
    Average,
    /// Among opponent targets of equal value, a better one is attacked first.
    Order,
}

/// The best-response program for one defender against a fixed profile.
#[derive(Debug, Clone)]
pub struct MilpInstance<'g> {
    game: &'g InterdependentGame,
    profile: &'g CoverageProfile,
    pub defender: usize,
    pub delta: f64,
    pub big_m: f64,
    pub lp: LinearProgram,
    pub row_kinds: Vec<RowKind>,
    /// Own targets with their configuration variables.
    pub q: Vec<(usize, Vec<usize>)>,
    pub a: Vec<usize>,
    pub s: Vec<usize>,
    pub y: Vec<usize>,
    /// `w_j` for own targets, `None` for the opponents' targets.
    pub w: Vec<Option<usize>>,
    pub b: Vec<usize>,
    pub u: usize,
    pub v_attack: usize,
}

struct Builder {
    lp: LinearProgram,
    kinds: Vec<RowKind>,
}

impl Builder {
    fn row(&mut self, kind: RowKind, name: alloc::string::String, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.lp.add_row(name, coeffs, sense, rhs);
        self.kinds.push(kind);
    }
}

/// Builds defender `defender`'s best-response program. Rows of `profile`
/// for targets the defender owns are ignored.
pub fn build_br_milp<'g>(
    game: &'g InterdependentGame,
    defender: usize,
    profile: &'g CoverageProfile,
    delta: f64,
    big_m: f64,
) -> Result<MilpInstance<'g>> {
    check_delta_m(delta, big_m)?;
    profile.check(game)?;
    if defender >= game.defender_count() {
        return Err(Error::param(format!("unknown defender {defender}")));
    }
    let (vlo, vhi) = game.attacker_value_range();
    if big_m < vhi - vlo {
        return Err(Error::MilpConfig(format!(
            "M = {big_m} is below the attacker value spread {}",
            vhi - vlo
        )));
    }
    let (m, k) = (game.target_count(), game.config_count());
    let own: Vec<bool> = (0..m).map(|j| game.owner(j) == defender).collect();
    let dot = |j: usize, f: &dyn Fn(usize) -> f64| -> f64 {
        profile.row(j).iter().enumerate().map(|(o, q)| q * f(o)).sum()
    };

    // Value and utility ranges per target: constant for opponents' targets.
    let mut val = vec![(0.0, 0.0); m];
    let mut util = vec![(0.0, 0.0); m];
    for j in 0..m {
        if own[j] {
            val[j] = range((0..k).map(|o| game.attacker_val(j, o)));
            util[j] = range((0..k).map(|o| game.defender_util(defender, j, o)));
        } else {
            let v = dot(j, &|o| game.attacker_val(j, o));
            let x = dot(j, &|o| game.defender_util(defender, j, o));
            val[j] = (v, v);
            util[j] = (x, x);
        }
    }
    let opp_max = (0..m)
        .filter(|&j| !own[j])
        .map(|j| val[j].0)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    let va_lo = val.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let va_hi = val.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let u_lo = util.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let u_hi = util.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);

    let mut bld = Builder {
        lp: LinearProgram::default(),
        kinds: Vec::new(),
    };
    let mut q = Vec::new();
    for j in (0..m).filter(|&j| own[j]) {
        let vars: Vec<usize> = (0..k)
            .map(|o| bld.lp.add_var(format!("q_{j}_{o}"), 0.0, 1.0))
            .collect();
        q.push((j, vars));
    }
    let qvars = |j: usize| -> &Vec<usize> { &q.iter().find(|(t, _)| *t == j).unwrap().1 };
    let a: Vec<usize> = (0..m).map(|j| bld.lp.add_binary(format!("a_{j}"))).collect();
    let s: Vec<usize> = (0..m)
        .map(|j| bld.lp.add_var(format!("s_{j}"), (va_lo - val[j].1).max(0.0), va_hi - val[j].0))
        .collect();
    let y: Vec<usize> = (0..m)
        .map(|j| bld.lp.add_var(format!("y_{j}"), u_lo.min(0.0), u_hi.max(0.0)))
        .collect();
    let w: Vec<Option<usize>> = (0..m)
        .map(|j| own[j].then(|| bld.lp.add_var(format!("w_{j}"), util[j].0.min(0.0), util[j].1.max(0.0))))
        .collect();
    let u = bld.lp.add_var("u", u_lo, u_hi);
    let v_attack = bld.lp.add_var("v_attack", va_lo, va_hi);

    // A target that can never come within δ of the maximum is never attacked.
    for j in 0..m {
        if val[j].1 < va_lo - delta {
            bld.lp.vars[a[j]].upper = 0.0;
        }
    }

    for (j, vars) in &q {
        bld.row(
            RowKind::Simplex,
            format!("simplex_{j}"),
            vars.iter().map(|&v| (v, 1.0)).collect(),
            Sense::Eq,
            1.0,
        );
    }
    bld.row(
        RowKind::AttackSome,
        "attack_some".into(),
        a.iter().map(|&v| (v, 1.0)).collect(),
        Sense::Ge,
        1.0,
    );
    for j in 0..m {
        let big = (va_hi - val[j].0).max(0.0);
        bld.row(
            RowKind::Support,
            format!("support_{j}"),
            vec![(s[j], 1.0), (a[j], big)],
            Sense::Le,
            delta + big,
        );
    }
    for j in 0..m {
        let mut coeffs = vec![(s[j], 1.0), (v_attack, -1.0)];
        let rhs = if own[j] {
            for (o, &v) in qvars(j).iter().enumerate() {
                coeffs.push((v, game.attacker_val(j, o)));
            }
            0.0
        } else {
            -val[j].0
        };
        bld.row(RowKind::Slack, format!("slack_{j}"), coeffs, Sense::Eq, rhs);
    }
    // `(1 - δ) a_j + M s_j >= 1 - δ` admits the same binary solutions as
    // `a_j + M s_j >= 1 - δ` but keeps the relaxation from settling at
    // `a_j = 1 - δ` when `s_j = 0`.
    for j in 0..m {
        bld.row(
            RowKind::Force,
            format!("force_{j}"),
            vec![(a[j], 1.0 - delta), (s[j], big_m)],
            Sense::Ge,
            1.0 - delta,
        );
    }

    // Opponent targets of equal value are interchangeable in every row but
    // the average, so some optimum attacks them in order of utility.
    let mut opp: Vec<usize> = (0..m).filter(|&j| !own[j]).collect();
    let cmp = |x: f64, y: f64| x.partial_cmp(&y).unwrap_or(core::cmp::Ordering::Equal);
    opp.sort_by(|&i, &j| cmp(val[i].0, val[j].0).then(cmp(util[j].0, util[i].0)).then(i.cmp(&j)));
    for pair in opp.windows(2) {
        let (hi, lo) = (pair[0], pair[1]);
        if val[hi].0 == val[lo].0 {
            bld.row(
                RowKind::Order,
                format!("order_{lo}"),
                vec![(a[hi], 1.0), (a[lo], -1.0)],
                Sense::Ge,
                0.0,
            );
        }
    }

    // Pin vA to the maximum value: one selector per own target that can
    // reach the lower bound, plus one for the best opponent target.
    let mut b = Vec::new();
    for (j, vars) in &q {
        let j = *j;
        if val[j].1 < va_lo {
            continue;
        }
        let bj = bld.lp.add_binary(format!("b_{j}"));
        let big = va_hi - val[j].0;
        let mut coeffs = vec![(v_attack, 1.0), (bj, big)];
        for (o, &v) in vars.iter().enumerate() {
            coeffs.push((v, -game.attacker_val(j, o)));
        }
        bld.row(RowKind::Pin, format!("pin_{j}"), coeffs, Sense::Le, big);
        bld.row(
            RowKind::PinCut,
            format!("pin_cut_{j}"),
            vec![(bj, 1.0), (a[j], -1.0)],
            Sense::Le,
            0.0,
        );
        b.push(bj);
    }
    if let Some(c) = opp_max.filter(|&c| c >= va_lo) {
        let bc = bld.lp.add_binary("b_opp");
        let big = va_hi - c;
        bld.row(
            RowKind::Pin,
            "pin_opp".into(),
            vec![(v_attack, 1.0), (bc, big)],
            Sense::Le,
            c + big,
        );
        b.push(bc);
    }
    bld.row(
        RowKind::PinAny,
        "pin_any".into(),
        b.iter().map(|&v| (v, 1.0)).collect(),
        Sense::Ge,
        1.0,
    );

    // y_j = a_j u and w_j = a_j x_j.
    for j in 0..m {
        let (yj, aj) = (y[j], a[j]);
        bld.row(RowKind::ProductU, format!("yu_hi_{j}"), vec![(yj, 1.0), (aj, -u_hi)], Sense::Le, 0.0);
        bld.row(RowKind::ProductU, format!("yu_lo_{j}"), vec![(yj, 1.0), (aj, -u_lo)], Sense::Ge, 0.0);
        bld.row(
            RowKind::ProductU,
            format!("yu_a_{j}"),
            vec![(yj, 1.0), (u, -1.0), (aj, -u_lo)],
            Sense::Le,
            -u_lo,
        );
        bld.row(
            RowKind::ProductU,
            format!("yu_b_{j}"),
            vec![(yj, 1.0), (u, -1.0), (aj, -u_hi)],
            Sense::Ge,
            -u_hi,
        );
    }
    for (j, vars) in &q {
        let j = *j;
        let (wj, aj) = (w[j].unwrap(), a[j]);
        let (xl, xu) = util[j];
        let x: Vec<(usize, f64)> = vars
            .iter()
            .enumerate()
            .map(|(o, &v)| (v, -game.defender_util(defender, j, o)))
            .collect();
        bld.row(RowKind::ProductX, format!("wx_hi_{j}"), vec![(wj, 1.0), (aj, -xu)], Sense::Le, 0.0);
        bld.row(RowKind::ProductX, format!("wx_lo_{j}"), vec![(wj, 1.0), (aj, -xl)], Sense::Ge, 0.0);
        let mut c = vec![(wj, 1.0), (aj, -xl)];
        c.extend(x.iter().copied());
        bld.row(RowKind::ProductX, format!("wx_a_{j}"), c, Sense::Le, -xl);
        let mut c = vec![(wj, 1.0), (aj, -xu)];
        c.extend(x.iter().copied());
        bld.row(RowKind::ProductX, format!("wx_b_{j}"), c, Sense::Ge, -xu);
    }
    let mut avg: Vec<(usize, f64)> = y.iter().map(|&v| (v, 1.0)).collect();
    for j in 0..m {
        match w[j] {
            Some(wj) => avg.push((wj, -1.0)),
            None => avg.push((a[j], -util[j].0)),
        }
    }
    bld.row(RowKind::Average, "average".into(), avg, Sense::Eq, 0.0);

    let mut objective = vec![(u, 1.0)];
    for (j, vars) in &q {
        for (o, &v) in vars.iter().enumerate() {
            let c = game.cost(*j, o);
            if c != 0.0 {
                objective.push((v, -c));
            }
        }
    }
    bld.lp.objective = objective;
    bld.lp.offset = game.offset(defender);

    Ok(MilpInstance {
        game,
        profile,
        defender,
        delta,
        big_m,
        lp: bld.lp,
        row_kinds: bld.kinds,
        q,
        a,
        s,
        y,
        w,
        b,
        u,
        v_attack,
    })
}

fn range(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

impl MilpInstance<'_> {
    pub fn count(&self, kind: RowKind) -> usize {
        self.row_kinds.iter().filter(|&&k| k == kind).count()
    }

    /// The program with the attack vector and the defender's own
    /// configuration rows fixed, keeping only the configuration and
    /// averaging rows. Its optimum is the defender's utility for that
    /// strategy and support.
    pub fn fixed_program(&self, own_rows: &[Vec<f64>], attacked: &[bool]) -> Result<LinearProgram> {
        if own_rows.len() != self.q.len() || attacked.len() != self.a.len() {
            return Err(Error::param("fixed strategy or attack vector has the wrong shape"));
        }
        let mut lp = self.lp.clone();
        let keep: Vec<bool> = self
            .row_kinds
            .iter()
            .map(|k| matches!(k, RowKind::Simplex | RowKind::ProductU | RowKind::ProductX | RowKind::Average))
            .collect();
        let mut it = keep.iter();
        lp.rows.retain(|_| *it.next().unwrap());
        for ((_, vars), row) in self.q.iter().zip(own_rows) {
            for (&v, &p) in vars.iter().zip(row) {
                lp.vars[v].lower = p;
                lp.vars[v].upper = p;
            }
        }
        for (&v, &on) in self.a.iter().zip(attacked) {
            let x = if on { 1.0 } else { 0.0 };
            lp.vars[v].lower = x;
            lp.vars[v].upper = x;
        }
        Ok(lp)
    }
}

/// A defender's optimal strategy against fixed opponents.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    pub defender: usize,
    /// Own targets, in increasing order, with their configuration rows.
    pub strategy: Vec<(usize, Vec<f64>)>,
    /// Objective value of the program.
    pub utility: f64,
    /// Utility re-simulated with the average-case attacker.
    pub simulated_utility: f64,
    /// Targets with `a_j = 1`.
    pub attack_support: Vec<usize>,
    /// `δ` actually used (it is halved when a program turns out infeasible).
    pub delta: f64,
    pub nodes: usize,
}

impl BestResponse {
    /// `profile` with the defender's rows replaced by this response.
    pub fn apply(&self, profile: &CoverageProfile) -> Result<CoverageProfile> {
        let mut p = profile.clone();
        for (j, row) in &self.strategy {
            p.set_row(*j, row)?;
        }
        Ok(p)
    }
}

/// Solves the program by branch and bound and re-simulates the result.
///
/// The search first branches on which attacked target has the highest
/// defender utility: for target `t` the subproblem fixes `a_t = 1` and adds
/// `u <= x_t`, which holds for the true support average. The program's
/// optimum is the best subproblem optimum, and each subproblem has a much
/// tighter relaxation than the averaged program. Subproblems are visited by
/// decreasing root bound and skipped once they cannot beat the incumbent.
pub fn solve_milp(inst: &MilpInstance<'_>, opts: &MipOptions) -> Result<BestResponse> {
    let sol = solve_split(inst, opts)?;
    let strategy: Vec<(usize, Vec<f64>)> = inst
        .q
        .iter()
        .map(|(j, vars)| {
            let mut row: Vec<f64> = vars.iter().map(|&v| sol.x[v].clamp(0.0, 1.0)).collect();
            let sum: f64 = row.iter().sum();
            for p in &mut row {
                *p /= sum;
            }
            (*j, row)
        })
        .collect();
    let attack_support = (0..inst.a.len()).filter(|&j| sol.x[inst.a[j]] > 0.5).collect();
    let mut br = BestResponse {
        defender: inst.defender,
        strategy,
        utility: sol.objective,
        simulated_utility: f64::NAN,
        attack_support,
        delta: inst.delta,
        nodes: sol.nodes,
    };
    let profile = br.apply(inst.profile)?;
    let tol = 0.5 * (inst.delta + (1.0 - inst.delta) / inst.big_m);
    let (_, utils) = ase_utilities(inst.game, &profile, tol)?;
    br.simulated_utility = utils[inst.defender];
    Ok(br)
}

fn solve_split(inst: &MilpInstance<'_>, opts: &MipOptions) -> Result<MipSolution> {
    let game = inst.game;
    let mut subs = Vec::new();
    for (t, &at) in inst.a.iter().enumerate() {
        if inst.lp.vars[at].upper < 0.5 {
            continue;
        }
        let mut lp = inst.lp.clone();
        lp.vars[at].lower = 1.0;
        let mut coeffs = vec![(inst.u, 1.0)];
        let rhs = match inst.q.iter().find(|(j, _)| *j == t) {
            Some((_, vars)) => {
                for (o, &v) in vars.iter().enumerate() {
                    coeffs.push((v, -game.defender_util(inst.defender, t, o)));
                }
                0.0
            }
            None => inst
                .profile
                .row(t)
                .iter()
                .enumerate()
                .map(|(o, p)| p * game.defender_util(inst.defender, t, o))
                .sum(),
        };
        lp.add_row(format!("best_{t}"), coeffs, Sense::Le, rhs);
        match solve_lp(&lp) {
            Ok(r) => subs.push((r.objective, lp)),
            Err(Error::Infeasible) => {}
            Err(e) => return Err(e),
        }
    }
    subs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut best = current_point(inst)?;
    let mut nodes = 0usize;
    for (bound, lp) in &subs {
        let cutoff = best.as_ref().map(|b| b.objective);
        if let Some(c) = cutoff {
            if *bound <= c + opts.rel_gap * (1.0 + c.abs()) {
                break;
            }
        }
        let sub_opts = MipOptions {
            node_limit: opts.node_limit.saturating_sub(nodes).max(1),
            cutoff,
            ..*opts
        };
        match branch_and_bound(lp, &sub_opts) {
            Ok((found, n)) => {
                nodes += n;
                if let Some((x, objective)) = found {
                    best = Some(MipSolution {
                        x,
                        objective,
                        bound: objective,
                        nodes,
                    });
                }
            }
            Err(Error::ResourceLimit { what, limit, incumbent }) => {
                let incumbent = match (incumbent, best) {
                    (Some(i), Some(b)) if b.objective >= i.objective => Some(Box::new(b)),
                    (Some(i), _) => Some(i),
                    (None, b) => b.map(Box::new),
                };
                return Err(Error::ResourceLimit { what, limit, incumbent });
            }
            Err(e) => return Err(e),
        }
    }
    let mut sol = best.ok_or(Error::Infeasible)?;
    sol.nodes = nodes;
    sol.bound = sol.objective;
    Ok(sol)
}

/// The defender's current strategy with the support of attacker values
/// within `δ` of the maximum, unless some value falls inside the band where
/// the program admits no support.
fn current_point(inst: &MilpInstance<'_>) -> Result<Option<MipSolution>> {
    let (game, profile) = (inst.game, inst.profile);
    let vals: Vec<f64> = (0..game.target_count())
        .map(|j| profile.row(j).iter().enumerate().map(|(o, q)| q * game.attacker_val(j, o)).sum())
        .collect();
    let top = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let band = (1.0 - inst.delta) / inst.big_m;
    if vals.iter().any(|&v| top - v > inst.delta && top - v < band) {
        return Ok(None);
    }
    let rows: Vec<Vec<f64>> = inst.q.iter().map(|(j, _)| profile.row(*j).to_vec()).collect();
    let attacked: Vec<bool> = vals.iter().map(|&v| top - v <= inst.delta).collect();
    let lp = inst.fixed_program(&rows, &attacked)?;
    match solve_lp(&lp) {
        Ok(r) => {
            let objective = lp.objective_value(&r.x);
            Ok(Some(MipSolution {
                objective,
                bound: objective,
                x: r.x,
                nodes: 0,
            }))
        }
        Err(Error::Infeasible) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Best response of `defender` to `profile`, with the numerical settings of
/// `cfg`. An infeasible program (an opponent value landing inside the band
/// between `δ` and `(1 - δ) / M`) is retried with `δ` halved.
pub fn best_response(
    game: &InterdependentGame,
    defender: usize,
    profile: &CoverageProfile,
    cfg: &BrConfig,
) -> Result<BestResponse> {
    let opts = MipOptions {
        node_limit: cfg.node_limit,
        rel_gap: cfg.rel_gap,
        ..MipOptions::default()
    };
    let (mut delta, mut big_m) = (cfg.delta, cfg.big_m);
    for _ in 0..MAX_RETRIES {
        let inst = build_br_milp(game, defender, profile, delta, big_m)?;
        match solve_milp(&inst, &opts) {
            Ok(br) => {
                if cfg.strict && (br.utility - br.simulated_utility).abs() > MISMATCH_TOL {
                    return Err(Error::UtilityMismatch {
                        milp: br.utility,
                        simulated: br.simulated_utility,
                    });
                }
                return Ok(br);
            }
            Err(Error::Infeasible) => {
                // Keep the band proportional when M was derived from δ.
                let derived = (big_m - derived_m(delta)).abs() <= 1e-9 * big_m;
                delta *= 0.5;
                if derived {
                    big_m = derived_m(delta);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Infeasible)
}
