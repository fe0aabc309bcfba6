//! Approximate equilibrium search.
//!
//! Every algorithm spends a budget counted in best-response program solves.
//! Scoring one profile by its regret costs one solve per defender.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::milp::{BestResponse, BrConfig};
use crate::model::{regret_report, CoverageProfile, EquilibriumReport, InterdependentGame, RegretReport};
use crate::rng::{sample_simplex, substream, SeededRng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    RandomSearch,
    SimulatedAnnealing,
    IteratedBestResponse,
    Ribr,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RandomSearch => "rs",
            Algorithm::SimulatedAnnealing => "sa",
            Algorithm::IteratedBestResponse => "ibr",
            Algorithm::Ribr => "ribr",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            Algorithm::RandomSearch,
            Algorithm::SimulatedAnnealing,
            Algorithm::IteratedBestResponse,
            Algorithm::Ribr,
        ]
        .into_iter()
        .find(|a| a.name() == s)
    }
}

/// Geometric cooling `T_t = T_0 γ^t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaSchedule {
    /// Probe moves used to set `T_0` to the median absolute regret change.
    pub probes: usize,
    /// `T_final / T_0`.
    pub final_ratio: f64,
    /// Largest probability mass moved by one perturbation.
    pub max_step: f64,
    /// Overrides the probed `T_0`.
    pub initial_temperature: Option<f64>,
}

impl Default for SaSchedule {
    fn default() -> Self {
        Self {
            probes: 32,
            final_ratio: 1e-4,
            max_step: 0.2,
            initial_temperature: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    /// Budget in best-response solves.
    pub iterations: usize,
    pub seed: u64,
    pub sa: SaSchedule,
    /// Most best-response sweeps one restart may use.
    pub restart_budget: usize,
    /// Stop once regret (or the change of an iterated best-response sweep)
    /// falls below this.
    pub tol: f64,
    pub br: BrConfig,
    /// Visit defenders in a random order each sweep instead of by id.
    pub shuffle_order: bool,
}

impl SearchConfig {
    pub fn new(algorithm: Algorithm, game: &InterdependentGame) -> Self {
        Self {
            algorithm,
            iterations: 1000,
            seed: 0,
            sa: SaSchedule::default(),
            restart_budget: 25,
            tol: 1e-6,
            br: BrConfig::for_game(game),
            shuffle_order: false,
        }
    }

    fn check(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::param("iterations must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::param("tol must be > 0"));
        }
        if self.restart_budget == 0 {
            return Err(Error::param("restart budget must be at least 1"));
        }
        Ok(())
    }
}

/// One scored profile.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    /// Solves spent so far, including this point.
    pub solves: usize,
    /// Regret of the profile scored at this point.
    pub regret: f64,
    /// Best regret seen so far.
    pub best: f64,
    /// Regret of the state the search continues from. Differs from
    /// `regret` only when annealing rejects a move.
    pub current: f64,
    pub profile: CoverageProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrace {
    pub points: Vec<TracePoint>,
    /// Indices into `points` where a restart begins.
    pub restarts: Vec<usize>,
    pub report: EquilibriumReport,
    pub solves: usize,
}

impl SearchTrace {
    pub fn best_regret(&self) -> f64 {
        self.report.epsilon
    }
}

struct Tracker<'g> {
    game: &'g InterdependentGame,
    br: BrConfig,
    budget: usize,
    solves: usize,
    points: Vec<TracePoint>,
    restarts: Vec<usize>,
    best: Option<(CoverageProfile, RegretReport)>,
}

impl<'g> Tracker<'g> {
    fn new(game: &'g InterdependentGame, cfg: &SearchConfig) -> Self {
        Self {
            game,
            br: cfg.br,
            budget: cfg.iterations,
            solves: 0,
            points: Vec::new(),
            restarts: Vec::new(),
            best: None,
        }
    }

    fn defenders(&self) -> usize {
        self.game.defender_count()
    }

    /// Whether a full regret evaluation still fits in the budget. The very
    /// first evaluation is always allowed.
    fn can_score(&self) -> bool {
        self.solves == 0 || self.solves + self.defenders() <= self.budget
    }

    fn can_solve(&self) -> bool {
        self.solves < self.budget
    }

    fn score(&mut self, profile: &CoverageProfile) -> Result<RegretReport> {
        let r = regret_report(self.game, profile, &self.br)?;
        self.solves += self.defenders();
        let improved = self.best.as_ref().map_or(true, |(_, b)| r.epsilon < b.epsilon);
        if improved {
            self.best = Some((profile.clone(), r.clone()));
        }
        let best = self.best.as_ref().map(|(_, b)| b.epsilon).unwrap_or(r.epsilon);
        self.points.push(TracePoint {
            solves: self.solves,
            regret: r.epsilon,
            best,
            current: r.epsilon,
            profile: profile.clone(),
        });
        Ok(r)
    }

    fn best_regret(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |(_, b)| b.epsilon)
    }

    fn finish(self) -> SearchTrace {
        let (profile, r) = self.best.expect("at least one profile was scored");
        SearchTrace {
            points: self.points,
            restarts: self.restarts,
            report: EquilibriumReport::from_regret(profile, r, None),
            solves: self.solves,
        }
    }
}

/// Runs the algorithm selected in `cfg`. Iterated best response starts from
/// the undefended profile.
pub fn run(game: &InterdependentGame, cfg: &SearchConfig) -> Result<SearchTrace> {
    match cfg.algorithm {
        Algorithm::RandomSearch => random_search(game, cfg),
        Algorithm::SimulatedAnnealing => simulated_annealing(game, cfg),
        Algorithm::IteratedBestResponse => {
            iterated_best_response(game, &CoverageProfile::undefended(game), cfg)
        }
        Algorithm::Ribr => ribr(game, cfg),
    }
}

/// Profile with every row drawn uniformly from the probability simplex.
pub fn random_profile<R: Rng + ?Sized>(game: &InterdependentGame, rng: &mut R) -> CoverageProfile {
    let rows = (0..game.target_count())
        .map(|_| sample_simplex(rng, game.config_count()))
        .collect();
    CoverageProfile::new(game, rows).expect("simplex samples are valid rows")
}

pub fn random_search(game: &InterdependentGame, cfg: &SearchConfig) -> Result<SearchTrace> {
    cfg.check()?;
    let mut rng = substream(cfg.seed, &[0]);
    let mut t = Tracker::new(game, cfg);
    while t.can_score() {
        let p = random_profile(game, &mut rng);
        t.score(&p)?;
        if t.best_regret() < cfg.tol {
            break;
        }
    }
    Ok(t.finish())
}

/// Moves up to `max_step` probability between two configurations of one
/// random target.
fn perturb(p: &CoverageProfile, rng: &mut SeededRng, max_step: f64) -> CoverageProfile {
    let k = p.config_count();
    let mut out = p.clone();
    if k < 2 {
        return out;
    }
    let j = rng.gen_range(0..p.target_count());
    let from = rng.gen_range(0..k);
    let mut to = rng.gen_range(0..k - 1);
    if to >= from {
        to += 1;
    }
    let mut row = p.row(j).to_vec();
    let step = (rng.gen::<f64>() * max_step).min(row[from]);
    row[from] -= step;
    row[to] += step;
    row[from] = row[from].max(0.0);
    out.set_row(j, &row).expect("mass moved within the simplex");
    out
}

pub fn simulated_annealing(game: &InterdependentGame, cfg: &SearchConfig) -> Result<SearchTrace> {
    cfg.check()?;
    let mut rng = substream(cfg.seed, &[1]);
    let mut t = Tracker::new(game, cfg);
    let mut current = random_profile(game, &mut rng);
    let mut current_regret = t.score(&current)?.epsilon;

    let t0 = match cfg.sa.initial_temperature {
        Some(t0) => t0,
        None => {
            let mut deltas = Vec::new();
            for _ in 0..cfg.sa.probes {
                if !t.can_score() {
                    break;
                }
                let probe = perturb(&current, &mut rng, cfg.sa.max_step);
                let r = t.score(&probe)?.epsilon;
                deltas.push((r - current_regret).abs());
                if let Some(last) = t.points.last_mut() {
                    last.current = current_regret;
                }
            }
            median(&mut deltas)
        }
    };
    let n = game.defender_count();
    let steps = (cfg.iterations.saturating_sub(t.solves) / n).max(1);
    let gamma = if steps > 1 {
        libm::pow(cfg.sa.final_ratio, 1.0 / (steps - 1) as f64)
    } else {
        1.0
    };
    let mut temp = t0;
    while t.can_score() && t.best_regret() >= cfg.tol {
        let cand = perturb(&current, &mut rng, cfg.sa.max_step);
        let r = t.score(&cand)?.epsilon;
        let delta = r - current_regret;
        let accept = delta <= 0.0 || (temp > 0.0 && rng.gen::<f64>() < libm::exp(-delta / temp));
        if accept {
            current = cand;
            current_regret = r;
        }
        if let Some(last) = t.points.last_mut() {
            last.current = current_regret;
        }
        temp *= gamma;
    }
    Ok(t.finish())
}

fn median(x: &mut [f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.sort_by(f64::total_cmp);
    let m = x.len() / 2;
    if x.len() % 2 == 1 {
        x[m]
    } else {
        0.5 * (x[m - 1] + x[m])
    }
}

/// Iterated best response from `start` until regret or movement drops
/// below `tol`, the sweep cap is hit or the budget runs out.
///
/// Each sweep first scores the current profile (one best response per
/// defender) and then lets the defenders respond in turn; the first
/// defender's response comes from the scoring step.
pub fn iterated_best_response(
    game: &InterdependentGame,
    start: &CoverageProfile,
    cfg: &SearchConfig,
) -> Result<SearchTrace> {
    cfg.check()?;
    start.check(game)?;
    let mut rng = substream(cfg.seed, &[2]);
    let mut t = Tracker::new(game, cfg);
    ibr_run(&mut t, start.clone(), cfg, &mut rng, usize::MAX)?;
    Ok(t.finish())
}

fn ibr_run(
    t: &mut Tracker<'_>,
    start: CoverageProfile,
    cfg: &SearchConfig,
    rng: &mut SeededRng,
    max_sweeps: usize,
) -> Result<()> {
    let n = t.defenders();
    let mut order: Vec<usize> = (0..n).collect();
    let mut profile = start;
    let mut sweeps = 0;
    while t.can_score() && sweeps < max_sweeps {
        let report = t.score(&profile)?;
        if report.epsilon < cfg.tol {
            return Ok(());
        }
        if cfg.shuffle_order {
            order.shuffle(rng);
        }
        let mut next = profile.clone();
        for (pos, &d) in order.iter().enumerate() {
            let br: BestResponse = if pos == 0 {
                report.responses[d].clone()
            } else {
                if !t.can_solve() {
                    break;
                }
                t.solves += 1;
                crate::milp::best_response(t.game, d, &next, &t.br)?
            };
            next = br.apply(&next)?;
        }
        sweeps += 1;
        let moved = next.max_abs_diff(&profile);
        profile = next;
        if moved < cfg.tol {
            if t.can_score() {
                t.score(&profile)?;
            }
            return Ok(());
        }
    }
    Ok(())
}

/// Iterated best response with restarts: from the undefended corner, the
/// fully defended corner, then random profiles until the budget is spent.
/// The lowest-regret profile over all restarts is reported.
pub fn ribr(game: &InterdependentGame, cfg: &SearchConfig) -> Result<SearchTrace> {
    cfg.check()?;
    let mut rng = substream(cfg.seed, &[3]);
    let mut t = Tracker::new(game, cfg);
    let mut restart = 0usize;
    while t.can_score() && t.best_regret() >= cfg.tol {
        let start = match restart {
            0 => CoverageProfile::undefended(game),
            1 => CoverageProfile::fully_defended(game),
            _ => random_profile(game, &mut rng),
        };
        t.restarts.push(t.points.len());
        ibr_run(&mut t, start, cfg, &mut rng, cfg.restart_budget)?;
        restart += 1;
    }
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{encode_independent, IndependentParams};

    fn cfg(alg: Algorithm, game: &InterdependentGame, iterations: usize, seed: u64) -> SearchConfig {
        SearchConfig {
            iterations,
            seed,
            ..SearchConfig::new(alg, game)
        }
    }

    #[test]
    fn names_round_trip() {
        for a in [
            Algorithm::RandomSearch,
            Algorithm::SimulatedAnnealing,
            Algorithm::IteratedBestResponse,
            Algorithm::Ribr,
        ] {
            assert_eq!(Algorithm::from_name(a.name()), Some(a));
        }
    }

    #[test]
    fn traces_are_monotone_and_seeded() {
        let g = encode_independent(&IndependentParams::multi_target(1.0, 0.3, 2, 2)).unwrap();
        for alg in [Algorithm::RandomSearch, Algorithm::SimulatedAnnealing, Algorithm::Ribr] {
            let a = run(&g, &cfg(alg, &g, 80, 5)).unwrap();
            let b = run(&g, &cfg(alg, &g, 80, 5)).unwrap();
            assert_eq!(a, b);
            assert!(a.points.windows(2).all(|w| w[1].best <= w[0].best));
            assert!(a.solves <= 80);
        }
    }

    #[test]
    fn single_defender_converges_in_one_response() {
        let g = encode_independent(&IndependentParams::multi_target(1.0, 0.3, 1, 3)).unwrap();
        let t = iterated_best_response(&g, &CoverageProfile::undefended(&g), &cfg(Algorithm::IteratedBestResponse, &g, 100, 0)).unwrap();
        assert!(t.best_regret() < 1e-6);
        assert_eq!(t.points.len(), 2);
    }

    #[test]
    fn fixed_point_start_is_kept() {
        let g = encode_independent(&IndependentParams::baseline(2.0, 1.0, 2)).unwrap();
        let start = CoverageProfile::fully_defended(&g);
        let mut c = cfg(Algorithm::IteratedBestResponse, &g, 100, 0);
        c.tol = 1e-3;
        let t = iterated_best_response(&g, &start, &c).unwrap();
        assert_eq!(t.report.profile, start);
        assert_eq!(t.points.len(), 1);
    }

    #[test]
    fn zero_temperature_is_descent() {
        let g = encode_independent(&IndependentParams::multi_target(1.0, 0.3, 2, 2)).unwrap();
        let mut c = cfg(Algorithm::SimulatedAnnealing, &g, 120, 3);
        c.sa.initial_temperature = Some(0.0);
        let t = simulated_annealing(&g, &c).unwrap();
        assert!(t.points.len() > 30);
        assert!(t.points.windows(2).all(|w| w[1].current <= w[0].current));
        assert!(t.points.iter().any(|p| p.regret > p.current));
    }
}
