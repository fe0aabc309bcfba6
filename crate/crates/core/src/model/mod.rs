//! Game representations and the quantities every solver shares: the
//! attacker's average-case response, expected defender utilities, regret,
//! utilitarian welfare and the (ε-)price of anarchy.

mod game;
mod profile;

use alloc::vec::Vec;

pub use game::{
    encode_independent, GameTables, IndependentParams, InterdependentGame, ModelKind, COVERED,
    UNCOVERED,
};
pub use profile::{AttackDistribution, CoverageProfile, SIMPLEX_TOL};

use crate::milp::{best_response, BestResponse, BrConfig};
use crate::{Error, Result};

/// Default tolerance for the attacker's argmax when no best-response
/// configuration is involved.
pub const DEFAULT_TIE_TOL: f64 = 1e-6;

/// Attacker's expected value of attacking `target` under `profile`.
pub fn attacker_value(
    game: &InterdependentGame,
    profile: &CoverageProfile,
    target: usize,
) -> Result<f64> {
    if target >= game.target_count() {
        return Err(Error::UnknownTarget(target));
    }
    Ok(profile
        .row(target)
        .iter()
        .enumerate()
        .map(|(o, q)| q * game.attacker_val(target, o))
        .sum())
}

pub(crate) fn attacker_values(game: &InterdependentGame, profile: &CoverageProfile) -> Vec<f64> {
    (0..game.target_count())
        .map(|j| {
            profile
                .row(j)
                .iter()
                .enumerate()
                .map(|(o, q)| q * game.attacker_val(j, o))
                .sum()
        })
        .collect()
}

/// Attack distribution from a vector of attacker values: uniform over every
/// target within `tol` of the best value.
pub fn ase_from_values(values: &[f64], tol: f64) -> Result<AttackDistribution> {
    if values.is_empty() {
        return Err(Error::NoTargets);
    }
    if !(tol >= 0.0) {
        return Err(Error::param("tie tolerance must be >= 0"));
    }
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let support = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= best - tol)
        .map(|(j, _)| j)
        .collect();
    Ok(AttackDistribution::uniform(values.len(), support))
}

/// The average-case attacker response: uniform over all targets whose value
/// is within `tol` of the maximum.
pub fn ase_attack(
    game: &InterdependentGame,
    profile: &CoverageProfile,
    tol: f64,
) -> Result<AttackDistribution> {
    profile.check(game)?;
    ase_from_values(&attacker_values(game, profile), tol)
}

/// Expected utility of every defender: the offset, plus the attack-weighted
/// utility at each target, minus the expected configuration cost of the
/// defender's own targets (paid whether or not they are attacked).
pub fn defender_utilities(
    game: &InterdependentGame,
    profile: &CoverageProfile,
    attack: &AttackDistribution,
) -> Result<Vec<f64>> {
    profile.check(game)?;
    if attack.p.len() != game.target_count() {
        return Err(Error::param("attack distribution does not match the game"));
    }
    let mut utils: Vec<f64> = game.offsets().to_vec();
    for (d, u) in utils.iter_mut().enumerate() {
        for j in 0..game.target_count() {
            let row = profile.row(j);
            if attack.p[j] > 0.0 {
                let at_j: f64 = row
                    .iter()
                    .enumerate()
                    .map(|(o, q)| q * game.defender_util(d, j, o))
                    .sum();
                *u += attack.p[j] * at_j;
            }
            if game.owner(j) == d {
                *u -= row
                    .iter()
                    .enumerate()
                    .map(|(o, q)| q * game.cost(j, o))
                    .sum::<f64>();
            }
        }
    }
    Ok(utils)
}

/// Utilities under the average-case attack with tie tolerance `tol`.
pub fn ase_utilities(
    game: &InterdependentGame,
    profile: &CoverageProfile,
    tol: f64,
) -> Result<(AttackDistribution, Vec<f64>)> {
    let attack = ase_attack(game, profile, tol)?;
    let utils = defender_utilities(game, profile, &attack)?;
    Ok((attack, utils))
}

pub fn social_welfare(utilities: &[f64]) -> f64 {
    utilities.iter().sum()
}

/// (ε-)price of anarchy from optimal and equilibrium welfare.
///
/// Positive welfare gives `sw_opt / sw_eq`; negative welfare gives the
/// reciprocal. Mixed signs and zeros are rejected.
pub fn epsilon_poa(sw_opt: f64, sw_eq: f64) -> Result<f64> {
    if sw_opt > 0.0 && sw_eq > 0.0 {
        Ok(sw_opt / sw_eq)
    } else if sw_opt < 0.0 && sw_eq < 0.0 {
        Ok(sw_eq / sw_opt)
    } else {
        Err(Error::UndefinedPoa { sw_opt, sw_eq })
    }
}

/// Per-defender breakdown of a regret computation.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport {
    pub epsilon: f64,
    pub attack: AttackDistribution,
    pub utilities: Vec<f64>,
    /// Best-response gain of each defender, floored at zero.
    pub gains: Vec<f64>,
    pub responses: Vec<BestResponse>,
}

/// ε of a profile: the largest utility gain any single defender can obtain
/// by switching to a best response, floored at zero.
pub fn regret(game: &InterdependentGame, profile: &CoverageProfile, cfg: &BrConfig) -> Result<f64> {
    regret_report(game, profile, cfg).map(|r| r.epsilon)
}

pub fn regret_report(
    game: &InterdependentGame,
    profile: &CoverageProfile,
    cfg: &BrConfig,
) -> Result<RegretReport> {
    let (attack, utilities) = ase_utilities(game, profile, cfg.tie_tolerance())?;
    let mut gains = Vec::with_capacity(game.defender_count());
    let mut responses = Vec::with_capacity(game.defender_count());
    for d in 0..game.defender_count() {
        let br = best_response(game, d, profile, cfg)?;
        gains.push((br.simulated_utility - utilities[d]).max(0.0));
        responses.push(br);
    }
    let epsilon = gains.iter().copied().fold(0.0, f64::max);
    Ok(RegretReport {
        epsilon,
        attack,
        utilities,
        gains,
        responses,
    })
}

/// Equilibrium summary for a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub profile: CoverageProfile,
    pub attack: AttackDistribution,
    pub utilities: Vec<f64>,
    pub welfare: f64,
    pub epsilon: f64,
    pub poa: Option<f64>,
}

impl EquilibriumReport {
    pub fn from_regret(profile: CoverageProfile, r: RegretReport, sw_opt: Option<f64>) -> Self {
        let welfare = social_welfare(&r.utilities);
        let poa = sw_opt.and_then(|opt| epsilon_poa(opt, welfare).ok());
        Self {
            profile,
            attack: r.attack,
            utilities: r.utilities,
            welfare,
            epsilon: r.epsilon,
            poa,
        }
    }
}

pub fn equilibrium_report(
    game: &InterdependentGame,
    profile: &CoverageProfile,
    cfg: &BrConfig,
    sw_opt: Option<f64>,
) -> Result<EquilibriumReport> {
    let r = regret_report(game, profile, cfg)?;
    Ok(EquilibriumReport::from_regret(profile.clone(), r, sw_opt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn two_config_single(v: &[f64; 2], u: &[f64; 2], cost: &[f64; 2]) -> InterdependentGame {
        InterdependentGame::new(GameTables {
            targets: vec!["a".to_string()],
            configs: vec!["x".to_string(), "y".to_string()],
            owners: vec![0],
            defenders: 1,
            costs: vec![cost.to_vec()],
            defender_utils: vec![vec![u.to_vec()]],
            attacker_vals: vec![v.to_vec()],
            offsets: None,
        })
        .unwrap()
    }

    /// Two defenders, one target each valued 1, coverage costs `cost`.
    pub(crate) fn sse_pathology(cost: f64) -> InterdependentGame {
        encode_independent(&IndependentParams::baseline(1.0, cost, 2)).unwrap()
    }

    #[test]
    fn attacker_value_examples() {
        let g = two_config_single(&[0.0, 1.0], &[0.0, 0.0], &[0.0, 0.0]);
        let p = CoverageProfile::new(&g, vec![vec![1.0, 0.0]]).unwrap();
        assert_eq!(attacker_value(&g, &p, 0).unwrap(), 0.0);
        let p = CoverageProfile::new(&g, vec![vec![0.5, 0.5]]).unwrap();
        assert_eq!(attacker_value(&g, &p, 0).unwrap(), 0.5);
        let g = two_config_single(&[2.0, 5.0], &[0.0, 0.0], &[0.0, 0.0]);
        let p = CoverageProfile::new(&g, vec![vec![0.3, 0.7]]).unwrap();
        let oracle = 0.3 * 2.0 + 0.7 * 5.0;
        assert!((attacker_value(&g, &p, 0).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 4.1f64).abs() < 1e-12);
        assert_eq!(attacker_value(&g, &p, 3), Err(Error::UnknownTarget(3)));
    }

    #[test]
    fn ase_examples() {
        let a = ase_from_values(&[1.0, 1.0], 0.0).unwrap();
        assert_eq!(a.p, vec![0.5, 0.5]);
        let a = ase_from_values(&[1.0, 0.9], 0.0).unwrap();
        assert_eq!(a.p, vec![1.0, 0.0]);
        assert_eq!(a.support, vec![0]);
        let a = ase_from_values(&[1.0, 0.995, 0.2], 0.01).unwrap();
        assert_eq!(a.p, vec![0.5, 0.5, 0.0]);
        assert_eq!(ase_from_values(&[], 0.0), Err(Error::NoTargets));
    }

    #[test]
    fn utility_examples() {
        // Uncovered single target, attacked for sure.
        let g = two_config_single(&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 0.0]);
        let p = CoverageProfile::new(&g, vec![vec![1.0, 0.0]]).unwrap();
        let a = AttackDistribution::uniform(1, vec![0]);
        assert_eq!(defender_utilities(&g, &p, &a).unwrap(), vec![-1.0]);

        // Baseline encoding, full coverage: -v + q (v - c) at q = 1.
        let g = encode_independent(&IndependentParams::baseline(1.0, 0.2, 1)).unwrap();
        let p = CoverageProfile::symmetric_coverage(&g, 1.0).unwrap();
        let u = defender_utilities(&g, &p, &a).unwrap();
        assert!((u[0] - (-1.0 + 1.0 * (1.0 - 0.2))).abs() < 1e-12);

        // Two defenders, nobody covers, the attack splits evenly.
        let g = sse_pathology(0.01);
        let p = CoverageProfile::symmetric_coverage(&g, 0.0).unwrap();
        let (attack, u) = ase_utilities(&g, &p, DEFAULT_TIE_TOL).unwrap();
        assert_eq!(attack.p, vec![0.5, 0.5]);
        assert_eq!(u, vec![-0.5, -0.5]);
    }

    #[test]
    fn welfare_and_poa() {
        assert_eq!(social_welfare(&[-1.0, -1.0]), -2.0);
        assert_eq!(social_welfare(&[]), 0.0);
        assert!((social_welfare(&[-0.2, -0.5, -0.3]) + 1.0).abs() < 1e-12);
        assert_eq!(epsilon_poa(-2.0, -4.0).unwrap(), 2.0);
        assert_eq!(epsilon_poa(4.0, 2.0).unwrap(), 2.0);
        assert_eq!(epsilon_poa(-10.0, -25.0).unwrap(), 2.5);
        assert!(epsilon_poa(-1.0, 1.0).is_err());
        assert!(epsilon_poa(0.0, -1.0).is_err());
        assert_eq!(epsilon_poa(-3.7, -3.7).unwrap(), 1.0);
    }

    #[test]
    fn utilities_are_linear_in_attack() {
        let g = encode_independent(&IndependentParams::multi_target(2.0, 0.3, 2, 2)).unwrap();
        let p = CoverageProfile::from_coverage(&g, &[0.1, 0.4, 0.7, 0.2]).unwrap();
        let a1 = AttackDistribution::uniform(4, vec![0, 1]);
        let a2 = AttackDistribution::uniform(4, vec![3]);
        let mix = AttackDistribution {
            p: a1.p.iter().zip(&a2.p).map(|(x, y)| 0.25 * x + 0.75 * y).collect(),
            support: vec![0, 1, 3],
        };
        let u1 = defender_utilities(&g, &p, &a1).unwrap();
        let u2 = defender_utilities(&g, &p, &a2).unwrap();
        let um = defender_utilities(&g, &p, &mix).unwrap();
        for d in 0..2 {
            assert!((um[d] - (0.25 * u1[d] + 0.75 * u2[d])).abs() < 1e-12);
        }
    }
}
