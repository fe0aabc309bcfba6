use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Which of the homogeneous independent-target models a parameter set describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Baseline,
    MultiTarget,
    General,
}

/// Parameters of the homogeneous independent-target models.
///
/// Baseline and multi-target parameters are stored in general form with
/// `uc = 0`, `uu = -v` and `omega = 0`, which is exactly how those models
/// embed into the general one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndependentParams {
    pub model: ModelKind,
    /// Target value (baseline and multi-target models).
    pub v: f64,
    /// Cost of covering one target.
    pub c: f64,
    /// Number of defenders.
    pub n: u32,
    /// Targets per defender.
    pub k: u32,
    /// Utility of an attacked, covered target.
    pub uc: f64,
    /// Utility of an attacked, uncovered target.
    pub uu: f64,
    /// Utility of a target that is not attacked.
    pub omega: f64,
}

impl IndependentParams {
    pub fn baseline(v: f64, c: f64, n: u32) -> Self {
        Self::multi_target_kind(ModelKind::Baseline, v, c, n, 1)
    }

    pub fn multi_target(v: f64, c: f64, n: u32, k: u32) -> Self {
        Self::multi_target_kind(ModelKind::MultiTarget, v, c, n, k)
    }

    fn multi_target_kind(model: ModelKind, v: f64, c: f64, n: u32, k: u32) -> Self {
        Self {
            model,
            v,
            c,
            n,
            k,
            uc: 0.0,
            uu: -v,
            omega: 0.0,
        }
    }

    pub fn general(uc: f64, uu: f64, omega: f64, c: f64, n: u32, k: u32) -> Self {
        Self {
            model: ModelKind::General,
            v: omega - uu,
            c,
            n,
            k,
            uc,
            uu,
            omega,
        }
    }

    /// Checks the structural invariants shared by every model.
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("v", self.v),
            ("c", self.c),
            ("uc", self.uc),
            ("uu", self.uu),
            ("omega", self.omega),
        ] {
            if !x.is_finite() {
                return Err(Error::param(format!("{name} must be finite, got {x}")));
            }
        }
        if self.c <= 0.0 {
            return Err(Error::param(format!("cost c must be > 0, got {}", self.c)));
        }
        if self.n < 1 || self.k < 1 {
            return Err(Error::param("n and k must be at least 1"));
        }
        match self.model {
            ModelKind::Baseline if self.k != 1 => {
                Err(Error::param("the baseline model has k = 1"))
            }
            ModelKind::Baseline | ModelKind::MultiTarget if self.v < 0.0 => {
                Err(Error::param(format!("target value must be >= 0, got {}", self.v)))
            }
            ModelKind::General if !(self.omega >= self.uc && self.uc >= self.uu) => Err(
                Error::param("the general model requires omega >= uc >= uu"),
            ),
            _ => Ok(()),
        }
    }

    /// Total number of targets, `n * k`.
    pub fn target_count(&self) -> usize {
        self.n as usize * self.k as usize
    }
}

/// A game with a finite configuration set per target, arbitrary
/// per-defender utilities and an attacker value per (target, config).
///
/// Targets, defenders and configurations are addressed by dense indices;
/// the string labels are carried only for IO.
#[derive(Debug, Clone, PartialEq)]
pub struct InterdependentGame {
    targets: Vec<String>,
    configs: Vec<String>,
    owners: Vec<usize>,
    defenders: usize,
    /// `[target][config]`
    costs: Vec<f64>,
    /// `[defender][target][config]`
    defender_utils: Vec<f64>,
    /// `[target][config]`
    attacker_vals: Vec<f64>,
    /// Constant utility each defender receives regardless of play.
    offsets: Vec<f64>,
}

/// Dense tables used to build an [`InterdependentGame`].
#[derive(Debug, Clone, PartialEq)]
pub struct GameTables {
    pub targets: Vec<String>,
    pub configs: Vec<String>,
    pub owners: Vec<usize>,
    pub defenders: usize,
    pub costs: Vec<Vec<f64>>,
    pub defender_utils: Vec<Vec<Vec<f64>>>,
    pub attacker_vals: Vec<Vec<f64>>,
    pub offsets: Option<Vec<f64>>,
}

impl InterdependentGame {
    pub fn new(tables: GameTables) -> Result<Self> {
        let GameTables {
            targets,
            configs,
            owners,
            defenders,
            costs,
            defender_utils,
            attacker_vals,
            offsets,
        } = tables;
        let m = targets.len();
        let k = configs.len();
        if m == 0 {
            return Err(Error::NoTargets);
        }
        if k == 0 {
            return Err(Error::param("at least one configuration is required"));
        }
        if defenders == 0 {
            return Err(Error::param("at least one defender is required"));
        }
        if owners.len() != m {
            return Err(Error::param(format!(
                "owners has {} entries for {m} targets",
                owners.len()
            )));
        }
        if let Some(&bad) = owners.iter().find(|&&o| o >= defenders) {
            return Err(Error::param(format!("owner {bad} out of range")));
        }
        let flat2 = |name: &str, rows: Vec<Vec<f64>>| -> Result<Vec<f64>> {
            if rows.len() != m || rows.iter().any(|r| r.len() != k) {
                return Err(Error::param(format!("{name} must be {m} x {k}")));
            }
            let out: Vec<f64> = rows.into_iter().flatten().collect();
            if out.iter().any(|x| !x.is_finite()) {
                return Err(Error::param(format!("{name} has non-finite entries")));
            }
            Ok(out)
        };
        let costs = flat2("costs", costs)?;
        if costs.iter().any(|&c| c < 0.0) {
            return Err(Error::param("costs must be >= 0"));
        }
        let attacker_vals = flat2("attacker_vals", attacker_vals)?;
        if defender_utils.len() != defenders {
            return Err(Error::param(format!(
                "defender_utils must have {defenders} defender tables"
            )));
        }
        let mut utils = Vec::with_capacity(defenders * m * k);
        for table in defender_utils {
            utils.extend(flat2("defender_utils", table)?);
        }
        let offsets = offsets.unwrap_or_else(|| vec![0.0; defenders]);
        if offsets.len() != defenders || offsets.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("offsets must hold one finite value per defender"));
        }
        Ok(Self {
            targets,
            configs,
            owners,
            defenders,
            costs,
            defender_utils: utils,
            attacker_vals,
            offsets,
        })
    }

    pub fn target_count(&self) -> usize {
        self.targets.len()
    }

    pub fn config_count(&self) -> usize {
        self.configs.len()
    }

    pub fn defender_count(&self) -> usize {
        self.defenders
    }

    pub fn target_ids(&self) -> &[String] {
        &self.targets
    }

    pub fn config_ids(&self) -> &[String] {
        &self.configs
    }

    pub fn owners(&self) -> &[usize] {
        &self.owners
    }

    pub fn owner(&self, target: usize) -> usize {
        self.owners[target]
    }

    /// Targets owned by `defender`, in index order.
    pub fn owned_targets(&self, defender: usize) -> impl Iterator<Item = usize> + '_ {
        self.owners
            .iter()
            .enumerate()
            .filter(move |(_, &o)| o == defender)
            .map(|(j, _)| j)
    }

    pub fn cost(&self, target: usize, config: usize) -> f64 {
        self.costs[target * self.configs.len() + config]
    }

    pub fn defender_util(&self, defender: usize, target: usize, config: usize) -> f64 {
        let (m, k) = (self.targets.len(), self.configs.len());
        self.defender_utils[(defender * m + target) * k + config]
    }

    pub fn attacker_val(&self, target: usize, config: usize) -> f64 {
        self.attacker_vals[target * self.configs.len() + config]
    }

    pub fn offset(&self, defender: usize) -> f64 {
        self.offsets[defender]
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Unflattened tables, the inverse of [`InterdependentGame::new`].
    pub fn tables(&self) -> GameTables {
        let (m, k) = (self.target_count(), self.config_count());
        let rows = |flat: &[f64]| -> Vec<Vec<f64>> { flat.chunks(k).map(<[f64]>::to_vec).collect() };
        GameTables {
            targets: self.targets.clone(),
            configs: self.configs.clone(),
            owners: self.owners.clone(),
            defenders: self.defenders,
            costs: rows(&self.costs),
            defender_utils: self.defender_utils.chunks(m * k).map(rows).collect(),
            attacker_vals: rows(&self.attacker_vals),
            offsets: Some(self.offsets.clone()),
        }
    }

    /// The same game with every target handed to a single defender whose
    /// utility is the sum of all defenders' utilities.
    pub fn merged(&self) -> Self {
        let (m, k) = (self.target_count(), self.config_count());
        let mut utils = vec![0.0; m * k];
        for d in 0..self.defenders {
            for (acc, u) in utils
                .iter_mut()
                .zip(&self.defender_utils[d * m * k..(d + 1) * m * k])
            {
                *acc += u;
            }
        }
        Self {
            targets: self.targets.clone(),
            configs: self.configs.clone(),
            owners: vec![0; m],
            defenders: 1,
            costs: self.costs.clone(),
            defender_utils: utils,
            attacker_vals: self.attacker_vals.clone(),
            offsets: vec![self.offsets.iter().sum()],
        }
    }

    /// Smallest and largest attacker value over all (target, config) pairs.
    pub fn attacker_value_range(&self) -> (f64, f64) {
        self.attacker_vals
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Index of the configuration with the lowest cost (ties: lowest index).
    pub fn cheapest_config(&self, target: usize) -> usize {
        argmin_by(self.config_count(), |o| (self.cost(target, o), 0.0))
    }

    /// Index of the most protective configuration: lowest attacker value,
    /// ties broken by higher cost and then lowest index.
    pub fn strongest_config(&self, target: usize) -> usize {
        argmin_by(self.config_count(), |o| {
            (self.attacker_val(target, o), -self.cost(target, o))
        })
    }
}

fn argmin_by(n: usize, key: impl Fn(usize) -> (f64, f64)) -> usize {
    (1..n).fold(0, |best, o| if key(o) < key(best) { o } else { best })
}

/// Labels for the two configurations used by scalar-coverage games.
pub const UNCOVERED: &str = "uncovered";
pub const COVERED: &str = "covered";

/// Encodes a homogeneous independent-target model as a two-configuration
/// game: configuration 0 leaves a target uncovered and configuration 1
/// covers it at cost `c`.
///
/// Defender utilities are stored relative to the not-attacked utility
/// `omega`, and the constant `k * omega` each defender earns is carried
/// in the defender offset. The attacker's value of a target is the
/// defender's loss relative to not being attacked.
pub fn encode_independent(params: &IndependentParams) -> Result<InterdependentGame> {
    params.validate()?;
    let (n, k) = (params.n as usize, params.k as usize);
    let m = n * k;
    let lose_uncovered = params.uu - params.omega;
    let lose_covered = params.uc - params.omega;
    let owners: Vec<usize> = (0..m).map(|j| j / k).collect();
    let defender_utils = (0..n)
        .map(|d| {
            owners
                .iter()
                .map(|&o| {
                    if o == d {
                        vec![lose_uncovered, lose_covered]
                    } else {
                        vec![0.0, 0.0]
                    }
                })
                .collect()
        })
        .collect();
    InterdependentGame::new(GameTables {
        targets: (0..m).map(|j| format!("t{j}")).collect(),
        configs: vec![UNCOVERED.to_string(), COVERED.to_string()],
        owners,
        defenders: n,
        costs: vec![vec![0.0, params.c]; m],
        defender_utils,
        attacker_vals: vec![vec![-lose_uncovered, -lose_covered]; m],
        offsets: Some(vec![params.k as f64 * params.omega; n]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_params() {
        assert!(IndependentParams::baseline(1.0, 0.0, 2).validate().is_err());
        assert!(IndependentParams::baseline(f64::NAN, 1.0, 2).validate().is_err());
        assert!(IndependentParams::multi_target(1.0, 1.0, 0, 2).validate().is_err());
        assert!(IndependentParams::general(-1.0, -2.0, -3.0, 1.0, 2, 2)
            .validate()
            .is_err());
        assert!(IndependentParams::general(-2.0, -10.0, -1.0, 1.0, 2, 2)
            .validate()
            .is_ok());
    }

    #[test]
    fn encoding_shapes() {
        let g = encode_independent(&IndependentParams::multi_target(3.0, 0.5, 2, 3)).unwrap();
        assert_eq!(g.target_count(), 6);
        assert_eq!(g.defender_count(), 2);
        assert_eq!(g.owned_targets(1).collect::<Vec<_>>(), vec![3, 4, 5]);
        assert_eq!(g.defender_util(0, 1, 0), -3.0);
        assert_eq!(g.defender_util(1, 1, 0), 0.0);
        assert_eq!(g.attacker_val(4, 0), 3.0);
        assert_eq!(g.attacker_val(4, 1), 0.0);
        assert_eq!(g.cost(2, 1), 0.5);
        assert_eq!(g.strongest_config(0), 1);
        assert_eq!(g.cheapest_config(0), 0);
    }

    #[test]
    fn merged_sums_utilities() {
        let g = encode_independent(&IndependentParams::general(-2.0, -10.0, -1.0, 1.0, 2, 2))
            .unwrap();
        let one = g.merged();
        assert_eq!(one.defender_count(), 1);
        assert_eq!(one.defender_util(0, 3, 0), -9.0);
        assert_eq!(one.offset(0), -4.0);
        let back = InterdependentGame::new(g.tables()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_ragged_tables() {
        let g = encode_independent(&IndependentParams::baseline(1.0, 2.0, 2)).unwrap();
        let mut t = g.tables();
        t.costs[1].pop();
        assert!(InterdependentGame::new(t).is_err());
        let mut t = g.tables();
        t.owners[0] = 5;
        assert!(InterdependentGame::new(t).is_err());
    }
}
