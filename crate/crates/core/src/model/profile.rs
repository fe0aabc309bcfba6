use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::InterdependentGame;
use crate::{Error, Result};

/// Tolerance for a configuration distribution to count as summing to one.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Every defender's distribution over configurations, one row per target.
///
/// Each target is owned by exactly one defender, so the owner is implicit
/// and a row is simply `q[target][config]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageProfile {
    configs: usize,
    q: Vec<f64>,
}

impl CoverageProfile {
    pub fn new(game: &InterdependentGame, rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = game.config_count();
        if rows.len() != game.target_count() {
            return Err(Error::InvalidProfile(format!(
                "{} rows for {} targets",
                rows.len(),
                game.target_count()
            )));
        }
        let mut q = Vec::with_capacity(rows.len() * k);
        for (j, row) in rows.into_iter().enumerate() {
            check_row(j, &row, k)?;
            q.extend(row);
        }
        Ok(Self { configs: k, q })
    }

    /// Every target puts all mass on the given configuration.
    pub fn pure(game: &InterdependentGame, config: impl Fn(usize) -> usize) -> Self {
        let k = game.config_count();
        let mut q = vec![0.0; game.target_count() * k];
        for j in 0..game.target_count() {
            q[j * k + config(j)] = 1.0;
        }
        Self { configs: k, q }
    }

    /// The no-defense corner: each target plays its cheapest configuration.
    pub fn undefended(game: &InterdependentGame) -> Self {
        Self::pure(game, |j| game.cheapest_config(j))
    }

    /// The full-defense corner: each target plays its most protective configuration.
    pub fn fully_defended(game: &InterdependentGame) -> Self {
        Self::pure(game, |j| game.strongest_config(j))
    }

    /// Scalar coverage `q` on every target of a two-configuration game
    /// (configuration 1 is "covered").
    pub fn symmetric_coverage(game: &InterdependentGame, coverage: f64) -> Result<Self> {
        if game.config_count() != 2 {
            return Err(Error::InvalidProfile(
                "scalar coverage needs exactly two configurations".into(),
            ));
        }
        Self::new(
            game,
            vec![vec![1.0 - coverage, coverage]; game.target_count()],
        )
    }

    /// Scalar coverage per target of a two-configuration game.
    pub fn from_coverage(game: &InterdependentGame, coverage: &[f64]) -> Result<Self> {
        if game.config_count() != 2 {
            return Err(Error::InvalidProfile(
                "scalar coverage needs exactly two configurations".into(),
            ));
        }
        Self::new(game, coverage.iter().map(|&c| vec![1.0 - c, c]).collect())
    }

    pub fn target_count(&self) -> usize {
        self.q.len() / self.configs
    }

    pub fn config_count(&self) -> usize {
        self.configs
    }

    pub fn row(&self, target: usize) -> &[f64] {
        &self.q[target * self.configs..(target + 1) * self.configs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.q.chunks(self.configs)
    }

    pub fn set_row(&mut self, target: usize, row: &[f64]) -> Result<()> {
        check_row(target, row, self.configs)?;
        self.q[target * self.configs..(target + 1) * self.configs].copy_from_slice(row);
        Ok(())
    }

    /// Checks the profile against a game's shape.
    pub fn check(&self, game: &InterdependentGame) -> Result<()> {
        if self.configs != game.config_count() || self.target_count() != game.target_count() {
            return Err(Error::InvalidProfile("profile does not match the game".into()));
        }
        Ok(())
    }

    /// Probability of the last configuration, the "covered" one for
    /// two-configuration games.
    pub fn coverage(&self, target: usize) -> f64 {
        self.row(target)[self.configs - 1]
    }

    /// Mean of `1 - q(cheapest config)` over targets: the average
    /// probability that some defensive configuration is in place.
    pub fn average_defense(&self, game: &InterdependentGame) -> f64 {
        let m = self.target_count();
        (0..m)
            .map(|j| 1.0 - self.row(j)[game.cheapest_config(j)])
            .sum::<f64>()
            / m as f64
    }

    /// Largest absolute difference between two profiles' entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.q
            .iter()
            .zip(&other.q)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

fn check_row(target: usize, row: &[f64], k: usize) -> Result<()> {
    if row.len() != k {
        return Err(Error::InvalidProfile(format!(
            "target {target}: {} entries for {k} configurations",
            row.len()
        )));
    }
    if row.iter().any(|&p| !(-SIMPLEX_TOL..=1.0 + SIMPLEX_TOL).contains(&p)) {
        return Err(Error::InvalidProfile(format!(
            "target {target}: probabilities outside [0, 1]"
        )));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidProfile(format!(
            "target {target}: probabilities sum to {sum}"
        )));
    }
    Ok(())
}

/// The attacker's mixed strategy: uniform over the set of best targets.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackDistribution {
    pub p: Vec<f64>,
    pub support: Vec<usize>,
}

impl AttackDistribution {
    /// Uniform distribution over `support` among `targets` targets.
    pub fn uniform(targets: usize, support: Vec<usize>) -> Self {
        let mut p = vec![0.0; targets];
        let w = 1.0 / support.len() as f64;
        for &j in &support {
            p[j] = w;
        }
        Self { p, support }
    }
}
