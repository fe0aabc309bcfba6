use alloc::vec::Vec;

use crate::model::{ase_utilities, CoverageProfile, InterdependentGame};
use crate::{Error, Result};

/// Best strategy found by exhaustive grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResponse {
    /// Coverage of each own target, in increasing target order.
    pub coverage: Vec<f64>,
    pub utility: f64,
}

/// Exhaustive best response for a two-configuration game: every own target's
/// coverage ranges over `0, step, 2 step, ..., 1` and each combination is
/// scored with the average-case attacker at tie tolerance `tol`.
pub fn grid_best_response(
    game: &InterdependentGame,
    defender: usize,
    profile: &CoverageProfile,
    step: f64,
    tol: f64,
) -> Result<GridResponse> {
    if game.config_count() != 2 {
        return Err(Error::param("grid search needs exactly two configurations"));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::param("grid step must be in (0, 1]"));
    }
    let own: Vec<usize> = game.owned_targets(defender).collect();
    let points = libm::round(1.0 / step) as usize;
    let mut idx = alloc::vec![0usize; own.len()];
    let mut work = profile.clone();
    let mut best = GridResponse {
        coverage: Vec::new(),
        utility: f64::NEG_INFINITY,
    };
    loop {
        let coverage: Vec<f64> = idx
            .iter()
            .map(|&i| (i as f64 * step).min(1.0))
            .collect();
        for (&j, &c) in own.iter().zip(&coverage) {
            work.set_row(j, &[1.0 - c, c])?;
        }
        let (_, utils) = ase_utilities(game, &work, tol)?;
        if utils[defender] > best.utility {
            best = GridResponse {
                coverage,
                utility: utils[defender],
            };
        }
        // Odometer increment.
        let mut pos = 0;
        while pos < idx.len() {
            idx[pos] += 1;
            if idx[pos] <= points {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == idx.len() {
            return Ok(best);
        }
    }
}
