//! Closed-form equilibria and price of anarchy for the homogeneous
//! independent-target models.
//!
//! All three models are solved through the general one: the baseline and
//! multi-target models are the special case `uc = 0`, `uu = -v`,
//! `omega = 0` (with `k = 1` for the baseline), so their results agree with
//! the general formulas bit for bit.

use alloc::format;

use crate::model::{epsilon_poa, IndependentParams, ModelKind};
use crate::{Error, Result};

/// Whether a price of anarchy compares against an exact or an approximate equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoaKind {
    Exact,
    EpsilonApprox,
}

impl PoaKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PoaKind::Exact => "exact",
            PoaKind::EpsilonApprox => "epsilon",
        }
    }
}

/// Symmetric equilibrium (or best ε-equilibrium) of a homogeneous model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticResult {
    pub ne_exists: bool,
    /// Coverage probability every target receives.
    pub coverage: f64,
    pub epsilon: f64,
    pub sw_eq: f64,
    pub sw_opt: f64,
    /// `None` when utilities are not all non-positive or welfare is zero.
    pub poa: Option<f64>,
    pub poa_kind: PoaKind,
}

/// Limits of the general model's (ε-)PoA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralLimits {
    /// PoA as `n → ∞` (exact equilibrium branch), `None` when `omega = 0`
    /// (unbounded).
    pub poa_n_inf: Option<f64>,
    /// ε-PoA as `n → ∞`, `None` when `omega = 0`.
    pub epsilon_poa_n_inf: Option<f64>,
    /// ε-PoA as `k → ∞`: 1 when `omega < 0`, `n + 1` when `omega = 0`.
    pub epsilon_poa_k_inf: f64,
}

fn expect_model(p: &IndependentParams, model: ModelKind) -> Result<()> {
    if p.model != model {
        return Err(Error::param(format!("expected {model:?} parameters, got {:?}", p.model)));
    }
    Ok(())
}

pub fn baseline_solve(p: &IndependentParams) -> Result<AnalyticResult> {
    expect_model(p, ModelKind::Baseline)?;
    solve(p)
}

pub fn multitarget_solve(p: &IndependentParams) -> Result<AnalyticResult> {
    expect_model(p, ModelKind::MultiTarget)?;
    solve(p)
}

pub fn general_solve(p: &IndependentParams) -> Result<AnalyticResult> {
    expect_model(p, ModelKind::General)?;
    solve(p)
}

/// Dispatches on `p.model`.
pub fn solve(p: &IndependentParams) -> Result<AnalyticResult> {
    p.validate()?;
    if p.n < 2 {
        return Err(Error::ClosedFormInapplicable(
            "the closed forms need at least two defenders".into(),
        ));
    }
    let (n, k, c) = (f64::from(p.n), f64::from(p.k), p.c);
    let (uc, uu, om) = (p.uc, p.uu, p.omega);
    let kc = k * c;
    let nk = n * k;

    let ne_exists = uc - uu >= kc - (n - 1.0) * (om - uc) / n;
    let (coverage, epsilon, sw_eq) = if ne_exists {
        (1.0, 0.0, uc - nk * c + (nk - 1.0) * om)
    } else {
        let q = (om - uu) / kc;
        if q > 1.0 {
            return Err(Error::ClosedFormInapplicable(format!(
                "approximate equilibrium coverage {q} exceeds 1"
            )));
        }
        let eps = (om - uu) * (kc - uc + uu) / (c * nk);
        let sw = (uc - uu - nk * c) * q + uu + (nk - 1.0) * om;
        (q, eps, sw)
    };
    let sw_opt = if uc - uu >= nk * c {
        uc - nk * c + (nk - 1.0) * om
    } else {
        uu + (nk - 1.0) * om
    };
    let poa = if uc <= 0.0 && uu <= 0.0 && om <= 0.0 {
        epsilon_poa(sw_opt, sw_eq).ok()
    } else {
        None
    };
    Ok(AnalyticResult {
        ne_exists,
        coverage,
        epsilon,
        sw_eq,
        sw_opt,
        poa,
        poa_kind: if ne_exists {
            PoaKind::Exact
        } else {
            PoaKind::EpsilonApprox
        },
    })
}

pub fn general_limits(p: &IndependentParams) -> Result<GeneralLimits> {
    p.validate()?;
    let (k, c) = (f64::from(p.k), p.c);
    let (uu, om) = (p.uu, p.omega);
    if om > 0.0 {
        return Err(Error::ClosedFormInapplicable(
            "limits are derived for non-positive utilities".into(),
        ));
    }
    let nonzero = om != 0.0;
    Ok(GeneralLimits {
        poa_n_inf: nonzero.then(|| 1.0 - c / om),
        epsilon_poa_n_inf: nonzero.then(|| 1.0 + (uu - om) / (k * om)),
        epsilon_poa_k_inf: if nonzero { 1.0 } else { f64::from(p.n) + 1.0 },
    })
}

/// Utility of one defender when every target has coverage `q`.
fn symmetric_utility(p: &IndependentParams, q: f64) -> f64 {
    let (n, k, c) = (f64::from(p.n), f64::from(p.k), p.c);
    ((p.uc - p.uu - n * k * c) * q + p.uu + (n * k - 1.0) * p.omega) / n
}

/// Raising every own target above the others diverts the attack entirely.
fn raised_utility(p: &IndependentParams, q: f64) -> f64 {
    let k = f64::from(p.k);
    k * p.omega - k * q * p.c
}

/// Lowering every own target below the others draws the whole attack.
fn lowered_utility(p: &IndependentParams, q: f64) -> f64 {
    let k = f64::from(p.k);
    q * p.uc + (1.0 - q) * p.uu + (k - 1.0) * p.omega - k * q * p.c
}

/// Largest gain of one defender who moves all its targets from the common
/// coverage `q` to another common coverage, floored at zero.
///
/// Any raise diverts the attack to the other defenders and any cut draws all
/// of it. Both deviation utilities are linear in the new coverage, so their
/// supremum over an ever finer deviation grid is attained at the ends of
/// each direction: an arbitrarily small step (the one-sided limit at `q`)
/// or the full move to 1 or 0. `step` is the resolution of the caller's
/// grid over `q`.
pub fn symmetric_regret_oracle(p: &IndependentParams, q: f64, step: f64) -> Result<f64> {
    p.validate()?;
    if !(step > 0.0 && step <= 0.01) {
        return Err(Error::param("grid step must be in (0, 0.01]"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::param("coverage must be in [0, 1]"));
    }
    let base = symmetric_utility(p, q);
    let mut gain: f64 = 0.0;
    if q < 1.0 {
        for to in [q, 1.0] {
            gain = gain.max(raised_utility(p, to) - base);
        }
    }
    if q > 0.0 {
        for to in [q, 0.0] {
            gain = gain.max(lowered_utility(p, to) - base);
        }
    }
    Ok(gain)
}
