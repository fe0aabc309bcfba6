//! Multi-defender Stackelberg security games.
//!
//! The crate is `no_std` (it needs `alloc`) and has no IO. It covers:
//!
//! - [`model`]: game representations, the average-case (uniform tie-breaking)
//!   attacker response, defender utilities, regret, welfare and price of anarchy.
//! - [`analytic`]: closed forms for the homogeneous independent-target models
//!   together with a brute-force symmetric deviation oracle.
//! - [`cascade`]: independent-cascade contagion on dependency graphs and the
//!   utility tables derived from it.
//! - [`lp`] and [`milp`]: a dense bounded simplex, branch and bound, and the
//!   best-response program for one defender.
//! - [`search`]: random search, simulated annealing, iterated best response
//!   and iterated best response with restarts.
//! - [`netgen`]: synthetic topologies, balanced partitioning and closeness.
#![no_std]

extern crate alloc;

pub mod analytic;
pub mod cascade;
mod error;
pub mod games;
pub mod lp;
pub mod milp;
pub mod model;
pub mod netgen;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
