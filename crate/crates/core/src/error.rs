use alloc::boxed::Box;
use alloc::string::String;

use crate::lp::MipSolution;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown target {0}")]
    UnknownTarget(usize),
    #[error("game has no targets")]
    NoTargets,
    #[error("invalid coverage profile: {0}")]
    InvalidProfile(String),
    #[error("price of anarchy is undefined for SW_O = {sw_opt}, SW_E = {sw_eq}")]
    UndefinedPoa { sw_opt: f64, sw_eq: f64 },
    #[error("closed form does not apply: {0}")]
    ClosedFormInapplicable(String),
    #[error("{reachable} edges reachable from the source exceed the exact enumeration cap of {cap}; use Monte Carlo")]
    CascadeCapExceeded { reachable: usize, cap: usize },
    #[error("best-response program configuration: {0}")]
    MilpConfig(String),
    #[error("program is infeasible")]
    Infeasible,
    #[error("program is unbounded")]
    Unbounded,
    #[error("{what} limit of {limit} reached")]
    ResourceLimit {
        what: &'static str,
        limit: usize,
        incumbent: Option<Box<MipSolution>>,
    },
    #[error("best-response utility {milp} disagrees with simulated utility {simulated}")]
    UtilityMismatch { milp: f64, simulated: f64 },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
