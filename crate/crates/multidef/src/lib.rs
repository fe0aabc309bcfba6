//! File formats, reports and the experiment runner for multi-defender
//! security games. The game logic lives in `multidef-core`.

pub mod experiment;
pub mod gamefile;
pub mod graphfile;
pub mod report;
