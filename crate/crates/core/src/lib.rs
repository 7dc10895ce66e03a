//! Budgeted selection among self-learning experts.
//!
//! The [`meta`] engine runs the M-LCB procedure: each round it trains the `M`
//! experts with the lowest lower confidence bounds and plays the safe advice of
//! the trained expert with the lowest upper confidence bound.

pub mod baselines;
pub mod confidence;
pub mod domain;
pub mod environments;
pub mod error;
pub mod experts;
pub mod harness;
pub mod link;
pub mod meta;
pub mod metrics;
pub mod rng;

pub use error::{Error, Result};
