//! Ensemble actor-critic reinforcement learning with a conservative
//! std-of-ensemble Q-target, and a tabular workbench for measuring
//! over- and under-estimation bias against exact oracles.
//!
//! Modules, bottom-up:
//!
//! - [`numerics`]: dense MLPs, backprop, Adam and a seeded RNG.
//! - [`envs`]: point-mass and pendulum tasks, finite MDPs.
//! - [`replay`]: FIFO replay buffer.
//! - [`agent`]: ensemble critics, the penalty, DPG actor and training loop.
//! - [`tabular`]: value iteration and tabular update rules.
//! - [`harness`]: experiment orchestration, CSV records and comparisons.

// `!(x >= 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agent;
pub mod envs;
mod error;
pub mod harness;
pub mod numerics;
pub mod replay;
pub mod tabular;

pub use error::{Error, Result};
