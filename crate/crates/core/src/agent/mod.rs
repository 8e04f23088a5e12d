//! Ensemble actor-critic agents with the std-of-ensemble target penalty.
//!
//! One [`Agent`] type covers DDPG (`N = 1`, mean), TD3 (`N = 2`, min) and
//! SQT (`N >= 1`, any operator, `alpha >= 0`). Each gradient iteration:
//!
//! 1. samples a batch uniformly from replay;
//! 2. builds `y = r + gamma (1 - done) Q[Q'](s', mu'(s')) - alpha * SQT[B]`, where
//!    `SQT[B]` is the batch mean of the per-sample population std across
//!    the target critics at `(s', a')`;
//! 3. takes one Adam step per critic on `(Q_i(s, a) - y)^2`;
//! 4. takes one Adam ascent step for the actor on the ensemble-mean Q;
//! 5. hard-copies live parameters into the targets every `target_interval`
//!    iterations.

mod actor;
mod batch;
pub mod checkpoint;
mod config;
mod critic;
mod estimation;
mod learner;
mod ops;
mod train;

pub use actor::ActorPolicy;
pub use batch::{concat_rows, Batch};
pub use checkpoint::Checkpoint;
pub use config::{QOperator, TrainingConfig, Variant};
pub use critic::EnsembleCritic;
pub use estimation::{noisy_max, noisy_min_of_max, NoisyEstimate};
pub use learner::{Agent, TargetBreakdown, UpdateStats};
pub use ops::{ensemble_std, q_operator_apply, sqt_penalty_from_values};
pub use train::{evaluate, train, EpisodeRecord, StepReport, Trainer};
