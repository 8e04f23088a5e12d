//! Dense network substrate: parameters, backprop, Adam and the seeded RNG.

mod adam;
mod mlp;
mod rng;

pub use adam::{adam_step, AdamState, BETA1, BETA2, EPSILON};
pub use mlp::{Activation, Backprop, MlpParams, OutputActivation, Tape};
pub use rng::Rng;
