//! Desk-scale environments: continuous-control tasks and finite MDPs.

mod continuous;
mod tabular;

pub use continuous::{make_env, wrap_angle, ContinuousEnv, Pendulum, PointMass, Step};
pub use tabular::{
    make_maximization_bias_mdp, make_maximization_bias_mdp_with_gamma, make_mdp, MdpSpec,
    TabularMdp, MAX_BIAS_A, MAX_BIAS_B, MAX_BIAS_GO, MAX_BIAS_STOP, MAX_BIAS_TERMINAL,
};
