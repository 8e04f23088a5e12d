//! Tabular workbench: Q-tables, the update-rule catalog, an exact
//! value-iteration oracle and seeded bias experiments.

mod experiment;
mod qtable;
mod rules;
mod value_iteration;

pub use experiment::{
    bias_experiment, bias_experiment_with, classify, mean_and_se, parse_bias_csv, write_bias_csv,
    BiasDirection, BiasReport, BiasRow, SeedResult, TabularAlgo, BIAS_CSV_HEADER, EPISODE_STEP_CAP,
    EPSILON, LEARNING_RATE,
};
pub use qtable::{argmax_random, cpi_mix, QTable, TabularPolicy};
pub use rules::{
    beta_pessimistic_target, double_q_step, double_q_update, maxmin_target, minimax_q_step,
    q_kappa_delta, q_learning_step, Updated,
};
pub use value_iteration::{bellman_backup, bellman_residual, value_iteration, MAX_SWEEPS};
