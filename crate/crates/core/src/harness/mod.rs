//! Experiment harness: configs, multi-seed runs with periodic greedy
//! evaluation, CSV records and improvement tables.

mod compare;
mod config;
mod records;
mod run;

pub use compare::{
    compare, compare_sets, percent_improvement, ComparisonRow, ComparisonTable, ResultSet,
    RUN_LABEL,
};
pub use config::{
    parse_config, parse_config_pairs, parse_seeds, ExperimentConfig, DEFAULT_EVAL_EPISODES,
    DEFAULT_EVAL_INTERVAL, MAX_SEEDS,
};
pub use records::{
    parse_run_csv, parse_summary_csv, write_run_csv, write_run_header, write_run_row,
    write_summary_csv, EvalRow, RunRecord, SummaryRow, RUN_CSV_HEADER, SUMMARY_CSV_HEADER,
};
pub use run::{eval_rng, eval_steps, run_experiment, run_seed, summary_path, summary_rows};
