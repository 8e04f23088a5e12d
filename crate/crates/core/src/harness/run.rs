use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::ExperimentConfig;
use super::records::{
    write_run_header, write_run_row, write_summary_csv, EvalRow, RunRecord, SummaryRow,
};
use crate::agent::{evaluate, Agent, Trainer};
use crate::envs::make_env;
use crate::numerics::Rng;
use crate::Result;

/// Evaluation streams start here so they never meet the training streams.
const EVAL_STREAM_BASE: u64 = 1 << 32;

/// Start states for the evaluation at `step` depend only on `seed` and
/// `step`, so every variant is scored on the same episodes.
pub fn eval_rng(seed: u64, step: u64) -> Rng {
    Rng::new(seed).fork(EVAL_STREAM_BASE + step)
}

/// Env steps at which `run_seed` evaluates: every `interval` steps, plus the
/// last step if it is not a multiple.
pub fn eval_steps(total: u64, interval: u64) -> Vec<u64> {
    let mut steps: Vec<u64> = (1..=total / interval).map(|k| k * interval).collect();
    if total > 0 && !total.is_multiple_of(interval) {
        steps.push(total);
    }
    steps
}

/// Trains and evaluates one seed, handing each evaluation row to `sink` as
/// soon as it exists. Training failures end the run early and are recorded;
/// sink failures are returned.
pub fn run_seed(
    cfg: &ExperimentConfig,
    seed: u64,
    sink: &mut dyn FnMut(&EvalRow) -> Result<()>,
) -> Result<RunRecord> {
    let started = Instant::now();
    let mut record = RunRecord {
        seed,
        evaluations: Vec::new(),
        episode_returns: Vec::new(),
        wall_clock: Default::default(),
        error: None,
    };
    let mut env = make_env(&cfg.env)?;
    let mut eval_env = make_env(&cfg.env)?;
    let mut agent = match Agent::new(
        cfg.algo,
        cfg.training.clone(),
        env.state_dim(),
        env.action_low(),
        env.action_high(),
        seed,
    ) {
        Ok(a) => a,
        Err(e) => {
            record.error = Some(e);
            record.wall_clock = started.elapsed();
            return Ok(record);
        }
    };
    let mut trainer = Trainer::new(seed);
    let total = cfg.training.total_steps;
    let (mut penalty_sum, mut loss_sum, mut n_updates) = (0.0, 0.0, 0usize);
    let mut next_eval = eval_steps(total, cfg.eval_interval).into_iter().peekable();
    for step in 1..=total {
        let report = match trainer.advance(&mut agent, env.as_mut()) {
            Ok(r) => r,
            Err(e) => {
                record.error = Some(e);
                break;
            }
        };
        for u in &report.updates {
            penalty_sum += u.targets.batch_penalty;
            loss_sum += u.critic_loss;
            n_updates += 1;
        }
        if let Some(ep) = report.episode {
            record.episode_returns.push(ep.episode_return);
        }
        if next_eval.peek() == Some(&step) {
            next_eval.next();
            let mut rng = eval_rng(seed, step);
            let eval_return = match evaluate(&agent, eval_env.as_mut(), cfg.eval_episodes, &mut rng)
            {
                Ok(v) => v,
                Err(e) => {
                    record.error = Some(e.at_step(step));
                    break;
                }
            };
            let n = n_updates.max(1) as f64;
            let row = EvalRow {
                seed,
                step,
                eval_return,
                mean_penalty: penalty_sum / n,
                critic_loss: loss_sum / n,
            };
            (penalty_sum, loss_sum, n_updates) = (0.0, 0.0, 0);
            sink(&row)?;
            record.evaluations.push(row);
        }
    }
    record.wall_clock = started.elapsed();
    Ok(record)
}

/// Runs every seed in order. With `cfg.out` set, rows are appended to that
/// CSV as they are produced and a per-seed summary goes to
/// [`summary_path`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let mut out = match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_run_header(&mut w)?;
            w.flush()?;
            Some(w)
        }
        None => None,
    };
    let mut records = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let mut sink = |row: &EvalRow| -> Result<()> {
            if let Some(w) = out.as_mut() {
                write_run_row(w, row)?;
                w.flush()?;
            }
            Ok(())
        };
        records.push(run_seed(cfg, seed, &mut sink)?);
    }
    if let Some(path) = &cfg.out {
        let file = File::create(summary_path(path))?;
        write_summary_csv(BufWriter::new(file), &summary_rows(cfg, &records))?;
    }
    Ok(records)
}

/// `runs.csv` -> `runs.summary.csv`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.csv")
}

/// One row per seed that reached at least one evaluation.
pub fn summary_rows(cfg: &ExperimentConfig, records: &[RunRecord]) -> Vec<SummaryRow> {
    records
        .iter()
        .filter_map(|r| {
            r.max_snapshot().map(|m| SummaryRow {
                env: cfg.env.clone(),
                algo: cfg.algo.name().to_string(),
                seed: r.seed,
                max_snapshot: m,
            })
        })
        .collect()
}
