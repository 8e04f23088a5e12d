//! Seeded bias experiments against the value-iteration oracle.

use std::fmt;
use std::io::Write;

use super::qtable::{argmax_first, argmax_random, QTable};
use super::rules::{
    beta_pessimistic_target, double_q_step, maxmin_target, minimax_q_step, q_kappa_delta,
    q_learning_step,
};
use super::value_iteration::value_iteration;
use crate::envs::TabularMdp;
use crate::numerics::Rng;
use crate::{Error, Result};

/// Exploration rate of the epsilon-greedy behavior policy.
pub const EPSILON: f64 = 0.5;
pub const LEARNING_RATE: f64 = 0.1;
/// Episodes that have not terminated after this many steps are cut off.
pub const EPISODE_STEP_CAP: usize = 100;
const ORACLE_TOL: f64 = 1e-12;
const OPTIMAL_TIE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TabularAlgo {
    Q,
    DoubleQ,
    MaxMin(usize),
    BetaPessimistic(f64),
    QKappa(f64),
    MiniMax,
}

impl TabularAlgo {
    /// Parses `q`, `double_q`, `maxmin:N`, `beta:B`, `q_kappa:K` or `minimax`.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = |what: &str| -> Result<f64> {
            let a = arg
                .ok_or_else(|| Error::config(format!("{name} needs a {what}, e.g. {name}:0.5")))?;
            a.parse::<f64>()
                .map_err(|_| Error::config(format!("bad {what} '{a}' for {name}")))
        };
        let unit = |v: f64, what: &str| -> Result<f64> {
            if (0.0..=1.0).contains(&v) {
                Ok(v)
            } else {
                Err(Error::config(format!("{what} must lie in [0, 1], got {v}")))
            }
        };
        let algo = match name {
            "q" => TabularAlgo::Q,
            "double_q" => TabularAlgo::DoubleQ,
            "minimax" => TabularAlgo::MiniMax,
            "maxmin" => {
                let a =
                    arg.ok_or_else(|| Error::config("maxmin needs a table count, e.g. maxmin:2"))?;
                let n: usize = a
                    .parse()
                    .map_err(|_| Error::config(format!("bad table count '{a}' for maxmin")))?;
                if n == 0 {
                    return Err(Error::config("maxmin needs at least one table"));
                }
                TabularAlgo::MaxMin(n)
            }
            "beta" | "beta_pessimistic" => {
                TabularAlgo::BetaPessimistic(unit(num("beta")?, "beta")?)
            }
            "q_kappa" => TabularAlgo::QKappa(unit(num("kappa")?, "kappa")?),
            other => {
                return Err(Error::config(format!(
                    "unknown tabular algorithm '{other}'"
                )))
            }
        };
        if arg.is_some()
            && matches!(
                algo,
                TabularAlgo::Q | TabularAlgo::DoubleQ | TabularAlgo::MiniMax
            )
        {
            return Err(Error::config(format!("{name} takes no parameter")));
        }
        Ok(algo)
    }
}

impl fmt::Display for TabularAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TabularAlgo::Q => write!(f, "q"),
            TabularAlgo::DoubleQ => write!(f, "double_q"),
            TabularAlgo::MaxMin(n) => write!(f, "maxmin:{n}"),
            TabularAlgo::BetaPessimistic(b) => write!(f, "beta:{b}"),
            TabularAlgo::QKappa(k) => write!(f, "q_kappa:{k}"),
            TabularAlgo::MiniMax => write!(f, "minimax"),
        }
    }
}

/// Learner state for one seed.
struct Learner {
    algo: TabularAlgo,
    tables: Vec<QTable>,
    epsilon: f64,
}

impl Learner {
    fn new(algo: TabularAlgo, mdp: &TabularMdp, epsilon: f64) -> Self {
        let n = match algo {
            TabularAlgo::DoubleQ => 2,
            TabularAlgo::MaxMin(n) => n,
            _ => 1,
        };
        Self {
            algo,
            tables: vec![QTable::for_mdp(mdp); n],
            epsilon,
        }
    }

    /// Values used for acting and reported as the estimate.
    fn estimate_row(&self, s: usize) -> Vec<f64> {
        let first = self.tables[0].row(s);
        match self.algo {
            TabularAlgo::DoubleQ => first
                .iter()
                .zip(self.tables[1].row(s))
                .map(|(a, b)| 0.5 * (a + b))
                .collect(),
            TabularAlgo::MaxMin(_) => (0..first.len())
                .map(|a| {
                    self.tables
                        .iter()
                        .map(|t| t.row(s)[a])
                        .fold(f64::INFINITY, f64::min)
                })
                .collect(),
            _ => first.to_vec(),
        }
    }

    fn act(&self, s: usize, rng: &mut Rng) -> usize {
        let row = self.estimate_row(s);
        if rng.unit() < self.epsilon {
            rng.below(row.len())
        } else {
            argmax_random(&row, rng)
        }
    }

    fn learn(
        &mut self,
        s: usize,
        a: usize,
        r: f64,
        next: Option<usize>,
        gamma: f64,
        rng: &mut Rng,
    ) -> Result<()> {
        let lr = LEARNING_RATE;
        match self.algo {
            TabularAlgo::Q => q_learning_step(&mut self.tables[0], s, a, r, next, lr, gamma),
            TabularAlgo::DoubleQ => {
                let (qa, qb) = self.tables.split_at_mut(1);
                double_q_step(&mut qa[0], &mut qb[0], s, a, r, next, lr, gamma, rng).map(|_| ())
            }
            TabularAlgo::MaxMin(n) => {
                let y = maxmin_target(&self.tables, next, r, gamma)?;
                let t = &mut self.tables[rng.below(n)];
                let old = t.get(s, a)?;
                t.set(s, a, old + lr * (y - old))
            }
            TabularAlgo::BetaPessimistic(beta) => {
                let q = &mut self.tables[0];
                let y = beta_pessimistic_target(q, next, r, gamma, beta)?;
                let old = q.get(s, a)?;
                q.set(s, a, (1.0 - lr) * old + lr * y)
            }
            TabularAlgo::QKappa(kappa) => {
                let q = &mut self.tables[0];
                let delta = q_kappa_delta(q, s, a, r, next, gamma, kappa)?;
                let old = q.get(s, a)?;
                q.set(s, a, old + lr * delta)
            }
            TabularAlgo::MiniMax => minimax_q_step(&mut self.tables[0], s, a, r, next, gamma),
        }
    }
}

/// Outcome of one seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedResult {
    pub seed: u64,
    /// Final estimated `Q(start, .)`.
    pub estimates: Vec<f64>,
    /// Mean over start actions of `estimate - Q*`.
    pub deviation: f64,
    /// Greedy start action is not optimal under `Q*`.
    pub suboptimal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiasReport {
    pub algo: TabularAlgo,
    /// Exact `Q*(start, .)`.
    pub optimal: Vec<f64>,
    pub seeds: Vec<SeedResult>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BiasDirection {
    Over,
    Under,
    Unbiased,
}

impl fmt::Display for BiasDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BiasDirection::Over => "over-biased",
            BiasDirection::Under => "under-biased",
            BiasDirection::Unbiased => "not biased",
        })
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Over or under if the mean sits more than three standard errors from zero.
pub fn classify(xs: &[f64]) -> BiasDirection {
    let (mean, se) = mean_and_se(xs);
    if mean > 3.0 * se {
        BiasDirection::Over
    } else if mean < -3.0 * se {
        BiasDirection::Under
    } else {
        BiasDirection::Unbiased
    }
}

impl BiasReport {
    pub fn deviations(&self) -> Vec<f64> {
        self.seeds.iter().map(|s| s.deviation).collect()
    }

    /// Per-seed estimates of `Q(start, a)`.
    pub fn action_estimates(&self, a: usize) -> Vec<f64> {
        self.seeds.iter().map(|s| s.estimates[a]).collect()
    }

    pub fn mean_deviation(&self) -> f64 {
        mean_and_se(&self.deviations()).0
    }

    pub fn suboptimal_fraction(&self) -> f64 {
        if self.seeds.is_empty() {
            return 0.0;
        }
        self.seeds.iter().filter(|s| s.suboptimal).count() as f64 / self.seeds.len() as f64
    }

    pub fn direction(&self) -> BiasDirection {
        classify(&self.deviations())
    }

    pub fn rows(&self) -> Vec<BiasRow> {
        self.seeds
            .iter()
            .map(|s| BiasRow {
                seed: s.seed,
                algo: self.algo.to_string(),
                deviation: s.deviation,
                suboptimal: s.suboptimal,
            })
            .collect()
    }

    /// One line: algorithm, mean deviation with its standard error, direction.
    pub fn summary(&self) -> String {
        let (mean, se) = mean_and_se(&self.deviations());
        format!(
            "{}: mean deviation {:+.4} (se {:.4}), suboptimal {:.2}, {}",
            self.algo,
            mean,
            se,
            self.suboptimal_fraction(),
            self.direction()
        )
    }
}

/// Runs `algo` for `episodes` episodes on each of the seeds `0..seeds`.
pub fn bias_experiment(
    mdp: &TabularMdp,
    algo: TabularAlgo,
    episodes: usize,
    seeds: u64,
) -> Result<BiasReport> {
    bias_experiment_with(mdp, algo, episodes, seeds, EPSILON)
}

/// [`bias_experiment`] with an explicit exploration rate.
pub fn bias_experiment_with(
    mdp: &TabularMdp,
    algo: TabularAlgo,
    episodes: usize,
    seeds: u64,
    epsilon: f64,
) -> Result<BiasReport> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::config(format!(
            "epsilon must lie in [0, 1], got {epsilon}"
        )));
    }
    let q_star = value_iteration(mdp, ORACLE_TOL)?;
    let start = mdp.start_state();
    let optimal = q_star.row(start).to_vec();
    let best = q_star.max(start);
    let mut results = Vec::with_capacity(seeds as usize);
    for seed in 0..seeds {
        let mut rng = Rng::new(seed);
        let mut learner = Learner::new(algo, mdp, epsilon);
        for _ in 0..episodes {
            run_episode(mdp, &mut learner, &mut rng)?;
        }
        let estimates = learner.estimate_row(start);
        let deviation = if estimates.is_empty() {
            0.0
        } else {
            estimates
                .iter()
                .zip(&optimal)
                .map(|(e, o)| e - o)
                .sum::<f64>()
                / estimates.len() as f64
        };
        let suboptimal =
            !estimates.is_empty() && optimal[argmax_first(&estimates)] < best - OPTIMAL_TIE;
        results.push(SeedResult {
            seed,
            estimates,
            deviation,
            suboptimal,
        });
    }
    Ok(BiasReport {
        algo,
        optimal,
        seeds: results,
    })
}

fn run_episode(mdp: &TabularMdp, learner: &mut Learner, rng: &mut Rng) -> Result<()> {
    let mut s = mdp.start_state();
    for _ in 0..EPISODE_STEP_CAP {
        if mdp.is_terminal(s) {
            break;
        }
        let a = learner.act(s, rng);
        let (sp, r) = mdp.sample_step(s, a, rng)?;
        let next = (!mdp.is_terminal(sp)).then_some(sp);
        learner.learn(s, a, r, next, mdp.gamma(), rng)?;
        s = sp;
    }
    Ok(())
}

/// One CSV row of a bias report.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasRow {
    pub seed: u64,
    pub algo: String,
    pub deviation: f64,
    pub suboptimal: bool,
}

pub const BIAS_CSV_HEADER: &str = "seed,algo,deviation,suboptimal_flag";

pub fn write_bias_csv<W: Write>(mut w: W, rows: &[BiasRow]) -> Result<()> {
    writeln!(w, "{BIAS_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{:e},{}",
            r.seed,
            r.algo,
            r.deviation,
            u8::from(r.suboptimal)
        )?;
    }
    Ok(())
}

pub fn parse_bias_csv(text: &str) -> Result<Vec<BiasRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == BIAS_CSV_HEADER => {}
        _ => {
            return Err(Error::format(
                1,
                format!("expected header '{BIAS_CSV_HEADER}'"),
            ))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let n = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::format(
                n,
                format!("expected 4 fields, got {}", fields.len()),
            ));
        }
        let seed = fields[0]
            .parse()
            .map_err(|_| Error::format(n, format!("bad seed '{}'", fields[0])))?;
        let algo = fields[1].to_string();
        if algo.is_empty() {
            return Err(Error::format(n, "empty algo"));
        }
        let deviation: f64 = fields[2]
            .parse()
            .map_err(|_| Error::format(n, format!("bad deviation '{}'", fields[2])))?;
        if !deviation.is_finite() {
            return Err(Error::format(n, "non-finite deviation"));
        }
        let suboptimal = match fields[3] {
            "0" => false,
            "1" => true,
            other => return Err(Error::format(n, format!("bad flag '{other}'"))),
        };
        rows.push(BiasRow {
            seed,
            algo,
            deviation,
            suboptimal,
        });
    }
    Ok(rows)
}
