use std::path::PathBuf;

use crate::agent::{QOperator, TrainingConfig, Variant};
use crate::envs::make_env;
use crate::{Error, Result};

pub const DEFAULT_EVAL_INTERVAL: u64 = 1000;
pub const DEFAULT_EVAL_EPISODES: usize = 10;

/// One training experiment: environment, agent variant, hyperparameters and
/// the seeds to run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub env: String,
    pub algo: Variant,
    pub training: TrainingConfig,
    pub seeds: Vec<u64>,
    pub out: Option<PathBuf>,
    /// Env steps between evaluations.
    pub eval_interval: u64,
    pub eval_episodes: usize,
}

impl ExperimentConfig {
    pub fn new(env: &str, algo: Variant, seeds: Vec<u64>) -> Result<Self> {
        let cfg = Self {
            env: env.to_string(),
            algo,
            training: TrainingConfig::for_variant(algo),
            seeds,
            out: None,
            eval_interval: DEFAULT_EVAL_INTERVAL,
            eval_episodes: DEFAULT_EVAL_EPISODES,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        make_env(&self.env)?;
        if self.seeds.is_empty() {
            return Err(Error::config("seed list is empty"));
        }
        if self.eval_interval == 0 || self.eval_episodes == 0 {
            return Err(Error::config(
                "evaluation interval and episodes must be positive",
            ));
        }
        self.training.validate(self.algo)
    }

    /// Builds a config from ordered `key = value` pairs; later pairs win.
    ///
    /// `algo` selects the defaults and may appear anywhere. `operator` and
    /// `lambda` are resolved together after all pairs are read.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let pairs: Vec<(&str, &str)> = pairs.into_iter().collect();
        let algo = match pairs.iter().rev().find(|(k, _)| *k == "algo") {
            Some((_, v)) => Variant::parse(v)?,
            None => Variant::Sqt,
        };
        let mut cfg = Self {
            env: String::new(),
            algo,
            training: TrainingConfig::for_variant(algo),
            seeds: vec![0],
            out: None,
            eval_interval: DEFAULT_EVAL_INTERVAL,
            eval_episodes: DEFAULT_EVAL_EPISODES,
        };
        let mut operator: Option<&str> = None;
        let mut lambda = 0.5;
        let t = &mut cfg.training;
        for (key, value) in pairs {
            let bad = || Error::config(format!("bad value '{value}' for '{key}'"));
            let float = || value.parse::<f64>().map_err(|_| bad());
            let uint = || value.parse::<u64>().map_err(|_| bad());
            let flag = || value.parse::<bool>().map_err(|_| bad());
            match key {
                "env" => cfg.env = value.to_string(),
                "algo" => {}
                "seeds" => cfg.seeds = parse_seeds(value)?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                "eval_interval" => cfg.eval_interval = uint()?,
                "eval_episodes" => cfg.eval_episodes = uint()? as usize,
                "gamma" => t.gamma = float()?,
                "alpha" => t.alpha = float()?,
                "n_networks" => t.n_networks = uint()? as usize,
                "operator" => operator = Some(value),
                "lambda" => lambda = float()?,
                "noise_std" => t.noise_std = float()?,
                "target_interval" => t.target_interval = uint()?,
                "batch_size" => t.batch_size = uint()? as usize,
                "updates_per_step" => t.updates_per_step = uint()? as usize,
                "actor_lr" => t.actor_lr = float()?,
                "critic_lr" => t.critic_lr = float()?,
                "lr" => {
                    t.actor_lr = float()?;
                    t.critic_lr = t.actor_lr;
                }
                "warmup_steps" => t.warmup_steps = uint()?,
                "steps" | "total_steps" => t.total_steps = uint()?,
                "hidden" | "hidden_sizes" => {
                    t.hidden_sizes = parse_list(value).map_err(|_| bad())?
                }
                "buffer_capacity" => t.buffer_capacity = uint()? as usize,
                "target_smoothing" => t.target_smoothing = flag()?,
                "target_noise_std" => t.target_noise_std = float()?,
                "target_noise_clip" => t.target_noise_clip = float()?,
                "per_element_penalty" => t.per_element_penalty = flag()?,
                "masked_penalty" => t.masked_penalty = flag()?,
                other => return Err(Error::config(format!("unknown config key '{other}'"))),
            }
        }
        if let Some(op) = operator {
            t.q_operator = QOperator::parse(op, lambda)?;
        } else if let QOperator::WeightedMinMax(_) = t.q_operator {
            t.q_operator = QOperator::WeightedMinMax(lambda);
        }
        if cfg.env.is_empty() {
            return Err(Error::config("missing 'env'"));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Splits flat `key = value` text into pairs. Blank lines and `#` comments
/// are skipped.
pub fn parse_config_pairs(text: &str) -> Result<Vec<(&str, &str)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::format(i + 1, format!("expected key = value, got '{line}'")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::format(i + 1, "empty key"));
        }
        pairs.push((k, v));
    }
    Ok(pairs)
}

/// Parses a config file, then applies `overrides` on top.
pub fn parse_config(text: &str, overrides: &[(&str, &str)]) -> Result<ExperimentConfig> {
    let mut pairs = parse_config_pairs(text)?;
    pairs.extend_from_slice(overrides);
    ExperimentConfig::from_pairs(pairs)
}

fn parse_list(s: &str) -> std::result::Result<Vec<usize>, ()> {
    let v: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| ()))
        .collect::<std::result::Result<_, _>>()?;
    if v.is_empty() || v.contains(&0) {
        return Err(());
    }
    Ok(v)
}

/// Most seeds a single spec may expand to.
pub const MAX_SEEDS: u64 = 1 << 20;

/// Parses `a..b` (inclusive of both ends), `a..=b`, a single seed, or a
/// comma-separated list of those.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::config(format!("bad seed list '{s}'"));
    let mut seeds = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let lo: u64 = a.trim().parse().map_err(|_| bad())?;
            let hi: u64 = b.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(Error::config(format!("empty seed range '{part}'")));
            }
            if hi - lo >= MAX_SEEDS || seeds.len() as u64 + (hi - lo) >= MAX_SEEDS {
                return Err(Error::config(format!("seed range '{part}' too long")));
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(seeds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("0..4").unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(parse_seeds("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert_eq!(parse_seeds("1,3..4").unwrap(), vec![1, 3, 4]);
        assert!(parse_seeds("4..0").is_err());
        assert!(parse_seeds("").is_err());
        assert!(parse_seeds("a..b").is_err());
        assert!(parse_seeds("0..18446744073709551615").is_err());
    }

    #[test]
    fn file_then_overrides() {
        let text =
            "# run\nenv = point-mass\nalgo = sqt\nalpha = 0.3\nhidden = 32,32\n\nseeds = 0..2\n";
        let cfg = parse_config(text, &[("alpha", "0.5"), ("steps", "100")]).unwrap();
        assert_eq!(cfg.env, "point-mass");
        assert_eq!(cfg.training.alpha, 0.5);
        assert_eq!(cfg.training.total_steps, 100);
        assert_eq!(cfg.training.hidden_sizes, vec![32, 32]);
        assert_eq!(cfg.seeds, vec![0, 1, 2]);
    }

    #[test]
    fn operator_and_lambda() {
        let cfg = ExperimentConfig::from_pairs([
            ("env", "pendulum"),
            ("operator", "wminmax"),
            ("lambda", "0.75"),
        ])
        .unwrap();
        assert_eq!(cfg.training.q_operator, QOperator::WeightedMinMax(0.75));
    }

    #[test]
    fn variant_defaults_follow_algo() {
        let cfg = ExperimentConfig::from_pairs([("env", "point-mass"), ("algo", "td3")]).unwrap();
        assert_eq!(cfg.training.n_networks, 2);
        assert_eq!(cfg.training.alpha, 0.0);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_pairs([("env", "nowhere")]).is_err());
        assert!(ExperimentConfig::from_pairs([("algo", "sqt")]).is_err());
        assert!(ExperimentConfig::from_pairs([("env", "point-mass"), ("algo", "ppo")]).is_err());
        assert!(ExperimentConfig::from_pairs([("env", "point-mass"), ("colour", "red")]).is_err());
        assert!(ExperimentConfig::from_pairs([("env", "point-mass"), ("alpha", "x")]).is_err());
        assert!(ExperimentConfig::from_pairs([
            ("env", "point-mass"),
            ("algo", "td3"),
            ("n_networks", "4")
        ])
        .is_err());
        assert!(parse_config_pairs("env point-mass").is_err());
    }

    proptest! {
        #[test]
        fn range_expands_inclusively(lo in 0u64..1000, len in 0u64..50) {
            let seeds = parse_seeds(&format!("{lo}..{}", lo + len)).unwrap();
            prop_assert_eq!(seeds, (lo..=lo + len).collect::<Vec<_>>());
        }

        #[test]
        fn pair_parser_never_panics(text in "\\PC{0,200}") {
            let _ = parse_config_pairs(&text);
        }
    }
}
