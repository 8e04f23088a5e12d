use crate::{Error, Result};

/// Agent family. All three share one code path and differ only in
/// configuration, see [`TrainingConfig::for_variant`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Ddpg,
    Td3,
    Sqt,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Ddpg => "ddpg",
            Variant::Td3 => "td3",
            Variant::Sqt => "sqt",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ddpg" => Ok(Variant::Ddpg),
            "td3" => Ok(Variant::Td3),
            "sqt" => Ok(Variant::Sqt),
            other => Err(Error::config(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Reduction across ensemble members for each batch element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QOperator {
    Min,
    Mean,
    /// `lambda * min + (1 - lambda) * max`
    WeightedMinMax(f64),
}

impl QOperator {
    pub fn name(self) -> &'static str {
        match self {
            QOperator::Min => "min",
            QOperator::Mean => "mean",
            QOperator::WeightedMinMax(_) => "wminmax",
        }
    }

    /// Parses `min`, `mean` or `wminmax` (the latter taking `lambda`).
    pub fn parse(s: &str, lambda: f64) -> Result<Self> {
        let op = match s {
            "min" => QOperator::Min,
            "mean" => QOperator::Mean,
            "wminmax" => QOperator::WeightedMinMax(lambda),
            other => return Err(Error::config(format!("unknown Q operator '{other}'"))),
        };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(self) -> Result<()> {
        match self {
            QOperator::WeightedMinMax(l) if !(0.0..=1.0).contains(&l) => Err(Error::config(
                format!("weighted min/max lambda must lie in [0, 1], got {l}"),
            )),
            _ => Ok(()),
        }
    }
}

/// Every hyperparameter of a training run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingConfig {
    pub gamma: f64,
    /// Weight of the ensemble-std penalty in the Q-target.
    pub alpha: f64,
    pub n_networks: usize,
    pub q_operator: QOperator,
    /// Exploration noise std, in units of the action half-range.
    pub noise_std: f64,
    /// Gradient iterations between hard target copies.
    pub target_interval: u64,
    pub batch_size: usize,
    /// Gradient iterations per environment step.
    pub updates_per_step: usize,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub warmup_steps: u64,
    pub total_steps: u64,
    pub hidden_sizes: Vec<usize>,
    pub buffer_capacity: usize,
    /// Clipped Gaussian noise on target actions (td3/sqt only).
    pub target_smoothing: bool,
    pub target_noise_std: f64,
    pub target_noise_clip: f64,
    /// Ablation: subtract each element's own ensemble std instead of the batch mean.
    pub per_element_penalty: bool,
    /// Ablation: put the penalty inside the discount and termination mask.
    pub masked_penalty: bool,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self::for_variant(Variant::Sqt)
    }
}

impl TrainingConfig {
    /// Defaults for a variant; ddpg and td3 are pinned to their defining
    /// ensemble size, operator and zero penalty.
    pub fn for_variant(variant: Variant) -> Self {
        let base = TrainingConfig {
            gamma: 0.99,
            alpha: 0.1,
            n_networks: 4,
            q_operator: QOperator::Min,
            noise_std: 0.1,
            target_interval: 250,
            batch_size: 256,
            updates_per_step: 1,
            actor_lr: 3e-4,
            critic_lr: 3e-4,
            warmup_steps: 1000,
            total_steps: 100_000,
            hidden_sizes: vec![256, 256],
            buffer_capacity: 1_000_000,
            target_smoothing: true,
            target_noise_std: 0.2,
            target_noise_clip: 0.5,
            per_element_penalty: false,
            masked_penalty: false,
        };
        match variant {
            Variant::Sqt => base,
            Variant::Td3 => TrainingConfig {
                alpha: 0.0,
                n_networks: 2,
                q_operator: QOperator::Min,
                ..base
            },
            Variant::Ddpg => TrainingConfig {
                alpha: 0.0,
                n_networks: 1,
                q_operator: QOperator::Mean,
                target_smoothing: false,
                ..base
            },
        }
    }

    pub fn validate(&self, variant: Variant) -> Result<()> {
        let fail = |m: String| Err(Error::config(m));
        if !(0.0..1.0).contains(&self.gamma) {
            return fail(format!("gamma must lie in [0, 1), got {}", self.gamma));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return fail(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if self.n_networks == 0 {
            return fail("n_networks must be >= 1".into());
        }
        self.q_operator.validate()?;
        if !(self.noise_std >= 0.0)
            || !(self.target_noise_std >= 0.0)
            || !(self.target_noise_clip >= 0.0)
        {
            return fail("noise scales must be >= 0".into());
        }
        if self.target_interval == 0 {
            return fail("target_interval must be positive".into());
        }
        if self.batch_size == 0 || self.updates_per_step == 0 || self.buffer_capacity == 0 {
            return fail(
                "batch_size, updates_per_step and buffer_capacity must be positive".into(),
            );
        }
        if !(self.actor_lr > 0.0) || !(self.critic_lr > 0.0) {
            return fail("learning rates must be > 0".into());
        }
        if self.hidden_sizes.contains(&0) {
            return fail("hidden sizes must be positive".into());
        }
        match variant {
            Variant::Ddpg => {
                if self.n_networks != 1 || self.alpha != 0.0 || self.q_operator != QOperator::Mean {
                    return fail("ddpg requires n_networks=1, alpha=0, operator=mean".into());
                }
            }
            Variant::Td3 => {
                if self.n_networks != 2 || self.alpha != 0.0 || self.q_operator != QOperator::Min {
                    return fail("td3 requires n_networks=2, alpha=0, operator=min".into());
                }
            }
            Variant::Sqt => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for v in [Variant::Ddpg, Variant::Td3, Variant::Sqt] {
            TrainingConfig::for_variant(v).validate(v).unwrap();
            assert_eq!(Variant::parse(v.name()).unwrap(), v);
        }
    }

    #[test]
    fn variant_invariants_enforced() {
        let mut c = TrainingConfig::for_variant(Variant::Td3);
        c.alpha = 0.1;
        assert!(c.validate(Variant::Td3).is_err());
        let mut c = TrainingConfig::for_variant(Variant::Ddpg);
        c.n_networks = 2;
        assert!(c.validate(Variant::Ddpg).is_err());
    }

    #[test]
    fn lambda_range() {
        assert!(QOperator::parse("wminmax", 1.5).is_err());
        assert!(QOperator::parse("wminmax", -0.1).is_err());
        assert_eq!(
            QOperator::parse("wminmax", 0.25).unwrap(),
            QOperator::WeightedMinMax(0.25)
        );
        assert!(QOperator::parse("max", 0.0).is_err());
    }

    #[test]
    fn gamma_must_discount() {
        let c = TrainingConfig {
            gamma: 1.0,
            ..Default::default()
        };
        assert!(c.validate(Variant::Sqt).is_err());
    }
}
