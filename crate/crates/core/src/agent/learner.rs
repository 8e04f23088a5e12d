use super::actor::ActorPolicy;
use super::batch::Batch;
use super::config::{QOperator, TrainingConfig, Variant};
use super::critic::EnsembleCritic;
use super::ops;
use crate::numerics::Rng;
use crate::replay::{ReplayBuffer, Transition};
use crate::{Error, Result};

/// Q-targets for one batch together with the quantities they were built from.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetBreakdown {
    /// Regression labels handed to the critics.
    pub y: Vec<f64>,
    /// `r + gamma * (1 - done) * q`, i.e. the same target with `alpha = 0`.
    pub unpenalized: Vec<f64>,
    /// Penalty subtracted per element before scaling by `alpha`.
    pub penalty: Vec<f64>,
    /// Batch-mean ensemble std of the target critics at `(s', a')`.
    pub batch_penalty: f64,
}

/// Diagnostics of one gradient iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct UpdateStats {
    pub critic_loss: f64,
    pub targets: TargetBreakdown,
    pub synced_targets: bool,
}

/// A DDPG, TD3 or SQT agent: ensemble critic, actor, replay and RNG.
#[derive(Clone, Debug)]
pub struct Agent {
    variant: Variant,
    config: TrainingConfig,
    critic: EnsembleCritic,
    actor: ActorPolicy,
    buffer: ReplayBuffer,
    rng: Rng,
    seed: u64,
    env_steps: u64,
    updates: u64,
}

impl Agent {
    pub fn new(
        variant: Variant,
        config: TrainingConfig,
        state_dim: usize,
        low: &[f64],
        high: &[f64],
        seed: u64,
    ) -> Result<Self> {
        config.validate(variant)?;
        let root = Rng::new(seed);
        let mut init = root.fork(0);
        let actor = ActorPolicy::new(&mut init, state_dim, &config.hidden_sizes, low, high)?;
        let critic = EnsembleCritic::new(
            &mut init,
            config.n_networks,
            state_dim,
            low.len(),
            &config.hidden_sizes,
        )?;
        Self::from_parts(variant, config, critic, actor, seed)
    }

    /// Assembles an agent around explicit networks.
    pub fn from_parts(
        variant: Variant,
        config: TrainingConfig,
        critic: EnsembleCritic,
        actor: ActorPolicy,
        seed: u64,
    ) -> Result<Self> {
        config.validate(variant)?;
        if critic.n_networks() != config.n_networks {
            return Err(Error::shape(
                "ensemble size",
                config.n_networks,
                critic.n_networks(),
            ));
        }
        if critic.state_dim() != actor.state_dim() || critic.action_dim() != actor.action_dim() {
            return Err(Error::shape(
                "critic/actor dims",
                actor.state_dim(),
                critic.state_dim(),
            ));
        }
        let buffer = ReplayBuffer::new(
            config.buffer_capacity,
            actor.state_dim(),
            actor.action_dim(),
        )?;
        Ok(Self {
            variant,
            config,
            critic,
            actor,
            buffer,
            rng: Rng::new(seed).fork(1),
            seed,
            env_steps: 0,
            updates: 0,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn config(&self) -> &TrainingConfig {
        &self.config
    }

    pub fn critic(&self) -> &EnsembleCritic {
        &self.critic
    }

    pub fn critic_mut(&mut self) -> &mut EnsembleCritic {
        &mut self.critic
    }

    pub fn actor(&self) -> &ActorPolicy {
        &self.actor
    }

    pub fn actor_mut(&mut self) -> &mut ActorPolicy {
        &mut self.actor
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn state_dim(&self) -> usize {
        self.actor.state_dim()
    }

    pub fn action_dim(&self) -> usize {
        self.actor.action_dim()
    }

    /// Environment steps recorded via [`Agent::observe`].
    pub fn env_steps(&self) -> u64 {
        self.env_steps
    }

    /// Gradient iterations performed.
    pub fn update_count(&self) -> u64 {
        self.updates
    }

    pub fn warmup_done(&self) -> bool {
        self.env_steps >= self.config.warmup_steps
    }

    /// Behaviour or greedy action for `state`.
    ///
    /// Exploring agents act uniformly at random until warmup completes, then
    /// add `Normal(0, noise_std * half_range)` to the policy output. The result
    /// is always clipped to the action box.
    pub fn select_action(&mut self, state: &[f64], explore: bool) -> Result<Vec<f64>> {
        let ad = self.action_dim();
        if explore && !self.warmup_done() {
            let (low, high) = (self.actor.low(), self.actor.high());
            return Ok((0..ad).map(|d| self.rng.uniform(low[d], high[d])).collect());
        }
        let mut action = self.actor.act(state)?;
        if explore && self.config.noise_std > 0.0 {
            for (d, a) in action.iter_mut().enumerate() {
                *a += self
                    .rng
                    .normal(0.0, self.config.noise_std * self.actor.scale(d));
            }
        }
        self.actor.clip(&mut action);
        Ok(action)
    }

    /// Deterministic policy action (no noise, no warmup).
    pub fn greedy_action(&self, state: &[f64]) -> Result<Vec<f64>> {
        self.actor.act(state)
    }

    /// Stores a transition and counts one environment step.
    pub fn observe(&mut self, transition: Transition) -> Result<()> {
        self.buffer.push(transition)?;
        self.env_steps += 1;
        Ok(())
    }

    pub fn sample_batch(&mut self) -> Result<Batch> {
        let items = self.buffer.sample(&mut self.rng, self.config.batch_size)?;
        Batch::from_transitions(items)
    }

    /// Target actions `a' = mu'(s')`, with clipped smoothing noise when enabled.
    fn target_actions(&mut self, batch: &Batch) -> Result<Vec<f64>> {
        let mut next = self
            .actor
            .target_act_batch(&batch.next_states, batch.size)?;
        if self.variant != Variant::Ddpg && self.config.target_smoothing {
            let ad = batch.action_dim;
            for (i, a) in next.iter_mut().enumerate() {
                let scale = self.actor.scale(i % ad);
                let clip = self.config.target_noise_clip * scale;
                let eps = self
                    .rng
                    .normal(0.0, self.config.target_noise_std * scale)
                    .clamp(-clip, clip);
                *a += eps;
            }
            for row in next.chunks_exact_mut(ad) {
                self.actor.clip(row);
            }
        }
        Ok(next)
    }

    /// Q-targets `y = r + gamma (1 - done) Q[Q'](s', a') - alpha * SQT[B]`.
    pub fn compute_target(&mut self, batch: &Batch) -> Result<TargetBreakdown> {
        if batch.size == 0 {
            return Err(Error::EmptyBatch);
        }
        let next_actions = self.target_actions(batch)?;
        let values = self
            .critic
            .target_values(&batch.next_states, &next_actions, batch.size)?;
        let q = ops::q_operator_apply(&values, self.config.q_operator)?;
        let gamma = self.config.gamma;
        let unpenalized: Vec<f64> = (0..batch.size)
            .map(|b| {
                let mask = if batch.dones[b] { 0.0 } else { 1.0 };
                batch.rewards[b] + gamma * mask * q[b]
            })
            .collect();

        let (penalty, batch_penalty) = if self.variant == Variant::Sqt {
            let per_elem = ops::ensemble_std(&values)?;
            let mean = per_elem.iter().sum::<f64>() / batch.size as f64;
            if self.config.per_element_penalty {
                (per_elem, mean)
            } else {
                (vec![mean; batch.size], mean)
            }
        } else {
            (vec![0.0; batch.size], 0.0)
        };

        let alpha = self.config.alpha;
        let y: Vec<f64> = if self.variant != Variant::Sqt {
            unpenalized.clone()
        } else if self.config.masked_penalty {
            (0..batch.size)
                .map(|b| {
                    let mask = if batch.dones[b] { 0.0 } else { 1.0 };
                    batch.rewards[b] + gamma * mask * (q[b] - alpha * penalty[b])
                })
                .collect()
        } else {
            unpenalized
                .iter()
                .zip(&penalty)
                .map(|(u, p)| u - alpha * p)
                .collect()
        };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::PoisonedTarget);
        }
        Ok(TargetBreakdown {
            y,
            unpenalized,
            penalty,
            batch_penalty,
        })
    }

    /// One Adam step per critic on the squared TD error; returns the mean loss.
    pub fn critic_update(&mut self, batch: &Batch, y: &[f64]) -> Result<f64> {
        if y.len() != batch.size {
            return Err(Error::shape("targets", batch.size, y.len()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::PoisonedTarget);
        }
        let lr = self.config.critic_lr;
        self.critic.update(&batch.states, &batch.actions, y, lr)
    }

    /// One ascent step on `mean_b mean_i Q_i(s_b, mu(s_b))` through all live critics.
    pub fn actor_update(&mut self, batch: &Batch) -> Result<()> {
        let actions = self.actor.act_batch(&batch.states, batch.size)?;
        let grad = self
            .critic
            .mean_action_gradient(&batch.states, &actions, batch.size)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::PoisonedUpdate("actor"));
        }
        let lr = self.config.actor_lr;
        self.actor.ascend(&batch.states, batch.size, &grad, lr)
    }

    /// Hard copy of live parameters into the targets when the update counter
    /// hits a multiple of the interval. Returns whether a copy happened.
    pub fn target_update(&mut self) -> bool {
        if self.updates.is_multiple_of(self.config.target_interval) {
            self.critic.sync_targets();
            self.actor.sync_target();
            true
        } else {
            false
        }
    }

    /// One gradient iteration on an explicit batch: target, critic, actor,
    /// then the interval-gated target copy.
    pub fn update_on(&mut self, batch: &Batch) -> Result<UpdateStats> {
        let targets = self.compute_target(batch)?;
        let critic_loss = self.critic_update(batch, &targets.y)?;
        self.actor_update(batch)?;
        self.updates += 1;
        let synced_targets = self.target_update();
        Ok(UpdateStats {
            critic_loss,
            targets,
            synced_targets,
        })
    }

    /// Samples a batch from replay and runs [`Agent::update_on`].
    pub fn update(&mut self) -> Result<UpdateStats> {
        let batch = self.sample_batch()?;
        self.update_on(&batch)
    }

    /// Replaces every network, keeping optimizer state and counters.
    pub(crate) fn replace_networks(
        &mut self,
        critic: EnsembleCritic,
        actor: ActorPolicy,
    ) -> Result<()> {
        if critic.n_networks() != self.critic.n_networks()
            || critic.critics()[0].layer_sizes() != self.critic.critics()[0].layer_sizes()
            || actor.network().layer_sizes() != self.actor.network().layer_sizes()
        {
            return Err(Error::InvalidArchitecture(
                "checkpoint architecture does not match agent".into(),
            ));
        }
        for (dst, src) in self.critic.critics_mut().iter_mut().zip(critic.critics()) {
            dst.copy_from(src)?;
        }
        for (dst, src) in self.critic.targets_mut().iter_mut().zip(critic.targets()) {
            dst.copy_from(src)?;
        }
        self.actor.network_mut().copy_from(actor.network())?;
        self.actor
            .target_network_mut()
            .copy_from(actor.target_network())?;
        Ok(())
    }
}

impl QOperator {
    /// Applies the operator to `N x batch` ensemble values.
    pub fn apply(self, values: &[Vec<f64>]) -> Result<Vec<f64>> {
        ops::q_operator_apply(values, self)
    }
}
