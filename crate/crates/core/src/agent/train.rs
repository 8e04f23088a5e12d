//! The interaction loop: act, store, then `G` gradient iterations per step.

use super::learner::{Agent, UpdateStats};
use crate::envs::ContinuousEnv;
use crate::numerics::Rng;
use crate::replay::Transition;
use crate::{Error, Result};

/// Summary of one finished training episode.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub index: usize,
    pub episode_return: f64,
    pub length: usize,
    /// Environment step count (1-based) at which the episode ended.
    pub end_step: u64,
    /// Mean batch penalty over the episode's gradient iterations (0 if none).
    pub mean_penalty: f64,
    /// Mean critic loss over the episode's gradient iterations (0 if none).
    pub mean_critic_loss: f64,
}

/// What one environment step produced.
#[derive(Clone, Debug, Default)]
pub struct StepReport {
    pub reward: f64,
    pub episode: Option<EpisodeRecord>,
    pub updates: Vec<UpdateStats>,
}

/// Episode bookkeeping for [`Agent`] training, resumable one step at a time.
#[derive(Clone, Debug)]
pub struct Trainer {
    env_rng: Rng,
    state: Option<Vec<f64>>,
    episodes: usize,
    ep_return: f64,
    ep_len: usize,
    penalty_sum: f64,
    loss_sum: f64,
    n_updates: usize,
}

impl Trainer {
    /// Environment resets draw from a stream derived from `seed`, separate
    /// from the agent's own stream.
    pub fn new(seed: u64) -> Self {
        Self {
            env_rng: Rng::new(seed).fork(2),
            state: None,
            episodes: 0,
            ep_return: 0.0,
            ep_len: 0,
            penalty_sum: 0.0,
            loss_sum: 0.0,
            n_updates: 0,
        }
    }

    pub fn episodes_completed(&self) -> usize {
        self.episodes
    }

    /// Executes one environment step followed by the configured number of
    /// gradient iterations (once warmup is over).
    pub fn advance(
        &mut self,
        agent: &mut Agent,
        env: &mut dyn ContinuousEnv,
    ) -> Result<StepReport> {
        let step_index = agent.env_steps() + 1;
        self.advance_inner(agent, env)
            .map_err(|e| e.at_step(step_index))
    }

    fn advance_inner(
        &mut self,
        agent: &mut Agent,
        env: &mut dyn ContinuousEnv,
    ) -> Result<StepReport> {
        if env.state_dim() != agent.state_dim() || env.action_dim() != agent.action_dim() {
            return Err(Error::shape(
                "env/agent dims",
                agent.state_dim(),
                env.state_dim(),
            ));
        }
        let state = match self.state.take() {
            Some(s) => s,
            None => env.reset(&mut self.env_rng),
        };
        let action = agent.select_action(&state, true)?;
        let step = env.step(&action)?;
        agent.observe(Transition {
            state,
            action,
            reward: step.reward,
            next_state: step.state.clone(),
            done: step.terminated,
        })?;
        self.ep_return += step.reward;
        self.ep_len += 1;

        let mut updates = Vec::new();
        if agent.warmup_done() {
            for _ in 0..agent.config().updates_per_step {
                let stats = agent.update()?;
                self.penalty_sum += stats.targets.batch_penalty;
                self.loss_sum += stats.critic_loss;
                self.n_updates += 1;
                updates.push(stats);
            }
        }

        let episode = if step.done() {
            let n = self.n_updates.max(1) as f64;
            let rec = EpisodeRecord {
                index: self.episodes,
                episode_return: self.ep_return,
                length: self.ep_len,
                end_step: agent.env_steps(),
                mean_penalty: self.penalty_sum / n,
                mean_critic_loss: self.loss_sum / n,
            };
            self.episodes += 1;
            self.ep_return = 0.0;
            self.ep_len = 0;
            self.penalty_sum = 0.0;
            self.loss_sum = 0.0;
            self.n_updates = 0;
            self.state = None;
            Some(rec)
        } else {
            self.state = Some(step.state);
            None
        };
        Ok(StepReport {
            reward: step.reward,
            episode,
            updates,
        })
    }
}

/// Runs `total_steps` environment steps and returns every completed episode.
pub fn train(
    agent: &mut Agent,
    env: &mut dyn ContinuousEnv,
    total_steps: u64,
) -> Result<Vec<EpisodeRecord>> {
    let mut trainer = Trainer::new(agent.seed());
    let mut records = Vec::new();
    for _ in 0..total_steps {
        if let Some(ep) = trainer.advance(agent, env)?.episode {
            records.push(ep);
        }
    }
    Ok(records)
}

/// Mean undiscounted return of `episodes` greedy rollouts.
pub fn evaluate(
    agent: &Agent,
    env: &mut dyn ContinuousEnv,
    episodes: usize,
    rng: &mut Rng,
) -> Result<f64> {
    if episodes == 0 {
        return Err(Error::config("evaluation needs at least one episode"));
    }
    let mut total = 0.0;
    for _ in 0..episodes {
        let mut state = env.reset(rng);
        loop {
            let action = agent.greedy_action(&state)?;
            let step = env.step(&action)?;
            total += step.reward;
            if step.done() {
                break;
            }
            state = step.state;
        }
    }
    Ok(total / episodes as f64)
}
