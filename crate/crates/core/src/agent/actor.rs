use crate::numerics::{Activation, AdamState, MlpParams, OutputActivation, Rng};
use crate::{Error, Result};

/// Deterministic policy `s -> center + half_range * tanh(net(s))`.
#[derive(Clone, Debug)]
pub struct ActorPolicy {
    actor: MlpParams,
    target: MlpParams,
    optimizer: AdamState,
    low: Vec<f64>,
    high: Vec<f64>,
}

impl ActorPolicy {
    pub fn new(
        rng: &mut Rng,
        state_dim: usize,
        hidden: &[usize],
        low: &[f64],
        high: &[f64],
    ) -> Result<Self> {
        let mut sizes = vec![state_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(low.len());
        let net = MlpParams::init(rng, &sizes, Activation::Relu, OutputActivation::Tanh)?;
        Self::from_network(net, low, high)
    }

    pub fn from_network(actor: MlpParams, low: &[f64], high: &[f64]) -> Result<Self> {
        if low.len() != high.len() || low.len() != actor.output_dim() {
            return Err(Error::shape("action bounds", actor.output_dim(), low.len()));
        }
        if low
            .iter()
            .zip(high)
            .any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite())
        {
            return Err(Error::config(
                "action bounds must be finite with low < high",
            ));
        }
        if actor.output_activation() != OutputActivation::Tanh {
            return Err(Error::InvalidArchitecture("actor must end in tanh".into()));
        }
        Ok(Self {
            optimizer: AdamState::new(&actor),
            target: actor.clone(),
            actor,
            low: low.to_vec(),
            high: high.to_vec(),
        })
    }

    pub fn network(&self) -> &MlpParams {
        &self.actor
    }

    pub fn network_mut(&mut self) -> &mut MlpParams {
        &mut self.actor
    }

    pub fn target_network(&self) -> &MlpParams {
        &self.target
    }

    pub fn target_network_mut(&mut self) -> &mut MlpParams {
        &mut self.target
    }

    pub fn optimizer(&self) -> &AdamState {
        &self.optimizer
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    pub fn high(&self) -> &[f64] {
        &self.high
    }

    pub fn state_dim(&self) -> usize {
        self.actor.input_dim()
    }

    pub fn action_dim(&self) -> usize {
        self.low.len()
    }

    /// Half-width of the action box per dimension.
    pub fn scale(&self, d: usize) -> f64 {
        0.5 * (self.high[d] - self.low[d])
    }

    fn center(&self, d: usize) -> f64 {
        0.5 * (self.high[d] + self.low[d])
    }

    pub fn clip(&self, action: &mut [f64]) {
        for (d, a) in action.iter_mut().enumerate() {
            *a = a.clamp(self.low[d], self.high[d]);
        }
    }

    fn rescale(&self, mut raw: Vec<f64>) -> Vec<f64> {
        let ad = self.action_dim();
        for (i, v) in raw.iter_mut().enumerate() {
            let d = i % ad;
            *v = (self.center(d) + self.scale(d) * *v).clamp(self.low[d], self.high[d]);
        }
        raw
    }

    /// Live-policy actions for a batch of states.
    pub fn act_batch(&self, states: &[f64], batch: usize) -> Result<Vec<f64>> {
        Ok(self.rescale(self.actor.forward_batch(states, batch)?))
    }

    /// Target-policy actions for a batch of states.
    pub fn target_act_batch(&self, states: &[f64], batch: usize) -> Result<Vec<f64>> {
        Ok(self.rescale(self.target.forward_batch(states, batch)?))
    }

    pub fn act(&self, state: &[f64]) -> Result<Vec<f64>> {
        self.act_batch(state, 1)
    }

    /// One Adam ascent step given `dJ/da` for every action the current
    /// policy produces on `states` (row-major `batch x action_dim`).
    pub fn ascend(
        &mut self,
        states: &[f64],
        batch: usize,
        action_grad: &[f64],
        lr: f64,
    ) -> Result<()> {
        let ad = self.action_dim();
        if action_grad.len() != batch * ad {
            return Err(Error::shape(
                "action gradient",
                batch * ad,
                action_grad.len(),
            ));
        }
        let tape = self.actor.forward_tape(states, batch)?;
        let upstream: Vec<f64> = action_grad
            .iter()
            .enumerate()
            .map(|(i, g)| -g * self.scale(i % ad))
            .collect();
        let grads = self.actor.backward(&tape, &upstream)?.params;
        if !grads.is_finite() {
            return Err(Error::PoisonedUpdate("actor"));
        }
        self.optimizer.update(&mut self.actor, &grads, lr)
    }

    pub fn sync_target(&mut self) {
        self.target
            .copy_from(&self.actor)
            .expect("target mirrors live shape");
    }
}
