use super::batch::concat_rows;
use super::ops;
use crate::numerics::{Activation, AdamState, MlpParams, OutputActivation, Rng};
use crate::{Error, Result};

/// `N` Q-networks over `concat(s, a)` with their frozen target copies.
#[derive(Clone, Debug)]
pub struct EnsembleCritic {
    state_dim: usize,
    action_dim: usize,
    critics: Vec<MlpParams>,
    targets: Vec<MlpParams>,
    optimizers: Vec<AdamState>,
}

impl EnsembleCritic {
    pub fn new(
        rng: &mut Rng,
        n_networks: usize,
        state_dim: usize,
        action_dim: usize,
        hidden: &[usize],
    ) -> Result<Self> {
        if n_networks == 0 {
            return Err(Error::config("ensemble needs at least one critic"));
        }
        let mut sizes = vec![state_dim + action_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let critics = (0..n_networks)
            .map(|_| MlpParams::init(rng, &sizes, Activation::Relu, OutputActivation::Linear))
            .collect::<Result<Vec<_>>>()?;
        Self::from_networks(state_dim, action_dim, critics)
    }

    /// Wraps explicit networks; targets start as copies of the live networks.
    pub fn from_networks(
        state_dim: usize,
        action_dim: usize,
        critics: Vec<MlpParams>,
    ) -> Result<Self> {
        let first = critics
            .first()
            .ok_or_else(|| Error::config("ensemble needs at least one critic"))?;
        if first.input_dim() != state_dim + action_dim {
            return Err(Error::shape(
                "critic input",
                state_dim + action_dim,
                first.input_dim(),
            ));
        }
        if first.output_dim() != 1 {
            return Err(Error::shape("critic output", 1, first.output_dim()));
        }
        if critics.iter().any(|c| !c.same_shape(first)) {
            return Err(Error::InvalidArchitecture(
                "ensemble members must share one architecture".into(),
            ));
        }
        let optimizers = critics.iter().map(AdamState::new).collect();
        Ok(Self {
            state_dim,
            action_dim,
            targets: critics.clone(),
            critics,
            optimizers,
        })
    }

    pub fn n_networks(&self) -> usize {
        self.critics.len()
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn action_dim(&self) -> usize {
        self.action_dim
    }

    pub fn critics(&self) -> &[MlpParams] {
        &self.critics
    }

    pub fn targets(&self) -> &[MlpParams] {
        &self.targets
    }

    pub fn critics_mut(&mut self) -> &mut [MlpParams] {
        &mut self.critics
    }

    pub fn targets_mut(&mut self) -> &mut [MlpParams] {
        &mut self.targets
    }

    pub fn optimizers(&self) -> &[AdamState] {
        &self.optimizers
    }

    fn inputs(&self, states: &[f64], actions: &[f64], batch: usize) -> Result<Vec<f64>> {
        if states.len() != batch * self.state_dim {
            return Err(Error::shape(
                "critic states",
                batch * self.state_dim,
                states.len(),
            ));
        }
        if actions.len() != batch * self.action_dim {
            return Err(Error::shape(
                "critic actions",
                batch * self.action_dim,
                actions.len(),
            ));
        }
        Ok(concat_rows(
            states,
            self.state_dim,
            actions,
            self.action_dim,
        ))
    }

    fn evaluate(nets: &[MlpParams], inputs: &[f64], batch: usize) -> Result<Vec<Vec<f64>>> {
        nets.iter()
            .map(|n| n.forward_batch(inputs, batch))
            .collect()
    }

    /// Live-network values, `N x batch`.
    pub fn values(&self, states: &[f64], actions: &[f64], batch: usize) -> Result<Vec<Vec<f64>>> {
        let x = self.inputs(states, actions, batch)?;
        Self::evaluate(&self.critics, &x, batch)
    }

    /// Target-network values, `N x batch`.
    pub fn target_values(
        &self,
        states: &[f64],
        actions: &[f64],
        batch: usize,
    ) -> Result<Vec<Vec<f64>>> {
        let x = self.inputs(states, actions, batch)?;
        Self::evaluate(&self.targets, &x, batch)
    }

    /// Batch-mean ensemble std of the target networks at `(states, actions)`.
    pub fn sqt_penalty(&self, states: &[f64], actions: &[f64], batch: usize) -> Result<f64> {
        if batch == 0 {
            return Err(Error::EmptyBatch);
        }
        ops::sqt_penalty_from_values(&self.target_values(states, actions, batch)?)
    }

    /// One Adam step per network on `mean_b (Q_i(s_b, a_b) - y_b)^2`.
    ///
    /// Returns the loss averaged over networks, measured before the step.
    pub fn update(
        &mut self,
        states: &[f64],
        actions: &[f64],
        targets: &[f64],
        lr: f64,
    ) -> Result<f64> {
        let batch = targets.len();
        if batch == 0 {
            return Err(Error::EmptyBatch);
        }
        let x = self.inputs(states, actions, batch)?;
        let mut total = 0.0;
        let mut steps = Vec::with_capacity(self.critics.len());
        for net in &self.critics {
            let tape = net.forward_tape(&x, batch)?;
            let mut loss = 0.0;
            let upstream: Vec<f64> = tape
                .output()
                .iter()
                .zip(targets)
                .map(|(q, y)| {
                    let d = q - y;
                    loss += d * d;
                    2.0 * d / batch as f64
                })
                .collect();
            let loss = loss / batch as f64;
            if !loss.is_finite() {
                return Err(Error::PoisonedUpdate("critic"));
            }
            total += loss;
            steps.push(net.backward(&tape, &upstream)?.params);
        }
        for grad in &steps {
            if !grad.is_finite() {
                return Err(Error::PoisonedUpdate("critic"));
            }
        }
        for ((net, opt), grad) in self
            .critics
            .iter_mut()
            .zip(&mut self.optimizers)
            .zip(&steps)
        {
            opt.update(net, grad, lr)?;
        }
        Ok(total / self.critics.len() as f64)
    }

    /// Gradient of `mean_b mean_i Q_i(s_b, a_b)` with respect to each action,
    /// through the live networks. Row-major `batch x action_dim`.
    pub fn mean_action_gradient(
        &self,
        states: &[f64],
        actions: &[f64],
        batch: usize,
    ) -> Result<Vec<f64>> {
        let x = self.inputs(states, actions, batch)?;
        let weight = 1.0 / (self.critics.len() * batch) as f64;
        let upstream = vec![weight; batch];
        let in_dim = self.state_dim + self.action_dim;
        let mut grad = vec![0.0; batch * self.action_dim];
        for net in &self.critics {
            let tape = net.forward_tape(&x, batch)?;
            let bp = net.backward(&tape, &upstream)?;
            for (b, row) in bp.input.chunks_exact(in_dim).enumerate() {
                let dst = &mut grad[b * self.action_dim..(b + 1) * self.action_dim];
                for (g, v) in dst.iter_mut().zip(&row[self.state_dim..]) {
                    *g += v;
                }
            }
        }
        Ok(grad)
    }

    /// Hard copy of every live network into its target.
    pub fn sync_targets(&mut self) {
        for (t, c) in self.targets.iter_mut().zip(&self.critics) {
            t.copy_from(c).expect("targets mirror live shapes");
        }
    }
}
