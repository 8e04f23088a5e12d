use crate::numerics::mlp::MlpParams;
use crate::{Error, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// Adam moment estimates for one parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
    step_count: u64,
}

impl AdamState {
    pub fn new(params: &MlpParams) -> Self {
        Self {
            first_moment: vec![0.0; params.len()],
            second_moment: vec![0.0; params.len()],
            step_count: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.first_moment
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.second_moment
    }

    /// One bias-corrected Adam descent step, in place.
    ///
    /// Nothing is modified when `grads` holds a non-finite value.
    pub fn update(&mut self, params: &mut MlpParams, grads: &MlpParams, lr: f64) -> Result<()> {
        if !params.same_shape(grads) || self.first_moment.len() != params.len() {
            return Err(Error::shape("adam update", params.len(), grads.len()));
        }
        if !(lr > 0.0 && lr.is_finite()) {
            return Err(Error::config(format!(
                "learning rate must be > 0, got {lr}"
            )));
        }
        if !grads.is_finite() {
            return Err(Error::PoisonedUpdate("adam"));
        }
        self.step_count += 1;
        let t = self.step_count as i32;
        let c1 = 1.0 - BETA1.powi(t);
        let c2 = 1.0 - BETA2.powi(t);
        let it = params.values_mut().iter_mut().zip(grads.values()).zip(
            self.first_moment
                .iter_mut()
                .zip(self.second_moment.iter_mut()),
        );
        for ((p, g), (m, v)) in it {
            *m = BETA1 * *m + (1.0 - BETA1) * g;
            *v = BETA2 * *v + (1.0 - BETA2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= lr * m_hat / (v_hat.sqrt() + EPSILON);
        }
        Ok(())
    }
}

/// Pure form of [`AdamState::update`].
pub fn adam_step(
    params: &MlpParams,
    grads: &MlpParams,
    state: &AdamState,
    lr: f64,
) -> Result<(MlpParams, AdamState)> {
    let mut p = params.clone();
    let mut s = state.clone();
    s.update(&mut p, grads, lr)?;
    Ok((p, s))
}
