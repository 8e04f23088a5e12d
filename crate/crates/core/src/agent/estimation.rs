//! Monte-Carlo estimates of the bias of max and min-of-max targets under
//! zero-mean Gaussian value noise.

use crate::numerics::Rng;
use crate::{Error, Result};

/// Sample mean of a noisy statistic, its standard error and the noiseless value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisyEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub truth: f64,
}

impl NoisyEstimate {
    pub fn bias(&self) -> f64 {
        self.mean - self.truth
    }
}

fn summarize(samples: &[f64], truth: f64) -> NoisyEstimate {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    NoisyEstimate {
        mean,
        standard_error: (var / n).sqrt(),
        truth,
    }
}

fn check_trials(trials: usize, noise_std: f64) -> Result<()> {
    if trials < 2 {
        return Err(Error::config("need at least two trials"));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::config(format!(
            "noise std must be >= 0, got {noise_std}"
        )));
    }
    Ok(())
}

/// `max_a (q[a] + eps_a)` against `max_a q[a]`.
pub fn noisy_max(q: &[f64], noise_std: f64, trials: usize, rng: &mut Rng) -> Result<NoisyEstimate> {
    check_trials(trials, noise_std)?;
    if q.is_empty() {
        return Err(Error::config("need at least one action"));
    }
    let truth = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let samples: Vec<f64> = (0..trials)
        .map(|_| {
            q.iter()
                .map(|v| v + rng.normal(0.0, noise_std))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(summarize(&samples, truth))
}

/// `min_i max_a (q[i][a] + eps_ia)` against `min_i max_a q[i][a]`, with
/// independent noise per network and action.
pub fn noisy_min_of_max(
    q: &[Vec<f64>],
    noise_std: f64,
    trials: usize,
    rng: &mut Rng,
) -> Result<NoisyEstimate> {
    check_trials(trials, noise_std)?;
    let width = q.first().map_or(0, Vec::len);
    if width == 0 || q.iter().any(|r| r.len() != width) {
        return Err(Error::config("need a non-empty rectangular value matrix"));
    }
    let min_of_max = |f: &mut dyn FnMut(f64) -> f64| {
        q.iter()
            .map(|row| row.iter().map(|v| f(*v)).fold(f64::NEG_INFINITY, f64::max))
            .fold(f64::INFINITY, f64::min)
    };
    let truth = min_of_max(&mut |v| v);
    let samples: Vec<f64> = (0..trials)
        .map(|_| min_of_max(&mut |v| v + rng.normal(0.0, noise_std)))
        .collect();
    Ok(summarize(&samples, truth))
}
