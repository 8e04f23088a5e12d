#![allow(dead_code)]

use sqt_core::agent::{TrainingConfig, Variant};
use sqt_core::numerics::{Activation, MlpParams, OutputActivation, Rng};

/// Small, fast settings for tests that need real training.
pub fn small_config(variant: Variant) -> TrainingConfig {
    let mut cfg = TrainingConfig::for_variant(variant);
    cfg.hidden_sizes = vec![16, 16];
    cfg.batch_size = 16;
    cfg.warmup_steps = 64;
    cfg.buffer_capacity = 10_000;
    cfg
}

/// Single linear layer `in -> 1` that outputs `c` everywhere.
pub fn constant_net(in_dim: usize, c: f64) -> MlpParams {
    MlpParams::from_layers(
        &[in_dim, 1],
        Activation::Relu,
        OutputActivation::Linear,
        &[vec![0.0; in_dim]],
        &[vec![c]],
    )
    .unwrap()
}

/// Textbook loop-by-loop forward pass, independent of the library's gemm path.
pub fn naive_forward(p: &MlpParams, input: &[f64]) -> Vec<f64> {
    let sizes = p.layer_sizes();
    let mut x = input.to_vec();
    for k in 0..p.n_layers() {
        let (n_in, n_out) = (sizes[k], sizes[k + 1]);
        let w = p.weights(k);
        let b = p.bias(k);
        let mut z = vec![0.0; n_out];
        for o in 0..n_out {
            let mut acc = b[o];
            for i in 0..n_in {
                acc += w[o * n_in + i] * x[i];
            }
            z[o] = acc;
        }
        let last = k + 1 == p.n_layers();
        if !last {
            match p.hidden_activation() {
                Activation::Relu => z.iter_mut().for_each(|v| *v = v.max(0.0)),
                Activation::Tanh => z.iter_mut().for_each(|v| *v = v.tanh()),
            }
        } else if p.output_activation() == OutputActivation::Tanh {
            z.iter_mut().for_each(|v| *v = v.tanh());
        }
        x = z;
    }
    x
}

/// A random architecture with 1 to 3 hidden layers of width 1 to 8.
pub fn random_net(rng: &mut Rng) -> MlpParams {
    let depth = 2 + rng.below(3);
    let sizes: Vec<usize> = (0..=depth).map(|_| 1 + rng.below(8)).collect();
    let hidden = if rng.coin() {
        Activation::Relu
    } else {
        Activation::Tanh
    };
    let output = if rng.coin() {
        OutputActivation::Linear
    } else {
        OutputActivation::Tanh
    };
    let mut p = MlpParams::init(rng, &sizes, hidden, output).unwrap();
    // non-zero biases so every parameter gets exercised
    for v in p.values_mut() {
        *v += rng.uniform(-0.1, 0.1);
    }
    p
}

pub fn random_vec(rng: &mut Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect()
}

/// Denominator floor for relative errors of near-zero gradients.
pub const REL_FLOOR: f64 = 1e-6;

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(REL_FLOOR)
}

/// Worst relative error between analytic and central-difference gradients of
/// `upstream . f(x)` over all parameters and inputs of one random network.
pub fn gradient_check(seed: u64, h: f64) -> f64 {
    let mut rng = Rng::new(seed);
    let p = random_net(&mut rng);
    let x = random_vec(&mut rng, p.input_dim());
    let u = random_vec(&mut rng, p.output_dim());
    let objective = |p: &MlpParams, x: &[f64]| -> f64 {
        p.forward(x)
            .unwrap()
            .iter()
            .zip(&u)
            .map(|(y, u)| y * u)
            .sum()
    };
    let g = p.grad(&x, &u).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..p.len() {
        let mut plus = p.clone();
        plus.values_mut()[i] += h;
        let mut minus = p.clone();
        minus.values_mut()[i] -= h;
        let fd = (objective(&plus, &x) - objective(&minus, &x)) / (2.0 * h);
        worst = worst.max(rel_err(g.params.values()[i], fd));
    }
    for i in 0..x.len() {
        let mut xp = x.clone();
        xp[i] += h;
        let mut xm = x.clone();
        xm[i] -= h;
        let fd = (objective(&p, &xp) - objective(&p, &xm)) / (2.0 * h);
        worst = worst.max(rel_err(g.input[i], fd));
    }
    worst
}
