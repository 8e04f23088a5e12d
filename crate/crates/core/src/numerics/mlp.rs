//! Dense feed-forward networks with hand-derived backpropagation.
//!
//! Parameters for all layers live in one flat buffer. Layer `k` stores its
//! weight matrix row-major (`rows = layer_sizes[k + 1]`, `cols = layer_sizes[k]`)
//! immediately followed by its bias vector. Batched inputs and outputs are
//! row-major `batch x dim` slices.

use crate::numerics::rng::Rng;
use crate::{Error, Result};

/// Hidden-layer nonlinearity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
}

/// Nonlinearity applied after the last layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputActivation {
    Linear,
    Tanh,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "relu" => Some(Activation::Relu),
            "tanh" => Some(Activation::Tanh),
            _ => None,
        }
    }
}

impl OutputActivation {
    pub fn name(self) -> &'static str {
        match self {
            OutputActivation::Linear => "linear",
            OutputActivation::Tanh => "tanh",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(OutputActivation::Linear),
            "tanh" => Some(OutputActivation::Tanh),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpParams {
    layer_sizes: Vec<usize>,
    hidden: Activation,
    output: OutputActivation,
    offsets: Vec<usize>,
    values: Vec<f64>,
}

/// Gradients of `upstream . output` with respect to parameters and input.
#[derive(Clone, Debug)]
pub struct Backprop {
    pub params: MlpParams,
    pub input: Vec<f64>,
}

/// Post-activation values of every layer for one batched forward pass.
#[derive(Clone, Debug)]
pub struct Tape {
    batch: usize,
    activations: Vec<Vec<f64>>,
}

impl Tape {
    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn output(&self) -> &[f64] {
        self.activations
            .last()
            .expect("tape always holds the input")
    }

    pub fn into_output(mut self) -> Vec<f64> {
        self.activations.pop().expect("tape always holds the input")
    }
}

fn layout(layer_sizes: &[usize]) -> Result<(Vec<usize>, usize)> {
    if layer_sizes.len() < 2 {
        return Err(Error::InvalidArchitecture(format!(
            "need at least input and output sizes, got {layer_sizes:?}"
        )));
    }
    if layer_sizes.contains(&0) {
        return Err(Error::InvalidArchitecture(format!(
            "layer sizes must be positive, got {layer_sizes:?}"
        )));
    }
    let mut offsets = Vec::with_capacity(layer_sizes.len() - 1);
    let mut total = 0;
    for w in layer_sizes.windows(2) {
        offsets.push(total);
        total += w[0] * w[1] + w[1];
    }
    Ok((offsets, total))
}

impl MlpParams {
    /// Zero-valued parameters of the given architecture.
    pub fn zeros(
        layer_sizes: &[usize],
        hidden: Activation,
        output: OutputActivation,
    ) -> Result<Self> {
        let (offsets, total) = layout(layer_sizes)?;
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            hidden,
            output,
            offsets,
            values: vec![0.0; total],
        })
    }

    /// Weights uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`, biases zero.
    pub fn init(
        rng: &mut Rng,
        layer_sizes: &[usize],
        hidden: Activation,
        output: OutputActivation,
    ) -> Result<Self> {
        let mut params = Self::zeros(layer_sizes, hidden, output)?;
        for k in 0..params.n_layers() {
            let bound = 1.0 / (params.layer_sizes[k] as f64).sqrt();
            for w in params.weights_mut(k) {
                *w = rng.uniform(-bound, bound);
            }
        }
        Ok(params)
    }

    /// Builds parameters from explicit per-layer weight matrices and biases.
    pub fn from_layers(
        layer_sizes: &[usize],
        hidden: Activation,
        output: OutputActivation,
        weights: &[Vec<f64>],
        biases: &[Vec<f64>],
    ) -> Result<Self> {
        let mut params = Self::zeros(layer_sizes, hidden, output)?;
        let n = params.n_layers();
        if weights.len() != n {
            return Err(Error::shape("weight layers", n, weights.len()));
        }
        if biases.len() != n {
            return Err(Error::shape("bias layers", n, biases.len()));
        }
        for k in 0..n {
            let w = params.weights_mut(k);
            if w.len() != weights[k].len() {
                return Err(Error::shape("weight matrix", w.len(), weights[k].len()));
            }
            w.copy_from_slice(&weights[k]);
            let b = params.bias_mut(k);
            if b.len() != biases[k].len() {
                return Err(Error::shape("bias vector", b.len(), biases[k].len()));
            }
            b.copy_from_slice(&biases[k]);
        }
        if !params.is_finite() {
            return Err(Error::InvalidArchitecture("non-finite parameter".into()));
        }
        Ok(params)
    }

    /// Same architecture, all values zero.
    pub fn zeros_like(&self) -> Self {
        Self {
            layer_sizes: self.layer_sizes.clone(),
            hidden: self.hidden,
            output: self.output,
            offsets: self.offsets.clone(),
            values: vec![0.0; self.values.len()],
        }
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn hidden_activation(&self) -> Activation {
        self.hidden
    }

    pub fn output_activation(&self) -> OutputActivation {
        self.output
    }

    pub fn n_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().expect("validated non-empty")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// All parameters in storage order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    fn weight_range(&self, k: usize) -> std::ops::Range<usize> {
        let start = self.offsets[k];
        start..start + self.layer_sizes[k] * self.layer_sizes[k + 1]
    }

    fn bias_range(&self, k: usize) -> std::ops::Range<usize> {
        let start = self.weight_range(k).end;
        start..start + self.layer_sizes[k + 1]
    }

    pub fn weights(&self, k: usize) -> &[f64] {
        &self.values[self.weight_range(k)]
    }

    pub fn weights_mut(&mut self, k: usize) -> &mut [f64] {
        let r = self.weight_range(k);
        &mut self.values[r]
    }

    pub fn bias(&self, k: usize) -> &[f64] {
        &self.values[self.bias_range(k)]
    }

    pub fn bias_mut(&mut self, k: usize) -> &mut [f64] {
        let r = self.bias_range(k);
        &mut self.values[r]
    }

    pub fn same_shape(&self, other: &MlpParams) -> bool {
        self.layer_sizes == other.layer_sizes
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Overwrites every value with `other`'s. Used for hard target copies.
    pub fn copy_from(&mut self, other: &MlpParams) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::shape("parameter copy", self.len(), other.len()));
        }
        self.values.copy_from_slice(&other.values);
        Ok(())
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &MlpParams, scale: f64) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::shape("parameter add", self.len(), other.len()));
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += scale * b;
        }
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.forward_batch(input, 1)
    }

    pub fn forward_batch(&self, inputs: &[f64], batch: usize) -> Result<Vec<f64>> {
        Ok(self.forward_tape(inputs, batch)?.into_output())
    }

    /// Batched forward pass that keeps every layer's activations for [`Self::backward`].
    pub fn forward_tape(&self, inputs: &[f64], batch: usize) -> Result<Tape> {
        let in_dim = self.input_dim();
        if inputs.len() != batch * in_dim {
            return Err(Error::shape("network input", batch * in_dim, inputs.len()));
        }
        let mut activations = Vec::with_capacity(self.layer_sizes.len());
        activations.push(inputs.to_vec());
        for k in 0..self.n_layers() {
            let (n_in, n_out) = (self.layer_sizes[k], self.layer_sizes[k + 1]);
            let x = activations.last().expect("pushed above");
            let bias = self.bias(k);
            let mut z = Vec::with_capacity(batch * n_out);
            for _ in 0..batch {
                z.extend_from_slice(bias);
            }
            if batch > 0 {
                // z (batch x out) += x (batch x in) * W^T
                unsafe {
                    matrixmultiply::dgemm(
                        batch,
                        n_in,
                        n_out,
                        1.0,
                        x.as_ptr(),
                        n_in as isize,
                        1,
                        self.weights(k).as_ptr(),
                        1,
                        n_in as isize,
                        1.0,
                        z.as_mut_ptr(),
                        n_out as isize,
                        1,
                    );
                }
            }
            let last = k + 1 == self.n_layers();
            match (last, self.hidden, self.output) {
                (false, Activation::Relu, _) => z.iter_mut().for_each(|v| *v = v.max(0.0)),
                (false, Activation::Tanh, _) | (true, _, OutputActivation::Tanh) => {
                    z.iter_mut().for_each(|v| *v = v.tanh())
                }
                (true, _, OutputActivation::Linear) => {}
            }
            activations.push(z);
        }
        Ok(Tape { batch, activations })
    }

    /// Gradient of `sum_b upstream[b] . output[b]` for the batch recorded in `tape`.
    ///
    /// Returns parameter gradients summed over the batch and the per-sample
    /// input gradients (`batch x input_dim`).
    pub fn backward(&self, tape: &Tape, upstream: &[f64]) -> Result<Backprop> {
        let batch = tape.batch;
        if tape.activations.len() != self.layer_sizes.len()
            || tape.activations[0].len() != batch * self.input_dim()
        {
            return Err(Error::shape(
                "tape",
                batch * self.input_dim(),
                tape.activations[0].len(),
            ));
        }
        if upstream.len() != batch * self.output_dim() {
            return Err(Error::shape(
                "upstream gradient",
                batch * self.output_dim(),
                upstream.len(),
            ));
        }
        let mut grads = self.zeros_like();
        let mut delta = upstream.to_vec();
        for k in (0..self.n_layers()).rev() {
            let (n_in, n_out) = (self.layer_sizes[k], self.layer_sizes[k + 1]);
            let out = &tape.activations[k + 1];
            let last = k + 1 == self.n_layers();
            match (last, self.hidden, self.output) {
                (false, Activation::Relu, _) => {
                    for (d, y) in delta.iter_mut().zip(out) {
                        if *y <= 0.0 {
                            *d = 0.0;
                        }
                    }
                }
                (false, Activation::Tanh, _) | (true, _, OutputActivation::Tanh) => {
                    for (d, y) in delta.iter_mut().zip(out) {
                        *d *= 1.0 - y * y;
                    }
                }
                (true, _, OutputActivation::Linear) => {}
            }
            let x = &tape.activations[k];
            {
                let gb = grads.bias_mut(k);
                for row in delta.chunks_exact(n_out) {
                    for (g, d) in gb.iter_mut().zip(row) {
                        *g += d;
                    }
                }
            }
            let mut dx = vec![0.0; batch * n_in];
            if batch > 0 {
                let gw = grads.weights_mut(k).as_mut_ptr();
                // dW (out x in) = delta^T (out x batch) * x (batch x in)
                // dx (batch x in) = delta (batch x out) * W (out x in)
                unsafe {
                    matrixmultiply::dgemm(
                        n_out,
                        batch,
                        n_in,
                        1.0,
                        delta.as_ptr(),
                        1,
                        n_out as isize,
                        x.as_ptr(),
                        n_in as isize,
                        1,
                        0.0,
                        gw,
                        n_in as isize,
                        1,
                    );
                    matrixmultiply::dgemm(
                        batch,
                        n_out,
                        n_in,
                        1.0,
                        delta.as_ptr(),
                        n_out as isize,
                        1,
                        self.weights(k).as_ptr(),
                        n_in as isize,
                        1,
                        0.0,
                        dx.as_mut_ptr(),
                        n_in as isize,
                        1,
                    );
                }
            }
            delta = dx;
        }
        Ok(Backprop {
            params: grads,
            input: delta,
        })
    }

    /// Gradient of `upstream . forward(input)` for a single input vector.
    pub fn grad(&self, input: &[f64], upstream: &[f64]) -> Result<Backprop> {
        let tape = self.forward_tape(input, 1)?;
        self.backward(&tape, upstream)
    }
}
