//! Plain-text agent checkpoints.
//!
//! ```text
//! sqt-checkpoint 1
//! variant <ddpg|td3|sqt>
//! state_dim <int>
//! action_low <f64> ...
//! action_high <f64> ...
//! n_networks <int>
//! network <name> layers <d0,d1,...> hidden <relu|tanh> output <linear|tanh>
//! <all parameter values on one line, space separated>
//! ... one network block each for actor, actor_target, critic.<i>, critic_target.<i>
//! end
//! ```
//!
//! Values are written in Rust's shortest round-trip exponent form, so a
//! decode of an encode is bit-exact. Parameters are stored in the in-memory
//! order: per layer, the row-major weight matrix (`out x in`) then the bias.

use super::actor::ActorPolicy;
use super::config::Variant;
use super::critic::EnsembleCritic;
use super::learner::Agent;
use crate::numerics::{Activation, MlpParams, OutputActivation};
use crate::{Error, Result};
use std::fmt::Write as _;

pub const MAGIC: &str = "sqt-checkpoint";
pub const VERSION: u32 = 1;

/// Upper bound on parameters per network accepted by the decoder.
const MAX_PARAMS: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub variant: Variant,
    pub state_dim: usize,
    pub action_low: Vec<f64>,
    pub action_high: Vec<f64>,
    pub actor: MlpParams,
    pub actor_target: MlpParams,
    pub critics: Vec<MlpParams>,
    pub critic_targets: Vec<MlpParams>,
}

fn write_floats(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v:e}");
    }
    out.push('\n');
}

fn write_network(out: &mut String, name: &str, net: &MlpParams) {
    let layers: Vec<String> = net.layer_sizes().iter().map(|d| d.to_string()).collect();
    let _ = writeln!(
        out,
        "network {name} layers {} hidden {} output {}",
        layers.join(","),
        net.hidden_activation().name(),
        net.output_activation().name()
    );
    write_floats(out, net.values());
}

impl Checkpoint {
    pub fn from_agent(agent: &Agent) -> Self {
        let critic = agent.critic();
        let actor = agent.actor();
        Self {
            variant: agent.variant(),
            state_dim: agent.state_dim(),
            action_low: actor.low().to_vec(),
            action_high: actor.high().to_vec(),
            actor: actor.network().clone(),
            actor_target: actor.target_network().clone(),
            critics: critic.critics().to_vec(),
            critic_targets: critic.targets().to_vec(),
        }
    }

    pub fn encode(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC} {VERSION}");
        let _ = writeln!(out, "variant {}", self.variant.name());
        let _ = writeln!(out, "state_dim {}", self.state_dim);
        out.push_str("action_low ");
        write_floats(&mut out, &self.action_low);
        out.push_str("action_high ");
        write_floats(&mut out, &self.action_high);
        let _ = writeln!(out, "n_networks {}", self.critics.len());
        write_network(&mut out, "actor", &self.actor);
        write_network(&mut out, "actor_target", &self.actor_target);
        for (i, c) in self.critics.iter().enumerate() {
            write_network(&mut out, &format!("critic.{i}"), c);
        }
        for (i, c) in self.critic_targets.iter().enumerate() {
            write_network(&mut out, &format!("critic_target.{i}"), c);
        }
        out.push_str("end\n");
        out
    }

    pub fn decode(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);

        let (n, header) = lines.next_line()?;
        let mut parts = header.split(' ');
        if parts.next() != Some(MAGIC) {
            return Err(Error::format(n, "missing checkpoint magic"));
        }
        match parts.next().map(str::parse::<u32>) {
            Some(Ok(VERSION)) => {}
            _ => return Err(Error::format(n, "unsupported checkpoint version")),
        }
        if parts.next().is_some() {
            return Err(Error::format(n, "trailing fields after version"));
        }

        let (n, v) = lines.keyed("variant")?;
        let variant = Variant::parse(v).map_err(|e| Error::format(n, e.to_string()))?;
        let (n, v) = lines.keyed("state_dim")?;
        let state_dim = parse_count(n, v)?;
        let (n, v) = lines.keyed("action_low")?;
        let action_low = parse_floats(n, v)?;
        let (n, v) = lines.keyed("action_high")?;
        let action_high = parse_floats(n, v)?;
        if action_low.len() != action_high.len() || action_low.is_empty() {
            return Err(Error::format(n, "action bounds differ in length"));
        }
        let (n, v) = lines.keyed("n_networks")?;
        let n_networks = parse_count(n, v)?;
        if n_networks == 0 {
            return Err(Error::format(n, "n_networks must be positive"));
        }

        let actor = lines.network("actor")?;
        let actor_target = lines.network("actor_target")?;
        let mut critics = Vec::with_capacity(n_networks.min(64));
        for i in 0..n_networks {
            critics.push(lines.network(&format!("critic.{i}"))?);
        }
        let mut critic_targets = Vec::with_capacity(n_networks.min(64));
        for i in 0..n_networks {
            critic_targets.push(lines.network(&format!("critic_target.{i}"))?);
        }
        let (n, tail) = lines.next_line()?;
        if tail != "end" {
            return Err(Error::format(n, "expected 'end'"));
        }
        if let Ok((n, _)) = lines.next_line() {
            return Err(Error::format(n, "content after 'end'"));
        }

        let ckpt = Checkpoint {
            variant,
            state_dim,
            action_low,
            action_high,
            actor,
            actor_target,
            critics,
            critic_targets,
        };
        ckpt.check_consistency()?;
        Ok(ckpt)
    }

    fn check_consistency(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::format(0, m));
        let ad = self.action_low.len();
        if self.actor.input_dim() != self.state_dim || self.actor.output_dim() != ad {
            return bad("actor dims do not match header");
        }
        if !self.actor.same_shape(&self.actor_target) {
            return bad("actor target shape differs from actor");
        }
        for (c, t) in self.critics.iter().zip(&self.critic_targets) {
            if c.input_dim() != self.state_dim + ad || c.output_dim() != 1 {
                return bad("critic dims do not match header");
            }
            if !c.same_shape(&self.critics[0]) || !t.same_shape(c) {
                return bad("ensemble members differ in shape");
            }
        }
        Ok(())
    }

    /// Rebuilds the networks; optimizer state starts fresh.
    pub fn networks(&self) -> Result<(EnsembleCritic, ActorPolicy)> {
        let mut critic = EnsembleCritic::from_networks(
            self.state_dim,
            self.action_low.len(),
            self.critics.clone(),
        )?;
        for (t, src) in critic.targets_mut().iter_mut().zip(&self.critic_targets) {
            t.copy_from(src)?;
        }
        let mut actor =
            ActorPolicy::from_network(self.actor.clone(), &self.action_low, &self.action_high)?;
        actor.target_network_mut().copy_from(&self.actor_target)?;
        Ok((critic, actor))
    }

    /// Overwrites `agent`'s networks with the checkpoint's.
    pub fn restore_into(&self, agent: &mut Agent) -> Result<()> {
        if agent.variant() != self.variant {
            return Err(Error::config("checkpoint variant does not match agent"));
        }
        let (critic, actor) = self.networks()?;
        agent.replace_networks(critic, actor)
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
        }
    }

    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((i, l)) => Ok((i + 1, l.trim_end_matches('\r'))),
            None => Err(Error::format(0, "unexpected end of checkpoint")),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (n, line) = self.next_line()?;
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok((n, rest)),
            _ => Err(Error::format(n, format!("expected '{key}'"))),
        }
    }

    fn network(&mut self, name: &str) -> Result<MlpParams> {
        let (n, header) = self.next_line()?;
        let fields: Vec<&str> = header.split(' ').collect();
        let [kw, got_name, "layers", layers, "hidden", hidden, "output", output] = fields[..]
        else {
            return Err(Error::format(n, "malformed network header"));
        };
        if kw != "network" || got_name != name {
            return Err(Error::format(n, format!("expected network '{name}'")));
        }
        let sizes = layers
            .split(',')
            .map(|d| parse_count(n, d))
            .collect::<Result<Vec<_>>>()?;
        let hidden = Activation::parse(hidden)
            .ok_or_else(|| Error::format(n, format!("unknown activation '{hidden}'")))?;
        let output = OutputActivation::parse(output)
            .ok_or_else(|| Error::format(n, format!("unknown output activation '{output}'")))?;
        let total = param_count(&sizes).ok_or_else(|| Error::format(n, "network too large"))?;
        let mut params = MlpParams::zeros(&sizes, hidden, output)
            .map_err(|e| Error::format(n, e.to_string()))?;
        let (n, body) = self.next_line()?;
        let values = parse_floats(n, body)?;
        if values.len() != total {
            return Err(Error::format(
                n,
                format!("expected {total} values, found {}", values.len()),
            ));
        }
        params.values_mut().copy_from_slice(&values);
        Ok(params)
    }
}

fn param_count(sizes: &[usize]) -> Option<usize> {
    let mut total: usize = 0;
    for w in sizes.windows(2) {
        let layer = w[0].checked_mul(w[1])?.checked_add(w[1])?;
        total = total.checked_add(layer)?;
    }
    (total <= MAX_PARAMS).then_some(total)
}

fn parse_count(line: usize, s: &str) -> Result<usize> {
    s.parse::<usize>()
        .map_err(|_| Error::format(line, format!("invalid integer '{s}'")))
}

fn parse_floats(line: usize, s: &str) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(' ')
        .map(|tok| match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::format(line, format!("invalid number '{tok}'"))),
        })
        .collect()
}
