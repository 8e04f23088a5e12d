use crate::envs::TabularMdp;
use crate::numerics::Rng;
use crate::{Error, Result};

/// Action-value table with per-entry visit counts.
///
/// States may expose fewer than `n_actions` actions; reductions over a row
/// only consider the valid prefix.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    n_states: usize,
    n_actions: usize,
    actions_per_state: Vec<usize>,
    values: Vec<f64>,
    visit_counts: Vec<u64>,
}

impl QTable {
    pub fn new(actions_per_state: Vec<usize>) -> Result<Self> {
        let n_states = actions_per_state.len();
        let n_actions = actions_per_state.iter().copied().max().unwrap_or(0);
        if n_states == 0 || n_actions == 0 {
            return Err(Error::config("Q-table needs at least one state and action"));
        }
        Ok(Self {
            n_states,
            n_actions,
            actions_per_state,
            values: vec![0.0; n_states * n_actions],
            visit_counts: vec![0; n_states * n_actions],
        })
    }

    /// Zero table shaped like `mdp` (terminal states expose no actions).
    pub fn for_mdp(mdp: &TabularMdp) -> Self {
        let (n_states, n_actions) = (mdp.n_states(), mdp.n_actions());
        Self {
            n_states,
            n_actions,
            actions_per_state: (0..n_states).map(|s| mdp.actions_in(s)).collect(),
            values: vec![0.0; n_states * n_actions],
            visit_counts: vec![0; n_states * n_actions],
        }
    }

    /// Fills every valid entry from `f(s, a)`.
    pub fn from_fn(
        actions_per_state: Vec<usize>,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut t = Self::new(actions_per_state)?;
        for s in 0..t.n_states {
            for a in 0..t.actions_per_state[s] {
                t.values[s * t.n_actions + a] = f(s, a);
            }
        }
        Ok(t)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn actions_in(&self, s: usize) -> usize {
        self.actions_per_state[s]
    }

    pub fn same_shape(&self, other: &QTable) -> bool {
        self.actions_per_state == other.actions_per_state && self.n_actions == other.n_actions
    }

    pub(crate) fn check(&self, s: usize, a: usize) -> Result<usize> {
        if s >= self.n_states {
            return Err(Error::Index {
                index: s,
                len: self.n_states,
            });
        }
        if a >= self.actions_per_state[s] {
            return Err(Error::Index {
                index: a,
                len: self.actions_per_state[s],
            });
        }
        Ok(s * self.n_actions + a)
    }

    pub(crate) fn check_state(&self, s: usize) -> Result<()> {
        if s >= self.n_states {
            return Err(Error::Index {
                index: s,
                len: self.n_states,
            });
        }
        Ok(())
    }

    pub fn get(&self, s: usize, a: usize) -> Result<f64> {
        Ok(self.values[self.check(s, a)?])
    }

    pub fn set(&mut self, s: usize, a: usize, v: f64) -> Result<()> {
        let i = self.check(s, a)?;
        self.values[i] = v;
        Ok(())
    }

    pub fn visits(&self, s: usize, a: usize) -> Result<u64> {
        Ok(self.visit_counts[self.check(s, a)?])
    }

    pub(crate) fn record_visit(&mut self, i: usize) {
        self.visit_counts[i] += 1;
    }

    pub(crate) fn slot(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub(crate) fn slot_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.values[i]
    }

    /// Valid entries of row `s`.
    pub fn row(&self, s: usize) -> &[f64] {
        let start = s * self.n_actions;
        &self.values[start..start + self.actions_per_state[s]]
    }

    /// Max over the row; 0 for a state without actions.
    pub fn max(&self, s: usize) -> f64 {
        let row = self.row(s);
        if row.is_empty() {
            0.0
        } else {
            row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        }
    }

    /// Min over the row; 0 for a state without actions.
    pub fn min(&self, s: usize) -> f64 {
        let row = self.row(s);
        if row.is_empty() {
            0.0
        } else {
            row.iter().copied().fold(f64::INFINITY, f64::min)
        }
    }

    /// Lowest-index maximizing action.
    pub fn argmax(&self, s: usize) -> usize {
        argmax_first(self.row(s))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Elementwise combination of two same-shaped tables.
    pub fn zip_with(&self, other: &QTable, f: impl Fn(f64, f64) -> f64) -> Result<QTable> {
        if !self.same_shape(other) {
            return Err(Error::shape(
                "q-table",
                self.values.len(),
                other.values.len(),
            ));
        }
        let mut out = self.clone();
        for (o, b) in out.values.iter_mut().zip(&other.values) {
            *o = f(*o, *b);
        }
        out.visit_counts = vec![0; out.values.len()];
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &QTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn argmax_first(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in row.iter().enumerate() {
        if *v > row[best] {
            best = i;
        }
    }
    best
}

/// Uniformly random choice among the maximizing entries of `row`.
pub fn argmax_random(row: &[f64], rng: &mut Rng) -> usize {
    let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = (0..row.len()).filter(|&i| row[i] == best).collect();
    if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.below(ties.len())]
    }
}

/// Row-stochastic policy `pi(a; s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularPolicy {
    n_states: usize,
    n_actions: usize,
    probs: Vec<f64>,
}

const POLICY_TOLERANCE: f64 = 1e-12;

impl TabularPolicy {
    pub fn new(n_states: usize, n_actions: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != n_states * n_actions {
            return Err(Error::shape("policy", n_states * n_actions, probs.len()));
        }
        if n_actions == 0 {
            return Err(Error::config("policy needs at least one action"));
        }
        for (s, row) in probs.chunks_exact(n_actions).enumerate() {
            if row.iter().any(|p| !(*p >= 0.0)) {
                return Err(Error::config(format!("negative probability in row {s}")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > POLICY_TOLERANCE {
                return Err(Error::config(format!("row {s} sums to {total}")));
            }
        }
        Ok(Self {
            n_states,
            n_actions,
            probs,
        })
    }

    pub fn uniform(n_states: usize, n_actions: usize) -> Result<Self> {
        Self::new(
            n_states,
            n_actions,
            vec![1.0 / n_actions as f64; n_states * n_actions],
        )
    }

    /// One-hot policy choosing `actions[s]` in state `s`.
    pub fn deterministic(n_actions: usize, actions: &[usize]) -> Result<Self> {
        let mut probs = vec![0.0; actions.len() * n_actions];
        for (s, &a) in actions.iter().enumerate() {
            if a >= n_actions {
                return Err(Error::Index {
                    index: a,
                    len: n_actions,
                });
            }
            probs[s * n_actions + a] = 1.0;
        }
        Self::new(actions.len(), n_actions, probs)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.probs[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Conservative policy mixing `(1 - alpha) pi_old + alpha pi_new`.
pub fn cpi_mix(old: &TabularPolicy, new: &TabularPolicy, alpha: f64) -> Result<TabularPolicy> {
    if old.n_states != new.n_states || old.n_actions != new.n_actions {
        return Err(Error::shape("policy mix", old.probs.len(), new.probs.len()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::config(format!(
            "mixing weight must lie in [0, 1], got {alpha}"
        )));
    }
    let probs = old
        .probs
        .iter()
        .zip(&new.probs)
        .map(|(p, q)| (1.0 - alpha) * p + alpha * q)
        .collect();
    TabularPolicy::new(old.n_states, old.n_actions, probs)
}
