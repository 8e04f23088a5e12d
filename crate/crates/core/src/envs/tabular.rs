use crate::numerics::Rng;
use crate::{Error, Result};

const ROW_TOLERANCE: f64 = 1e-12;

/// Finite MDP with Gaussian rewards.
///
/// States may expose different numbers of actions; `n_actions` is the
/// maximum and per-state counts live in `actions_per_state`. Terminal states
/// have no outgoing transitions.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularMdp {
    n_states: usize,
    n_actions: usize,
    actions_per_state: Vec<usize>,
    /// `transition[(s * n_actions + a) * n_states + s']`
    transition: Vec<f64>,
    reward_mean: Vec<f64>,
    reward_std: Vec<f64>,
    gamma: f64,
    terminal: Vec<bool>,
    start_state: usize,
}

/// Builder input for [`TabularMdp::new`]; unused `(s, a)` slots are ignored.
#[derive(Clone, Debug)]
pub struct MdpSpec {
    pub actions_per_state: Vec<usize>,
    pub transition: Vec<f64>,
    pub reward_mean: Vec<f64>,
    pub reward_std: Vec<f64>,
    pub gamma: f64,
    pub terminal: Vec<bool>,
    pub start_state: usize,
}

impl TabularMdp {
    pub fn new(spec: MdpSpec) -> Result<Self> {
        let n_states = spec.actions_per_state.len();
        if n_states == 0 {
            return Err(Error::config("MDP needs at least one state"));
        }
        let n_actions = spec.actions_per_state.iter().copied().max().unwrap_or(0);
        if n_actions == 0 {
            return Err(Error::config("MDP needs at least one action"));
        }
        let sa = n_states * n_actions;
        if spec.transition.len() != sa * n_states {
            return Err(Error::shape(
                "transition tensor",
                sa * n_states,
                spec.transition.len(),
            ));
        }
        if spec.reward_mean.len() != sa {
            return Err(Error::shape("reward means", sa, spec.reward_mean.len()));
        }
        if spec.reward_std.len() != sa {
            return Err(Error::shape("reward stds", sa, spec.reward_std.len()));
        }
        if spec.terminal.len() != n_states {
            return Err(Error::shape(
                "terminal flags",
                n_states,
                spec.terminal.len(),
            ));
        }
        if !(0.0..=1.0).contains(&spec.gamma) {
            return Err(Error::config(format!(
                "gamma must lie in [0, 1], got {}",
                spec.gamma
            )));
        }
        if spec.start_state >= n_states {
            return Err(Error::Index {
                index: spec.start_state,
                len: n_states,
            });
        }
        for s in 0..n_states {
            if spec.terminal[s] {
                continue;
            }
            if spec.actions_per_state[s] == 0 {
                return Err(Error::config(format!(
                    "non-terminal state {s} has no actions"
                )));
            }
            for a in 0..spec.actions_per_state[s] {
                let i = s * n_actions + a;
                let row = &spec.transition[i * n_states..(i + 1) * n_states];
                if row.iter().any(|p| !(*p >= 0.0)) {
                    return Err(Error::config(format!("negative probability at ({s}, {a})")));
                }
                let total: f64 = row.iter().sum();
                if (total - 1.0).abs() > ROW_TOLERANCE {
                    return Err(Error::config(format!(
                        "transition row ({s}, {a}) sums to {total}"
                    )));
                }
                if !spec.reward_mean[i].is_finite() || !(spec.reward_std[i] >= 0.0) {
                    return Err(Error::config(format!("bad reward at ({s}, {a})")));
                }
            }
        }
        Ok(Self {
            n_states,
            n_actions,
            actions_per_state: spec.actions_per_state,
            transition: spec.transition,
            reward_mean: spec.reward_mean,
            reward_std: spec.reward_std,
            gamma: spec.gamma,
            terminal: spec.terminal,
            start_state: spec.start_state,
        })
    }

    /// Random dense MDP with `gamma < 1`, no terminal states and Dirichlet(1)
    /// transition rows (normalized uniform draws).
    pub fn random(rng: &mut Rng, n_states: usize, n_actions: usize, gamma: f64) -> Result<Self> {
        let sa = n_states * n_actions;
        let mut transition = Vec::with_capacity(sa * n_states);
        for _ in 0..sa {
            let raw: Vec<f64> = (0..n_states).map(|_| -(1.0 - rng.unit()).ln()).collect();
            let total: f64 = raw.iter().sum();
            let mut row: Vec<f64> = raw.iter().map(|x| x / total).collect();
            // absorb rounding into the largest entry so the row sums to 1
            let resid = 1.0 - row.iter().sum::<f64>();
            let imax = (0..n_states)
                .max_by(|&i, &j| row[i].total_cmp(&row[j]))
                .unwrap_or(0);
            row[imax] += resid;
            transition.extend(row);
        }
        let reward_mean = (0..sa).map(|_| rng.uniform(-1.0, 1.0)).collect();
        Self::new(MdpSpec {
            actions_per_state: vec![n_actions; n_states],
            transition,
            reward_mean,
            reward_std: vec![0.5; sa],
            gamma,
            terminal: vec![false; n_states],
            start_state: 0,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn actions_in(&self, s: usize) -> usize {
        if self.terminal[s] {
            0
        } else {
            self.actions_per_state[s]
        }
    }

    pub fn actions_per_state(&self) -> &[usize] {
        &self.actions_per_state
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.terminal[s]
    }

    pub fn start_state(&self) -> usize {
        self.start_state
    }

    fn sa(&self, s: usize, a: usize) -> usize {
        s * self.n_actions + a
    }

    /// `P(. | s, a)`.
    pub fn transition_row(&self, s: usize, a: usize) -> &[f64] {
        let i = self.sa(s, a);
        &self.transition[i * self.n_states..(i + 1) * self.n_states]
    }

    pub fn reward_mean(&self, s: usize, a: usize) -> f64 {
        self.reward_mean[self.sa(s, a)]
    }

    pub fn reward_std(&self, s: usize, a: usize) -> f64 {
        self.reward_std[self.sa(s, a)]
    }

    fn check(&self, s: usize, a: usize) -> Result<()> {
        if s >= self.n_states {
            return Err(Error::Index {
                index: s,
                len: self.n_states,
            });
        }
        if self.terminal[s] {
            return Err(Error::TerminalState(s));
        }
        if a >= self.actions_per_state[s] {
            return Err(Error::Index {
                index: a,
                len: self.actions_per_state[s],
            });
        }
        Ok(())
    }

    /// Samples `(s', r)` with `s' ~ P(.|s,a)` and `r ~ Normal(mean, std)`.
    pub fn sample_step(&self, s: usize, a: usize, rng: &mut Rng) -> Result<(usize, f64)> {
        self.check(s, a)?;
        let row = self.transition_row(s, a);
        let u = rng.unit();
        let mut acc = 0.0;
        let mut next = None;
        for (sp, p) in row.iter().enumerate() {
            if *p > 0.0 {
                acc += p;
                next = Some(sp);
                if u < acc {
                    break;
                }
            }
        }
        let next = next.expect("validated row has positive mass");
        let std = self.reward_std(s, a);
        let mean = self.reward_mean(s, a);
        let r = if std == 0.0 {
            mean
        } else {
            rng.normal(mean, std)
        };
        Ok((next, r))
    }
}

/// State index of the decision state in [`make_maximization_bias_mdp`].
pub const MAX_BIAS_A: usize = 0;
/// State index of the noisy-arms state.
pub const MAX_BIAS_B: usize = 1;
/// State index of the absorbing terminal.
pub const MAX_BIAS_TERMINAL: usize = 2;
/// Action at `A` that moves to `B`.
pub const MAX_BIAS_GO: usize = 0;
/// Action at `A` that terminates immediately.
pub const MAX_BIAS_STOP: usize = 1;

/// Two-state maximization-bias construction with `gamma = 1`.
///
/// From `A`, `go` leads to `B` and `stop` terminates, both with reward 0.
/// Every one of `B`'s `n_arms` actions terminates with reward
/// `Normal(mu, sigma)`, so `Q*(A, go) = gamma * mu`.
pub fn make_maximization_bias_mdp(n_arms: usize, mu: f64, sigma: f64) -> Result<TabularMdp> {
    make_maximization_bias_mdp_with_gamma(n_arms, mu, sigma, 1.0)
}

pub fn make_maximization_bias_mdp_with_gamma(
    n_arms: usize,
    mu: f64,
    sigma: f64,
    gamma: f64,
) -> Result<TabularMdp> {
    if n_arms < 2 {
        return Err(Error::config(format!("need at least 2 arms, got {n_arms}")));
    }
    if !(sigma >= 0.0) {
        return Err(Error::config(format!("sigma must be >= 0, got {sigma}")));
    }
    let n_states = 3;
    let n_actions = n_arms.max(2);
    let sa = n_states * n_actions;
    let mut transition = vec![0.0; sa * n_states];
    let mut reward_mean = vec![0.0; sa];
    let mut reward_std = vec![0.0; sa];
    let mut set = |s: usize, a: usize, sp: usize| {
        transition[(s * n_actions + a) * n_states + sp] = 1.0;
    };
    set(MAX_BIAS_A, MAX_BIAS_GO, MAX_BIAS_B);
    set(MAX_BIAS_A, MAX_BIAS_STOP, MAX_BIAS_TERMINAL);
    for arm in 0..n_arms {
        set(MAX_BIAS_B, arm, MAX_BIAS_TERMINAL);
        reward_mean[MAX_BIAS_B * n_actions + arm] = mu;
        reward_std[MAX_BIAS_B * n_actions + arm] = sigma;
    }
    TabularMdp::new(MdpSpec {
        actions_per_state: vec![2, n_arms, 0],
        transition,
        reward_mean,
        reward_std,
        gamma,
        terminal: vec![false, false, true],
        start_state: MAX_BIAS_A,
    })
}

/// Builds a tabular MDP from its string id.
pub fn make_mdp(id: &str) -> Result<TabularMdp> {
    match id {
        "max-bias" => make_maximization_bias_mdp(8, -0.1, 1.0),
        "max-bias-deterministic" => make_maximization_bias_mdp(8, -0.1, 0.0),
        other => Err(Error::config(format!("unknown tabular MDP '{other}'"))),
    }
}
