use super::qtable::QTable;
use crate::envs::TabularMdp;
use crate::{Error, Result};

pub const MAX_SWEEPS: usize = 1_000_000;

/// One Bellman optimality backup of `q` using expected rewards.
pub fn bellman_backup(mdp: &TabularMdp, q: &QTable) -> QTable {
    let values: Vec<f64> = (0..mdp.n_states()).map(|s| q.max(s)).collect();
    let mut next = q.clone();
    for s in 0..mdp.n_states() {
        for a in 0..mdp.actions_in(s) {
            let expected: f64 = mdp
                .transition_row(s, a)
                .iter()
                .zip(&values)
                .map(|(p, v)| p * v)
                .sum();
            next.set(s, a, mdp.reward_mean(s, a) + mdp.gamma() * expected)
                .expect("table shaped from mdp");
        }
    }
    next
}

/// Sup-norm distance between `q` and its Bellman backup.
pub fn bellman_residual(mdp: &TabularMdp, q: &QTable) -> f64 {
    bellman_backup(mdp, q).max_abs_diff(q)
}

/// Optimal action values by repeated Bellman backups from zero.
///
/// Stops once a sweep changes the table by less than `tol`, then returns the
/// next iterate, whose own residual is at most `gamma` times that change.
pub fn value_iteration(mdp: &TabularMdp, tol: f64) -> Result<QTable> {
    if !(tol > 0.0) {
        return Err(Error::config(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut q = QTable::for_mdp(mdp);
    for _ in 0..MAX_SWEEPS {
        let next = bellman_backup(mdp, &q);
        let change = next.max_abs_diff(&q);
        q = next;
        if change < tol {
            let last = bellman_backup(mdp, &q);
            if last.max_abs_diff(&q) < tol {
                return Ok(last);
            }
        }
    }
    Err(Error::Divergence(MAX_SWEEPS))
}
