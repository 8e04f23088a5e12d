//! Tabular update rules and Q-targets.
//!
//! A successor of `None` means the transition ended in a terminal state,
//! which bootstraps zero.

use super::qtable::{argmax_first, QTable};
use crate::numerics::Rng;
use crate::{Error, Result};

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::config(format!("{name} must lie in [0, 1], got {v}")))
    }
}

fn bootstrap(q: &QTable, next: Option<usize>, f: impl Fn(&QTable, usize) -> f64) -> Result<f64> {
    match next {
        None => Ok(0.0),
        Some(sp) => {
            q.check_state(sp)?;
            Ok(f(q, sp))
        }
    }
}

/// `Q(s,a) <- (1 - lr) Q(s,a) + lr (r + gamma max_a' Q(s',a'))`.
pub fn q_learning_step(
    q: &mut QTable,
    s: usize,
    a: usize,
    r: f64,
    next: Option<usize>,
    lr: f64,
    gamma: f64,
) -> Result<()> {
    unit_interval("learning rate", lr)?;
    let i = q.check(s, a)?;
    let target = r + gamma * bootstrap(q, next, QTable::max)?;
    let old = q.slot(i);
    *q.slot_mut(i) = (1.0 - lr) * old + lr * target;
    q.record_visit(i);
    Ok(())
}

/// Which table a double-Q step updated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Updated {
    A,
    B,
}

/// Double Q-learning: a fair coin picks the table to update; its target
/// evaluates the other table at the updated table's greedy action.
#[allow(clippy::too_many_arguments)]
pub fn double_q_step(
    qa: &mut QTable,
    qb: &mut QTable,
    s: usize,
    a: usize,
    r: f64,
    next: Option<usize>,
    lr: f64,
    gamma: f64,
    rng: &mut Rng,
) -> Result<Updated> {
    if !qa.same_shape(qb) {
        return Err(Error::shape(
            "double-Q tables",
            qa.n_states(),
            qb.n_states(),
        ));
    }
    let which = if rng.coin() { Updated::A } else { Updated::B };
    let (upd, other) = match which {
        Updated::A => (qa, &*qb),
        Updated::B => (qb, &*qa),
    };
    double_q_update(upd, other, s, a, r, next, lr, gamma)?;
    Ok(which)
}

/// The deterministic half of [`double_q_step`]: update `upd` using `other`
/// to evaluate `argmax_a upd(s', a)`.
#[allow(clippy::too_many_arguments)]
pub fn double_q_update(
    upd: &mut QTable,
    other: &QTable,
    s: usize,
    a: usize,
    r: f64,
    next: Option<usize>,
    lr: f64,
    gamma: f64,
) -> Result<()> {
    unit_interval("learning rate", lr)?;
    let i = upd.check(s, a)?;
    let boot = match next {
        None => 0.0,
        Some(sp) => {
            upd.check_state(sp)?;
            if upd.actions_in(sp) == 0 {
                0.0
            } else {
                let star = argmax_first(upd.row(sp));
                other.get(sp, star)?
            }
        }
    };
    let target = r + gamma * boot;
    let old = upd.slot(i);
    *upd.slot_mut(i) = (1.0 - lr) * old + lr * target;
    upd.record_visit(i);
    Ok(())
}

/// `y = r + gamma max_a' min_i Q_i(s', a')`.
pub fn maxmin_target(tables: &[QTable], next: Option<usize>, r: f64, gamma: f64) -> Result<f64> {
    let first = tables
        .first()
        .ok_or_else(|| Error::config("maxmin needs at least one table"))?;
    if tables.iter().any(|t| !t.same_shape(first)) {
        return Err(Error::shape("maxmin tables", first.n_states(), 0));
    }
    let Some(sp) = next else {
        return Ok(r);
    };
    first.check_state(sp)?;
    let n = first.actions_in(sp);
    if n == 0 {
        return Ok(r);
    }
    let best = (0..n)
        .map(|a| {
            tables
                .iter()
                .map(|t| t.row(sp)[a])
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(r + gamma * best)
}

/// `y = r + gamma [max_a Q - beta (max_a Q - min_a Q)]` at `s'`.
///
/// Evaluated as `(1 - beta) max + beta min` so that both endpoints reproduce
/// the Q-learning and MiniMax targets bit for bit.
pub fn beta_pessimistic_target(
    q: &QTable,
    next: Option<usize>,
    r: f64,
    gamma: f64,
    beta: f64,
) -> Result<f64> {
    unit_interval("beta", beta)?;
    let boot = bootstrap(q, next, |q, sp| (1.0 - beta) * q.max(sp) + beta * q.min(sp))?;
    Ok(r + gamma * boot)
}

/// Robust TD residual `r + gamma [(1-kappa) max Q(s') + kappa min Q(s')] - Q(s,a)`.
#[allow(clippy::too_many_arguments)]
pub fn q_kappa_delta(
    q: &QTable,
    s: usize,
    a: usize,
    r: f64,
    next: Option<usize>,
    gamma: f64,
    kappa: f64,
) -> Result<f64> {
    unit_interval("kappa", kappa)?;
    let current = q.get(s, a)?;
    let boot = bootstrap(q, next, |q, sp| {
        (1.0 - kappa) * q.max(sp) + kappa * q.min(sp)
    })?;
    Ok(r + gamma * boot - current)
}

/// `Q(s,a) <- max(Q(s,a), r + gamma min_a' Q(s',a'))`.
pub fn minimax_q_step(
    q: &mut QTable,
    s: usize,
    a: usize,
    r: f64,
    next: Option<usize>,
    gamma: f64,
) -> Result<()> {
    let i = q.check(s, a)?;
    let candidate = r + gamma * bootstrap(q, next, QTable::min)?;
    let old = q.slot(i);
    *q.slot_mut(i) = old.max(candidate);
    q.record_visit(i);
    Ok(())
}
