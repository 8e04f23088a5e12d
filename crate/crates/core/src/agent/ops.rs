//! Ensemble reductions used in the Q-target.
//!
//! `values[i][b]` is network `i`'s estimate for batch element `b`.

use super::config::QOperator;
use crate::{Error, Result};

fn check(values: &[Vec<f64>]) -> Result<usize> {
    let first = values
        .first()
        .ok_or_else(|| Error::config("ensemble is empty"))?;
    let batch = first.len();
    if let Some(row) = values.iter().find(|r| r.len() != batch) {
        return Err(Error::shape("ensemble values", batch, row.len()));
    }
    Ok(batch)
}

/// Population standard deviation across networks for element `b`.
///
/// Deviations are taken relative to network 0 before averaging, so an
/// ensemble of identical values yields exactly zero.
fn element_std(values: &[Vec<f64>], b: usize) -> f64 {
    let n = values.len() as f64;
    let pivot = values[0][b];
    let shift_mean = values.iter().map(|r| r[b] - pivot).sum::<f64>() / n;
    let var = values
        .iter()
        .map(|r| {
            let d = r[b] - pivot - shift_mean;
            d * d
        })
        .sum::<f64>()
        / n;
    var.sqrt()
}

/// Per-element ensemble standard deviations.
pub fn ensemble_std(values: &[Vec<f64>]) -> Result<Vec<f64>> {
    let batch = check(values)?;
    Ok((0..batch).map(|b| element_std(values, b)).collect())
}

/// Batch mean of the per-element ensemble standard deviation.
pub fn sqt_penalty_from_values(values: &[Vec<f64>]) -> Result<f64> {
    let batch = check(values)?;
    if batch == 0 {
        return Err(Error::EmptyBatch);
    }
    let total: f64 = (0..batch).map(|b| element_std(values, b)).sum();
    Ok(total / batch as f64)
}

/// Reduces the ensemble to one value per batch element.
pub fn q_operator_apply(values: &[Vec<f64>], op: QOperator) -> Result<Vec<f64>> {
    let batch = check(values)?;
    op.validate()?;
    let column = |b: usize| values.iter().map(move |r| r[b]);
    let min = |b: usize| column(b).fold(f64::INFINITY, f64::min);
    let max = |b: usize| column(b).fold(f64::NEG_INFINITY, f64::max);
    let out = match op {
        QOperator::Min => (0..batch).map(min).collect(),
        QOperator::Mean => {
            let n = values.len() as f64;
            (0..batch).map(|b| column(b).sum::<f64>() / n).collect()
        }
        QOperator::WeightedMinMax(lambda) => (0..batch)
            .map(|b| lambda * min(b) + (1.0 - lambda) * max(b))
            .collect(),
    };
    Ok(out)
}
