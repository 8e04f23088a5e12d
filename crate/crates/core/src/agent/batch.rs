use crate::replay::Transition;
use crate::{Error, Result};

/// Column-major view of a minibatch: each field is a row-major `size x dim` block.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub size: usize,
    pub state_dim: usize,
    pub action_dim: usize,
    pub states: Vec<f64>,
    pub actions: Vec<f64>,
    pub rewards: Vec<f64>,
    pub next_states: Vec<f64>,
    pub dones: Vec<bool>,
}

impl Batch {
    pub fn from_transitions<'a, I>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Transition>,
    {
        let mut it = items.into_iter().peekable();
        let first = it.peek().ok_or(Error::EmptyBatch)?;
        let (state_dim, action_dim) = (first.state.len(), first.action.len());
        let mut b = Batch {
            size: 0,
            state_dim,
            action_dim,
            states: Vec::new(),
            actions: Vec::new(),
            rewards: Vec::new(),
            next_states: Vec::new(),
            dones: Vec::new(),
        };
        for t in it {
            if t.state.len() != state_dim || t.next_state.len() != state_dim {
                return Err(Error::shape("batch state", state_dim, t.state.len()));
            }
            if t.action.len() != action_dim {
                return Err(Error::shape("batch action", action_dim, t.action.len()));
            }
            b.states.extend_from_slice(&t.state);
            b.actions.extend_from_slice(&t.action);
            b.rewards.push(t.reward);
            b.next_states.extend_from_slice(&t.next_state);
            b.dones.push(t.done);
            b.size += 1;
        }
        Ok(b)
    }
}

/// Row-wise concatenation `[left | right]` of two `rows x dim` blocks.
pub fn concat_rows(left: &[f64], left_dim: usize, right: &[f64], right_dim: usize) -> Vec<f64> {
    let rows = left
        .len()
        .checked_div(left_dim)
        .unwrap_or_else(|| right.len() / right_dim);
    let mut out = Vec::with_capacity(rows * (left_dim + right_dim));
    for r in 0..rows {
        out.extend_from_slice(&left[r * left_dim..(r + 1) * left_dim]);
        out.extend_from_slice(&right[r * right_dim..(r + 1) * right_dim]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat() {
        let out = concat_rows(&[1.0, 2.0, 3.0, 4.0], 2, &[9.0, 8.0], 1);
        assert_eq!(out, vec![1.0, 2.0, 9.0, 3.0, 4.0, 8.0]);
    }

    #[test]
    fn empty_batch() {
        assert_eq!(
            Batch::from_transitions(std::iter::empty()),
            Err(Error::EmptyBatch)
        );
    }
}
