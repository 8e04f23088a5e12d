//! Fixed-capacity FIFO experience cache with uniform sampling.

use crate::numerics::Rng;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: Vec<f64>,
    /// True only for real terminations, never for horizon truncation.
    pub done: bool,
}

#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    state_dim: usize,
    action_dim: usize,
    storage: Vec<Transition>,
    write_cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, state_dim: usize, action_dim: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::config("replay capacity must be positive"));
        }
        Ok(Self {
            capacity,
            state_dim,
            action_dim,
            storage: Vec::with_capacity(capacity.min(1 << 16)),
            write_cursor: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.storage.len() == self.capacity
    }

    pub fn push(&mut self, t: Transition) -> Result<()> {
        if t.state.len() != self.state_dim {
            return Err(Error::shape(
                "transition state",
                self.state_dim,
                t.state.len(),
            ));
        }
        if t.next_state.len() != self.state_dim {
            return Err(Error::shape(
                "transition next state",
                self.state_dim,
                t.next_state.len(),
            ));
        }
        if t.action.len() != self.action_dim {
            return Err(Error::shape(
                "transition action",
                self.action_dim,
                t.action.len(),
            ));
        }
        let finite = t.reward.is_finite()
            && t.state
                .iter()
                .chain(&t.action)
                .chain(&t.next_state)
                .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidAction("non-finite transition".into()));
        }
        if self.storage.len() < self.capacity {
            self.storage.push(t);
        } else {
            self.storage[self.write_cursor] = t;
        }
        self.write_cursor = (self.write_cursor + 1) % self.capacity;
        Ok(())
    }

    /// Stored transitions from oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        let split = if self.is_full() { self.write_cursor } else { 0 };
        self.storage[split..].iter().chain(&self.storage[..split])
    }

    /// `batch_size` independent uniform draws with replacement.
    pub fn sample(&self, rng: &mut Rng, batch_size: usize) -> Result<Vec<&Transition>> {
        if self.storage.is_empty() {
            return Err(Error::EmptyBuffer);
        }
        if batch_size == 0 {
            return Err(Error::EmptyBatch);
        }
        let n = self.storage.len();
        Ok((0..batch_size)
            .map(|_| &self.storage[rng.below(n)])
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rng;
    use proptest::prelude::*;

    fn tagged(tag: usize) -> Transition {
        Transition {
            state: vec![tag as f64],
            action: vec![0.0],
            reward: tag as f64,
            next_state: vec![tag as f64 + 1.0],
            done: false,
        }
    }

    fn tags(buf: &ReplayBuffer) -> Vec<usize> {
        buf.iter().map(|t| t.reward as usize).collect()
    }

    #[test]
    fn fifo_eviction() {
        let mut buf = ReplayBuffer::new(2, 1, 1).unwrap();
        for i in 1..=3 {
            buf.push(tagged(i)).unwrap();
        }
        assert_eq!(tags(&buf), vec![2, 3]);
    }

    #[test]
    fn push_to_empty() {
        let mut buf = ReplayBuffer::new(5, 1, 1).unwrap();
        buf.push(tagged(0)).unwrap();
        assert_eq!(buf.len(), 1);
    }

    #[test]
    fn dim_mismatch_rejected() {
        let mut buf = ReplayBuffer::new(5, 2, 1).unwrap();
        assert!(matches!(buf.push(tagged(0)), Err(Error::Shape { .. })));
        assert!(buf.is_empty());
    }

    #[test]
    fn sample_single_item() {
        let mut buf = ReplayBuffer::new(5, 1, 1).unwrap();
        buf.push(tagged(7)).unwrap();
        let batch = buf.sample(&mut Rng::new(0), 4).unwrap();
        assert_eq!(batch.len(), 4);
        assert!(batch.iter().all(|t| **t == tagged(7)));
    }

    #[test]
    fn sample_empty_errors() {
        let buf = ReplayBuffer::new(5, 1, 1).unwrap();
        assert_eq!(
            buf.sample(&mut Rng::new(0), 4).unwrap_err(),
            Error::EmptyBuffer
        );
    }

    #[test]
    fn sample_is_uniform() {
        let mut buf = ReplayBuffer::new(10, 1, 1).unwrap();
        for i in 0..10 {
            buf.push(tagged(i)).unwrap();
        }
        let n = 100_000;
        let mut counts = [0usize; 10];
        for t in buf.sample(&mut Rng::new(42), n).unwrap() {
            counts[t.reward as usize] += 1;
        }
        let sigma = (0.1 * 0.9 / n as f64).sqrt();
        for c in counts {
            assert!((c as f64 / n as f64 - 0.1).abs() <= 3.0 * sigma);
        }
    }

    #[test]
    fn sample_is_seeded() {
        let mut buf = ReplayBuffer::new(10, 1, 1).unwrap();
        for i in 0..10 {
            buf.push(tagged(i)).unwrap();
        }
        let a: Vec<_> = buf
            .sample(&mut Rng::new(5), 32)
            .unwrap()
            .into_iter()
            .cloned()
            .collect();
        let b: Vec<_> = buf
            .sample(&mut Rng::new(5), 32)
            .unwrap()
            .into_iter()
            .cloned()
            .collect();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn eviction_follows_insertion(capacity in 1usize..20, pushes in 0usize..80) {
            let mut buf = ReplayBuffer::new(capacity, 1, 1).unwrap();
            for i in 0..pushes {
                buf.push(tagged(i)).unwrap();
            }
            let kept = pushes.min(capacity);
            prop_assert_eq!(buf.len(), kept);
            prop_assert_eq!(tags(&buf), (pushes - kept..pushes).collect::<Vec<_>>());
            if pushes > 0 {
                let oldest = pushes - kept;
                for t in buf.sample(&mut Rng::new(pushes as u64), 64).unwrap() {
                    prop_assert!(t.reward as usize >= oldest);
                }
            }
        }
    }
}
