use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub s: Vec<f64>,
    pub a: Vec<f64>,
    pub r: f64,
    pub s_next: Vec<f64>,
    pub terminal: bool,
}

/// Column-wise mini-batch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Batch {
    pub states: Vec<Vec<f64>>,
    pub actions: Vec<Vec<f64>>,
    pub rewards: Vec<f64>,
    pub next_states: Vec<Vec<f64>>,
    pub terminals: Vec<bool>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn push(&mut self, t: Transition) {
        self.states.push(t.s);
        self.actions.push(t.a);
        self.rewards.push(t.r);
        self.next_states.push(t.s_next);
        self.terminals.push(t.terminal);
    }
}

/// FIFO ring buffer of transitions stored as flat rows
/// `s | a | r | s' | terminal`.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    state_dim: usize,
    action_dim: usize,
    capacity: usize,
    warmup: usize,
    data: Vec<f64>,
    len: usize,
    head: usize,
}

impl ReplayBuffer {
    pub fn new(state_dim: usize, action_dim: usize, capacity: usize, warmup: usize) -> Result<Self> {
        if capacity == 0 || state_dim == 0 || action_dim == 0 {
            return Err(Error::Parameter("replay buffer dimensions and capacity must be > 0".into()));
        }
        Ok(Self {
            state_dim,
            action_dim,
            capacity,
            warmup,
            data: Vec::new(),
            len: 0,
            head: 0,
        })
    }

    fn row(&self) -> usize {
        2 * self.state_dim + self.action_dim + 2
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn ready(&self) -> bool {
        self.len >= self.warmup.max(1)
    }

    pub fn push(&mut self, t: &Transition) -> Result<()> {
        if t.s.len() != self.state_dim || t.s_next.len() != self.state_dim || t.a.len() != self.action_dim {
            return Err(Error::Contract(format!(
                "transition shape ({}, {}, {}) does not match buffer ({}, {})",
                t.s.len(),
                t.a.len(),
                t.s_next.len(),
                self.state_dim,
                self.action_dim
            )));
        }
        let finite = t.r.is_finite() && t.s.iter().chain(&t.a).chain(&t.s_next).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Contract("transition has non-finite fields".into()));
        }
        let row = self.row();
        let mut buf = Vec::with_capacity(row);
        buf.extend_from_slice(&t.s);
        buf.extend_from_slice(&t.a);
        buf.push(t.r);
        buf.extend_from_slice(&t.s_next);
        buf.push(if t.terminal { 1.0 } else { 0.0 });
        if self.len < self.capacity {
            self.data.extend_from_slice(&buf);
            self.len += 1;
        } else {
            self.data[self.head * row..(self.head + 1) * row].copy_from_slice(&buf);
        }
        self.head = (self.head + 1) % self.capacity;
        Ok(())
    }

    /// Transition `i` in insertion order, 0 being the oldest retained.
    pub fn get(&self, i: usize) -> Option<Transition> {
        if i >= self.len {
            return None;
        }
        let slot = if self.len < self.capacity { i } else { (self.head + i) % self.capacity };
        Some(self.slot(slot))
    }

    fn slot(&self, slot: usize) -> Transition {
        let (sd, ad) = (self.state_dim, self.action_dim);
        let r = &self.data[slot * self.row()..(slot + 1) * self.row()];
        Transition {
            s: r[..sd].to_vec(),
            a: r[sd..sd + ad].to_vec(),
            r: r[sd + ad],
            s_next: r[sd + ad + 1..2 * sd + ad + 1].to_vec(),
            terminal: r[2 * sd + ad + 1] != 0.0,
        }
    }

    /// `n` transitions drawn uniformly with replacement.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Batch> {
        if !self.ready() {
            return Err(Error::Contract(format!(
                "replay sampled with {} transitions, warmup is {}",
                self.len, self.warmup
            )));
        }
        let mut batch = Batch::default();
        for _ in 0..n {
            batch.push(self.slot(rng.gen_range(0..self.len)));
        }
        Ok(batch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tr(k: usize) -> Transition {
        Transition {
            s: vec![k as f64],
            a: vec![0.0],
            r: k as f64,
            s_next: vec![k as f64 + 1.0],
            terminal: k % 2 == 0,
        }
    }

    #[test]
    fn size_grows() {
        let mut b = ReplayBuffer::new(1, 1, 10, 0).unwrap();
        for k in 0..4 {
            b.push(&tr(k)).unwrap();
        }
        assert_eq!(b.len(), 4);
        assert_eq!(b.get(2).unwrap(), tr(2));
    }

    #[test]
    fn fifo_eviction() {
        let mut b = ReplayBuffer::new(1, 1, 5, 0).unwrap();
        for k in 1..=7 {
            b.push(&tr(k)).unwrap();
        }
        let kept: Vec<f64> = (0..5).map(|i| b.get(i).unwrap().r).collect();
        assert_eq!(kept, vec![3.0, 4.0, 5.0, 6.0, 7.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let batch = b.sample(500, &mut rng).unwrap();
        assert!(batch.rewards.iter().all(|&r| r >= 3.0));
    }

    #[test]
    fn warmup_gate() {
        let mut b = ReplayBuffer::new(1, 1, 100, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        b.push(&tr(0)).unwrap();
        assert!(matches!(b.sample(1, &mut rng), Err(Error::Contract(_))));
        b.push(&tr(1)).unwrap();
        b.push(&tr(2)).unwrap();
        assert_eq!(b.sample(4, &mut rng).unwrap().len(), 4);
    }

    #[test]
    fn rejects_bad_shapes() {
        let mut b = ReplayBuffer::new(2, 1, 10, 0).unwrap();
        assert!(b.push(&tr(0)).is_err());
        let mut t = tr(0);
        t.s = vec![0.0, f64::NAN];
        t.s_next = vec![0.0, 0.0];
        assert!(b.push(&t).is_err());
    }
}
