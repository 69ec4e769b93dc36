//! Small deterministic domains for exercising the search.

use super::{PlanningDomain, Transition};
use crate::Result;

/// One decision among actions with fixed terminal rewards.
#[derive(Debug, Clone)]
pub struct BanditDomain {
    pub rewards: Vec<f64>,
    pub mdes: Vec<f64>,
}

impl BanditDomain {
    pub fn new(rewards: Vec<f64>) -> Self {
        let mdes = vec![0.0; rewards.len()];
        BanditDomain { rewards, mdes }
    }
}

impl PlanningDomain for BanditDomain {
    type State = u32;
    type Action = usize;

    fn legal_actions(&self, _state: &u32, _depth: usize) -> Vec<usize> {
        (0..self.rewards.len()).collect()
    }

    fn model_step(&self, state: &u32, action: &usize) -> Result<Transition<u32>> {
        Ok(Transition { next: state + 1, mde: self.mdes[*action] })
    }

    fn inflate(&self, next: &u32, _amount: f64) -> u32 {
        *next
    }

    fn reward(&self, _s: &u32, action: &usize, _n: &u32, _d: usize) -> f64 {
        self.rewards[*action]
    }

    fn is_terminal(&self, _s: &u32, _a: &usize, _n: &u32, _d: usize) -> bool {
        true
    }
}

/// Fixed-length sequence of `branching`-way choices. The state encodes the
/// actions taken so far; only complete sequences are rewarded, by table
/// lookup in base-`branching` order.
#[derive(Debug, Clone)]
pub struct ChainDomain {
    pub branching: usize,
    pub length: usize,
    pub leaf_rewards: Vec<f64>,
    /// Constant MDE reported for every transition.
    pub mde: f64,
}

/// Chain state: the encoded action prefix and its length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct ChainState {
    pub code: usize,
    pub len: usize,
}

impl ChainDomain {
    pub fn new(branching: usize, length: usize, leaf_rewards: Vec<f64>) -> Self {
        assert_eq!(leaf_rewards.len(), branching.pow(length as u32));
        ChainDomain { branching, length, leaf_rewards, mde: 0.0 }
    }

    pub fn start(&self) -> ChainState {
        ChainState { code: 0, len: 0 }
    }

    fn push(&self, s: &ChainState, a: usize) -> ChainState {
        ChainState { code: s.code * self.branching + a, len: s.len + 1 }
    }
}

impl PlanningDomain for ChainDomain {
    type State = ChainState;
    type Action = usize;

    fn legal_actions(&self, state: &ChainState, _depth: usize) -> Vec<usize> {
        if state.len >= self.length {
            Vec::new()
        } else {
            (0..self.branching).collect()
        }
    }

    fn model_step(&self, state: &ChainState, action: &usize) -> Result<Transition<ChainState>> {
        Ok(Transition { next: self.push(state, *action), mde: self.mde })
    }

    fn inflate(&self, next: &ChainState, _amount: f64) -> ChainState {
        *next
    }

    fn reward(&self, _s: &ChainState, _a: &usize, next: &ChainState, _d: usize) -> f64 {
        if next.len == self.length {
            self.leaf_rewards[next.code]
        } else {
            0.0
        }
    }

    fn is_terminal(&self, _s: &ChainState, _a: &usize, next: &ChainState, _d: usize) -> bool {
        next.len == self.length
    }
}
