//! Monte Carlo Tree Search over an abstract planning domain.
//!
//! Every iteration runs select → expand (only for a leaf that has been
//! visited before) → simulate → backpropagate. Three variants share the loop:
//!
//! - [`Variant::Standard`]: UCT selection, all children kept.
//! - [`Variant::UncertaintyAware`]: UCT scores are scaled by `1 − δ_i`, where
//!   `δ` is the softmax of the children's MDE at temperature τ, and expansion
//!   drops each child with a sigmoid probability centered on the mean MDE.
//! - [`Variant::Inflated`]: standard UCT, but every model step inside the
//!   search adds `w · mde` to the predicted next state.
//!
//! Rollouts and backpropagation ignore the MDE in every variant.

mod dump;
mod expand;
mod select;
pub mod toy;

use std::ops::{Index, IndexMut};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::rng::StreamRng;
use crate::{Error, Result};

pub use dump::{dump_tree, NodeDump};
pub use expand::{keep_child, keep_probability, ua_expand};
pub use select::{softmax_weights, ua_select, uct_score};

/// Model prediction of one transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition<S> {
    pub next: S,
    /// Model deviation estimate of the transition, `>= 0`.
    pub mde: f64,
}

/// What the search needs from a problem: legal actions, a learned transition
/// model with its deviation estimate, a reward and a terminal test.
///
/// `reward` and `is_terminal` receive the model's predicted next state so
/// inflated propagation is seen consistently by both.
pub trait PlanningDomain {
    type State: Clone;
    type Action: Clone;

    /// Never empty for a non-terminal state.
    fn legal_actions(&self, state: &Self::State, depth: usize) -> Vec<Self::Action>;

    /// Deterministic in `(state, action)`.
    fn model_step(&self, state: &Self::State, action: &Self::Action) -> Result<Transition<Self::State>>;

    /// Predicted next state without the MDE. Override when the mean is cheaper.
    fn model_mean(&self, state: &Self::State, action: &Self::Action) -> Result<Self::State> {
        Ok(self.model_step(state, action)?.next)
    }

    /// Shifts a predicted state by `amount`, clamped to the state bounds.
    fn inflate(&self, next: &Self::State, amount: f64) -> Self::State;

    fn reward(&self, state: &Self::State, action: &Self::Action, next: &Self::State, depth: usize) -> f64;

    fn is_terminal(&self, state: &Self::State, action: &Self::Action, next: &Self::State, depth: usize) -> bool;
}

/// `f̂(x, u) + w·mde(x, u)`, clamped by the domain.
pub fn inflated_step<D: PlanningDomain>(domain: &D, step: Transition<D::State>, w: f64) -> D::State {
    domain.inflate(&step.next, w * step.mde)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Standard,
    UncertaintyAware,
    Inflated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Iterations(u64),
    /// Seconds of wall-clock time. Not reproducible.
    WallClock(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub variant: Variant,
    pub c_uct: f64,
    /// Softmax temperature τ.
    pub tau: f64,
    /// Sigmoid steepness h.
    pub steepness: f64,
    /// Inflation factor w.
    pub inflation_w: f64,
    pub budget: Budget,
    /// N_max; rollouts stop after a transition at depth `max_depth + 1`.
    pub max_depth: usize,
    pub rng_seed: u64,
    /// Reverse the keep test so high-MDE children are favoured.
    pub literal_expansion: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            variant: Variant::Standard,
            c_uct: std::f64::consts::SQRT_2,
            tau: 0.1,
            steepness: 10.0,
            inflation_w: 2.0,
            budget: Budget::Iterations(2000),
            max_depth: 10,
            rng_seed: 0,
            literal_expansion: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(self.c_uct > 0.0 && self.c_uct.is_finite()) {
            return bad("c_uct must be positive");
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad("tau must be positive");
        }
        if !(self.steepness >= 0.0 && self.steepness.is_finite()) {
            return bad("steepness must be non-negative");
        }
        if !(self.inflation_w >= 0.0 && self.inflation_w.is_finite()) {
            return bad("inflation_w must be non-negative");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be positive");
        }
        match self.budget {
            Budget::Iterations(0) => bad("iteration budget must be positive"),
            Budget::WallClock(s) if !(s > 0.0 && s.is_finite()) => bad("wall-clock budget must be positive"),
            _ => Ok(()),
        }
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchNode<S, A> {
    pub state: S,
    /// Action that produced this node; `None` at the root.
    pub action: Option<A>,
    /// Position of `action` in the parent's legal-action list.
    pub rank: usize,
    pub depth: usize,
    pub visits: u64,
    pub reward_sum: f64,
    /// MDE of `(parent.state, action)`, fixed at creation.
    pub mde: f64,
    /// Reward of the generating transition.
    pub transition_reward: f64,
    pub terminal: bool,
    pub fully_expanded: bool,
    /// Rollouts launched from this node.
    pub rollouts: u64,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

impl<S, A> SearchNode<S, A> {
    pub fn root(state: S) -> Self {
        SearchNode {
            state,
            action: None,
            rank: 0,
            depth: 0,
            visits: 0,
            reward_sum: 0.0,
            mde: 0.0,
            transition_reward: 0.0,
            terminal: false,
            fully_expanded: false,
            rollouts: 0,
            parent: None,
            children: Vec::new(),
        }
    }

    pub fn child(parent: NodeId, action: A, rank: usize, depth: usize, state: S, mde: f64) -> Self {
        SearchNode { action: Some(action), rank, depth, mde, parent: Some(parent), ..SearchNode::root(state) }
    }

    pub fn mean_reward(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.reward_sum / self.visits as f64
        }
    }
}

/// Arena of search nodes; the root is node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree<S, A> {
    nodes: Vec<SearchNode<S, A>>,
}

impl<S, A> Tree<S, A> {
    pub fn new(root_state: S) -> Self {
        Tree { nodes: vec![SearchNode::root(root_state)] }
    }

    pub const ROOT: NodeId = 0;

    pub fn root(&self) -> &SearchNode<S, A> {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[SearchNode<S, A>] {
        &self.nodes
    }

    pub fn push_child(&mut self, parent: NodeId, node: SearchNode<S, A>) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(node);
        self.nodes[parent].children.push(id);
        id
    }

    /// Root-first list of nodes from the root to `node`.
    pub fn path(&self, node: NodeId) -> Vec<NodeId> {
        let mut path = vec![node];
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Most visited root child; ties go to the higher mean reward, then the
    /// earlier action.
    pub fn best_root_child(&self) -> Option<NodeId> {
        self.nodes[0].children.iter().copied().max_by(|&a, &b| {
            let (na, nb) = (&self.nodes[a], &self.nodes[b]);
            na.visits.cmp(&nb.visits).then(na.mean_reward().total_cmp(&nb.mean_reward())).then(nb.rank.cmp(&na.rank))
        })
    }
}

impl<S, A> Index<NodeId> for Tree<S, A> {
    type Output = SearchNode<S, A>;

    fn index(&self, id: NodeId) -> &Self::Output {
        &self.nodes[id]
    }
}

impl<S, A> IndexMut<NodeId> for Tree<S, A> {
    fn index_mut(&mut self, id: NodeId) -> &mut Self::Output {
        &mut self.nodes[id]
    }
}

/// Adds one visit and `reward` to `node` and each of its ancestors.
pub fn backpropagate<S, A>(tree: &mut Tree<S, A>, node: NodeId, reward: f64) {
    let mut cur = Some(node);
    while let Some(id) = cur {
        let n = &mut tree[id];
        n.visits += 1;
        n.reward_sum += reward;
        cur = n.parent;
    }
}

/// Reward sampled from `start`: the generating transition's reward if the
/// node is terminal, otherwise the sum of rewards of a uniformly random
/// rollout through the model.
pub fn simulate<D: PlanningDomain>(
    tree: &Tree<D::State, D::Action>,
    start: NodeId,
    domain: &D,
    config: &SearchConfig,
    rng: &mut StreamRng,
) -> Result<f64> {
    let node = &tree[start];
    if node.terminal {
        return Ok(node.transition_reward);
    }
    rollout(domain, node.state.clone(), node.depth, config, rng)
}

fn rollout<D: PlanningDomain>(
    domain: &D,
    mut state: D::State,
    mut depth: usize,
    config: &SearchConfig,
    rng: &mut StreamRng,
) -> Result<f64> {
    let mut total = 0.0;
    loop {
        let actions = domain.legal_actions(&state, depth);
        if actions.is_empty() {
            return Ok(total);
        }
        let action = &actions[rng.random_range(0..actions.len())];
        let next = match config.variant {
            Variant::Inflated => inflated_step(domain, domain.model_step(&state, action)?, config.inflation_w),
            Variant::Standard | Variant::UncertaintyAware => domain.model_mean(&state, action)?,
        };
        total += domain.reward(&state, action, &next, depth);
        if domain.is_terminal(&state, action, &next, depth) || depth > config.max_depth {
            return Ok(total);
        }
        state = next;
        depth += 1;
    }
}

/// Final statistics of one search.
#[derive(Debug, Clone)]
pub struct SearchOutcome<S, A> {
    pub action: A,
    pub iterations: u64,
    pub tree: Tree<S, A>,
}

/// One search instance: owns its tree and RNG.
pub struct Search<'d, D: PlanningDomain> {
    domain: &'d D,
    config: SearchConfig,
    tree: Tree<D::State, D::Action>,
    rng: StreamRng,
    iterations: u64,
}

impl<'d, D: PlanningDomain> Search<'d, D> {
    pub fn new(domain: &'d D, root_state: D::State, config: SearchConfig) -> Result<Self> {
        config.validate()?;
        if domain.legal_actions(&root_state, 0).is_empty() {
            return Err(Error::Domain("root state has no legal actions".into()));
        }
        Ok(Search {
            domain,
            config,
            tree: Tree::new(root_state),
            rng: StreamRng::seed_from_u64(config.rng_seed),
            iterations: 0,
        })
    }

    pub fn tree(&self) -> &Tree<D::State, D::Action> {
        &self.tree
    }

    /// Runs one select/expand/simulate/backpropagate cycle.
    pub fn iterate(&mut self) -> Result<()> {
        let mut node = Tree::<D::State, D::Action>::ROOT;
        while self.tree[node].fully_expanded && !self.tree[node].children.is_empty() {
            node = select::select_child(&self.tree, node, &self.config);
        }
        let leaf = &self.tree[node];
        if leaf.visits > 0 && !leaf.terminal && !leaf.fully_expanded {
            if leaf.depth > self.config.max_depth {
                let leaf = &mut self.tree[node];
                leaf.terminal = true;
                leaf.fully_expanded = true;
            } else {
                node = ua_expand(&mut self.tree, node, self.domain, &self.config, &mut self.rng)?;
            }
        }

        // rewards collected on the way down; a terminal leaf's own reward
        // comes back from `simulate`
        let mut value = 0.0;
        for id in self.tree.path(node).into_iter().skip(1) {
            if id != node || !self.tree[id].terminal {
                value += self.tree[id].transition_reward;
            }
        }
        value += simulate(&self.tree, node, self.domain, &self.config, &mut self.rng)?;

        self.tree[node].rollouts += 1;
        backpropagate(&mut self.tree, node, value);
        self.iterations += 1;
        Ok(())
    }

    /// Runs the configured budget and returns the most visited root action.
    pub fn run(mut self) -> Result<SearchOutcome<D::State, D::Action>> {
        match self.config.budget {
            Budget::Iterations(n) => {
                for _ in 0..n {
                    self.iterate()?;
                }
            }
            Budget::WallClock(secs) => {
                let deadline = Instant::now() + Duration::from_secs_f64(secs);
                while Instant::now() < deadline {
                    self.iterate()?;
                }
            }
        }
        if self.iterations == 0 {
            return Err(Error::Timeout);
        }
        let best = self
            .tree
            .best_root_child()
            .ok_or_else(|| Error::InvalidArgument("search budget too small to expand the root".into()))?;
        let action = self.tree[best].action.clone().expect("root children carry actions");
        Ok(SearchOutcome { action, iterations: self.iterations, tree: self.tree })
    }
}

/// Searches from `root_state` and returns the action to execute.
pub fn search<D: PlanningDomain>(domain: &D, root_state: D::State, config: &SearchConfig) -> Result<D::Action> {
    Ok(Search::new(domain, root_state, *config)?.run()?.action)
}
