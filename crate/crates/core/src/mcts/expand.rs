//! Node expansion with sigmoid rejection of high-MDE children.

use rand::Rng;

use super::{inflated_step, NodeId, PlanningDomain, SearchConfig, SearchNode, Tree, Variant};
use crate::rng::StreamRng;
use crate::Result;

/// `1 / (1 + exp(h·(mde − θ)))`: the probability that a child survives
/// expansion. Children above the mean MDE θ are likely to be dropped.
pub fn keep_probability(mde: f64, theta: f64, steepness: f64) -> f64 {
    1.0 / (1.0 + (steepness * (mde - theta)).exp())
}

/// One Bernoulli keep/discard draw. With `literal` set the comparison is
/// reversed (keep when `u > p`), which keeps high-MDE children preferentially.
pub fn keep_child(mde: f64, theta: f64, steepness: f64, literal: bool, rng: &mut impl Rng) -> bool {
    let p = keep_probability(mde, theta, steepness);
    let u: f64 = rng.random();
    if literal {
        u > p
    } else {
        u < p
    }
}

pub(crate) struct Candidate<S, A> {
    pub action: A,
    pub rank: usize,
    pub next: S,
    pub mde: f64,
    pub terminal: bool,
    pub reward: f64,
}

/// Applies every legal action to the leaf, filters the resulting children
/// (uncertainty-aware variant only), attaches the survivors and returns one of
/// them uniformly at random. A leaf with no legal actions becomes terminal and
/// is returned unchanged.
pub fn ua_expand<D: PlanningDomain>(
    tree: &mut Tree<D::State, D::Action>,
    leaf: NodeId,
    domain: &D,
    config: &SearchConfig,
    rng: &mut StreamRng,
) -> Result<NodeId> {
    let state = tree[leaf].state.clone();
    let depth = tree[leaf].depth;
    let actions = domain.legal_actions(&state, depth);
    if actions.is_empty() {
        let node = &mut tree[leaf];
        node.terminal = true;
        node.fully_expanded = true;
        return Ok(leaf);
    }

    let mut candidates = Vec::with_capacity(actions.len());
    for (rank, action) in actions.into_iter().enumerate() {
        let step = domain.model_step(&state, &action)?;
        let mde = step.mde;
        let next = match config.variant {
            Variant::Inflated => inflated_step(domain, step, config.inflation_w),
            Variant::Standard | Variant::UncertaintyAware => step.next,
        };
        let terminal = domain.is_terminal(&state, &action, &next, depth);
        let reward = domain.reward(&state, &action, &next, depth);
        candidates.push(Candidate { action, rank, next, mde, terminal, reward });
    }

    let kept: Vec<bool> = match config.variant {
        Variant::UncertaintyAware => {
            let theta = candidates.iter().map(|c| c.mde).sum::<f64>() / candidates.len() as f64;
            let mut kept: Vec<bool> = candidates
                .iter()
                .map(|c| keep_child(c.mde, theta, config.steepness, config.literal_expansion, rng))
                .collect();
            if !kept.iter().any(|&k| k) {
                let min = candidates
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.mde.total_cmp(&b.1.mde).then(a.1.rank.cmp(&b.1.rank)))
                    .map(|(i, _)| i)
                    .expect("non-empty candidates");
                kept[min] = true;
            }
            kept
        }
        Variant::Standard | Variant::Inflated => vec![true; candidates.len()],
    };

    let mut added = Vec::new();
    for (c, keep) in candidates.into_iter().zip(kept) {
        if !keep {
            continue;
        }
        let mut node = SearchNode::child(leaf, c.action, c.rank, depth + 1, c.next, c.mde);
        node.terminal = c.terminal;
        node.transition_reward = c.reward;
        added.push(tree.push_child(leaf, node));
    }
    tree[leaf].fully_expanded = true;
    let pick = rng.random_range(0..added.len());
    Ok(added[pick])
}
