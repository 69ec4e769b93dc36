//! UCT scoring and (uncertainty-aware) child selection.

use std::cmp::Ordering;

use super::{NodeId, SearchConfig, Tree, Variant};

/// `Q/N + c·sqrt(ln N_parent / N)`.
///
/// Unvisited children have no score; the search visits them before scoring.
pub fn uct_score(reward_sum: f64, visits: u64, parent_visits: u64, c_uct: f64) -> f64 {
    assert!(visits >= 1, "uct_score called on an unvisited child");
    assert!(parent_visits >= 1, "uct_score called with an unvisited parent");
    let n = visits as f64;
    reward_sum / n + c_uct * ((parent_visits as f64).ln() / n).sqrt()
}

/// Softmax of `mdes / tau` with max-subtraction.
pub fn softmax_weights(mdes: &[f64], tau: f64) -> Vec<f64> {
    let max = mdes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = mdes.iter().map(|m| ((m - max) / tau).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Lower MDE first, then earlier action.
fn tie_order<S, A>(tree: &Tree<S, A>, a: NodeId, b: NodeId) -> Ordering {
    let (na, nb) = (&tree[a], &tree[b]);
    na.mde.total_cmp(&nb.mde).then(na.rank.cmp(&nb.rank))
}

/// Picks the child of a fully expanded `parent` whose children have all been
/// visited. Standard and inflated searches use plain UCT; the
/// uncertainty-aware variant scales each score by `1 - δ_i`.
pub fn ua_select<S, A>(tree: &Tree<S, A>, parent: NodeId, config: &SearchConfig) -> NodeId {
    let children = &tree[parent].children;
    assert!(!children.is_empty(), "ua_select on a node without children");
    let parent_n = tree[parent].visits;

    let discount = match config.variant {
        Variant::UncertaintyAware => {
            let mdes: Vec<f64> = children.iter().map(|&c| tree[c].mde).collect();
            Some(softmax_weights(&mdes, config.tau))
        }
        Variant::Standard | Variant::Inflated => None,
    };

    let mut best = children[0];
    let mut best_score = f64::NEG_INFINITY;
    for (i, &c) in children.iter().enumerate() {
        let node = &tree[c];
        let mut score = uct_score(node.reward_sum, node.visits, parent_n, config.c_uct);
        if let Some(d) = &discount {
            score *= 1.0 - d[i];
        }
        let better = score > best_score || (score == best_score && tie_order(tree, c, best) == Ordering::Less);
        if better {
            best = c;
            best_score = score;
        }
    }
    best
}

/// Selection step used during descent: unvisited children first (lowest MDE
/// first in the uncertainty-aware variant, action order otherwise), then
/// [`ua_select`].
pub(crate) fn select_child<S, A>(tree: &Tree<S, A>, parent: NodeId, config: &SearchConfig) -> NodeId {
    let unvisited = tree[parent].children.iter().copied().filter(|&c| tree[c].visits == 0);
    let first = match config.variant {
        Variant::UncertaintyAware => unvisited.min_by(|&a, &b| tie_order(tree, a, b)),
        Variant::Standard | Variant::Inflated => unvisited.min_by_key(|&c| tree[c].rank),
    };
    first.unwrap_or_else(|| ua_select(tree, parent, config))
}
