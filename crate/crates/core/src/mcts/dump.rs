use serde::Serialize;

use super::{NodeId, Tree};

/// One node of a tree dump.
#[derive(Debug, Clone, Serialize)]
pub struct NodeDump<S, A> {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub depth: usize,
    pub state: S,
    pub gen_action: Option<A>,
    #[serde(rename = "N")]
    pub visits: u64,
    #[serde(rename = "Q")]
    pub reward_sum: f64,
    pub mde_val: f64,
}

/// Flattens the tree into a JSON array, root first.
pub fn dump_tree<S: Serialize + Clone, A: Serialize + Clone>(tree: &Tree<S, A>) -> serde_json::Value {
    let nodes: Vec<NodeDump<S, A>> = tree
        .nodes()
        .iter()
        .enumerate()
        .map(|(id, n)| NodeDump {
            id,
            parent: n.parent,
            depth: n.depth,
            state: n.state.clone(),
            gen_action: n.action.clone(),
            visits: n.visits,
            reward_sum: n.reward_sum,
            mde_val: n.mde,
        })
        .collect();
    serde_json::to_value(nodes).expect("tree dump serializes")
}
