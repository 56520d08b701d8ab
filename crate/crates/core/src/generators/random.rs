use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::pebbling::{PebbleNode, PebblingGraph};
use crate::formula::Variable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RandomGraphError {
    #[error("a random pebbling graph needs at least one node")]
    NoNodes,
    #[error("labels need at least one variable")]
    NoLabel,
    #[error("indegree bound {0} is below 2 but the graph has more than two nodes")]
    IndegreeTooSmall(usize),
}

/// A seeded random pebbling graph. The first two nodes are sources; every
/// later node draws an indegree uniformly from `[2, min(max_indegree, #earlier)]`
/// and that many distinct earlier nodes as predecessors. Label sizes are
/// uniform in `[1, max_label]`. All sinks are then paired up by a binary
/// cap of 2-variable nodes whose apex is the only target.
pub fn gen_random_pebbling(
    nodes: usize,
    max_indegree: usize,
    max_label: usize,
    seed: u64,
) -> Result<PebblingGraph, RandomGraphError> {
    if nodes == 0 {
        return Err(RandomGraphError::NoNodes);
    }
    if max_label == 0 {
        return Err(RandomGraphError::NoLabel);
    }
    if nodes > 2 && max_indegree < 2 {
        return Err(RandomGraphError::IndegreeTooSmall(max_indegree));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next_var = 1u32;
    let mut fresh = |k: usize| -> Vec<Variable> {
        let vars = (0..k as u32).map(|i| Variable::new(next_var + i)).collect();
        next_var += k as u32;
        vars
    };
    let mut out: Vec<PebbleNode> = Vec::with_capacity(2 * nodes);
    let mut has_succ = vec![false; nodes];
    for id in 0..nodes {
        let preds = if id < 2 {
            Vec::new()
        } else {
            let degree = rng.gen_range(2..=max_indegree.min(id));
            let mut preds = sample(&mut rng, id, degree).into_vec();
            preds.sort_unstable();
            preds
        };
        for &p in &preds {
            has_succ[p] = true;
        }
        let size = rng.gen_range(1..=max_label);
        out.push(PebbleNode {
            labels: fresh(size),
            preds,
        });
    }
    let mut layer: Vec<usize> = (0..nodes).filter(|&i| !has_succ[i]).collect();
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len().div_ceil(2));
        for pair in layer.chunks(2) {
            if let [a, b] = *pair {
                next.push(out.len());
                out.push(PebbleNode {
                    labels: fresh(2),
                    preds: vec![a, b],
                });
            } else {
                next.push(pair[0]);
            }
        }
        layer = next;
    }
    Ok(PebblingGraph::new(out, layer).expect("random graph is well formed"))
}
