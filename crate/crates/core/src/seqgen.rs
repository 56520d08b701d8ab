//! Branching sequences built from the structure behind a formula: pebbling
//! graphs (general and grid) and the ordering principle.
//!
//! Every emitted literal is positive, so the solver tries the variable FALSE
//! first.

use thiserror::Error;

use crate::formula::Variable;
use crate::generators::{GtnInstance, PebblingGraph};
use crate::sequence::BranchingSequence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqGenError {
    #[error("expected a single target, found {0}")]
    MultipleTargets(usize),
    #[error("the graph is not a pyramid grid with two variables per node")]
    NotGrid,
}

struct PebState<'g> {
    g: &'g PebblingGraph,
    /// Predecessors by increasing height, with unit-labeled nodes removed.
    preds: Vec<Vec<usize>>,
    source: Vec<bool>,
    visited: Vec<bool>,
    visited_as_high: Vec<bool>,
    out: BranchingSequence,
}

impl PebState<'_> {
    fn emit(&mut self, labels: &[Variable]) {
        for v in labels {
            self.out.push(v.positive());
        }
    }

    fn wrapper(&mut self, v: usize) {
        let n = self.preds[v].len();
        if n > 0 {
            self.subseq(v, n);
        }
    }

    /// Sequence for the `i` lowest predecessors of `v` (1-based).
    fn subseq(&mut self, v: usize, i: usize) {
        let u = self.preds[v][i - 1];
        if i == 1 {
            if !self.visited[u] && !self.source[u] {
                self.visited[u] = true;
                self.wrapper(u);
            }
            return;
        }
        let labels = &self.g.node(u).labels;
        let (head, last) = labels.split_at(labels.len() - 1);
        self.emit(head);
        if !self.visited_as_high[u] && !self.source[u] {
            self.visited_as_high[u] = true;
            self.emit(last);
            if !self.visited[u] {
                self.visited[u] = true;
                self.wrapper(u);
            }
        }
        self.subseq(v, i - 1);
        for j in (1..=labels.len().saturating_sub(2)).rev() {
            self.emit(&labels[..j]);
            self.subseq(v, i - 1);
        }
        self.subseq(v, i - 1);
    }
}

/// Sequence under which a 1UIP learner with fast backtracking refutes the
/// pebbling formula of `g`, learning node labels bottom up. It still runs to
/// completion on the formula with any one clause deleted.
///
/// Predecessors are visited highest first. Equal heights are ordered by
/// descending id, so the left predecessor of a grid node counts as higher.
pub fn peb_seq_1uip(g: &PebblingGraph) -> Result<BranchingSequence, SeqGenError> {
    if g.targets().len() != 1 {
        return Err(SeqGenError::MultipleTargets(g.targets().len()));
    }
    let height = g.heights();
    let n = g.len();
    let unit: Vec<bool> = g
        .nodes()
        .iter()
        .map(|node| node.labels.len() == 1)
        .collect();
    let preds: Vec<Vec<usize>> = g
        .nodes()
        .iter()
        .map(|node| {
            let mut p: Vec<usize> = node.preds.clone();
            p.sort_by_key(|&u| (height[u], std::cmp::Reverse(u)));
            p.retain(|&u| !unit[u]);
            p
        })
        .collect();
    let source = preds.iter().map(|p| p.is_empty()).collect();
    let mut st = PebState {
        g,
        preds,
        source,
        visited: vec![false; n],
        visited_as_high: vec![false; n],
        out: BranchingSequence::new(),
    };

    let mut units: Vec<usize> = (0..n).filter(|&v| unit[v]).collect();
    units.sort_by_key(|&v| (height[v], v));
    for u in units {
        if g.targets().contains(&u) {
            continue;
        }
        st.emit(&g.node(u).labels);
        st.wrapper(u);
    }
    let mut targets = g.targets().to_vec();
    targets.sort_by_key(|&t| (height[t], t));
    for t in targets {
        st.wrapper(t);
    }
    Ok(st.out)
}

/// The grid case as one recursion from the apex: each node's left
/// predecessor contributes its first label, and on its first visit as a left
/// predecessor its second label and its own subsequence; the right
/// predecessor is then descended into once.
pub fn grid_peb_seq_1uip(g: &PebblingGraph) -> Result<BranchingSequence, SeqGenError> {
    g.grid_layers().ok_or(SeqGenError::NotGrid)?;
    let n = g.len();
    let mut visited = vec![false; n];
    let mut visited_as_left = vec![false; n];
    let mut out = BranchingSequence::new();
    // explicit stack; a frame resumes at the right predecessor
    enum Frame {
        Enter(usize),
        Right(usize),
    }
    let mut stack = vec![Frame::Enter(n - 1)];
    while let Some(frame) = stack.pop() {
        match frame {
            Frame::Enter(v) => {
                if g.is_source(v) {
                    continue;
                }
                let left = g.node(v).preds[0];
                let labels = &g.node(left).labels;
                out.push(labels[0].positive());
                if !visited_as_left[left] && !g.is_source(left) {
                    visited_as_left[left] = true;
                    out.push(labels[1].positive());
                    stack.push(Frame::Right(v));
                    if !visited[left] {
                        visited[left] = true;
                        stack.push(Frame::Enter(left));
                    }
                }
            }
            Frame::Right(v) => {
                let right = g.node(v).preds[1];
                if !visited[right] && !g.is_source(right) {
                    visited[right] = true;
                    stack.push(Frame::Enter(right));
                }
            }
        }
    }
    Ok(out)
}

/// Row-by-row sequence over `x_{i,j}` for `j = 1..n`, `i = 1..n-1`, `i ≠ j`,
/// followed by row `n` once more. It is not complete: the solver finishes
/// with its own heuristic.
pub fn gtn_seq(n: usize) -> BranchingSequence {
    let g = GtnInstance::new(n);
    let mut out = BranchingSequence::new();
    let rows = (1..=n).chain(std::iter::once(n));
    for j in rows {
        for i in (1..n).filter(|&i| i != j) {
            out.push(g.var(i, j).positive());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Literal;
    use crate::generators::{gen_grid, gen_random_pebbling, PebbleNode};

    fn seq(s: &BranchingSequence) -> Vec<i64> {
        s.literals().map(Literal::to_dimacs).collect()
    }

    /// Four-layer grid with nodes a..j, bottom layer first, two variables each.
    fn letter(c: char, k: i64) -> i64 {
        2 * (c as i64 - 'a' as i64) + k
    }

    #[test]
    fn four_layer_grid_golden() {
        let g = gen_grid(4);
        let want: Vec<i64> = [
            ('h', 1),
            ('h', 2),
            ('e', 1),
            ('e', 2),
            ('a', 1),
            ('b', 1),
            ('f', 1),
            ('f', 2),
            ('c', 1),
        ]
        .iter()
        .map(|&(c, k)| letter(c, k))
        .collect();
        assert_eq!(seq(&peb_seq_1uip(&g).unwrap()), want);
        assert_eq!(seq(&grid_peb_seq_1uip(&g).unwrap()), want);
    }

    /// Units a and b; e has three variables, d three, the rest two.
    pub(crate) fn unit_example() -> PebblingGraph {
        let vars = |r: std::ops::RangeInclusive<u32>| r.map(Variable::new).collect();
        let node = |labels, preds: &[usize]| PebbleNode {
            labels,
            preds: preds.to_vec(),
        };
        // ids: c f d g e a b t
        PebblingGraph::new(
            vec![
                node(vars(1..=2), &[]),
                node(vars(3..=4), &[]),
                node(vars(5..=7), &[]),
                node(vars(8..=9), &[]),
                node(vars(10..=12), &[1, 3]),
                node(vars(13..=13), &[0, 2]),
                node(vars(14..=14), &[2, 1, 4]),
                node(vars(15..=16), &[5, 6]),
            ],
            vec![7],
        )
        .unwrap()
    }

    #[test]
    fn unit_example_golden() {
        let (a1, c1, b1, e1, e2, e3, f1) = (13, 1, 14, 10, 11, 12, 3);
        assert_eq!(
            seq(&peb_seq_1uip(&unit_example()).unwrap()),
            vec![a1, c1, b1, e1, e2, e3, f1, f1, e1, f1, f1]
        );
    }

    #[test]
    fn small_grids() {
        assert!(peb_seq_1uip(&gen_grid(1)).unwrap().is_empty());
        assert!(grid_peb_seq_1uip(&gen_grid(1)).unwrap().is_empty());
        assert_eq!(seq(&grid_peb_seq_1uip(&gen_grid(2)).unwrap()), vec![1]);
        assert_eq!(
            seq(&grid_peb_seq_1uip(&gen_grid(3)).unwrap()),
            vec![7, 8, 1, 3]
        );
    }

    #[test]
    fn grid_specialization_agrees() {
        for l in 2..=12 {
            let g = gen_grid(l);
            assert_eq!(
                peb_seq_1uip(&g).unwrap(),
                grid_peb_seq_1uip(&g).unwrap(),
                "layers {l}"
            );
        }
    }

    #[test]
    fn grid_sequence_is_linear() {
        for l in 2..=50 {
            let g = gen_grid(l);
            let s = grid_peb_seq_1uip(&g).unwrap();
            assert!(s.len() <= 2 * g.len(), "layers {l}");
        }
    }

    #[test]
    fn rejects_non_grid_and_multi_target() {
        let g = gen_random_pebbling(8, 3, 3, 4).unwrap();
        assert_eq!(grid_peb_seq_1uip(&g), Err(SeqGenError::NotGrid));
        let two = PebblingGraph::new(
            vec![
                PebbleNode {
                    labels: vec![Variable::new(1)],
                    preds: vec![],
                },
                PebbleNode {
                    labels: vec![Variable::new(2)],
                    preds: vec![],
                },
            ],
            vec![0, 1],
        )
        .unwrap();
        assert_eq!(peb_seq_1uip(&two), Err(SeqGenError::MultipleTargets(2)));
    }

    #[test]
    fn gtn_rows() {
        let g = GtnInstance::new(4);
        let x = |i, j| g.var(i, j).index() as i64;
        assert_eq!(
            seq(&gtn_seq(4)),
            vec![
                x(2, 1),
                x(3, 1),
                x(1, 2),
                x(3, 2),
                x(1, 3),
                x(2, 3),
                x(1, 4),
                x(2, 4),
                x(3, 4),
                x(1, 4),
                x(2, 4),
                x(3, 4)
            ]
        );
        for n in 3..12 {
            let s = gtn_seq(n);
            assert_eq!(s.len(), n * (n - 1));
            assert!(s
                .literals()
                .all(|l| l.var().index() as usize <= n * (n - 1)));
        }
    }
}
