use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{Clause, CnfFormula, Variable};

/// A node of a pebbling graph: a clause of positive variables plus the ids
/// of its predecessors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PebbleNode {
    pub labels: Vec<Variable>,
    pub preds: Vec<usize>,
}

/// A labeled DAG. Node ids are positions in `nodes` and every predecessor id
/// is smaller than the id of the node it feeds, so id order is topological.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PebblingGraph {
    nodes: Vec<PebbleNode>,
    targets: Vec<usize>,
    num_vars: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("the graph has no nodes")]
    Empty,
    #[error("node {node} has an empty label")]
    EmptyLabel { node: usize },
    #[error("variable {var} appears in more than one label position")]
    RepeatedVariable { var: Variable },
    #[error("node {node} lists predecessor {pred}, which is not an earlier node")]
    BadPredecessor { node: usize, pred: usize },
    #[error("node {node} lists predecessor {pred} twice")]
    DuplicatePredecessor { node: usize, pred: usize },
    #[error("target {target} is not a node")]
    BadTarget { target: usize },
    #[error("the graph has no target")]
    NoTarget,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl PebblingGraph {
    pub fn new(nodes: Vec<PebbleNode>, targets: Vec<usize>) -> Result<PebblingGraph, GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut seen = HashSet::new();
        let mut num_vars = 0;
        for (id, node) in nodes.iter().enumerate() {
            if node.labels.is_empty() {
                return Err(GraphError::EmptyLabel { node: id });
            }
            for &var in &node.labels {
                if !seen.insert(var) {
                    return Err(GraphError::RepeatedVariable { var });
                }
                num_vars = num_vars.max(var.index());
            }
            let mut preds = HashSet::new();
            for &pred in &node.preds {
                if pred >= id {
                    return Err(GraphError::BadPredecessor { node: id, pred });
                }
                if !preds.insert(pred) {
                    return Err(GraphError::DuplicatePredecessor { node: id, pred });
                }
            }
        }
        let mut targets = targets;
        targets.sort_unstable();
        targets.dedup();
        if targets.is_empty() {
            return Err(GraphError::NoTarget);
        }
        if let Some(&target) = targets.iter().find(|&&t| t >= nodes.len()) {
            return Err(GraphError::BadTarget { target });
        }
        Ok(PebblingGraph {
            nodes,
            targets,
            num_vars,
        })
    }

    pub fn nodes(&self) -> &[PebbleNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &PebbleNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Largest label variable index.
    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn is_source(&self, id: usize) -> bool {
        self.nodes[id].preds.is_empty()
    }

    /// 1 for sources, otherwise one more than the highest predecessor.
    pub fn heights(&self) -> Vec<u32> {
        let mut h = vec![0u32; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            h[id] = 1 + node.preds.iter().map(|&p| h[p]).max().unwrap_or(0);
        }
        h
    }

    /// Number of layers if this is a pyramid grid as built by [`gen_grid`]
    /// with two variables per label.
    pub fn grid_layers(&self) -> Option<usize> {
        let n = self.nodes.len();
        let layers = (1..=n).find(|l| l * (l + 1) / 2 >= n)?;
        if layers * (layers + 1) / 2 != n || self.targets != [n - 1] {
            return None;
        }
        let expected = grid_preds(layers);
        let ok = self
            .nodes
            .iter()
            .zip(&expected)
            .all(|(node, preds)| node.labels.len() == 2 && &node.preds == preds);
        ok.then_some(layers)
    }

    /// The `p peb` text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("p peb {}\n", self.nodes.len());
        for (id, node) in self.nodes.iter().enumerate() {
            write!(out, "n {id}").unwrap();
            for v in &node.labels {
                write!(out, " {}", v.index()).unwrap();
            }
            out.push_str(" |");
            for p in &node.preds {
                write!(out, " {p}").unwrap();
            }
            out.push('\n');
        }
        for t in &self.targets {
            writeln!(out, "t {t}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<PebblingGraph, GraphError> {
        let err = |line: usize, reason: &str| GraphError::Parse {
            line,
            reason: reason.to_string(),
        };
        let mut declared: Option<usize> = None;
        let mut nodes = Vec::new();
        let mut targets = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let mut tokens = raw.split_whitespace();
            let number = |tok: Option<&str>| -> Result<usize, GraphError> {
                tok.and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(line, "expected a number"))
            };
            match tokens.next() {
                None | Some("c") => {}
                Some("p") => {
                    if tokens.next() != Some("peb") {
                        return Err(err(line, "expected `p peb N`"));
                    }
                    declared = Some(number(tokens.next())?);
                }
                Some("n") => {
                    if declared.is_none() {
                        return Err(err(line, "node before the header"));
                    }
                    if number(tokens.next())? != nodes.len() {
                        return Err(err(line, "node ids must be consecutive from 0"));
                    }
                    let mut labels = Vec::new();
                    let mut preds = Vec::new();
                    let mut after_bar = false;
                    for tok in tokens {
                        if tok == "|" {
                            after_bar = true;
                        } else if after_bar {
                            preds.push(number(Some(tok))?);
                        } else {
                            let v = number(Some(tok))?;
                            if v == 0 || v > u32::MAX as usize {
                                return Err(err(line, "label variables start at 1"));
                            }
                            labels.push(Variable::new(v as u32));
                        }
                    }
                    if !after_bar {
                        return Err(err(line, "missing `|` before the predecessor list"));
                    }
                    nodes.push(PebbleNode { labels, preds });
                }
                Some("t") => targets.push(number(tokens.next())?),
                Some(_) => return Err(err(line, "unknown line kind")),
            }
        }
        if declared != Some(nodes.len()) {
            return Err(err(
                text.lines().count(),
                "node count differs from the header",
            ));
        }
        PebblingGraph::new(nodes, targets)
    }
}

/// Predecessor lists of the `layers`-layer pyramid: bottom layer first, left
/// to right; a node's predecessors are the two adjacent nodes below it.
fn grid_preds(layers: usize) -> Vec<Vec<usize>> {
    let mut preds = Vec::with_capacity(layers * (layers + 1) / 2);
    let mut below: Option<usize> = None;
    for width in (1..=layers).rev() {
        let start = preds.len();
        for i in 0..width {
            preds.push(match below {
                None => Vec::new(),
                Some(b) => vec![b + i, b + i + 1],
            });
        }
        below = Some(start);
    }
    preds
}

/// Pyramid-shaped grid with `layers` layers, two fresh variables per node and
/// the apex as the only target. Node `t` is labeled `(x_{2t+1} ∨ x_{2t+2})`.
pub fn gen_grid(layers: usize) -> PebblingGraph {
    assert!(layers >= 1, "a grid needs at least one layer");
    let nodes: Vec<PebbleNode> = grid_preds(layers)
        .into_iter()
        .enumerate()
        .map(|(t, preds)| PebbleNode {
            labels: vec![
                Variable::new(2 * t as u32 + 1),
                Variable::new(2 * t as u32 + 2),
            ],
            preds,
        })
        .collect();
    let apex = nodes.len() - 1;
    PebblingGraph::new(nodes, vec![apex]).expect("grid is well formed")
}

/// The pebbling formula: a source clause per source, for every other node
/// one precedence clause per choice of one variable from each predecessor
/// label, and a negative unit for each target variable. Clauses come node by
/// node in id order, then the target units.
pub fn pebbling_to_cnf(g: &PebblingGraph) -> CnfFormula {
    let mut clauses = Vec::new();
    for node in g.nodes() {
        let own = node.labels.iter().map(|v| v.positive());
        if node.preds.is_empty() {
            clauses.push(Clause::new(own).expect("distinct label variables"));
            continue;
        }
        let labels: Vec<&[Variable]> = node.preds.iter().map(|&p| &g.node(p).labels[..]).collect();
        let mut choice = vec![0usize; labels.len()];
        loop {
            let lits = choice
                .iter()
                .zip(&labels)
                .map(|(&c, l)| l[c].negative())
                .chain(own.clone());
            clauses.push(Clause::new(lits).expect("distinct label variables"));
            // odometer, last predecessor fastest
            let mut k = labels.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < labels[k].len() {
                    break;
                }
                choice[k] = 0;
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    for &t in g.targets() {
        for v in &g.node(t).labels {
            clauses.push(Clause::unit(v.negative()));
        }
    }
    CnfFormula::new(g.num_vars(), clauses).expect("labels within num_vars")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::brute_force_model;

    fn vars(v: &[u32]) -> Vec<Variable> {
        v.iter().map(|&i| Variable::new(i)).collect()
    }

    #[test]
    fn grid_counts() {
        for l in 1..=100usize {
            let g = gen_grid(l);
            assert_eq!(g.len(), l * (l + 1) / 2);
            assert_eq!(g.num_vars() as usize, l * (l + 1));
            let f = pebbling_to_cnf(&g);
            assert_eq!(f.num_vars() as usize, l * (l + 1));
            assert_eq!(f.size(), 2 * l * (l - 1) + l + 2, "layers {l}");
            assert_eq!(g.grid_layers(), Some(l));
        }
        assert_eq!(gen_grid(4).num_vars(), 20);
    }

    #[test]
    fn single_layer_grid() {
        let g = gen_grid(1);
        assert!(g.is_source(0));
        assert_eq!(g.targets(), &[0]);
        let f = pebbling_to_cnf(&g);
        let dimacs: Vec<_> = f.clauses().iter().map(|c| c.to_dimacs()).collect();
        assert_eq!(dimacs, vec![vec![1, 2], vec![-1], vec![-2]]);
    }

    #[test]
    fn two_layer_grid_clauses() {
        let f = pebbling_to_cnf(&gen_grid(2));
        let dimacs: Vec<_> = f.clauses().iter().map(|c| c.to_dimacs()).collect();
        assert_eq!(
            dimacs,
            vec![
                vec![1, 2],
                vec![3, 4],
                vec![-1, -3, 5, 6],
                vec![-1, -4, 5, 6],
                vec![-2, -3, 5, 6],
                vec![-2, -4, 5, 6],
                vec![-5],
                vec![-6],
            ]
        );
        assert!(brute_force_model(&f).is_none());
        let model = brute_force_model(&f.without_clause(0)).unwrap();
        assert_eq!(model.value(Variable::new(1)), Some(false));
        assert_eq!(model.value(Variable::new(2)), Some(false));
    }

    #[test]
    fn precedence_product() {
        // (x1∨x2) over (p1∨p2∨p3), (q1), (r1∨r2)
        let nodes = vec![
            PebbleNode {
                labels: vars(&[3, 4, 5]),
                preds: vec![],
            },
            PebbleNode {
                labels: vars(&[6]),
                preds: vec![],
            },
            PebbleNode {
                labels: vars(&[7, 8]),
                preds: vec![],
            },
            PebbleNode {
                labels: vars(&[1, 2]),
                preds: vec![0, 1, 2],
            },
        ];
        let g = PebblingGraph::new(nodes, vec![3]).unwrap();
        let f = pebbling_to_cnf(&g);
        let prec: Vec<_> = f.clauses()[3..9].iter().map(|c| c.to_dimacs()).collect();
        assert_eq!(f.size(), 3 + 6 + 2);
        for p in [3, 4, 5] {
            for r in [7, 8] {
                let mut want = vec![1, 2, -p, -6, -r];
                want.sort_by_key(|x: &i64| (x.unsigned_abs(), *x > 0));
                assert!(prec.iter().any(|c| {
                    let mut c = c.clone();
                    c.sort_by_key(|x| (x.unsigned_abs(), *x > 0));
                    c == want
                }));
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let g = gen_grid(3);
        let text = g.to_text();
        assert!(text.starts_with("p peb 6\nn 0 1 2 |\n"));
        assert!(text.contains("n 5 11 12 | 3 4\n"));
        assert_eq!(PebblingGraph::parse(&text).unwrap(), g);
    }

    #[test]
    fn validation() {
        let n = |labels: &[u32], preds: Vec<usize>| PebbleNode {
            labels: vars(labels),
            preds,
        };
        assert_eq!(
            PebblingGraph::new(vec![n(&[1], vec![]), n(&[1], vec![0])], vec![1]),
            Err(GraphError::RepeatedVariable {
                var: Variable::new(1)
            })
        );
        assert_eq!(
            PebblingGraph::new(vec![n(&[1], vec![1])], vec![0]),
            Err(GraphError::BadPredecessor { node: 0, pred: 1 })
        );
        assert_eq!(
            PebblingGraph::new(vec![n(&[], vec![])], vec![0]),
            Err(GraphError::EmptyLabel { node: 0 })
        );
        assert_eq!(
            PebblingGraph::new(vec![n(&[1], vec![])], vec![]),
            Err(GraphError::NoTarget)
        );
        assert!(PebblingGraph::parse("p peb 2\nn 0 1 |\nt 0\n").is_err());
        assert!(PebblingGraph::parse("p peb 1\nn 0 1\nt 0\n").is_err());
    }

    #[test]
    fn heights_follow_predecessors() {
        let g = gen_grid(5);
        let h = g.heights();
        for (id, node) in g.nodes().iter().enumerate() {
            let below = node.preds.iter().map(|&p| h[p]).max().unwrap_or(0);
            assert_eq!(h[id], below + 1);
        }
        assert_eq!(h[g.len() - 1], 5);
    }
}
