//! Conflict graphs, cuts, learning schemes and the trivial derivations that
//! certify learned clauses.
//!
//! A conflict graph is rebuilt from the trail at each conflict by walking
//! reasons backwards from the falsified clause. Its nodes are the trail
//! literals in the cone of the conflict, in trail order, followed by one
//! virtual node: the literal the falsified clause would have implied (or, for
//! a CL-- branch on a TRUE literal, the branch itself as a decision). The
//! variable of that literal is the conflict variable; the two literals over it
//! are the conflict literals and both feed the sink.
//!
//! A [`Cut`] is stored as a membership vector for the conflict side, with the
//! sink at index `nodes.len()`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::formula::{Clause, Literal, Variable};
use crate::proof::ResolutionProof;
use crate::solver::{ClauseId, ConflictSource, LearningScheme, Solver};

#[derive(Clone, Debug)]
pub struct GraphNode {
    pub literal: Literal,
    pub level: u32,
    /// Trail position; `None` for the virtual conflict node.
    pub position: Option<usize>,
    pub decision: bool,
    pub reason: Option<ClauseId>,
    /// The clause that implied this literal.
    pub antecedent: Option<Clause>,
    pub preds: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ConflictGraph {
    nodes: Vec<GraphNode>,
    succs: Vec<Vec<usize>>,
    /// Index of the conflict literal that is on the trail.
    trail_conflict: usize,
    /// Index of the virtual conflict literal (always the last node).
    virtual_conflict: usize,
    conflict_level: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    conflict_side: Vec<bool>,
}

impl Cut {
    pub fn on_conflict_side(&self, node: usize) -> bool {
        self.conflict_side[node]
    }

    /// Number of nodes on the conflict side, the sink included.
    pub fn conflict_side_len(&self) -> usize {
        self.conflict_side.iter().filter(|&&b| b).count()
    }
}

impl ConflictGraph {
    /// Walks reasons backwards from the conflict. Each node keeps exactly the
    /// reason recorded when it was propagated.
    pub fn build(solver: &Solver<'_>, source: ConflictSource) -> ConflictGraph {
        let mut seen: HashSet<Variable> = HashSet::new();
        let mut stack: Vec<Variable> = Vec::new();
        let mut found: Vec<(usize, Variable)> = Vec::new();
        let mut visit = |v: Variable, stack: &mut Vec<Variable>| {
            if seen.insert(v) {
                stack.push(v);
            }
        };

        let (virt_lit, virt_level, virt_decision, virt_reason, virt_others): (
            Literal,
            u32,
            bool,
            Option<ClauseId>,
            Vec<Literal>,
        ) = match source {
            ConflictSource::Clause(id) => {
                let k = solver.clause(id);
                let c = *k
                    .literals()
                    .iter()
                    .max_by_key(|l| solver.assignment(l.var()).expect("falsified clause").0)
                    .expect("falsified clause is nonempty");
                let others: Vec<Literal> =
                    k.literals().iter().copied().filter(|&l| l != c).collect();
                let level = others
                    .iter()
                    .map(|l| solver.level_of(l.var()).unwrap())
                    .max()
                    .unwrap_or(0);
                (c, level, false, Some(id), others)
            }
            ConflictSource::Branch(l) => (!l, solver.decision_level() + 1, true, None, Vec::new()),
        };
        visit(virt_lit.var(), &mut stack);
        for l in &virt_others {
            visit(l.var(), &mut stack);
        }
        while let Some(v) = stack.pop() {
            let (pos, entry) = solver.assignment(v).expect("graph nodes are assigned");
            found.push((pos, v));
            if let Some(rid) = entry.reason() {
                for &q in solver.clause(rid).literals() {
                    if q != entry.literal {
                        visit(q.var(), &mut stack);
                    }
                }
            }
        }
        found.sort_unstable();

        let index: HashMap<Variable, usize> = found
            .iter()
            .enumerate()
            .map(|(i, &(_, v))| (v, i))
            .collect();
        let mut nodes: Vec<GraphNode> = found
            .iter()
            .map(|&(pos, v)| {
                let (_, e) = solver.assignment(v).unwrap();
                let reason = e.reason();
                let antecedent = reason.map(|r| solver.clause(r).clone());
                let preds = antecedent
                    .as_ref()
                    .map(|c| {
                        c.literals()
                            .iter()
                            .filter(|&&q| q != e.literal)
                            .map(|q| index[&q.var()])
                            .collect()
                    })
                    .unwrap_or_default();
                GraphNode {
                    literal: e.literal,
                    level: e.level,
                    position: Some(pos),
                    decision: e.is_decision(),
                    reason,
                    antecedent,
                    preds,
                }
            })
            .collect();
        let trail_conflict = index[&virt_lit.var()];
        nodes.push(GraphNode {
            literal: virt_lit,
            level: virt_level,
            position: None,
            decision: virt_decision,
            reason: virt_reason,
            antecedent: virt_reason.map(|r| solver.clause(r).clone()),
            preds: virt_others.iter().map(|l| index[&l.var()]).collect(),
        });
        let virtual_conflict = nodes.len() - 1;
        let mut succs = vec![Vec::new(); nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            for &p in &n.preds {
                succs[p].push(i);
            }
        }
        let conflict_level = nodes.iter().map(|n| n.level).max().unwrap_or(0);
        ConflictGraph {
            nodes,
            succs,
            trail_conflict,
            virtual_conflict,
            conflict_level,
        }
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &GraphNode {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index used for the sink in cuts.
    pub fn sink(&self) -> usize {
        self.nodes.len()
    }

    pub fn conflict_variable(&self) -> Variable {
        self.nodes[self.virtual_conflict].literal.var()
    }

    /// The two conflict nodes: (on the trail, virtual).
    pub fn conflict_nodes(&self) -> (usize, usize) {
        (self.trail_conflict, self.virtual_conflict)
    }

    pub fn conflict_level(&self) -> u32 {
        self.conflict_level
    }

    pub fn decision_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].decision)
    }

    pub fn find(&self, literal: Literal) -> Option<usize> {
        self.nodes.iter().position(|n| n.literal == literal)
    }

    fn is_conflict_node(&self, i: usize) -> bool {
        i == self.trail_conflict || i == self.virtual_conflict
    }

    /// The conflict literal a cut starts from: the virtual one unless it is a
    /// decision.
    fn start_node(&self) -> usize {
        if self.nodes[self.virtual_conflict].decision {
            self.trail_conflict
        } else {
            self.virtual_conflict
        }
    }

    fn empty_cut(&self) -> Cut {
        let mut conflict_side = vec![false; self.nodes.len() + 1];
        conflict_side[self.nodes.len()] = true;
        Cut { conflict_side }
    }

    /// Cut with every node on the conflict side; used for refutations, where
    /// the graph holds no decisions.
    pub fn full_cut(&self) -> Cut {
        Cut {
            conflict_side: vec![true; self.nodes.len() + 1],
        }
    }

    /// Builds a cut from the literals on its conflict side.
    pub fn cut_from_conflict_side(&self, literals: &[Literal]) -> Cut {
        let mut cut = self.empty_cut();
        for (i, n) in self.nodes.iter().enumerate() {
            if literals.contains(&n.literal) {
                cut.conflict_side[i] = true;
            }
        }
        cut
    }

    fn feeds_conflict_side(&self, cut: &Cut, i: usize) -> bool {
        self.is_conflict_node(i) || self.succs[i].iter().any(|&s| cut.conflict_side[s])
    }

    /// Reason-side nodes with an edge into the conflict side.
    pub fn frontier(&self, cut: &Cut) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| !cut.conflict_side[i] && self.feeds_conflict_side(cut, i))
            .collect()
    }

    /// The sink is on the conflict side, every decision on the reason side, and
    /// at least one conflict literal on the conflict side.
    pub fn is_valid_cut(&self, cut: &Cut) -> bool {
        cut.conflict_side.len() == self.nodes.len() + 1
            && cut.conflict_side[self.nodes.len()]
            && self.decision_nodes().all(|i| !cut.conflict_side[i])
            && (cut.conflict_side[self.trail_conflict] || cut.conflict_side[self.virtual_conflict])
    }

    pub fn cut_to_clause(&self, cut: &Cut) -> Clause {
        Clause::new(
            self.frontier(cut)
                .into_iter()
                .map(|i| !self.nodes[i].literal),
        )
        .expect("a valid cut never yields a tautology")
    }

    pub fn conflict_side_literals(&self, cut: &Cut) -> Vec<Literal> {
        (0..self.nodes.len())
            .filter(|&i| cut.conflict_side[i])
            .map(|i| self.nodes[i].literal)
            .collect()
    }

    /// Antecedents of the conflict-side nodes, i.e. the clauses resolved
    /// together by the cut's trivial derivation.
    pub fn antecedents<'a>(&'a self, cut: &'a Cut) -> impl Iterator<Item = &'a Clause> + 'a {
        (0..self.nodes.len())
            .filter(|&i| cut.conflict_side[i])
            .filter_map(|i| self.nodes[i].antecedent.as_ref())
    }

    /// Moves level-0 reason-side nodes that feed the conflict side across,
    /// repeatedly, so the clause carries no literal fixed at level 0.
    fn absorb_level_zero(&self, cut: &mut Cut) {
        for i in (0..self.nodes.len()).rev() {
            let n = &self.nodes[i];
            if !cut.conflict_side[i]
                && n.level == 0
                && !n.decision
                && self.feeds_conflict_side(cut, i)
            {
                cut.conflict_side[i] = true;
            }
        }
    }

    /// Derivation of the cut's clause: start from the antecedent of a
    /// conflict literal, then resolve with the antecedent of every other
    /// conflict-side node, latest first, on that node's variable.
    pub fn trivial_derivation(&self, cut: &Cut) -> ResolutionProof {
        let base = if cut.conflict_side[self.virtual_conflict]
            && !self.nodes[self.virtual_conflict].decision
        {
            self.virtual_conflict
        } else {
            self.trail_conflict
        };
        let mut proof = ResolutionProof::new();
        let mut current = proof.push_initial(
            self.nodes[base]
                .antecedent
                .clone()
                .expect("base conflict literal is implied"),
        );
        let order = (0..self.nodes.len())
            .rev()
            .filter(|&i| i != base && cut.conflict_side[i]);
        for i in order {
            let n = &self.nodes[i];
            if !proof.clause(current).contains(!n.literal) {
                debug_assert!(false, "conflict-side node not reached by the derivation");
                continue;
            }
            let ant = proof.push_initial(n.antecedent.clone().expect("implied node"));
            current = proof
                .push_resolvent(current, ant, n.literal.var())
                .expect("antecedents clash exactly on the node variable");
        }
        proof
    }

    /// One line per edge, `a -> b`, literals in DIMACS form; the sink is `L`.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            for &p in &n.preds {
                writeln!(
                    out,
                    "{} -> {}",
                    self.nodes[p].literal.to_dimacs(),
                    n.literal.to_dimacs()
                )
                .unwrap();
            }
            if self.is_conflict_node(i) {
                writeln!(out, "{} -> L", n.literal.to_dimacs()).unwrap();
            }
        }
        out
    }
}

/// Reason side = the decisions.
pub fn scheme_decision(g: &ConflictGraph) -> Cut {
    let mut cut = g.empty_cut();
    for i in 0..g.len() {
        cut.conflict_side[i] = !g.nodes[i].decision;
    }
    cut
}

/// Conflict side = implied literals at the conflict level plus the conflict
/// literals.
pub fn scheme_relsat(g: &ConflictGraph) -> Cut {
    let mut cut = g.empty_cut();
    for (i, n) in g.nodes.iter().enumerate() {
        cut.conflict_side[i] =
            !n.decision && (n.level == g.conflict_level || g.is_conflict_node(i));
    }
    g.absorb_level_zero(&mut cut);
    cut
}

/// Cut at the first unique implication point of the conflict level.
pub fn scheme_first_uip(g: &ConflictGraph) -> Cut {
    let level = g.conflict_level;
    let mut cut = g.empty_cut();
    let mut in_frontier = vec![false; g.len()];
    let mut open = 0usize;
    let start = g.start_node();
    cut.conflict_side[start] = true;

    let mark = |i: usize, cut: &Cut, in_frontier: &mut Vec<bool>, open: &mut usize| {
        if !cut.conflict_side[i] && !in_frontier[i] {
            in_frontier[i] = true;
            if g.nodes[i].level == level {
                *open += 1;
            }
        }
    };
    for &p in &g.nodes[start].preds {
        mark(p, &cut, &mut in_frontier, &mut open);
    }
    let other = if start == g.virtual_conflict {
        g.trail_conflict
    } else {
        g.virtual_conflict
    };
    mark(other, &cut, &mut in_frontier, &mut open);

    let mut i = g.len();
    while open > 1 {
        i -= 1;
        if !in_frontier[i] || g.nodes[i].level != level {
            continue;
        }
        in_frontier[i] = false;
        open -= 1;
        cut.conflict_side[i] = true;
        for &p in &g.nodes[i].preds {
            mark(p, &cut, &mut in_frontier, &mut open);
        }
    }
    g.absorb_level_zero(&mut cut);
    cut
}

/// Repeatedly moves a frontier node whose predecessors all lie in the
/// frontier to the conflict side. Nodes without predecessors (decisions and
/// literals implied by unit clauses) never move.
pub fn minimize_cut(g: &ConflictGraph, cut: &Cut) -> Cut {
    let mut cut = cut.clone();
    let mut in_frontier = vec![false; g.len()];
    for i in g.frontier(&cut) {
        in_frontier[i] = true;
    }
    loop {
        let mut changed = false;
        for i in (0..g.len()).rev() {
            let n = &g.nodes[i];
            if in_frontier[i] && !n.preds.is_empty() && n.preds.iter().all(|&p| in_frontier[p]) {
                in_frontier[i] = false;
                cut.conflict_side[i] = true;
                changed = true;
            }
        }
        if !changed {
            return cut;
        }
    }
}

/// Grows the cut from the conflict until its minimized clause is not in
/// `known`. Returns the minimized cut and whether every cut gave a known
/// clause, in which case the all-decision cut is returned.
pub fn scheme_first_new_cut(g: &ConflictGraph, known: &HashSet<Clause>) -> (Cut, bool) {
    let mut cut = g.empty_cut();
    cut.conflict_side[g.start_node()] = true;
    loop {
        let minimized = minimize_cut(g, &cut);
        if !known.contains(&g.cut_to_clause(&minimized)) {
            return (minimized, false);
        }
        // The sink counts as the latest node; its predecessors are the two
        // conflict literals.
        let movable = |i: usize, cut: &Cut| !cut.conflict_side[i] && !g.nodes[i].decision;
        let sink_preds = [g.trail_conflict, g.virtual_conflict];
        let chosen: Option<Vec<usize>> = if sink_preds.iter().any(|&p| movable(p, &cut)) {
            Some(sink_preds.to_vec())
        } else {
            (0..g.len())
                .rev()
                .find(|&i| {
                    cut.conflict_side[i] && g.nodes[i].preds.iter().any(|&p| movable(p, &cut))
                })
                .map(|i| g.nodes[i].preds.clone())
        };
        match chosen {
            Some(preds) => {
                for p in preds {
                    if movable(p, &cut) {
                        cut.conflict_side[p] = true;
                    }
                }
            }
            None => return (minimize_cut(g, &cut), true),
        }
    }
}

/// One learned clause with the cut it came from and its certificate.
#[derive(Clone, Debug)]
pub struct LearnedClauseRecord {
    pub clause: Clause,
    /// Literals on the conflict side of the cut (the sink omitted).
    pub conflict_side: Vec<Literal>,
    pub frontier: Vec<Literal>,
    pub derivation: ResolutionProof,
    pub scheme: LearningScheme,
    /// 1-based index of the conflict this clause was learned at.
    pub conflict_index: u64,
    pub redundant: bool,
}

/// Everything needed to turn a clause-learning run into a resolution
/// refutation: the learned clauses with their derivations, in order, and the
/// derivation of the empty clause from the final conflict.
#[derive(Clone, Debug)]
pub struct ProofLog {
    pub records: Vec<LearnedClauseRecord>,
    pub refutation: ResolutionProof,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::CnfFormula;
    use crate::solver::{Propagation, SolverConfig};

    fn lit(v: i64) -> Literal {
        Literal::from_dimacs(v)
    }

    /// p=1, q=2, r=3 with clauses (¬p∨q), (¬p∨r), (¬q∨¬r), decision p.
    fn pqr() -> CnfFormula {
        CnfFormula::new(
            3,
            vec![
                Clause::from_dimacs(&[-1, 2]),
                Clause::from_dimacs(&[-1, 3]),
                Clause::from_dimacs(&[-2, -3]),
            ],
        )
        .unwrap()
    }

    fn conflict_of(solver: &mut Solver<'_>) -> ConflictGraph {
        match solver.propagate() {
            Propagation::Conflict(id) => solver.conflict_graph(ConflictSource::Clause(id)),
            Propagation::Fixpoint => panic!("expected a conflict"),
        }
    }

    #[test]
    fn pqr_graph_shape() {
        let f = pqr();
        let mut s = Solver::new(&f, SolverConfig::default()).unwrap();
        s.decide(lit(1));
        let g = conflict_of(&mut s);
        assert_eq!(g.conflict_variable(), Variable::new(3));
        let lits: Vec<i64> = g.nodes().iter().map(|n| n.literal.to_dimacs()).collect();
        assert_eq!(lits, vec![1, 2, 3, -3]);
        assert_eq!(g.edge_list(), "1 -> 2\n1 -> 3\n3 -> L\n2 -> -3\n-3 -> L\n");
        assert_eq!(g.decision_nodes().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn pqr_schemes() {
        let f = pqr();
        let mut s = Solver::new(&f, SolverConfig::default()).unwrap();
        s.decide(lit(1));
        let g = conflict_of(&mut s);
        let p = Clause::from_dimacs(&[-1]);
        for cut in [scheme_decision(&g), scheme_relsat(&g), scheme_first_uip(&g)] {
            assert!(g.is_valid_cut(&cut));
            assert_eq!(g.cut_to_clause(&cut), p);
        }
        let relsat = scheme_relsat(&g);
        assert_eq!(relsat.conflict_side_len(), 4);

        let known: HashSet<Clause> = f.clauses().iter().cloned().collect();
        let (cut, redundant) = scheme_first_new_cut(&g, &known);
        assert!(!redundant);
        assert_eq!(g.cut_to_clause(&cut), p);

        let d = g.trivial_derivation(&scheme_decision(&g));
        assert_eq!(d.last_clause(), Some(&p));
        let clauses: Vec<Vec<i64>> = d.steps().iter().map(|s| s.clause.to_dimacs()).collect();
        assert_eq!(
            clauses,
            vec![
                vec![-2, -3],
                vec![-1, 3],
                vec![-1, -2],
                vec![-1, 2],
                vec![-1]
            ]
        );
    }

    #[test]
    fn base_cut_has_zero_step_derivation() {
        let f = pqr();
        let mut s = Solver::new(&f, SolverConfig::default()).unwrap();
        s.decide(lit(1));
        let g = conflict_of(&mut s);
        let cut = g.cut_from_conflict_side(&[lit(-3)]);
        assert!(g.is_valid_cut(&cut));
        assert_eq!(g.cut_to_clause(&cut), Clause::from_dimacs(&[-2, -3]));
        assert_eq!(g.trivial_derivation(&cut).len(), 1);
    }

    #[test]
    fn minimize_examples() {
        let f = pqr();
        let mut s = Solver::new(&f, SolverConfig::default()).unwrap();
        s.decide(lit(1));
        let g = conflict_of(&mut s);
        // frontier {p, r}: conflict side {q, ¬r}
        let cut = g.cut_from_conflict_side(&[lit(2), lit(-3)]);
        assert_eq!(g.cut_to_clause(&cut), Clause::from_dimacs(&[-1, -3]));
        let m = minimize_cut(&g, &cut);
        assert_eq!(g.cut_to_clause(&m), Clause::from_dimacs(&[-1]));
        assert_eq!(minimize_cut(&g, &m), m);
        let d = scheme_decision(&g);
        assert_eq!(minimize_cut(&g, &d), d);
    }

    #[test]
    fn level_zero_conflict_has_no_decisions() {
        let f = CnfFormula::new(
            1,
            vec![Clause::from_dimacs(&[1]), Clause::from_dimacs(&[-1])],
        )
        .unwrap();
        let s = Solver::new(&f, SolverConfig::default()).unwrap();
        let g = s.conflict_graph(ConflictSource::Clause(1));
        assert_eq!(g.decision_nodes().count(), 0);
        let d = g.trivial_derivation(&g.full_cut());
        assert_eq!(d.last_clause(), Some(&Clause::empty()));
    }

    #[test]
    fn trace_conflict_learns_union() {
        // y and ¬y implied by (a∨b∨y) and (a∨b∨¬y) under ¬a, ¬b: the cut with
        // both y literals on the conflict side gives (a∨b).
        let f = CnfFormula::new(
            3,
            vec![
                Clause::from_dimacs(&[1, 2, 3]),
                Clause::from_dimacs(&[1, 2, -3]),
            ],
        )
        .unwrap();
        let mut s = Solver::new(&f, SolverConfig::default()).unwrap();
        s.decide(lit(-1));
        assert_eq!(s.propagate(), Propagation::Fixpoint);
        s.decide(lit(-2));
        let g = conflict_of(&mut s);
        let known: HashSet<Clause> = f.clauses().iter().cloned().collect();
        let (cut, _) = scheme_first_new_cut(&g, &known);
        assert_eq!(g.cut_to_clause(&cut), Clause::from_dimacs(&[1, 2]));
    }
}
