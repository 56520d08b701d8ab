use std::collections::HashSet;

use super::heuristic::Activity;
use super::{
    ConfigError, LearningScheme, Outcome, RestartPolicy, SolveResult, SolveStats, SolverConfig,
};
use crate::analysis::{self, ConflictGraph, LearnedClauseRecord, ProofLog};
use crate::formula::{Clause, CnfFormula, Literal, PartialAssignment, Variable};
use crate::proof::ResolutionProof;
use crate::sequence::SeqEntry;

/// Index into the solver's clause database. Input clauses come first, in
/// formula order, followed by learned clauses in learning order.
pub type ClauseId = usize;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum EntryKind {
    /// A branch taken from the sequence or the heuristic.
    Decision,
    /// The second branch of a decision, taken after the first one failed.
    Flipped,
    Implied(ClauseId),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TrailEntry {
    pub literal: Literal,
    pub level: u32,
    pub kind: EntryKind,
}

impl TrailEntry {
    pub fn is_decision(&self) -> bool {
        !matches!(self.kind, EntryKind::Implied(_))
    }

    pub fn reason(&self) -> Option<ClauseId> {
        match self.kind {
            EntryKind::Implied(id) => Some(id),
            _ => None,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    Fixpoint,
    Conflict(ClauseId),
}

/// What a conflict was triggered by.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ConflictSource {
    /// A clause falsified by propagation.
    Clause(ClauseId),
    /// A CL-- branch on a literal that is currently TRUE: the branch asserts
    /// its negation at a fresh level and clashes immediately.
    Branch(Literal),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    /// Make `literal` TRUE at a new decision level.
    Branch {
        literal: Literal,
        fallback: bool,
    },
    /// CL-- branch on an already-TRUE literal.
    Conflict(Literal),
    Restart,
    /// Every clause is satisfied; unassigned variables can be set freely.
    Satisfied,
}

struct StoredClause {
    /// Literals in watch order: positions 0 and 1 are watched.
    lits: Vec<Literal>,
    canonical: Clause,
}

pub struct Solver<'f> {
    formula: &'f CnfFormula,
    config: SolverConfig,
    clauses: Vec<StoredClause>,
    watches: Vec<Vec<ClauseId>>,
    values: Vec<Option<bool>>,
    levels: Vec<u32>,
    positions: Vec<usize>,
    trail: Vec<TrailEntry>,
    level_starts: Vec<usize>,
    qhead: usize,
    seq_pos: usize,
    activity: Activity,
    known: HashSet<Clause>,
    stats: SolveStats,
    records: Vec<LearnedClauseRecord>,
    graphs: Vec<String>,
    satisfied_hint: usize,
    has_empty_clause: bool,
    pending: Option<ConflictSource>,
    final_derivation: Option<ResolutionProof>,
}

impl<'f> Solver<'f> {
    pub fn new(formula: &'f CnfFormula, config: SolverConfig) -> Result<Solver<'f>, ConfigError> {
        config.validate(formula)?;
        let n = formula.num_vars() as usize;
        let mut solver = Solver {
            formula,
            clauses: Vec::with_capacity(formula.size()),
            watches: vec![Vec::new(); 2 * n],
            values: vec![None; n],
            levels: vec![0; n],
            positions: vec![0; n],
            trail: Vec::with_capacity(n),
            level_starts: Vec::new(),
            qhead: 0,
            seq_pos: 0,
            activity: Activity::new(formula.num_vars()),
            known: HashSet::new(),
            stats: SolveStats::default(),
            records: Vec::new(),
            graphs: Vec::new(),
            satisfied_hint: 0,
            has_empty_clause: false,
            pending: None,
            final_derivation: None,
            config,
        };
        for clause in formula.clauses() {
            if clause.is_empty() {
                solver.has_empty_clause = true;
            }
            solver.store(clause.clone());
        }
        solver.assert_units();
        Ok(solver)
    }

    fn store(&mut self, clause: Clause) -> ClauseId {
        let id = self.clauses.len();
        let lits = clause.literals().to_vec();
        if lits.len() >= 2 {
            self.watches[lits[0].code()].push(id);
            self.watches[lits[1].code()].push(id);
        }
        if self.config.learning == LearningScheme::FirstNewCut {
            self.known.insert(clause.clone());
        }
        self.clauses.push(StoredClause {
            lits,
            canonical: clause,
        });
        id
    }

    // ---- read access ----

    pub fn formula(&self) -> &CnfFormula {
        self.formula
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    pub fn trail(&self) -> &[TrailEntry] {
        &self.trail
    }

    pub fn decision_level(&self) -> u32 {
        self.level_starts.len() as u32
    }

    pub fn clause(&self, id: ClauseId) -> &Clause {
        &self.clauses[id].canonical
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Learned clauses in learning order.
    pub fn learned_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses[self.formula.size()..]
            .iter()
            .map(|c| &c.canonical)
    }

    pub fn records(&self) -> &[LearnedClauseRecord] {
        &self.records
    }

    pub fn value(&self, var: Variable) -> Option<bool> {
        self.values[var.slot()]
    }

    pub fn literal_value(&self, lit: Literal) -> Option<bool> {
        self.values[lit.var().slot()].map(|v| v == lit.is_positive())
    }

    /// Trail position and entry of an assigned variable.
    pub fn assignment(&self, var: Variable) -> Option<(usize, TrailEntry)> {
        self.values[var.slot()]?;
        let pos = self.positions[var.slot()];
        Some((pos, self.trail[pos]))
    }

    pub fn level_of(&self, var: Variable) -> Option<u32> {
        self.values[var.slot()].map(|_| self.levels[var.slot()])
    }

    pub fn assignment_snapshot(&self) -> PartialAssignment {
        let lits: Vec<Literal> = self.trail.iter().map(|e| e.literal).collect();
        PartialAssignment::from_literals(self.formula.num_vars(), &lits)
    }

    // ---- trail manipulation ----

    fn enqueue(&mut self, lit: Literal, kind: EntryKind) {
        let slot = lit.var().slot();
        debug_assert!(self.values[slot].is_none());
        let level = self.decision_level();
        self.values[slot] = Some(lit.is_positive());
        self.levels[slot] = level;
        self.positions[slot] = self.trail.len();
        self.trail.push(TrailEntry {
            literal: lit,
            level,
            kind,
        });
        if matches!(kind, EntryKind::Implied(_)) {
            self.stats.propagations += 1;
        }
    }

    fn open_level(&mut self) {
        self.level_starts.push(self.trail.len());
        self.stats.max_level = self.stats.max_level.max(self.decision_level());
    }

    /// Makes `literal` TRUE as a decision at a new level, without propagating.
    pub fn decide(&mut self, literal: Literal) {
        self.open_level();
        self.enqueue(literal, EntryKind::Decision);
        self.stats.decisions += 1;
    }

    fn assign_flipped(&mut self, literal: Literal) {
        self.open_level();
        self.enqueue(literal, EntryKind::Flipped);
    }

    /// Unassigns everything above `level`.
    pub fn backtrack(&mut self, level: u32) {
        if level >= self.decision_level() {
            return;
        }
        let start = self.level_starts[level as usize];
        for e in self.trail.drain(start..) {
            self.values[e.literal.var().slot()] = None;
            self.activity.reinsert(e.literal);
        }
        self.level_starts.truncate(level as usize);
        self.qhead = self.qhead.min(self.trail.len());
        self.satisfied_hint = 0;
    }

    /// Unwinds to level 0 and counts a restart. Learned clauses are kept.
    pub fn restart(&mut self) {
        self.backtrack(0);
        self.pending = None;
        self.stats.restarts += 1;
    }

    /// Asserts every unit clause in the database at the current level. A unit
    /// whose literal is FALSE becomes the pending conflict.
    pub fn assert_units(&mut self) {
        for id in 0..self.clauses.len() {
            if self.clauses[id].lits.len() == 1 {
                let lit = self.clauses[id].lits[0];
                match self.literal_value(lit) {
                    None => self.enqueue(lit, EntryKind::Implied(id)),
                    Some(true) => {}
                    Some(false) => {
                        self.pending = Some(ConflictSource::Clause(id));
                        return;
                    }
                }
            }
        }
    }

    /// Unassigns every variable, level 0 included. Unit clauses stay in the
    /// database; [`Solver::assert_units`] puts them back on the trail.
    pub fn reset(&mut self) {
        self.backtrack(0);
        for e in self.trail.drain(..) {
            self.values[e.literal.var().slot()] = None;
            self.activity.reinsert(e.literal);
        }
        self.qhead = 0;
        self.satisfied_hint = 0;
        self.pending = None;
    }

    /// Unit propagation to fixpoint or to the first falsified clause.
    pub fn propagate(&mut self) -> Propagation {
        while self.qhead < self.trail.len() {
            let false_lit = !self.trail[self.qhead].literal;
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let cid = ws[i];
                i += 1;
                let values = &self.values;
                let value = |l: Literal| values[l.var().slot()].map(|v| v == l.is_positive());
                let lits = &mut self.clauses[cid].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if value(first) == Some(true) {
                    ws[j] = cid;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if value(lits[k]) != Some(false) {
                        lits.swap(1, k);
                        let new_watch = lits[1];
                        self.watches[new_watch.code()].push(cid);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = cid;
                j += 1;
                if value(first) == Some(false) {
                    conflict = Some(cid);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, EntryKind::Implied(cid));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if let Some(cid) = conflict {
                self.qhead = self.trail.len();
                return Propagation::Conflict(cid);
            }
        }
        Propagation::Fixpoint
    }

    fn all_clauses_satisfied(&mut self) -> bool {
        while self.satisfied_hint < self.clauses.len() {
            let c = &self.clauses[self.satisfied_hint];
            let sat = c
                .lits
                .iter()
                .any(|&l| self.values[l.var().slot()] == Some(l.is_positive()));
            if !sat {
                return false;
            }
            self.satisfied_hint += 1;
        }
        true
    }

    /// Picks the next branch. Sequence entries are consumed permanently; once
    /// the sequence runs out the activity heuristic takes over.
    pub fn next_decision(&mut self) -> Decision {
        let entries_len = self
            .config
            .sequence
            .as_ref()
            .map_or(0, |s| s.entries().len());
        while self.seq_pos < entries_len {
            let entry = self.config.sequence.as_ref().unwrap().entries()[self.seq_pos];
            self.seq_pos += 1;
            match entry {
                SeqEntry::Restart => {
                    if self.config.restart_policy == RestartPolicy::SequenceMarkersOnly {
                        return Decision::Restart;
                    }
                }
                SeqEntry::Branch(l) => match self.literal_value(l) {
                    None => {
                        return Decision::Branch {
                            literal: !l,
                            fallback: false,
                        }
                    }
                    Some(true) if self.config.cl_minus_minus => {
                        let (_, e) = self.assignment(l.var()).unwrap();
                        if !e.is_decision() {
                            return Decision::Conflict(l);
                        }
                    }
                    _ => {}
                },
            }
        }
        if self.all_clauses_satisfied() {
            return Decision::Satisfied;
        }
        let values = &self.values;
        let pick = self
            .activity
            .pick(|l| values[l.var().slot()].is_none())
            .expect("an unsatisfied clause has an unassigned literal");
        Decision::Branch {
            literal: pick,
            fallback: true,
        }
    }

    /// Plain DPLL backtracking: flip the deepest decision not yet flipped.
    /// Returns false when no such decision exists.
    fn chronological_backtrack(&mut self) -> bool {
        for level in (1..=self.decision_level()).rev() {
            let e = self.trail[self.level_starts[level as usize - 1]];
            if e.kind == EntryKind::Decision {
                self.backtrack(level - 1);
                self.assign_flipped(!e.literal);
                return true;
            }
        }
        false
    }

    /// Builds the conflict graph for a conflict on the current trail.
    pub fn conflict_graph(&self, source: ConflictSource) -> ConflictGraph {
        ConflictGraph::build(self, source)
    }

    fn learning_known(&self) -> &HashSet<Clause> {
        &self.known
    }

    /// Handles a conflict. Returns an outcome when the search is over.
    fn handle_conflict(&mut self, source: ConflictSource) -> Option<Outcome> {
        self.stats.conflicts += 1;
        if self.stats.fallback_decisions > 0 {
            self.stats.fallback_conflicts += 1;
        }
        let level = match source {
            ConflictSource::Clause(_) => self.decision_level(),
            ConflictSource::Branch(_) => self.decision_level() + 1,
        };
        if level == 0 {
            let graph = self.conflict_graph(source);
            self.finish_refutation(&graph);
            return Some(Outcome::Unsat);
        }
        if self.config.learning == LearningScheme::None {
            if self.over_conflict_budget() {
                return Some(Outcome::BudgetExceeded);
            }
            return if self.chronological_backtrack() {
                None
            } else {
                Some(Outcome::Unsat)
            };
        }
        let graph = self.conflict_graph(source);
        if graph.decision_nodes().next().is_none() {
            self.finish_refutation(&graph);
            return Some(Outcome::Unsat);
        }
        if self.over_conflict_budget() {
            return Some(Outcome::BudgetExceeded);
        }
        self.learn(&graph);
        None
    }

    fn over_conflict_budget(&self) -> bool {
        self.config
            .conflict_budget
            .is_some_and(|b| self.stats.conflicts > b)
    }

    fn finish_refutation(&mut self, graph: &ConflictGraph) {
        if self.config.log_proof && graph.decision_nodes().next().is_none() {
            let cut = graph.full_cut();
            let derivation = graph.trivial_derivation(&cut);
            self.final_derivation = Some(derivation);
        }
    }

    fn learn(&mut self, graph: &ConflictGraph) {
        let scheme = self.config.learning;
        let (cut, redundant) = match scheme {
            LearningScheme::Decision => (analysis::scheme_decision(graph), false),
            LearningScheme::RelSat => (analysis::scheme_relsat(graph), false),
            LearningScheme::FirstUip => (analysis::scheme_first_uip(graph), false),
            LearningScheme::FirstNewCut => {
                analysis::scheme_first_new_cut(graph, self.learning_known())
            }
            LearningScheme::None => unreachable!("learning disabled"),
        };
        let clause = graph.cut_to_clause(&cut);

        for &lit in clause.literals() {
            self.activity.bump(lit);
        }
        for ant in graph.antecedents(&cut) {
            for &lit in ant.literals() {
                self.activity.bump(lit);
            }
        }
        self.activity.decay();

        if self.graphs.len() < self.config.keep_conflict_graphs {
            self.graphs.push(graph.edge_list());
        }
        if self.config.log_proof {
            self.records.push(LearnedClauseRecord {
                clause: clause.clone(),
                conflict_side: graph.conflict_side_literals(&cut),
                frontier: graph
                    .frontier(&cut)
                    .iter()
                    .map(|&i| graph.node(i).literal)
                    .collect(),
                derivation: graph.trivial_derivation(&cut),
                scheme,
                conflict_index: self.stats.conflicts,
                redundant,
            });
        }
        self.stats.learned_clauses += 1;
        if redundant {
            self.stats.redundant_learned += 1;
        }

        // Levels of the clause's literals, taken from the graph so that the
        // virtual CL-- decision counts at its own level.
        let frontier = graph.frontier(&cut);
        let conflict_level = graph.conflict_level();
        let at_conflict = frontier
            .iter()
            .filter(|&&i| graph.node(i).level == conflict_level)
            .count();
        let id = self.store_learned(clause);
        if at_conflict == 1 && scheme != LearningScheme::FirstNewCut {
            let target = frontier
                .iter()
                .map(|&i| graph.node(i).level)
                .filter(|&l| l < conflict_level)
                .max()
                .unwrap_or(0);
            self.backtrack(target);
            self.attach_learned(id);
        } else {
            let top = graph
                .decision_nodes()
                .map(|i| graph.node(i).level)
                .max()
                .expect("graph has decisions");
            self.backtrack(top - 1);
            let asserted = self.attach_learned_here(id);
            if !asserted && self.pending.is_none() {
                let d = self.decision_literal_at(top, graph);
                self.assign_flipped(!d);
            }
        }
    }

    /// The decision literal of `level`, which may be the virtual CL-- branch.
    fn decision_literal_at(&self, level: u32, graph: &ConflictGraph) -> Literal {
        graph
            .decision_nodes()
            .map(|i| graph.node(i))
            .find(|n| n.level == level)
            .expect("decision present")
            .literal
    }

    fn store_learned(&mut self, clause: Clause) -> ClauseId {
        let id = self.clauses.len();
        if self.config.learning == LearningScheme::FirstNewCut {
            self.known.insert(clause.clone());
        }
        self.clauses.push(StoredClause {
            lits: clause.literals().to_vec(),
            canonical: clause,
        });
        id
    }

    /// Orders a fresh clause for watching against the current assignment,
    /// watches it, and asserts it if it is unit. A unit clause whose false
    /// literals sit below the current level first backtracks to that level.
    /// A falsified clause is queued as a pending conflict. Returns whether a
    /// literal was asserted.
    fn attach_learned(&mut self, id: ClauseId) -> bool {
        self.attach(id, true)
    }

    /// Like [`Solver::attach_learned`], but a unit clause is asserted at the
    /// current level.
    fn attach_learned_here(&mut self, id: ClauseId) -> bool {
        self.attach(id, false)
    }

    fn attach(&mut self, id: ClauseId, jump: bool) -> bool {
        let mut lits = std::mem::take(&mut self.clauses[id].lits);
        let rank = |s: &Solver, l: Literal| -> (u8, u32) {
            match s.literal_value(l) {
                Some(true) => (0, 0),
                None => (1, 0),
                Some(false) => (2, u32::MAX - s.levels[l.var().slot()]),
            }
        };
        lits.sort_by_key(|&l| rank(self, l));
        let first = lits[0];
        let second_false = lits.len() < 2 || self.literal_value(lits[1]) == Some(false);
        let first_value = self.literal_value(first);
        if lits.len() >= 2 {
            self.watches[lits[0].code()].push(id);
            self.watches[lits[1].code()].push(id);
        }
        self.clauses[id].lits = lits;
        match first_value {
            Some(false) => {
                self.pending = Some(ConflictSource::Clause(id));
                false
            }
            None if second_false => {
                let below = if self.clauses[id].lits.len() >= 2 {
                    self.levels[self.clauses[id].lits[1].var().slot()]
                } else {
                    0
                };
                if jump {
                    self.backtrack(below);
                }
                self.enqueue(first, EntryKind::Implied(id));
                true
            }
            _ => false,
        }
    }

    /// Adds `clause` as learned at the current conflict and backjumps: an
    /// asserting clause (one literal at the current level) backtracks to the
    /// highest level among its other literals and asserts; otherwise the
    /// search backtracks one level below the current one and flips that
    /// level's decision.
    pub fn backjump(&mut self, clause: Clause) {
        let current = self.decision_level();
        let levels: Vec<u32> = clause
            .literals()
            .iter()
            .map(|l| self.level_of(l.var()).unwrap_or(current))
            .collect();
        let at_current = levels.iter().filter(|&&l| l == current).count();
        self.stats.learned_clauses += 1;
        let id = self.store_learned(clause);
        if at_current == 1 || current == 0 {
            let target = levels
                .into_iter()
                .filter(|&l| l < current)
                .max()
                .unwrap_or(0);
            self.backtrack(target);
            self.attach_learned(id);
        } else {
            let d = self.trail[self.level_starts[current as usize - 1]].literal;
            self.backtrack(current - 1);
            if !self.attach_learned(id) && self.pending.is_none() {
                self.assign_flipped(!d);
            }
        }
    }

    /// Asserts `literal` at the current level with `reason` as its
    /// antecedent, without propagating.
    pub fn imply(&mut self, literal: Literal, reason: ClauseId) {
        self.enqueue(literal, EntryKind::Implied(reason));
    }

    /// Handles a conflict as the search loop does: learn and backjump, or end
    /// the search. Returns the outcome when the search is over.
    pub fn analyze(&mut self, source: ConflictSource) -> Option<Outcome> {
        self.handle_conflict(source)
    }

    /// Propagates and analyzes conflicts until a fixpoint or the end of the
    /// search.
    pub fn settle(&mut self) -> Option<Outcome> {
        loop {
            if let Some(source) = self.pending.take() {
                if let Some(out) = self.handle_conflict(source) {
                    return Some(out);
                }
                continue;
            }
            match self.propagate() {
                Propagation::Conflict(cid) => {
                    if let Some(out) = self.handle_conflict(ConflictSource::Clause(cid)) {
                        return Some(out);
                    }
                }
                Propagation::Fixpoint => return None,
            }
        }
    }

    /// Runs the search loop.
    pub fn run(mut self) -> SolveResult {
        let outcome = self.search();
        self.finish(outcome)
    }

    /// Packs the outcome of [`Solver::search`] with the statistics and, for
    /// a logged refutation, the proof log.
    pub fn finish(mut self, outcome: Outcome) -> SolveResult {
        let proof = match (&outcome, self.final_derivation.take()) {
            (Outcome::Unsat, Some(refutation)) => Some(ProofLog {
                records: std::mem::take(&mut self.records),
                refutation,
            }),
            _ => None,
        };
        SolveResult {
            outcome,
            stats: self.stats,
            proof,
            conflict_graphs: self.graphs,
        }
    }

    /// Runs the search loop in place, leaving [`Solver::records`] and the
    /// trail available afterwards.
    pub fn search(&mut self) -> Outcome {
        if self.has_empty_clause {
            if self.config.log_proof {
                let mut p = ResolutionProof::new();
                p.push_initial(Clause::empty());
                self.final_derivation = Some(p);
            }
            return Outcome::Unsat;
        }
        loop {
            if let Some(source) = self.pending.take() {
                if let Some(out) = self.handle_conflict(source) {
                    return out;
                }
                continue;
            }
            match self.propagate() {
                Propagation::Conflict(cid) => {
                    if let Some(out) = self.handle_conflict(ConflictSource::Clause(cid)) {
                        return out;
                    }
                }
                Propagation::Fixpoint => {
                    if self.trail.len() == self.values.len() {
                        return Outcome::Sat(self.model());
                    }
                    let decision = self.next_decision();
                    if matches!(decision, Decision::Branch { .. } | Decision::Conflict(_))
                        && self
                            .config
                            .decision_budget
                            .is_some_and(|b| self.stats.decisions >= b)
                    {
                        return Outcome::BudgetExceeded;
                    }
                    match decision {
                        Decision::Branch { literal, fallback } => {
                            if fallback {
                                self.stats.fallback_decisions += 1;
                            }
                            self.decide(literal);
                        }
                        Decision::Conflict(lit) => {
                            self.stats.decisions += 1;
                            self.stats.max_level =
                                self.stats.max_level.max(self.decision_level() + 1);
                            self.pending = Some(ConflictSource::Branch(lit));
                        }
                        Decision::Restart => self.restart(),
                        Decision::Satisfied => return Outcome::Sat(self.model()),
                    }
                }
            }
        }
    }

    /// Current assignment with unassigned variables set FALSE.
    fn model(&self) -> PartialAssignment {
        let mut m = self.assignment_snapshot();
        for v in self.formula.variables() {
            if m.value(v).is_none() {
                m.set(v, Some(false));
            }
        }
        m
    }

    /// Checks the trail invariants and that no clause is unit or falsified
    /// after a propagation fixpoint. Returns a description of the first
    /// violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut decisions = 0u32;
        let mut last_level = 0;
        for (pos, e) in self.trail.iter().enumerate() {
            let slot = e.literal.var().slot();
            if self.positions[slot] != pos || self.literal_value(e.literal) != Some(true) {
                return Err(format!("trail entry {pos} inconsistent with assignment"));
            }
            if e.level < last_level {
                return Err(format!("level decreases at trail entry {pos}"));
            }
            last_level = e.level;
            match e.kind {
                EntryKind::Decision | EntryKind::Flipped => {
                    decisions += 1;
                    if e.level != decisions {
                        return Err(format!("decision at {pos} has level {}", e.level));
                    }
                }
                EntryKind::Implied(id) => {
                    let c = self.clause(id);
                    if !c.contains(e.literal) {
                        return Err(format!("reason of trail entry {pos} lacks its literal"));
                    }
                    let mut max = 0;
                    for &l in c.literals() {
                        if l == e.literal {
                            continue;
                        }
                        match self.assignment(l.var()) {
                            Some((p, o)) if p < pos && o.literal == !l => max = max.max(o.level),
                            _ => {
                                return Err(format!(
                                    "reason of trail entry {pos} has a literal not false earlier"
                                ))
                            }
                        }
                    }
                    if e.level != max {
                        return Err(format!(
                            "implied entry {pos} at level {} but its reason peaks at {max}",
                            e.level
                        ));
                    }
                }
            }
        }
        if self.qhead == self.trail.len() && self.pending.is_none() {
            for (id, c) in self.clauses.iter().enumerate() {
                let mut open = 0;
                let mut sat = false;
                for &l in &c.lits {
                    match self.literal_value(l) {
                        Some(true) => sat = true,
                        None => open += 1,
                        Some(false) => {}
                    }
                }
                if !sat && open <= 1 {
                    return Err(format!("clause {id} is unit or falsified at fixpoint"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::brute_force_model;
    use crate::generators::{gen_grid, pebbling_to_cnf};
    use crate::sequence::BranchingSequence;
    use crate::solver::solve;
    use proptest::prelude::*;

    fn lit(v: i64) -> Literal {
        Literal::from_dimacs(v)
    }

    fn cnf(num_vars: u32, clauses: &[&[i64]]) -> CnfFormula {
        CnfFormula::new(
            num_vars,
            clauses.iter().map(|c| Clause::from_dimacs(c)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn level_zero_contradiction_needs_no_decisions() {
        let f = cnf(1, &[&[1], &[-1]]);
        for scheme in [
            LearningScheme::None,
            LearningScheme::FirstUip,
            LearningScheme::FirstNewCut,
        ] {
            let r = solve(&f, SolverConfig::with_learning(scheme)).unwrap();
            assert!(r.outcome.is_unsat());
            assert_eq!(r.stats.decisions, 0);
        }
    }

    #[test]
    fn units_propagate_at_level_zero() {
        let f = cnf(2, &[&[1], &[-1, 2]]);
        let mut s = Solver::new(&f, SolverConfig::default()).unwrap();
        assert_eq!(s.propagate(), Propagation::Fixpoint);
        assert_eq!(s.value(Variable::new(2)), Some(true));
        assert_eq!(s.level_of(Variable::new(2)), Some(0));

        let g = cnf(2, &[&[1], &[-1, 2], &[-2]]);
        let mut s = Solver::new(&g, SolverConfig::default()).unwrap();
        assert!(matches!(s.propagate(), Propagation::Conflict(_)));
        assert_eq!(s.decision_level(), 0);
    }

    #[test]
    fn two_layer_grid_learns_unit() {
        let f = pebbling_to_cnf(&gen_grid(2));
        let cfg = SolverConfig::with_learning(LearningScheme::FirstUip)
            .with_sequence(BranchingSequence::from_literals([lit(1)]));
        let mut s = Solver::new(&f, cfg).unwrap();
        let out = s.search();
        assert!(out.is_unsat());
        assert_eq!(s.stats().decisions, 1);
        assert_eq!(s.stats().fallback_decisions, 0);
        assert!(s
            .learned_clauses()
            .any(|c| *c == Clause::from_dimacs(&[-2])));
    }

    #[test]
    fn asserting_unit_returns_to_level_zero() {
        let f = cnf(3, &[&[1, 2, 3]]);
        let mut s = Solver::new(&f, SolverConfig::with_learning(LearningScheme::FirstUip)).unwrap();
        s.decide(lit(2));
        s.backjump(Clause::from_dimacs(&[-2]));
        assert_eq!(s.decision_level(), 0);
        assert_eq!(s.value(Variable::new(2)), Some(false));
    }

    #[test]
    fn asserting_clause_jumps_to_second_highest_level() {
        let f = cnf(4, &[&[1, 2, 3, 4]]);
        let mut s = Solver::new(&f, SolverConfig::with_learning(LearningScheme::FirstUip)).unwrap();
        for d in [-1, -2, -3] {
            s.decide(lit(d));
        }
        s.backjump(Clause::from_dimacs(&[1, 2, 3]));
        assert_eq!(s.decision_level(), 2);
        assert_eq!(s.value(Variable::new(3)), Some(true));
        s.check_invariants().unwrap();
    }

    #[test]
    fn restart_keeps_learned_clauses() {
        let f = cnf(3, &[&[1, 2, 3]]);
        let mut s = Solver::new(&f, SolverConfig::with_learning(LearningScheme::FirstUip)).unwrap();
        s.restart();
        assert_eq!(s.stats().restarts, 1);
        s.decide(lit(-1));
        s.decide(lit(-2));
        s.backjump(Clause::from_dimacs(&[1, 2]));
        let before = s.learned_clauses().count();
        s.restart();
        assert_eq!(s.decision_level(), 0);
        assert_eq!(s.learned_clauses().count(), before);
    }

    #[test]
    fn empty_sequence_falls_back() {
        let f = cnf(2, &[&[1, 2]]);
        let mut s = Solver::new(&f, SolverConfig::with_learning(LearningScheme::FirstUip)).unwrap();
        match s.next_decision() {
            Decision::Branch { fallback, .. } => assert!(fallback),
            Decision::Satisfied => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    fn formula_strategy() -> impl Strategy<Value = CnfFormula> {
        (1u32..=8).prop_flat_map(|n| {
            let lit = (1..=n as i64, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
            let clause = prop::collection::vec(lit, 1..=3);
            prop::collection::vec(clause, 1..=24).prop_map(move |cs| {
                let clauses = cs
                    .iter()
                    .filter_map(|c| Clause::new(c.iter().map(|&v| Literal::from_dimacs(v))).ok());
                CnfFormula::new(n, clauses.collect()).unwrap()
            })
        })
    }

    const SCHEMES: [LearningScheme; 5] = LearningScheme::ALL;

    proptest! {
        #[test]
        fn agrees_with_brute_force(f in formula_strategy(), scheme in 0usize..SCHEMES.len()) {
            let mut cfg = SolverConfig::with_learning(SCHEMES[scheme]);
            cfg.log_proof = true;
            let r = solve(&f, cfg).unwrap();
            match (&r.outcome, brute_force_model(&f)) {
                (Outcome::Sat(m), Some(_)) => prop_assert!(m.satisfies(&f)),
                (Outcome::Unsat, None) => prop_assert!(r.proof.is_some()),
                (o, m) => prop_assert!(false, "{} vs brute force {:?}", o.label(), m.is_some()),
            }
        }

        #[test]
        fn trail_invariants_hold_after_search(f in formula_strategy(), scheme in 0usize..SCHEMES.len()) {
            let mut s = Solver::new(&f, SolverConfig::with_learning(SCHEMES[scheme])).unwrap();
            if s.search().is_sat() {
                prop_assert!(s.check_invariants().is_ok());
            }
        }
    }
}
