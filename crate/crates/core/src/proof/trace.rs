use std::collections::HashMap;

use thiserror::Error;

use super::{normalize, ResolutionProof, StepKind};
use crate::formula::{Clause, CnfFormula, Variable};
use crate::sequence::{BranchingSequence, SeqEntry};
use crate::solver::{
    ClauseId, ConflictSource, LearningScheme, Outcome, SolveStats, Solver, SolverConfig,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("the proof does not end in the empty clause")]
    NotRefutation,
    #[error("the last step does not resolve a unit clause against its complement")]
    NotUnitFinish,
}

/// The derived clauses a replay has to learn, in proof order, for a proof
/// already passed through [`normalize`]. Initial clauses and the empty clause
/// are left out, and so is the unit just before the empty clause when the
/// empty clause is its only use. Its complement stays in.
pub fn trace_set(proof: &ResolutionProof) -> Result<Vec<Clause>, TraceError> {
    Ok(trace_steps(proof)?
        .into_iter()
        .map(|i| proof.clause(i).clone())
        .collect())
}

fn trace_steps(proof: &ResolutionProof) -> Result<Vec<usize>, TraceError> {
    let last = proof
        .len()
        .checked_sub(1)
        .ok_or(TraceError::NotRefutation)?;
    if !proof.clause(last).is_empty() {
        return Err(TraceError::NotRefutation);
    }
    let excluded = match proof.steps()[last].kind {
        StepKind::Initial => None,
        StepKind::Resolvent { left, right, .. } => {
            if proof.clause(left).len() != 1 || proof.clause(right).len() != 1 {
                return Err(TraceError::NotUnitFinish);
            }
            // The unit right before the empty clause is left out when nothing
            // else uses it.
            let v = last - 1;
            let only_final_use = (v == left || v == right)
                && !proof.steps()[v].is_initial()
                && proof.steps()[..last].iter().all(|s| match s.kind {
                    StepKind::Resolvent { left, right, .. } => left != v && right != v,
                    StepKind::Initial => true,
                });
            only_final_use.then_some(v)
        }
    };
    Ok(proof
        .steps()
        .iter()
        .enumerate()
        .filter(|&(i, s)| i != last && Some(i) != excluded && !s.is_initial())
        .map(|(i, _)| i)
        .collect())
}

/// Adds a trace variable `t_C` for every clause `C` the replay must learn,
/// with a clause `(¬x ∨ t_C)` for each literal `x` of `C`, and returns the
/// sequence `(t_C1, …, t_Ck)` in proof order. The proof is normalized first.
/// Trace variables are numbered after the formula's variables.
pub fn proof_trace_extension(
    formula: &CnfFormula,
    proof: &ResolutionProof,
) -> Result<(CnfFormula, BranchingSequence), TraceError> {
    let proof = normalize(proof);
    let set = trace_set(&proof)?;
    let base = formula.num_vars();
    let mut clauses = formula.clauses().to_vec();
    let mut sequence = BranchingSequence::new();
    for (k, c) in set.iter().enumerate() {
        let t = Variable::new(base + k as u32 + 1);
        for &x in c.literals() {
            clauses.push(Clause::new([!x, t.positive()]).expect("fresh trace variable"));
        }
        sequence.push(t.positive());
    }
    let extended = CnfFormula::new(base + set.len() as u32, clauses).expect("variables in range");
    Ok((extended, sequence))
}

/// Extended sequence for CL--: the literals of every clause to learn, each
/// clause followed by a restart marker. The proof is normalized first.
pub fn res_to_clmm_sequence(proof: &ResolutionProof) -> Result<BranchingSequence, TraceError> {
    let proof = normalize(proof);
    let steps = trace_steps(&proof)?;
    Ok(res_to_clmm_sequence_normalized(&proof, &steps))
}

/// What a replay of [`res_to_clmm_sequence`] did.
#[derive(Clone, Debug)]
pub struct Replay {
    pub outcome: Outcome,
    /// Clauses the replay had to learn, in order.
    pub expected: Vec<Clause>,
    /// Clauses it learned, in order.
    pub learned: Vec<Clause>,
    pub stats: SolveStats,
    /// Decision level the search ended at.
    pub final_level: u32,
}

impl Replay {
    /// Learned exactly the expected clauses, restarted at most once per
    /// clause and refuted the formula at level 0.
    pub fn is_exact(&self) -> bool {
        self.outcome.is_unsat()
            && self.final_level == 0
            && self.learned == self.expected
            && self.stats.restarts <= self.expected.len() as u64
    }
}

/// Replays the extended sequence of `proof` under CL-- with restarts. Each
/// block's branches are placed without propagating in between. Propagation
/// then starts from the two clauses the proof resolved to get the block's
/// clause, so the conflict is the one between them. Each restart marker
/// clears the trail, level 0 included, so unit clauses only act through that
/// propagation. Once the sequence is used up, the units are asserted, level 0
/// is propagated and the search finishes on its own.
pub fn replay_clmm(
    formula: &CnfFormula,
    proof: &ResolutionProof,
    learning: LearningScheme,
) -> Result<Replay, TraceError> {
    let proof = normalize(proof);
    let steps = trace_steps(&proof)?;
    let expected: Vec<Clause> = steps.iter().map(|&i| proof.clause(i).clone()).collect();
    let sequence = res_to_clmm_sequence_normalized(&proof, &steps);

    let mut cfg = SolverConfig::with_learning(learning);
    cfg.cl_minus_minus = true;
    cfg.log_proof = true;
    let mut solver = Solver::new(formula, cfg).expect("no sequence to validate");
    let mut ids: HashMap<Clause, ClauseId> = HashMap::new();
    solver.reset();
    let mut outcome = None;

    let mut block = 0;
    let mut open = true;
    for entry in sequence.entries() {
        if outcome.is_some() {
            break;
        }
        match *entry {
            SeqEntry::Branch(x) => {
                if !open {
                    continue;
                }
                match solver.literal_value(x) {
                    None => solver.decide(!x),
                    Some(false) => {}
                    Some(true) => {
                        outcome = solver.analyze(ConflictSource::Branch(x));
                        open = false;
                    }
                }
            }
            SeqEntry::Restart => {
                if open {
                    for id in ids.len()..solver.num_clauses() {
                        ids.entry(solver.clause(id).clone()).or_insert(id);
                    }
                    outcome = resolve_block(&mut solver, &proof, steps[block], &ids);
                }
                if outcome.is_none() {
                    solver.restart();
                    solver.reset();
                }
                block += 1;
                open = true;
            }
        }
    }
    let outcome = match outcome.or_else(|| {
        solver.reset();
        solver.assert_units();
        solver.settle()
    }) {
        Some(o) => o,
        None => solver.search(),
    };
    Ok(Replay {
        outcome,
        expected,
        learned: solver.records().iter().map(|r| r.clause.clone()).collect(),
        stats: solver.stats().clone(),
        final_level: solver.decision_level(),
    })
}

/// Propagates the block's two antecedents by hand: the one that still has
/// its resolved literal open implies it, and the other is then falsified.
/// Falls back to ordinary propagation if either antecedent is unknown.
fn resolve_block(
    solver: &mut Solver<'_>,
    proof: &ResolutionProof,
    step: usize,
    ids: &HashMap<Clause, ClauseId>,
) -> Option<Outcome> {
    let StepKind::Resolvent { left, right, pivot } = proof.steps()[step].kind else {
        unreachable!("trace steps are resolvents");
    };
    let (l, r) = (proof.clause(left), proof.clause(right));
    let (Some(&lid), Some(&rid)) = (ids.get(l), ids.get(r)) else {
        return solver.settle();
    };
    let on_left = if l.contains(pivot.positive()) {
        pivot.positive()
    } else {
        pivot.negative()
    };
    let falsified = match solver.literal_value(on_left) {
        None => {
            solver.imply(on_left, lid);
            rid
        }
        Some(true) => rid,
        Some(false) => lid,
    };
    let all_false = solver
        .clause(falsified)
        .literals()
        .iter()
        .all(|&q| solver.literal_value(q) == Some(false));
    if all_false {
        solver.analyze(ConflictSource::Clause(falsified))
    } else {
        solver.settle()
    }
}

fn res_to_clmm_sequence_normalized(proof: &ResolutionProof, steps: &[usize]) -> BranchingSequence {
    let mut sequence = BranchingSequence::new();
    for &i in steps {
        for &x in proof.clause(i).literals() {
            sequence.push(x);
        }
        sequence.push_restart();
    }
    sequence
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Literal;
    use crate::sequence::SeqEntry;

    fn lit(v: i64) -> Literal {
        Literal::from_dimacs(v)
    }

    fn c(v: &[i64]) -> Clause {
        Clause::from_dimacs(v)
    }

    /// (x), (¬x∨y), (¬y): derive (y), then the empty clause.
    fn chain() -> (CnfFormula, ResolutionProof) {
        let f = CnfFormula::new(2, vec![c(&[1]), c(&[-1, 2]), c(&[-2])]).unwrap();
        let mut p = ResolutionProof::new();
        let a = p.push_initial(c(&[1]));
        let b = p.push_initial(c(&[-1, 2]));
        let y = p.push_resolvent(a, b, Variable::new(1)).unwrap();
        let ny = p.push_initial(c(&[-2]));
        p.push_resolvent(y, ny, Variable::new(2)).unwrap();
        (f, p)
    }

    #[test]
    fn trace_extension_of_chain() {
        let (f, p) = chain();
        // the unit before the empty clause is the initial (¬y)
        assert_eq!(trace_set(&p).unwrap(), vec![c(&[2])]);
        let (pt, seq) = proof_trace_extension(&f, &p).unwrap();
        assert_eq!(pt.num_vars(), 3);
        assert_eq!(&pt.clauses()[3..], &[c(&[-2, 3])]);
        assert_eq!(seq.literals().collect::<Vec<_>>(), vec![lit(3)]);
        let s = res_to_clmm_sequence(&p).unwrap();
        assert_eq!(s.entries(), &[SeqEntry::Branch(lit(2)), SeqEntry::Restart]);
    }

    #[test]
    fn trace_extension_keeps_complement_of_final_unit() {
        // (x), (¬x∨y), (¬y∨z), (¬z): derive (¬y), then (y), then the empty
        // clause. (y) sits right before the end and is left out; (¬y) stays.
        let f = CnfFormula::new(3, vec![c(&[1]), c(&[-1, 2]), c(&[-2, 3]), c(&[-3])]).unwrap();
        let mut p = ResolutionProof::new();
        let a = p.push_initial(c(&[-2, 3]));
        let b = p.push_initial(c(&[-3]));
        let ny = p.push_resolvent(a, b, Variable::new(3)).unwrap();
        let d = p.push_initial(c(&[1]));
        let e = p.push_initial(c(&[-1, 2]));
        let y = p.push_resolvent(d, e, Variable::new(1)).unwrap();
        p.push_resolvent(y, ny, Variable::new(2)).unwrap();
        assert_eq!(trace_set(&p).unwrap(), vec![c(&[-2])]);
        let (pt, seq) = proof_trace_extension(&f, &p).unwrap();
        assert_eq!(pt.num_vars(), 4);
        assert_eq!(pt.size(), 5);
        assert!(pt.clauses().contains(&c(&[2, 4])));
        assert_eq!(seq.literals().collect::<Vec<_>>(), vec![lit(4)]);

        let s = res_to_clmm_sequence(&p).unwrap();
        assert_eq!(s.entries(), &[SeqEntry::Branch(lit(-2)), SeqEntry::Restart]);
    }

    #[test]
    fn rejects_non_unit_finish() {
        let mut p = ResolutionProof::new();
        p.push_initial(Clause::empty());
        assert_eq!(trace_set(&p).unwrap(), Vec::<Clause>::new());
        let mut q = ResolutionProof::new();
        q.push_initial(c(&[1, 2]));
        assert_eq!(trace_set(&q), Err(TraceError::NotRefutation));
    }

    #[test]
    fn chain_replays_exactly() {
        let (f, p) = chain();
        for scheme in [LearningScheme::FirstUip, LearningScheme::FirstNewCut] {
            let r = replay_clmm(&f, &p, scheme).unwrap();
            assert!(r.outcome.is_unsat());
            assert_eq!(r.learned, vec![c(&[2])]);
            assert!(r.is_exact(), "{}", scheme.name());
            assert_eq!(r.stats.fallback_decisions, 0);
        }
    }

    #[test]
    fn empty_trace_set_refutes_at_level_zero() {
        let f = CnfFormula::new(1, vec![c(&[1]), c(&[-1])]).unwrap();
        let mut p = ResolutionProof::new();
        let a = p.push_initial(c(&[1]));
        let b = p.push_initial(c(&[-1]));
        p.push_resolvent(a, b, Variable::new(1)).unwrap();
        let r = replay_clmm(&f, &p, LearningScheme::FirstNewCut).unwrap();
        assert!(r.expected.is_empty());
        assert!(r.is_exact());
        assert_eq!(r.stats.decisions, 0);
    }

    mod pipeline {
        use super::super::*;
        use crate::formula::{brute_force_model, Literal};
        use crate::proof::{check_res_refutation, cl_to_res};
        use crate::solver::solve;
        use proptest::prelude::*;

        fn formula_strategy() -> impl Strategy<Value = CnfFormula> {
            (2u32..=7).prop_flat_map(|n| {
                let lit =
                    (1..=n as i64, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
                prop::collection::vec(prop::collection::vec(lit, 1..=3), 8..=30).prop_map(
                    move |cs| {
                        let clauses = cs.iter().filter_map(|c| {
                            Clause::new(c.iter().map(|&v| Literal::from_dimacs(v))).ok()
                        });
                        CnfFormula::new(n, clauses.collect()).unwrap()
                    },
                )
            })
        }

        proptest! {
            #[test]
            fn refutations_convert_and_replay(f in formula_strategy()) {
                prop_assume!(brute_force_model(&f).is_none());
                let mut cfg = SolverConfig::with_learning(LearningScheme::FirstUip);
                cfg.log_proof = true;
                let log = solve(&f, cfg).unwrap().proof.expect("logged refutation");
                let p = cl_to_res(&log, &f).unwrap();
                prop_assert!(check_res_refutation(&p, &f).is_ok());

                let (ext, seq) = proof_trace_extension(&f, &p).unwrap();
                let r = solve(&ext, SolverConfig::with_learning(LearningScheme::FirstUip).with_sequence(seq)).unwrap();
                prop_assert!(r.outcome.is_unsat());

                let replay = replay_clmm(&f, &p, LearningScheme::FirstNewCut).unwrap();
                prop_assert!(replay.is_exact(), "learned {:?} expected {:?}", replay.learned, replay.expected);
            }
        }
    }
}
