//! Extend a formula with trace variables so a plain CL run follows a given refutation.

use seqsat::formula::Clause;
use seqsat::proof::{proof_trace_extension, trace_set, ResolutionProof};
use seqsat::solver::{solve, LearningScheme, SolverConfig};
use seqsat::{CnfFormula, Literal};

fn lit(v: i64) -> Literal {
    Literal::from_dimacs(v)
}

fn main() {
    // (x1 ∨ x2), (¬x1 ∨ x2), (x1 ∨ ¬x2), (¬x1 ∨ ¬x2)
    let clauses: Vec<Clause> = [[1, 2], [-1, 2], [1, -2], [-1, -2]]
        .iter()
        .map(|c| Clause::new(c.iter().map(|&v| lit(v))).unwrap())
        .collect();
    let formula = CnfFormula::new(2, clauses.clone()).unwrap();

    let mut proof = ResolutionProof::new();
    let ids: Vec<usize> = clauses.into_iter().map(|c| proof.push_initial(c)).collect();
    let x1 = lit(1).var();
    let x2 = lit(2).var();
    let a = proof.push_resolvent(ids[0], ids[1], x1).unwrap(); // (x2)
    let b = proof.push_resolvent(ids[2], ids[3], x1).unwrap(); // (¬x2)
    proof.push_resolvent(a, b, x2).unwrap();

    let to_learn = trace_set(&proof).unwrap();
    println!(
        "clauses to learn: {}",
        to_learn
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );

    let (extended, seq) = proof_trace_extension(&formula, &proof).unwrap();
    let r = solve(
        &extended,
        SolverConfig::with_learning(LearningScheme::FirstUip).with_sequence(seq.clone()),
    )
    .unwrap();
    println!(
        "extended: {} vars, {} clauses; sequence {}; {} with {} decisions, fallback {}",
        extended.num_vars(),
        extended.clauses().len(),
        seq.to_text().trim().replace('\n', " "),
        r.outcome.label(),
        r.stats.decisions,
        r.stats.fallback_decisions
    );
}
