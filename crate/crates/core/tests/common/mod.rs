#![allow(dead_code)]

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqsat::analysis::LearnedClauseRecord;
use seqsat::generators::{gen_grid, gen_gtn, pebbling_to_cnf, PebbleNode, PebblingGraph};
use seqsat::proof::{check_trivial, cl_to_res, propagation_refutes, ResolutionProof, StepKind};
use seqsat::solver::{solve, LearningScheme, SolverConfig};
use seqsat::{Clause, CnfFormula, Literal, Variable};

/// Units a and b feed the target; e has three variables.
/// Ids: c f d g e a b t.
pub fn unit_example() -> PebblingGraph {
    let vars = |r: std::ops::RangeInclusive<u32>| r.map(Variable::new).collect();
    let node = |labels, preds: &[usize]| PebbleNode {
        labels,
        preds: preds.to_vec(),
    };
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

pub fn random_3cnf(vars: u32, clauses: usize, seed: u64) -> CnfFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(clauses);
    while out.len() < clauses {
        let mut picked: Vec<u32> = Vec::with_capacity(3);
        while picked.len() < 3 {
            let v = rng.gen_range(1..=vars);
            if !picked.contains(&v) {
                picked.push(v);
            }
        }
        let lits = picked
            .iter()
            .map(|&v| Literal::new(Variable::new(v), rng.gen_bool(0.5)));
        out.push(Clause::new(lits).unwrap());
    }
    CnfFormula::new(vars, out).unwrap()
}

/// Checks every learned clause of a run: a trivial derivation ending in the
/// clause, built from input or earlier learned clauses, and refuted by unit
/// propagation from its negation using the derivation's inputs.
pub fn check_records(formula: &CnfFormula, records: &[LearnedClauseRecord]) -> Result<(), String> {
    let mut known: HashSet<&Clause> = formula.clauses().iter().collect();
    for (k, r) in records.iter().enumerate() {
        check_trivial(&r.derivation).map_err(|e| format!("record {k}: {e}"))?;
        if r.derivation.last_clause() != Some(&r.clause) {
            return Err(format!("record {k}: derivation ends elsewhere"));
        }
        let inputs: Vec<Clause> = initial_clauses(&r.derivation);
        if let Some(c) = inputs.iter().find(|c| !known.contains(c)) {
            return Err(format!("record {k}: input {c} is not known"));
        }
        let negated: Vec<Literal> = r.clause.literals().iter().map(|&l| !l).collect();
        if !propagation_refutes(formula.num_vars(), &inputs, &negated) {
            return Err(format!(
                "record {k}: negation of {} does not propagate to a conflict",
                r.clause
            ));
        }
        known.insert(&r.clause);
    }
    Ok(())
}

pub fn initial_clauses(p: &ResolutionProof) -> Vec<Clause> {
    p.steps()
        .iter()
        .filter(|s| matches!(s.kind, StepKind::Initial))
        .map(|s| s.clause.clone())
        .collect()
}

/// Small unsatisfiable formulas (at most 25 variables) with their converted
/// refutations.
pub fn refutation_corpus() -> Vec<(String, CnfFormula, ResolutionProof)> {
    let mut formulas: Vec<(String, CnfFormula)> = Vec::new();
    for l in 2..=4 {
        formulas.push((format!("grid L={l}"), pebbling_to_cnf(&gen_grid(l))));
    }
    for n in 3..=5 {
        formulas.push((format!("gtn n={n}"), gen_gtn(n)));
    }
    let mut seed = 0;
    while formulas.len() < 24 {
        let vars = 10 + (seed % 16) as u32;
        let f = random_3cnf(vars, (vars as f64 * 5.0) as usize, 1000 + seed);
        seed += 1;
        let probe = solve(&f, SolverConfig::default()).unwrap();
        if probe.outcome.is_unsat() {
            formulas.push((format!("3cnf v={vars} seed={}", 999 + seed), f));
        }
    }
    let schemes = [
        LearningScheme::FirstUip,
        LearningScheme::Decision,
        LearningScheme::RelSat,
    ];
    formulas
        .into_iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let mut cfg = SolverConfig::with_learning(schemes[i % schemes.len()]);
            cfg.log_proof = true;
            let r = solve(&f, cfg).unwrap();
            let log = r.proof.expect("learning runs log a refutation");
            let p = cl_to_res(&log, &f).expect("conversion succeeds");
            (name, f, p)
        })
        .collect()
}
