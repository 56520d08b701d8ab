//! Log learned clauses during a refutation, convert to resolution and verify.

use seqsat::generators::{gen_grid, pebbling_to_cnf};
use seqsat::proof::{check_res_refutation, check_trivial, cl_to_res};
use seqsat::seqgen::peb_seq_1uip;
use seqsat::solver::{solve, LearningScheme, SolverConfig};

fn main() {
    let graph = gen_grid(8);
    let formula = pebbling_to_cnf(&graph);
    let mut cfg = SolverConfig::with_learning(LearningScheme::FirstUip)
        .with_sequence(peb_seq_1uip(&graph).unwrap());
    cfg.log_proof = true;
    let result = solve(&formula, cfg).unwrap();
    let log = result.proof.expect("proof logging was on");

    for r in &log.records {
        check_trivial(&r.derivation).expect("each learned clause has a trivial derivation");
    }
    let proof = cl_to_res(&log, &formula).unwrap();
    check_res_refutation(&proof, &formula).unwrap();
    println!(
        "{} learned clauses -> refutation with {} steps, {} resolutions (verified)",
        log.records.len(),
        proof.len(),
        proof.resolution_count()
    );
    if std::env::args().any(|a| a == "--print") {
        print!("{}", proof.to_text());
    }
}
