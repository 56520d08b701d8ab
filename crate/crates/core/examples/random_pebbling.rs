//! Random pebbling graphs: generate, solve guided, and check a satisfiable variant.

use seqsat::generators::{gen_random_pebbling, make_satisfiable, pebbling_to_cnf};
use seqsat::seqgen::peb_seq_1uip;
use seqsat::solver::{solve, LearningScheme, SolverConfig};

fn main() {
    for seed in 0..5 {
        let graph = gen_random_pebbling(60, 3, 3, seed).unwrap();
        let formula = pebbling_to_cnf(&graph);
        let cfg = SolverConfig::with_learning(LearningScheme::FirstUip)
            .with_sequence(peb_seq_1uip(&graph).unwrap());

        let unsat = solve(&formula, cfg.clone()).unwrap();
        let sat_formula = make_satisfiable(&formula, seed);
        let sat = solve(&sat_formula, cfg).unwrap();
        let model_ok = sat.outcome.model().map(|m| m.satisfies(&sat_formula));
        println!(
            "seed {seed}: {} nodes, {} vars | unsat: {} ({} conflicts, fallback {}) | variant: {} model_ok={:?}",
            graph.len(),
            formula.num_vars(),
            unsat.outcome.label(),
            unsat.stats.conflicts,
            unsat.stats.fallback_decisions,
            sat.outcome.label(),
            model_ok
        );
    }
}
