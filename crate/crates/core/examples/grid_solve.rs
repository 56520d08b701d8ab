//! Refute a grid pebbling formula with and without its branching sequence.

use seqsat::generators::{gen_grid, pebbling_to_cnf};
use seqsat::seqgen::peb_seq_1uip;
use seqsat::solver::{solve, LearningScheme, SolverConfig};

fn main() {
    let layers = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    let graph = gen_grid(layers);
    let formula = pebbling_to_cnf(&graph);
    println!(
        "grid {layers}: {} vars, {} clauses",
        formula.num_vars(),
        formula.clauses().len()
    );

    let plain = solve(
        &formula,
        SolverConfig::with_learning(LearningScheme::FirstUip),
    )
    .unwrap();
    let seq = peb_seq_1uip(&graph).unwrap();
    let guided = solve(
        &formula,
        SolverConfig::with_learning(LearningScheme::FirstUip).with_sequence(seq),
    )
    .unwrap();

    for (name, r) in [("activity", &plain), ("sequence", &guided)] {
        println!(
            "{name:>9}: {} decisions={} conflicts={} fallback={}",
            r.outcome.label(),
            r.stats.decisions,
            r.stats.conflicts,
            r.stats.fallback_decisions
        );
    }
}
