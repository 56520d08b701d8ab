//! Ordering-principle formulas, with and without the generated sequence.

use seqsat::generators::gen_gtn;
use seqsat::seqgen::gtn_seq;
use seqsat::solver::{solve, LearningScheme, SolverConfig};

fn main() {
    for n in [6, 8, 10, 12] {
        let f = gen_gtn(n);
        let base = SolverConfig::with_learning(LearningScheme::FirstUip);
        let plain = solve(&f, base.clone()).unwrap();
        let guided = solve(&f, base.with_sequence(gtn_seq(n))).unwrap();
        println!(
            "n={n:>2} clauses={:>5}  activity: {} conflicts  sequence: {} conflicts (fallback {})",
            f.clauses().len(),
            plain.stats.conflicts,
            guided.stats.conflicts,
            guided.stats.fallback_decisions
        );
    }
}
