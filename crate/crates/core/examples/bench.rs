//! Small benchmark over all three families, printed as a markdown table.

use seqsat::bench::{
    grid_instances, gtn_instances, random_instances, run_bench, to_markdown, BenchOptions, Budgets,
    ConfigLabel, Variant,
};

fn main() {
    let variants = [Variant::Unsat, Variant::Sat];
    let mut instances = grid_instances(&[5, 10, 20], &variants, 1);
    instances.extend(random_instances(40, 3, 2, &[0, 1], &variants).unwrap());
    instances.extend(gtn_instances(&[6, 8], &variants, 1));
    let opts = BenchOptions {
        budgets: Budgets {
            conflicts: 50_000,
            decisions: 1_000_000,
        },
        verify_proofs: true,
    };
    let rows = run_bench(
        &instances,
        &[
            ConfigLabel::Dpll,
            ConfigLabel::ClDefault,
            ConfigLabel::ClSequence,
        ],
        opts,
    );
    print!("{}", to_markdown(&rows));
}
