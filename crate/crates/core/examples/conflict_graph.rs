//! Build a conflict graph by hand and compare the cuts each learning scheme picks.

use std::collections::HashSet;

use seqsat::analysis::{
    minimize_cut, scheme_decision, scheme_first_new_cut, scheme_first_uip, scheme_relsat,
};
use seqsat::solver::{ConflictSource, LearningScheme, Propagation, Solver, SolverConfig};
use seqsat::{Clause, CnfFormula, Literal};

fn main() {
    // p, q, r with (¬p ∨ ¬q ∨ a), (¬a ∨ ¬r ∨ b), (¬a ∨ ¬b)
    let clauses: Vec<Clause> = [vec![-1, -2, 4], vec![-4, -3, 5], vec![-4, -5]]
        .iter()
        .map(|c| Clause::from_dimacs(c))
        .collect();
    let formula = CnfFormula::new(5, clauses).unwrap();
    let mut solver = Solver::new(
        &formula,
        SolverConfig::with_learning(LearningScheme::FirstUip),
    )
    .unwrap();
    for d in [1, 2, 3] {
        solver.decide(Literal::from_dimacs(d));
        if let Propagation::Conflict(id) = solver.propagate() {
            let g = solver.conflict_graph(ConflictSource::Clause(id));
            print!("{}", g.edge_list());
            let named = [
                ("decision", scheme_decision(&g)),
                ("relsat", scheme_relsat(&g)),
                ("first_uip", scheme_first_uip(&g)),
            ];
            for (name, cut) in named {
                println!(
                    "{name:>10}: {}  minimized {}",
                    g.cut_to_clause(&cut),
                    g.cut_to_clause(&minimize_cut(&g, &cut))
                );
            }
            let (cut, fresh) = scheme_first_new_cut(&g, &HashSet::new());
            println!("{:>10}: {} new={fresh}", "first_new", g.cut_to_clause(&cut));
            return;
        }
    }
    println!("no conflict");
}
