//! Read DIMACS from stdin (or use a built-in instance), solve, print the model.

use std::io::Read;

use seqsat::dimacs::{parse_dimacs, write_dimacs};
use seqsat::solver::{solve, LearningScheme, Outcome, SolverConfig};

const DEFAULT: &str = "p cnf 3 4\n1 2 0\n-1 3 0\n-2 3 0\n-3 1 0\n";

fn main() {
    let mut text = String::new();
    if std::env::args().any(|a| a == "-") {
        std::io::stdin().read_to_string(&mut text).unwrap();
    } else {
        text = DEFAULT.into();
    }
    let formula = parse_dimacs(&text).unwrap();
    print!("{}", write_dimacs(&formula));
    match solve(
        &formula,
        SolverConfig::with_learning(LearningScheme::FirstUip),
    )
    .unwrap()
    .outcome
    {
        Outcome::Sat(m) => {
            let lits: Vec<String> = m
                .assigned_literals()
                .iter()
                .map(|l| l.to_dimacs().to_string())
                .collect();
            println!("s SATISFIABLE\nv {} 0", lits.join(" "));
        }
        Outcome::Unsat => println!("s UNSATISFIABLE"),
        _ => println!("s UNKNOWN"),
    }
}
