//! A clause-learning SAT solver driven by branching sequences.
//!
//! The crate bundles:
//!
//! - a propositional core with DIMACS I/O ([`formula`], [`dimacs`]);
//! - a CDCL engine with pluggable learning schemes, externally supplied
//!   branching sequences, restarts and the CL-- relaxation ([`solver`]);
//! - conflict graphs, cuts and trivial-derivation certificates ([`analysis`]);
//! - resolution proof checking, CL-to-RES conversion, proof trace extensions
//!   and RES-to-CL-- replay sequences ([`proof`]);
//! - pebbling and ordering-principle formula generators ([`generators`]);
//! - automatic branching-sequence generators ([`seqgen`]);
//! - a benchmark harness and command-line front end ([`bench`], [`cli`]).
//!
//! ```
//! use seqsat::generators::{gen_grid, pebbling_to_cnf};
//! use seqsat::seqgen::peb_seq_1uip;
//! use seqsat::solver::{solve, LearningScheme, SolverConfig};
//!
//! let graph = gen_grid(5);
//! let formula = pebbling_to_cnf(&graph);
//! let config = SolverConfig::with_learning(LearningScheme::FirstUip)
//!     .with_sequence(peb_seq_1uip(&graph).unwrap());
//! let result = solve(&formula, config).unwrap();
//! assert!(result.outcome.is_unsat());
//! assert_eq!(result.stats.fallback_decisions, 0);
//! ```

pub mod analysis;
pub mod bench;
pub mod cli;
pub mod dimacs;
pub mod formula;
pub mod generators;
pub mod proof;
pub mod seqgen;
pub mod sequence;
pub mod solver;

pub use formula::{Clause, CnfFormula, Literal, PartialAssignment, Variable};
pub use sequence::{BranchingSequence, SeqEntry};
