//! The search loop: trail, decision levels, watched-literal propagation,
//! sequence-guided branching with a heuristic fallback, backjumping,
//! restarts and the CL-- relaxation.
//!
//! [`solve`] is the one-call entry point. [`Solver`] exposes the individual
//! steps (propagation, decision selection, backjumping, restarts) for callers
//! that want to drive the search by hand.

mod engine;
pub mod heuristic;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::analysis::ProofLog;
use crate::formula::{CnfFormula, PartialAssignment};
use crate::sequence::BranchingSequence;

pub use engine::{ClauseId, ConflictSource, Decision, EntryKind, Propagation, Solver, TrailEntry};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum LearningScheme {
    /// Plain DPLL with chronological backtracking.
    None,
    Decision,
    RelSat,
    FirstUip,
    FirstNewCut,
}

impl LearningScheme {
    pub const ALL: [LearningScheme; 5] = [
        LearningScheme::None,
        LearningScheme::Decision,
        LearningScheme::RelSat,
        LearningScheme::FirstUip,
        LearningScheme::FirstNewCut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearningScheme::None => "none",
            LearningScheme::Decision => "decision",
            LearningScheme::RelSat => "relsat",
            LearningScheme::FirstUip => "first_uip",
            LearningScheme::FirstNewCut => "first_new_cut",
        }
    }
}

impl fmt::Display for LearningScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearningScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LearningScheme::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown learning scheme `{s}`"))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum RestartPolicy {
    /// Restart markers in the sequence are skipped.
    #[default]
    Off,
    /// Every restart marker in the sequence unwinds the trail to level 0.
    SequenceMarkersOnly,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub learning: LearningScheme,
    pub sequence: Option<BranchingSequence>,
    /// Allow branching on literals that are already assigned.
    pub cl_minus_minus: bool,
    pub restart_policy: RestartPolicy,
    pub conflict_budget: Option<u64>,
    pub decision_budget: Option<u64>,
    /// Record a derivation for every learned clause and for the final conflict.
    pub log_proof: bool,
    /// Keep the edge lists of this many leading conflict graphs.
    pub keep_conflict_graphs: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            learning: LearningScheme::FirstUip,
            sequence: None,
            cl_minus_minus: false,
            restart_policy: RestartPolicy::Off,
            conflict_budget: None,
            decision_budget: None,
            log_proof: false,
            keep_conflict_graphs: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("restart markers in the branching sequence require CL-- mode")]
    RestartsWithoutMinusMinus,
    #[error("CL-- mode requires a learning scheme")]
    MinusMinusWithoutLearning,
    #[error("the sequence mentions variable {var} but the formula has {num_vars} variables")]
    SequenceOutOfRange { var: u32, num_vars: u32 },
}

impl SolverConfig {
    pub fn with_learning(learning: LearningScheme) -> SolverConfig {
        SolverConfig {
            learning,
            ..SolverConfig::default()
        }
    }

    pub fn with_sequence(mut self, sequence: BranchingSequence) -> SolverConfig {
        self.sequence = Some(sequence);
        self
    }

    pub fn validate(&self, formula: &CnfFormula) -> Result<(), ConfigError> {
        if self.cl_minus_minus && self.learning == LearningScheme::None {
            return Err(ConfigError::MinusMinusWithoutLearning);
        }
        if let Some(seq) = &self.sequence {
            if seq.has_restarts() && !self.cl_minus_minus {
                return Err(ConfigError::RestartsWithoutMinusMinus);
            }
            if let Some(l) = seq
                .literals()
                .find(|l| l.var().index() > formula.num_vars())
            {
                return Err(ConfigError::SequenceOutOfRange {
                    var: l.var().index(),
                    num_vars: formula.num_vars(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub learned_clauses: u64,
    pub max_level: u32,
    pub fallback_decisions: u64,
    /// Conflicts reached after the first fallback decision.
    pub fallback_conflicts: u64,
    pub restarts: u64,
    /// FirstNewCut conflicts where every cut gave a known clause.
    pub redundant_learned: u64,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Sat(PartialAssignment),
    Unsat,
    BudgetExceeded,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Sat(_) => "SAT",
            Outcome::Unsat => "UNSAT",
            Outcome::BudgetExceeded => "BUDGET_EXCEEDED",
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, Outcome::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Outcome::Unsat)
    }

    pub fn model(&self) -> Option<&PartialAssignment> {
        match self {
            Outcome::Sat(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub outcome: Outcome,
    pub stats: SolveStats,
    /// Present for UNSAT runs with proof logging whose final conflict involves
    /// no decisions (always the case when a learning scheme is active).
    pub proof: Option<ProofLog>,
    /// Edge lists of the first `keep_conflict_graphs` conflict graphs.
    pub conflict_graphs: Vec<String>,
}

/// Runs the search to completion or until a budget is hit.
pub fn solve(formula: &CnfFormula, config: SolverConfig) -> Result<SolveResult, ConfigError> {
    Ok(Solver::new(formula, config)?.run())
}
