//! Resolution proofs: data model, checking, text format, conversion from
//! clause-learning logs, and the constructions that turn a refutation back
//! into clause-learning runs.
//!
//! Text format, one step per line with 1-based step indices:
//!
//! ```text
//! i <lits> 0
//! r <left> <right> <pivot> <lits> 0
//! ```

mod convert;
mod trace;

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{Clause, ClauseError, CnfFormula, Literal, Variable};

pub use convert::{cl_to_res, normalize, ConvertError};
pub use trace::{
    proof_trace_extension, replay_clmm, res_to_clmm_sequence, trace_set, Replay, TraceError,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    Initial,
    Resolvent {
        left: usize,
        right: usize,
        pivot: Variable,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionStep {
    pub clause: Clause,
    pub kind: StepKind,
}

impl ResolutionStep {
    pub fn is_initial(&self) -> bool {
        self.kind == StepKind::Initial
    }
}

/// A sequence of clauses, each an initial clause or the resolvent of two
/// earlier ones. Its size is the number of steps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResolutionProof {
    steps: Vec<ResolutionStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("the proof is empty")]
    Empty,
    #[error("step {step}: initial clause {clause} is not in the formula")]
    MissingInitial { step: usize, clause: Clause },
    #[error("step {step}: antecedent {antecedent} does not precede it")]
    ForwardReference { step: usize, antecedent: usize },
    #[error("step {step}: pivot {pivot} does not clash between the antecedents")]
    BadPivot { step: usize, pivot: Variable },
    #[error("step {step}: recorded clause is not the resolvent of its antecedents")]
    WrongResolvent { step: usize },
    #[error("step {step}: resolvent is tautological")]
    Tautology { step: usize },
    #[error("step {step}: derived clause is never used")]
    Unused { step: usize },
    #[error("the last clause is {clause}, not the empty clause")]
    NotRefutation { clause: Clause },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrivialError {
    #[error(transparent)]
    Invalid(#[from] ProofError),
    #[error("step {step}: variable {pivot} is resolved on twice")]
    DuplicatePivot { step: usize, pivot: Variable },
    #[error("step {step}: neither antecedent is an initial clause")]
    NoInitialAntecedent { step: usize },
    #[error("step {step}: derived antecedent is not the previous derived clause")]
    NotLinear { step: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: {source}")]
    Clause { line: usize, source: ClauseError },
}

impl ResolutionProof {
    pub fn new() -> ResolutionProof {
        ResolutionProof::default()
    }

    pub fn steps(&self) -> &[ResolutionStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn clause(&self, step: usize) -> &Clause {
        &self.steps[step].clause
    }

    pub fn last_clause(&self) -> Option<&Clause> {
        self.steps.last().map(|s| &s.clause)
    }

    /// Number of resolvent steps.
    pub fn resolution_count(&self) -> usize {
        self.steps.iter().filter(|s| !s.is_initial()).count()
    }

    pub fn push_initial(&mut self, clause: Clause) -> usize {
        self.steps.push(ResolutionStep {
            clause,
            kind: StepKind::Initial,
        });
        self.steps.len() - 1
    }

    /// Appends the resolvent of two earlier steps. Returns `None` if the pivot
    /// does not clash or the resolvent is tautological.
    pub fn push_resolvent(&mut self, left: usize, right: usize, pivot: Variable) -> Option<usize> {
        let clause = self.steps[left]
            .clause
            .resolve(&self.steps[right].clause, pivot)?;
        self.steps.push(ResolutionStep {
            clause,
            kind: StepKind::Resolvent { left, right, pivot },
        });
        Some(self.steps.len() - 1)
    }

    /// Appends a step verbatim, without checking it.
    pub fn push_step(&mut self, step: ResolutionStep) -> usize {
        self.steps.push(step);
        self.steps.len() - 1
    }

    /// Drops steps that the last step does not depend on, keeping order.
    pub fn pruned(&self) -> ResolutionProof {
        if self.steps.is_empty() {
            return self.clone();
        }
        let mut used = vec![false; self.steps.len()];
        *used.last_mut().unwrap() = true;
        for i in (0..self.steps.len()).rev() {
            if !used[i] {
                continue;
            }
            if let StepKind::Resolvent { left, right, .. } = self.steps[i].kind {
                used[left] = true;
                used[right] = true;
            }
        }
        let mut remap = vec![usize::MAX; self.steps.len()];
        let mut out = ResolutionProof::new();
        for (i, step) in self.steps.iter().enumerate() {
            if !used[i] {
                continue;
            }
            let kind = match step.kind {
                StepKind::Initial => StepKind::Initial,
                StepKind::Resolvent { left, right, pivot } => StepKind::Resolvent {
                    left: remap[left],
                    right: remap[right],
                    pivot,
                },
            };
            remap[i] = out.push_step(ResolutionStep {
                clause: step.clause.clone(),
                kind,
            });
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            match step.kind {
                StepKind::Initial => out.push('i'),
                StepKind::Resolvent { left, right, pivot } => {
                    write!(out, "r {} {} {}", left + 1, right + 1, pivot.index()).unwrap()
                }
            }
            for l in step.clause.literals() {
                write!(out, " {}", l.to_dimacs()).unwrap();
            }
            out.push_str(" 0\n");
        }
        out
    }

    pub fn parse(text: &str) -> Result<ResolutionProof, ProofParseError> {
        let mut proof = ResolutionProof::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let syntax = |reason: &str| ProofParseError::Syntax {
                line,
                reason: reason.to_string(),
            };
            let mut tokens = trimmed.split_whitespace();
            let tag = tokens.next().unwrap();
            let mut numbers = Vec::new();
            for t in tokens {
                numbers.push(
                    t.parse::<i64>()
                        .map_err(|_| syntax("expected an integer"))?,
                );
            }
            if numbers.last() != Some(&0) {
                return Err(syntax("step is not terminated by 0"));
            }
            numbers.pop();
            let (kind, lits) = match tag {
                "i" => (StepKind::Initial, &numbers[..]),
                "r" => {
                    if numbers.len() < 3 || numbers[..3].iter().any(|&n| n <= 0) {
                        return Err(syntax("resolvent needs positive <left> <right> <pivot>"));
                    }
                    let (l, r) = (numbers[0] as usize - 1, numbers[1] as usize - 1);
                    if l >= proof.len() || r >= proof.len() {
                        return Err(syntax("antecedent index does not refer to an earlier step"));
                    }
                    (
                        StepKind::Resolvent {
                            left: l,
                            right: r,
                            pivot: Variable::new(numbers[2] as u32),
                        },
                        &numbers[3..],
                    )
                }
                _ => return Err(syntax("step must start with `i` or `r`")),
            };
            if lits.contains(&0) {
                return Err(syntax("0 inside a clause"));
            }
            let clause = Clause::new(lits.iter().map(|&v| Literal::from_dimacs(v)))
                .map_err(|source| ProofParseError::Clause { line, source })?;
            proof.push_step(ResolutionStep { clause, kind });
        }
        Ok(proof)
    }
}

/// Checks resolvent correctness and usage for every step. Initial clauses
/// are checked against `initials` when given. Step indices in errors are
/// 0-based.
pub fn check_derivation(
    proof: &ResolutionProof,
    initials: Option<&HashSet<&Clause>>,
) -> Result<(), ProofError> {
    if proof.is_empty() {
        return Err(ProofError::Empty);
    }
    let mut used = vec![false; proof.len()];
    for (i, step) in proof.steps.iter().enumerate() {
        match step.kind {
            StepKind::Initial => {
                if let Some(set) = initials {
                    if !set.contains(&step.clause) {
                        return Err(ProofError::MissingInitial {
                            step: i,
                            clause: step.clause.clone(),
                        });
                    }
                }
            }
            StepKind::Resolvent { left, right, pivot } => {
                for a in [left, right] {
                    if a >= i {
                        return Err(ProofError::ForwardReference {
                            step: i,
                            antecedent: a,
                        });
                    }
                }
                let (l, r) = (&proof.steps[left].clause, &proof.steps[right].clause);
                let clash = (l.contains(pivot.positive()) && r.contains(pivot.negative()))
                    || (l.contains(pivot.negative()) && r.contains(pivot.positive()));
                if !clash {
                    return Err(ProofError::BadPivot { step: i, pivot });
                }
                let merged = l
                    .literals()
                    .iter()
                    .chain(r.literals())
                    .copied()
                    .filter(|x| x.var() != pivot);
                match Clause::new(merged) {
                    Err(_) => return Err(ProofError::Tautology { step: i }),
                    Ok(c) if c != step.clause => {
                        return Err(ProofError::WrongResolvent { step: i })
                    }
                    Ok(_) => {}
                }
                used[left] = true;
                used[right] = true;
            }
        }
    }
    for (i, step) in proof.steps.iter().enumerate() {
        if i + 1 < proof.len() && !step.is_initial() && !used[i] {
            return Err(ProofError::Unused { step: i });
        }
    }
    Ok(())
}

/// Checks that `proof` is a resolution refutation of `formula`.
pub fn check_res_refutation(
    proof: &ResolutionProof,
    formula: &CnfFormula,
) -> Result<(), ProofError> {
    let initials: HashSet<&Clause> = formula.clauses().iter().collect();
    check_derivation(proof, Some(&initials))?;
    let last = proof.last_clause().unwrap();
    if !last.is_empty() {
        return Err(ProofError::NotRefutation {
            clause: last.clone(),
        });
    }
    Ok(())
}

/// Checks the trivial-resolution shape: a valid derivation, every variable
/// resolved on at most once, and each resolvent combining an initial clause
/// with either another initial clause or the most recent derived clause.
pub fn check_trivial(proof: &ResolutionProof) -> Result<(), TrivialError> {
    check_derivation(proof, None)?;
    let mut pivots = HashSet::new();
    let mut last_derived: Option<usize> = None;
    for (i, step) in proof.steps.iter().enumerate() {
        let StepKind::Resolvent { left, right, pivot } = step.kind else {
            continue;
        };
        if !pivots.insert(pivot) {
            return Err(TrivialError::DuplicatePivot { step: i, pivot });
        }
        let (li, ri) = (
            proof.steps[left].is_initial(),
            proof.steps[right].is_initial(),
        );
        let derived = match (li, ri) {
            (true, true) => None,
            (true, false) => Some(right),
            (false, true) => Some(left),
            (false, false) => return Err(TrivialError::NoInitialAntecedent { step: i }),
        };
        if derived.is_some() && derived != last_derived {
            return Err(TrivialError::NotLinear { step: i });
        }
        last_derived = Some(i);
    }
    Ok(())
}

/// Reference unit propagation: does asserting `assumptions` against `clauses`
/// yield a falsified clause by unit propagation alone?
pub fn propagation_refutes(num_vars: u32, clauses: &[Clause], assumptions: &[Literal]) -> bool {
    let mut value: Vec<Option<bool>> = vec![None; num_vars as usize];
    let lit_value =
        |value: &Vec<Option<bool>>, l: Literal| value[l.var().slot()].map(|v| v == l.is_positive());
    for &a in assumptions {
        match lit_value(&value, a) {
            Some(false) => return true,
            Some(true) => {}
            None => value[a.var().slot()] = Some(a.is_positive()),
        }
    }
    loop {
        let mut changed = false;
        for c in clauses {
            let mut open = None;
            let mut open_count = 0;
            let mut sat = false;
            for &l in c.literals() {
                match lit_value(&value, l) {
                    Some(true) => {
                        sat = true;
                        break;
                    }
                    None => {
                        open_count += 1;
                        open = Some(l);
                    }
                    Some(false) => {}
                }
            }
            if sat {
                continue;
            }
            match open_count {
                0 => return true,
                1 => {
                    let l = open.unwrap();
                    value[l.var().slot()] = Some(l.is_positive());
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return false;
        }
    }
}
