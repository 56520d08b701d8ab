use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::{check_derivation, ProofError, ResolutionProof, ResolutionStep, StepKind};
use crate::analysis::ProofLog;
use crate::formula::{Clause, CnfFormula, Literal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("derivation {derivation} uses {clause}, which is neither initial nor learned earlier")]
    UnknownClause { derivation: usize, clause: Clause },
    #[error("derivation {derivation} is invalid: {source}")]
    InvalidDerivation {
        derivation: usize,
        source: ProofError,
    },
    #[error("derivation {derivation} ends in {found}, but the record says {expected}")]
    RecordMismatch {
        derivation: usize,
        expected: Clause,
        found: Clause,
    },
    #[error("the final derivation does not end in the empty clause")]
    NotRefutation,
}

/// Stitches the derivations of a clause-learning run into one resolution
/// refutation: every learned clause is derived in learning order, then the
/// empty clause from the final conflict. Initial clauses are shared and steps
/// the refutation does not need are dropped.
pub fn cl_to_res(log: &ProofLog, formula: &CnfFormula) -> Result<ResolutionProof, ConvertError> {
    let in_formula: HashSet<&Clause> = formula.clauses().iter().collect();
    let mut out = ResolutionProof::new();
    let mut available: HashMap<Clause, usize> = HashMap::new();

    let derivations = log
        .records
        .iter()
        .map(|r| (&r.derivation, Some(&r.clause)))
        .chain(std::iter::once((&log.refutation, None)));
    for (k, (derivation, learned)) in derivations.enumerate() {
        check_derivation(derivation, None).map_err(|source| ConvertError::InvalidDerivation {
            derivation: k,
            source,
        })?;
        let mut local = Vec::with_capacity(derivation.len());
        for step in derivation.steps() {
            let idx = match step.kind {
                StepKind::Initial => match available.get(&step.clause) {
                    Some(&i) => i,
                    None if in_formula.contains(&step.clause) => {
                        let i = out.push_initial(step.clause.clone());
                        available.insert(step.clause.clone(), i);
                        i
                    }
                    None => {
                        return Err(ConvertError::UnknownClause {
                            derivation: k,
                            clause: step.clause.clone(),
                        })
                    }
                },
                StepKind::Resolvent { left, right, pivot } => out
                    .push_resolvent(local[left], local[right], pivot)
                    .expect("checked derivation replays"),
            };
            local.push(idx);
        }
        let last = *local.last().expect("checked derivation is nonempty");
        match learned {
            Some(expected) => {
                if out.clause(last) != expected {
                    return Err(ConvertError::RecordMismatch {
                        derivation: k,
                        expected: expected.clone(),
                        found: out.clause(last).clone(),
                    });
                }
                available.entry(expected.clone()).or_insert(last);
            }
            None => {
                if !out.clause(last).is_empty() {
                    return Err(ConvertError::NotRefutation);
                }
                // the empty clause may have been produced by an earlier step
                let mut p = out;
                if last + 1 != p.len() {
                    let step = p.steps()[last].clone();
                    p.push_step(step);
                }
                return Ok(p.pruned());
            }
        }
    }
    unreachable!("the final derivation always returns")
}

#[derive(Clone)]
enum Work {
    Step(ResolutionStep),
    Alias(usize),
}

/// Simplifies a proof so that no derived clause has a strict subclause that
/// occurs earlier or that follows by resolving two earlier clauses. Such a
/// clause is replaced by the smaller one; later steps are re-resolved, and a
/// step whose antecedent lost the pivot becomes that antecedent. Duplicate
/// clauses are merged and unused steps dropped. The result derives a
/// subclause of the original last clause, so refutations stay refutations.
pub fn normalize(proof: &ResolutionProof) -> ResolutionProof {
    let proof = proof.pruned();
    if proof.is_empty() {
        return proof;
    }
    let mut work: Vec<Work> = Vec::with_capacity(proof.len());
    let resolve_alias = |work: &Vec<Work>, mut i: usize| {
        while let Work::Alias(j) = work[i] {
            i = j;
        }
        i
    };
    let mut first_seen: HashMap<Clause, usize> = HashMap::new();

    for (i, original) in proof.steps().iter().enumerate() {
        // Re-resolve from the (already final) antecedents.
        let mut item = match original.kind {
            StepKind::Initial => Work::Step(original.clone()),
            StepKind::Resolvent { left, right, pivot } => {
                let (l, r) = (resolve_alias(&work, left), resolve_alias(&work, right));
                let (lc, rc) = (clause_of(&work, l), clause_of(&work, r));
                if !lc.mentions(pivot) {
                    Work::Alias(l)
                } else if !rc.mentions(pivot) {
                    Work::Alias(r)
                } else {
                    let clause = lc
                        .resolve(rc, pivot)
                        .expect("shrunk antecedents still clash");
                    Work::Step(ResolutionStep {
                        clause,
                        kind: StepKind::Resolvent {
                            left: l,
                            right: r,
                            pivot,
                        },
                    })
                }
            }
        };
        if let Work::Step(step) = &item {
            if let Some(&j) = first_seen.get(&step.clause) {
                item = Work::Alias(j);
            } else if !step.is_initial() {
                if let Some(better) = improve(&work, &step.clause) {
                    item = better;
                }
            }
        }
        if let Work::Step(step) = &item {
            if let Some(&j) = first_seen.get(&step.clause) {
                item = Work::Alias(j);
            } else {
                first_seen.insert(step.clause.clone(), i);
            }
        }
        work.push(item);
    }

    let last = resolve_alias(&work, work.len() - 1);
    let mut out = ResolutionProof::new();
    let mut remap = vec![usize::MAX; work.len()];
    for (i, item) in work.iter().enumerate().take(last + 1) {
        let Work::Step(step) = item else { continue };
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
    // Steps after `last` are gone; make sure `last` ends the proof.
    let mut trimmed = ResolutionProof::new();
    for s in out.steps().iter().take(remap[last] + 1) {
        trimmed.push_step(s.clone());
    }
    trimmed.pruned()
}

fn clause_of(work: &[Work], i: usize) -> &Clause {
    match &work[i] {
        Work::Step(s) => &s.clause,
        Work::Alias(_) => unreachable!("aliases are resolved first"),
    }
}

/// An earlier strict subclause of `target`, or the smallest strict subclause
/// obtained by resolving two earlier clauses.
fn improve(work: &[Work], target: &Clause) -> Option<Work> {
    let mut by_outside: HashMap<Literal, Vec<usize>> = HashMap::new();
    for (j, item) in work.iter().enumerate() {
        let Work::Step(step) = item else { continue };
        let mut outside = step
            .clause
            .literals()
            .iter()
            .filter(|l| !target.contains(**l));
        match (outside.next(), outside.next()) {
            (None, _) => {
                if step.clause.len() < target.len() {
                    return Some(Work::Alias(j));
                }
            }
            (Some(&y), None) => by_outside.entry(y).or_default().push(j),
            _ => {}
        }
    }
    let mut best: Option<(usize, Work)> = None;
    let mut keys: Vec<&Literal> = by_outside.keys().filter(|l| l.is_positive()).collect();
    keys.sort();
    for &y in keys {
        let Some(negs) = by_outside.get(&!y) else {
            continue;
        };
        for &a in &by_outside[&y] {
            for &b in negs {
                let Some(r) = clause_of(work, a).resolve(clause_of(work, b), y.var()) else {
                    continue;
                };
                if r.len() < target.len() && best.as_ref().is_none_or(|(n, _)| r.len() < *n) {
                    best = Some((
                        r.len(),
                        Work::Step(ResolutionStep {
                            clause: r,
                            kind: StepKind::Resolvent {
                                left: a,
                                right: b,
                                pivot: y.var(),
                            },
                        }),
                    ));
                }
            }
        }
    }
    best.map(|(_, w)| w)
}
