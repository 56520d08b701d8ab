//! DIMACS CNF reading and writing.
//!
//! Lines starting with `c` are comments. The header `p cnf V C` must precede
//! the clauses; each clause is a whitespace-separated list of non-zero
//! integers terminated by `0` and may span several lines.

use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{Clause, ClauseError, CnfFormula, Literal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: clause data before the `p cnf` header")]
    MissingHeader { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: literal {literal} exceeds the declared {num_vars} variables")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        num_vars: u32,
    },
    #[error("line {line}: last clause is not terminated by 0")]
    MissingTerminator { line: usize },
    #[error("line {line}: tautological clause (contains {literal} and its negation)")]
    Tautology { line: usize, literal: i64 },
    #[error("line {line}: header declares {declared} clauses but {found} were read")]
    ClauseCount {
        line: usize,
        declared: usize,
        found: usize,
    },
}

/// Parses a DIMACS CNF document.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut clause_line = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::MalformedHeader {
                    line,
                    reason: "duplicate header".into(),
                });
            }
            header = Some(parse_header(trimmed, line)?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(DimacsError::MissingHeader { line });
        };
        for token in trimmed.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| DimacsError::InvalidToken {
                line,
                token: token.to_string(),
            })?;
            if current.is_empty() {
                clause_line = line;
            }
            if value == 0 {
                let clause = Clause::new(current.drain(..)).map_err(|e| match e {
                    ClauseError::Tautology(l) => DimacsError::Tautology {
                        line: clause_line.max(1),
                        literal: l.to_dimacs(),
                    },
                })?;
                clauses.push(clause);
                continue;
            }
            if value.unsigned_abs() > u64::from(num_vars) {
                return Err(DimacsError::LiteralOutOfRange {
                    line,
                    literal: value,
                    num_vars,
                });
            }
            current.push(Literal::from_dimacs(value));
        }
    }

    let Some((num_vars, declared)) = header else {
        return Err(DimacsError::MalformedHeader {
            line: last_line.max(1),
            reason: "no `p cnf` header".into(),
        });
    };
    if !current.is_empty() {
        return Err(DimacsError::MissingTerminator { line: last_line });
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount {
            line: last_line,
            declared,
            found: clauses.len(),
        });
    }
    Ok(CnfFormula::new(num_vars, clauses).expect("literal ranges checked while parsing"))
}

fn parse_header(line_text: &str, line: usize) -> Result<(u32, usize), DimacsError> {
    let fields: Vec<&str> = line_text.split_whitespace().collect();
    let bad = |reason: &str| DimacsError::MalformedHeader {
        line,
        reason: reason.to_string(),
    };
    if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
        return Err(bad("expected `p cnf <vars> <clauses>`"));
    }
    let vars = fields[2]
        .parse()
        .map_err(|_| bad("variable count is not a number"))?;
    let clauses = fields[3]
        .parse()
        .map_err(|_| bad("clause count is not a number"))?;
    Ok((vars, clauses))
}

/// Renders a formula as DIMACS CNF.
pub fn write_dimacs(formula: &CnfFormula) -> String {
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", formula.num_vars(), formula.size()).unwrap();
    for clause in formula.clauses() {
        for lit in clause.literals() {
            write!(out, "{} ", lit.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_formula() {
        let f = parse_dimacs("p cnf 2 2\n1 -2 0\n2 0\n").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(
            f.clauses(),
            &[Clause::from_dimacs(&[1, -2]), Clause::from_dimacs(&[2])]
        );
    }

    #[test]
    fn parses_empty_clause() {
        let f = parse_dimacs("p cnf 1 1\n0\n").unwrap();
        assert_eq!(f.clauses(), &[Clause::empty()]);
    }

    #[test]
    fn comments_and_multiline_clauses() {
        let f = parse_dimacs("c hello\np cnf 3 1\nc mid\n1 2\n-3 0\n").unwrap();
        assert_eq!(f.clauses(), &[Clause::from_dimacs(&[1, 2, -3])]);
    }

    #[test]
    fn duplicate_literals_are_merged() {
        let f = parse_dimacs("p cnf 2 1\n1 1 2 0\n").unwrap();
        assert_eq!(f.clauses()[0].len(), 2);
    }

    #[test]
    fn distinct_errors() {
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 -1 0\n"),
            Err(DimacsError::Tautology {
                line: 2,
                literal: 1
            })
        );
        assert!(matches!(
            parse_dimacs("p cnf x 1\n1 0\n"),
            Err(DimacsError::MalformedHeader { line: 1, .. })
        ));
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 3 0\n"),
            Err(DimacsError::LiteralOutOfRange {
                line: 2,
                literal: 3,
                num_vars: 2
            })
        );
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 2\n"),
            Err(DimacsError::MissingTerminator { line: 2 })
        );
        assert!(matches!(
            parse_dimacs("p cnf 2 2\n1 2 0\n"),
            Err(DimacsError::ClauseCount {
                declared: 2,
                found: 1,
                ..
            })
        ));
        assert_eq!(
            parse_dimacs("1 2 0\n"),
            Err(DimacsError::MissingHeader { line: 1 })
        );
    }

    #[test]
    fn writes_dimacs() {
        let f = CnfFormula::new(1, vec![Clause::from_dimacs(&[1])]).unwrap();
        assert_eq!(write_dimacs(&f), "p cnf 1 1\n1 0\n");
    }
}
