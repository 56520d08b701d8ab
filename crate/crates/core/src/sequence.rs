//! Branching sequences and the `.seq` text format.
//!
//! A sequence is an ordered list of literals, possibly repeated, optionally
//! interleaved with restart markers. The solver branches on each literal by
//! setting it FALSE first. In the file format every non-comment line holds
//! one entry: a signed DIMACS literal, or `R` for a restart marker. Lines
//! starting with `#` are comments.

use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::Literal;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum SeqEntry {
    Branch(Literal),
    Restart,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BranchingSequence {
    entries: Vec<SeqEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("line {line}: invalid sequence entry `{token}`")]
    InvalidEntry { line: usize, token: String },
}

impl BranchingSequence {
    pub fn new() -> BranchingSequence {
        BranchingSequence::default()
    }

    pub fn from_literals<I: IntoIterator<Item = Literal>>(literals: I) -> BranchingSequence {
        BranchingSequence {
            entries: literals.into_iter().map(SeqEntry::Branch).collect(),
        }
    }

    pub fn from_entries(entries: Vec<SeqEntry>) -> BranchingSequence {
        BranchingSequence { entries }
    }

    pub fn push(&mut self, literal: Literal) {
        self.entries.push(SeqEntry::Branch(literal));
    }

    pub fn push_restart(&mut self) {
        self.entries.push(SeqEntry::Restart);
    }

    pub fn entries(&self) -> &[SeqEntry] {
        &self.entries
    }

    /// Number of literal entries; restart markers are not counted.
    pub fn len(&self) -> usize {
        self.literals().count()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn restart_count(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e, SeqEntry::Restart))
            .count()
    }

    pub fn has_restarts(&self) -> bool {
        self.restart_count() > 0
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.entries.iter().filter_map(|e| match e {
            SeqEntry::Branch(l) => Some(*l),
            SeqEntry::Restart => None,
        })
    }

    pub fn parse(text: &str) -> Result<BranchingSequence, SequenceError> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "R" {
                entries.push(SeqEntry::Restart);
                continue;
            }
            match line.parse::<i64>() {
                Ok(v) if v != 0 => entries.push(SeqEntry::Branch(Literal::from_dimacs(v))),
                _ => {
                    return Err(SequenceError::InvalidEntry {
                        line: idx + 1,
                        token: line.to_string(),
                    })
                }
            }
        }
        Ok(BranchingSequence { entries })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            match e {
                SeqEntry::Branch(l) => writeln!(out, "{}", l.to_dimacs()).unwrap(),
                SeqEntry::Restart => out.push_str("R\n"),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_count() {
        let s = BranchingSequence::parse("# header\n3\n-2\nR\n\n3\n").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.restart_count(), 1);
        assert_eq!(s.entries()[1], SeqEntry::Branch(Literal::from_dimacs(-2)));
        assert_eq!(BranchingSequence::parse(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(
            BranchingSequence::parse("1\nx\n"),
            Err(SequenceError::InvalidEntry {
                line: 2,
                token: "x".into()
            })
        );
        assert!(BranchingSequence::parse("0\n").is_err());
    }
}
