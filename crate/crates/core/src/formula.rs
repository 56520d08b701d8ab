//! Propositional data model: variables, literals, clauses, CNF formulas and
//! partial assignments.

use std::fmt;
use std::ops::Not;

use thiserror::Error;

/// A propositional variable, 1-based.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(u32);

impl Variable {
    /// Creates a variable from its 1-based index.
    ///
    /// Panics if `index` is zero.
    pub fn new(index: u32) -> Variable {
        assert!(index >= 1, "variable indices are 1-based");
        Variable(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    /// Zero-based position, for indexing per-variable tables.
    pub fn slot(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn positive(self) -> Literal {
        Literal::new(self, true)
    }

    pub fn negative(self) -> Literal {
        Literal::new(self, false)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A variable together with a polarity.
///
/// Encoded as `2 * (var - 1) + negated`, so literals sort by variable first and
/// the positive literal precedes the negative one.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(u32);

impl Literal {
    pub fn new(var: Variable, positive: bool) -> Literal {
        Literal(2 * (var.0 - 1) + u32::from(!positive))
    }

    /// Builds a literal from the DIMACS signed-integer convention.
    ///
    /// Panics on zero.
    pub fn from_dimacs(value: i64) -> Literal {
        assert!(value != 0, "0 is not a literal");
        let var = Variable::new(value.unsigned_abs() as u32);
        Literal::new(var, value > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0);
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn var(self) -> Variable {
        Variable(self.0 / 2 + 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense code, usable as an index into per-literal tables of size `2 * num_vars`.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Literal {
        Literal(code as u32)
    }
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal(self.0 ^ 1)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var().0)
        } else {
            write!(f, "-x{}", self.var().0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClauseError {
    #[error("clause contains both {0} and its negation")]
    Tautology(Literal),
}

/// A disjunction of literals, stored sorted and deduplicated.
///
/// Two clauses are equal iff they contain the same set of literals. The empty
/// clause is the contradiction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new<I: IntoIterator<Item = Literal>>(literals: I) -> Result<Clause, ClauseError> {
        let mut literals: Vec<Literal> = literals.into_iter().collect();
        literals.sort_unstable();
        literals.dedup();
        for pair in literals.windows(2) {
            if pair[0].var() == pair[1].var() {
                return Err(ClauseError::Tautology(pair[0]));
            }
        }
        Ok(Clause { literals })
    }

    /// Shorthand for tests and generators: builds a clause from DIMACS integers.
    ///
    /// Panics on tautologies or zero.
    pub fn from_dimacs(values: &[i64]) -> Clause {
        Clause::new(values.iter().map(|&v| Literal::from_dimacs(v))).expect("tautological clause")
    }

    /// The empty clause.
    pub fn empty() -> Clause {
        Clause {
            literals: Vec::new(),
        }
    }

    pub fn unit(literal: Literal) -> Clause {
        Clause {
            literals: vec![literal],
        }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn contains(&self, literal: Literal) -> bool {
        self.literals.binary_search(&literal).is_ok()
    }

    pub fn mentions(&self, var: Variable) -> bool {
        self.contains(var.positive()) || self.contains(var.negative())
    }

    /// True if every literal of `self` also occurs in `other`.
    pub fn is_subclause_of(&self, other: &Clause) -> bool {
        self.literals.iter().all(|&l| other.contains(l))
    }

    pub fn max_var(&self) -> Option<Variable> {
        self.literals.iter().map(|l| l.var()).max()
    }

    /// Resolves `self` with `other` on `pivot`.
    ///
    /// Returns `None` unless the pivot occurs with opposite signs in the two
    /// clauses and the resolvent is not tautological.
    pub fn resolve(&self, other: &Clause, pivot: Variable) -> Option<Clause> {
        let (pos, neg) = (pivot.positive(), pivot.negative());
        let ok = (self.contains(pos) && other.contains(neg))
            || (self.contains(neg) && other.contains(pos));
        if !ok {
            return None;
        }
        let lits = self
            .literals
            .iter()
            .chain(other.literals.iter())
            .copied()
            .filter(|l| l.var() != pivot);
        Clause::new(lits).ok()
    }

    pub fn to_dimacs(&self) -> Vec<i64> {
        self.literals.iter().map(|l| l.to_dimacs()).collect()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return write!(f, "()");
        }
        write!(f, "(")?;
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("clause {clause} mentions {var} but the formula has only {num_vars} variables")]
    VariableOutOfRange {
        clause: usize,
        var: Variable,
        num_vars: u32,
    },
}

/// A conjunction of clauses over variables `1..=num_vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<CnfFormula, FormulaError> {
        for (i, c) in clauses.iter().enumerate() {
            if let Some(var) = c.max_var() {
                if var.index() > num_vars {
                    return Err(FormulaError::VariableOutOfRange {
                        clause: i,
                        var,
                        num_vars,
                    });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Number of clauses.
    pub fn size(&self) -> usize {
        self.clauses.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = Variable> {
        (1..=self.num_vars).map(Variable::new)
    }

    /// Same formula with clause `index` deleted.
    pub fn without_clause(&self, index: usize) -> CnfFormula {
        let mut clauses = self.clauses.clone();
        clauses.remove(index);
        CnfFormula {
            num_vars: self.num_vars,
            clauses,
        }
    }

    /// True if both formulas have the same variable count and the same clauses
    /// in the same order (clause equality is set equality of literals).
    pub fn same_as(&self, other: &CnfFormula) -> bool {
        self == other
    }

    /// Restriction `F|rho`: clauses satisfied by `rho` are dropped and literals
    /// falsified by `rho` are removed from the rest. May contain the empty clause.
    pub fn restrict(&self, rho: &PartialAssignment) -> CnfFormula {
        let clauses = self
            .clauses
            .iter()
            .filter(|c| {
                !c.literals()
                    .iter()
                    .any(|&l| rho.literal_value(l) == Some(true))
            })
            .map(|c| Clause {
                literals: c
                    .literals()
                    .iter()
                    .copied()
                    .filter(|&l| rho.literal_value(l).is_none())
                    .collect(),
            })
            .collect();
        CnfFormula {
            num_vars: self.num_vars,
            clauses,
        }
    }
}

/// Free-function form of [`CnfFormula::restrict`].
pub fn restrict_simplify(formula: &CnfFormula, rho: &PartialAssignment) -> CnfFormula {
    formula.restrict(rho)
}

/// A map from each variable `1..=num_vars` to TRUE, FALSE or unassigned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialAssignment {
    values: Vec<Option<bool>>,
}

impl PartialAssignment {
    pub fn new(num_vars: u32) -> PartialAssignment {
        PartialAssignment {
            values: vec![None; num_vars as usize],
        }
    }

    pub fn from_literals(num_vars: u32, literals: &[Literal]) -> PartialAssignment {
        let mut rho = PartialAssignment::new(num_vars);
        for &l in literals {
            rho.assign(l);
        }
        rho
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn set(&mut self, var: Variable, value: Option<bool>) {
        self.values[var.slot()] = value;
    }

    /// Makes `literal` true.
    pub fn assign(&mut self, literal: Literal) {
        self.values[literal.var().slot()] = Some(literal.is_positive());
    }

    pub fn value(&self, var: Variable) -> Option<bool> {
        self.values[var.slot()]
    }

    pub fn literal_value(&self, literal: Literal) -> Option<bool> {
        self.values
            .get(literal.var().slot())
            .copied()
            .flatten()
            .map(|v| v == literal.is_positive())
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// The assigned variables as true literals, in variable order.
    pub fn assigned_literals(&self) -> Vec<Literal> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|b| Literal::new(Variable::new(i as u32 + 1), b)))
            .collect()
    }

    pub fn satisfies_clause(&self, clause: &Clause) -> bool {
        clause
            .literals()
            .iter()
            .any(|&l| self.literal_value(l) == Some(true))
    }

    pub fn satisfies(&self, formula: &CnfFormula) -> bool {
        formula.clauses().iter().all(|c| self.satisfies_clause(c))
    }

    /// True if the two assignments share no assigned variable.
    pub fn is_disjoint(&self, other: &PartialAssignment) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| a.is_none() || b.is_none())
    }

    /// Union of two disjoint assignments.
    pub fn union(&self, other: &PartialAssignment) -> PartialAssignment {
        PartialAssignment {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.or(*b))
                .collect(),
        }
    }
}

/// Exhaustive satisfiability check for small formulas. Returns a model if any.
///
/// Intended as a test oracle; refuses formulas with more than 24 variables.
pub fn brute_force_model(formula: &CnfFormula) -> Option<PartialAssignment> {
    let n = formula.num_vars();
    assert!(n <= 24, "brute force limited to 24 variables");
    (0u32..(1u32 << n)).find_map(|bits| {
        let mut rho = PartialAssignment::new(n);
        for v in 0..n {
            rho.set(Variable::new(v + 1), Some(bits >> v & 1 == 1));
        }
        rho.satisfies(formula).then_some(rho)
    })
}
