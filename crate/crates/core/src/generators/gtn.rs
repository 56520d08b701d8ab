use std::ops::Range;

use crate::formula::{Clause, CnfFormula, Literal, Variable};

/// The ordering-principle formula over `x_{i,j}` ("i is above j") for
/// distinct `i, j` in `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GtnInstance {
    n: usize,
    formula: CnfFormula,
}

impl GtnInstance {
    pub fn new(n: usize) -> GtnInstance {
        assert!(n >= 3, "ordering formulas need n >= 3");
        let mut clauses = Vec::with_capacity(n * (n - 1) / 2 + n * (n - 1) * (n - 2) + n);
        let x = |i, j| var(n, i, j);
        for i in 1..=n {
            for j in i + 1..=n {
                clauses.push(clause([x(i, j).negative(), x(j, i).negative()]));
            }
        }
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                for k in (1..=n).filter(|&k| k != i && k != j) {
                    clauses.push(clause([
                        x(i, j).negative(),
                        x(j, k).negative(),
                        x(i, k).positive(),
                    ]));
                }
            }
        }
        for j in 1..=n {
            clauses.push(clause(
                (1..=n).filter(|&k| k != j).map(|k| x(k, j).positive()),
            ));
        }
        let formula = CnfFormula::new((n * (n - 1)) as u32, clauses).expect("ids in range");
        GtnInstance { n, formula }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn var(&self, i: usize, j: usize) -> Variable {
        assert!(i != j && (1..=self.n).contains(&i) && (1..=self.n).contains(&j));
        var(self.n, i, j)
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    /// Indices of the clauses saying every element has something above it.
    pub fn successor_clauses(&self) -> Range<usize> {
        let len = self.formula.size();
        len - self.n..len
    }
}

fn var(n: usize, i: usize, j: usize) -> Variable {
    let col = if j < i { j } else { j - 1 };
    Variable::new(((i - 1) * (n - 1) + col) as u32)
}

fn clause<I: IntoIterator<Item = Literal>>(lits: I) -> Clause {
    Clause::new(lits).expect("distinct variables")
}

/// Anti-symmetry for each unordered pair, transitivity over every ordered
/// triple of distinct elements, then one successor clause per element.
pub fn gen_gtn(n: usize) -> CnfFormula {
    GtnInstance::new(n).formula
}
