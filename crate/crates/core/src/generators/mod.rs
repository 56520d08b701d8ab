//! Pebbling formulas on grid and random graphs, ordering-principle formulas,
//! and their satisfiable variants.

mod gtn;
mod pebbling;
mod random;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use gtn::{gen_gtn, GtnInstance};
pub use pebbling::{gen_grid, pebbling_to_cnf, GraphError, PebbleNode, PebblingGraph};
pub use random::{gen_random_pebbling, RandomGraphError};

use crate::formula::CnfFormula;

/// Deletes one clause chosen uniformly by `seed`.
pub fn make_satisfiable(f: &CnfFormula, seed: u64) -> CnfFormula {
    let pool: Vec<usize> = (0..f.size()).collect();
    make_satisfiable_among(f, &pool, seed)
}

/// Deletes one clause chosen uniformly by `seed` from the given indices.
pub fn make_satisfiable_among(f: &CnfFormula, pool: &[usize], seed: u64) -> CnfFormula {
    assert!(!pool.is_empty(), "nothing to delete");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    f.without_clause(pool[rng.gen_range(0..pool.len())])
}

/// Ordering formula with one seeded successor clause removed.
pub fn gen_gtn_sat(n: usize, seed: u64) -> CnfFormula {
    let g = GtnInstance::new(n);
    let pool: Vec<usize> = g.successor_clauses().collect();
    make_satisfiable_among(g.formula(), &pool, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::brute_force_model;

    #[test]
    fn deletion_is_seeded() {
        let f = pebbling_to_cnf(&gen_grid(3));
        assert_eq!(make_satisfiable(&f, 9), make_satisfiable(&f, 9));
        assert_eq!(make_satisfiable(&f, 9).size(), f.size() - 1);
    }

    #[test]
    fn pebbling_minus_any_clause_is_satisfiable() {
        let f = pebbling_to_cnf(&gen_grid(3));
        assert!(brute_force_model(&f).is_none());
        for i in 0..f.size() {
            assert!(
                brute_force_model(&f.without_clause(i)).is_some(),
                "clause {i}"
            );
        }
    }

    #[test]
    fn gtn_sat_keeps_everything_but_one_successor_clause() {
        let f = gen_gtn_sat(4, 3);
        let full = gen_gtn(4);
        assert_eq!(f.size(), full.size() - 1);
        assert_eq!(
            &f.clauses()[..full.size() - 4],
            &full.clauses()[..full.size() - 4]
        );
        assert!(brute_force_model(&f).is_some());
    }
}
