use seqsat::generators::{
    gen_grid, gen_random_pebbling, make_satisfiable, pebbling_to_cnf, PebblingGraph,
};
use seqsat::seqgen::peb_seq_1uip;
use seqsat::solver::{solve, LearningScheme, Outcome, SolveStats, SolverConfig};

fn sequence_config(g: &PebblingGraph) -> (SolverConfig, u64) {
    let seq = peb_seq_1uip(g).unwrap();
    let len = seq.len() as u64;
    (
        SolverConfig::with_learning(LearningScheme::FirstUip).with_sequence(seq),
        len,
    )
}

fn refute(g: &PebblingGraph) {
    let f = pebbling_to_cnf(g);
    let (cfg, len) = sequence_config(g);
    let r = solve(&f, cfg).unwrap();
    assert!(r.outcome.is_unsat(), "{}", r.outcome.label());
    assert_eq!(r.stats.fallback_decisions, 0);
    assert!(r.stats.decisions <= len);
}

fn satisfy(g: &PebblingGraph, seed: u64) -> SolveStats {
    let fs = make_satisfiable(&pebbling_to_cnf(g), seed);
    let (cfg, _) = sequence_config(g);
    let r = solve(&fs, cfg).unwrap();
    match &r.outcome {
        Outcome::Sat(m) => assert!(m.satisfies(&fs)),
        other => panic!("expected SAT, got {}", other.label()),
    }
    r.stats
}

#[test]
fn grid_sequences_refute_without_fallback() {
    for l in 1..=30 {
        refute(&gen_grid(l));
    }
}

#[test]
fn grid_sequences_leave_no_search_on_satisfiable_variants() {
    for l in 2..=12 {
        let g = gen_grid(l);
        let f = pebbling_to_cnf(&g);
        let (cfg, len) = sequence_config(&g);
        for i in 0..f.size() {
            let r = solve(&f.without_clause(i), cfg.clone()).unwrap();
            assert!(r.outcome.is_sat());
            assert_eq!(r.stats.fallback_conflicts, 0, "layers {l}, clause {i}");
            assert!(r.stats.decisions - r.stats.fallback_decisions <= len);
        }
    }
}

#[test]
fn random_sequences_refute_without_fallback() {
    for seed in 0..25 {
        refute(&gen_random_pebbling(60, 5, 4, seed).unwrap());
    }
}

#[test]
fn random_satisfiable_variants_are_solved() {
    for seed in 0..10 {
        let g = gen_random_pebbling(40, 4, 4, seed).unwrap();
        for k in 0..3 {
            satisfy(&g, 100 * seed + k);
        }
    }
}
