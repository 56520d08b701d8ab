//! Replay a resolution refutation under CL-- with restarts.

use seqsat::generators::{gen_random_pebbling, pebbling_to_cnf};
use seqsat::proof::{cl_to_res, replay_clmm, res_to_clmm_sequence};
use seqsat::seqgen::peb_seq_1uip;
use seqsat::solver::{solve, LearningScheme, SolverConfig};

fn main() {
    let graph = gen_random_pebbling(30, 3, 2, 7).unwrap();
    let formula = pebbling_to_cnf(&graph);
    let mut cfg = SolverConfig::with_learning(LearningScheme::FirstUip)
        .with_sequence(peb_seq_1uip(&graph).unwrap());
    cfg.log_proof = true;
    let log = solve(&formula, cfg).unwrap().proof.unwrap();
    let proof = cl_to_res(&log, &formula).unwrap();

    let seq = res_to_clmm_sequence(&proof).unwrap();
    println!(
        "extended sequence: {} entries, {} restarts",
        seq.len(),
        seq.restart_count()
    );

    for scheme in [LearningScheme::FirstUip, LearningScheme::FirstNewCut] {
        let replay = replay_clmm(&formula, &proof, scheme).unwrap();
        let matched = replay
            .learned
            .iter()
            .zip(&replay.expected)
            .take_while(|(a, b)| a == b)
            .count();
        println!(
            "{:>13}: {} learned {}/{} in order, restarts {}, exact={}",
            scheme.name(),
            replay.outcome.label(),
            matched,
            replay.expected.len(),
            replay.stats.restarts,
            replay.is_exact()
        );
    }
}
