//! Benchmark harness: instance families, the three solver configurations, and
//! CSV / markdown reporting.
//!
//! CSV columns, in order:
//! `family,params,variant,config,outcome,decisions,conflicts,learned,fallback,restarts,time_ms`.
//! `params` is a `;`-separated list of `key=value` pairs, `time_ms` is wall
//! time and the only column that varies between identical runs.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::formula::CnfFormula;
use crate::generators::{
    gen_grid, gen_gtn_sat, gen_random_pebbling, make_satisfiable, pebbling_to_cnf, GtnInstance,
    PebblingGraph, RandomGraphError,
};
use crate::proof::{check_res_refutation, cl_to_res};
use crate::seqgen::{gtn_seq, peb_seq_1uip};
use crate::sequence::BranchingSequence;
use crate::solver::{solve, LearningScheme, SolverConfig};

pub const CSV_HEADER: &str =
    "family,params,variant,config,outcome,decisions,conflicts,learned,fallback,restarts,time_ms";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Grid,
    RandomPebbling,
    Gtn,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Unsat,
    Sat,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConfigLabel {
    /// No learning, activity heuristic.
    Dpll,
    /// 1UIP learning, activity heuristic.
    ClDefault,
    /// 1UIP learning guided by the family's generated sequence.
    ClSequence,
}

macro_rules! named {
    ($ty:ty, $what:literal, $($v:path => $s:literal),+) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self { $($v => $s),+ }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($s => Ok($v),)+
                    _ => Err(format!(concat!("unknown ", $what, " `{}`"), s)),
                }
            }
        }
    };
}

named!(Family, "family", Family::Grid => "grid", Family::RandomPebbling => "random_pebbling", Family::Gtn => "gtn");
named!(Variant, "variant", Variant::Unsat => "unsat", Variant::Sat => "sat");
named!(ConfigLabel, "config", ConfigLabel::Dpll => "dpll", ConfigLabel::ClDefault => "cl_default", ConfigLabel::ClSequence => "cl_sequence");

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Budgets {
    pub conflicts: u64,
    pub decisions: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            conflicts: 1_000_000,
            decisions: 10_000_000,
        }
    }
}

/// A formula together with the sequence its family generator produces.
#[derive(Clone, Debug)]
pub struct Instance {
    pub family: Family,
    pub params: String,
    pub variant: Variant,
    pub formula: CnfFormula,
    pub sequence: BranchingSequence,
}

impl Instance {
    pub fn config(&self, label: ConfigLabel, budgets: Budgets) -> SolverConfig {
        let mut cfg = match label {
            ConfigLabel::Dpll => SolverConfig::with_learning(LearningScheme::None),
            ConfigLabel::ClDefault => SolverConfig::with_learning(LearningScheme::FirstUip),
            ConfigLabel::ClSequence => SolverConfig::with_learning(LearningScheme::FirstUip)
                .with_sequence(self.sequence.clone()),
        };
        cfg.conflict_budget = Some(budgets.conflicts);
        cfg.decision_budget = Some(budgets.decisions);
        cfg
    }
}

fn pebbling_instances(
    family: Family,
    params: String,
    g: &PebblingGraph,
    variants: &[Variant],
    sat_seed: u64,
) -> Vec<Instance> {
    let formula = pebbling_to_cnf(g);
    let sequence = peb_seq_1uip(g).expect("generated graphs have one target");
    variants
        .iter()
        .map(|&variant| {
            let (formula, params) = match variant {
                Variant::Unsat => (formula.clone(), params.clone()),
                Variant::Sat => (
                    make_satisfiable(&formula, sat_seed),
                    format!("{params};sat_seed={sat_seed}"),
                ),
            };
            Instance {
                family,
                params,
                variant,
                formula,
                sequence: sequence.clone(),
            }
        })
        .collect()
}

pub fn grid_instances(layers: &[usize], variants: &[Variant], sat_seed: u64) -> Vec<Instance> {
    layers
        .iter()
        .flat_map(|&l| {
            pebbling_instances(
                Family::Grid,
                format!("L={l}"),
                &gen_grid(l),
                variants,
                sat_seed,
            )
        })
        .collect()
}

pub fn random_instances(
    nodes: usize,
    max_indegree: usize,
    max_label: usize,
    seeds: &[u64],
    variants: &[Variant],
) -> Result<Vec<Instance>, RandomGraphError> {
    let mut out = Vec::new();
    for &seed in seeds {
        let g = gen_random_pebbling(nodes, max_indegree, max_label, seed)?;
        let params = format!("n={nodes};d={max_indegree};l={max_label};seed={seed}");
        out.extend(pebbling_instances(
            Family::RandomPebbling,
            params,
            &g,
            variants,
            seed,
        ));
    }
    Ok(out)
}

pub fn gtn_instances(ns: &[usize], variants: &[Variant], sat_seed: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for &n in ns {
        for &variant in variants {
            let (formula, params) = match variant {
                Variant::Unsat => (GtnInstance::new(n).formula().clone(), format!("n={n}")),
                Variant::Sat => (
                    gen_gtn_sat(n, sat_seed),
                    format!("n={n};sat_seed={sat_seed}"),
                ),
            };
            out.push(Instance {
                family: Family::Gtn,
                params,
                variant,
                formula,
                sequence: gtn_seq(n),
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub family: Family,
    pub params: String,
    pub variant: Variant,
    pub config: ConfigLabel,
    pub outcome: &'static str,
    pub decisions: u64,
    pub conflicts: u64,
    pub learned: u64,
    pub fallback: u64,
    pub restarts: u64,
    pub time_ms: u128,
    /// Whether the refutation converted from the run verified; `None` unless
    /// proofs were requested and the run was UNSAT.
    pub proof_verified: Option<bool>,
}

#[derive(Copy, Clone, Debug, Default)]
pub struct BenchOptions {
    pub budgets: Budgets,
    pub verify_proofs: bool,
}

/// Solves every instance under every config, in parallel. Rows come back in
/// instance order, then config order.
pub fn run_bench(
    instances: &[Instance],
    configs: &[ConfigLabel],
    opts: BenchOptions,
) -> Vec<BenchRow> {
    let jobs: Vec<(&Instance, ConfigLabel)> = instances
        .iter()
        .flat_map(|i| configs.iter().map(move |&c| (i, c)))
        .collect();
    jobs.par_iter()
        .map(|&(inst, label)| run_one(inst, label, opts))
        .collect()
}

fn run_one(inst: &Instance, label: ConfigLabel, opts: BenchOptions) -> BenchRow {
    let mut cfg = inst.config(label, opts.budgets);
    let want_proof = opts.verify_proofs && label != ConfigLabel::Dpll;
    cfg.log_proof = want_proof;
    let start = Instant::now();
    let result = solve(&inst.formula, cfg).expect("generated sequences fit their formulas");
    let time_ms = start.elapsed().as_millis();
    let proof_verified = match (&result.proof, result.outcome.is_unsat() && want_proof) {
        (Some(log), true) => Some(
            cl_to_res(log, &inst.formula)
                .map(|p| check_res_refutation(&p, &inst.formula).is_ok())
                .unwrap_or(false),
        ),
        (None, true) => Some(false),
        _ => None,
    };
    BenchRow {
        family: inst.family,
        params: inst.params.clone(),
        variant: inst.variant,
        config: label,
        outcome: result.outcome.label(),
        decisions: result.stats.decisions,
        conflicts: result.stats.conflicts,
        learned: result.stats.learned_clauses,
        fallback: result.stats.fallback_decisions,
        restarts: result.stats.restarts,
        time_ms,
        proof_verified,
    }
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.family,
            r.params,
            r.variant,
            r.config,
            r.outcome,
            r.decisions,
            r.conflicts,
            r.learned,
            r.fallback,
            r.restarts,
            r.time_ms
        )
        .unwrap();
    }
    out
}

pub fn to_markdown(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "| family | params | variant | config | outcome | decisions | conflicts | learned | fallback | restarts | time (ms) | proof |\n\
         |---|---|---|---|---|---:|---:|---:|---:|---:|---:|---|\n",
    );
    for r in rows {
        let proof = match r.proof_verified {
            Some(true) => "ok",
            Some(false) => "FAILED",
            None => "",
        };
        writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            r.family,
            r.params,
            r.variant,
            r.config,
            r.outcome,
            r.decisions,
            r.conflicts,
            r.learned,
            r.fallback,
            r.restarts,
            r.time_ms,
            proof
        )
        .unwrap();
    }
    out
}
