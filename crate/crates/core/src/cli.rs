//! Command-line front end. [`dispatch`] parses arguments, runs one
//! subcommand and returns the process exit status: 10 for SAT, 20 for UNSAT,
//! 30 when a budget runs out, 0 for other successful commands, 1 on errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{
    grid_instances, gtn_instances, random_instances, run_bench, to_csv, to_markdown, BenchOptions,
    Budgets, ConfigLabel, Family, Variant,
};
use crate::dimacs::{parse_dimacs, write_dimacs};
use crate::formula::CnfFormula;
use crate::generators::{
    gen_grid, gen_gtn, gen_gtn_sat, gen_random_pebbling, make_satisfiable, pebbling_to_cnf,
    PebblingGraph,
};
use crate::proof::{
    check_res_refutation, cl_to_res, proof_trace_extension, replay_clmm, res_to_clmm_sequence,
    ResolutionProof,
};
use crate::seqgen::{grid_peb_seq_1uip, gtn_seq, peb_seq_1uip};
use crate::sequence::BranchingSequence;
use crate::solver::{
    solve, LearningScheme, Outcome, RestartPolicy, SolveResult, SolveStats, SolverConfig,
};

pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_BUDGET: i32 = 30;
pub const EXIT_ERROR: i32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "seqsat",
    version,
    about = "Clause learning with branching sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the pebbling formula of a pyramid grid as DIMACS.
    GenGrid {
        #[arg(long)]
        layers: usize,
        #[command(flatten)]
        out: GenOutput,
    },
    /// Write the pebbling formula of a seeded random graph as DIMACS.
    GenRandpeb {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 5)]
        max_indegree: usize,
        #[arg(long, default_value_t = 6)]
        max_label: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GenOutput,
    },
    /// Write the ordering formula GT_n as DIMACS.
    GenGtn {
        #[arg(long)]
        n: usize,
        /// Delete one seeded successor clause.
        #[arg(long)]
        sat: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write a branching sequence for a pebbling graph or for GT_n.
    GenSeq {
        /// Pebbling graph file (`p peb` format).
        #[arg(long, conflicts_with = "gtn")]
        graph: Option<PathBuf>,
        /// Use the grid-only generator.
        #[arg(long, requires = "graph")]
        grid: bool,
        #[arg(long)]
        gtn: Option<usize>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Solve a DIMACS formula and print the outcome and statistics.
    Solve {
        cnf: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the converted resolution refutation here when UNSAT.
        #[arg(long)]
        proof_out: Option<PathBuf>,
        /// Print the model when SAT.
        #[arg(long)]
        model: bool,
    },
    /// Check a resolution refutation of a DIMACS formula.
    VerifyProof {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        proof: PathBuf,
    },
    /// Build the proof trace extension of a formula and its trace sequence.
    PtExtend {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        #[arg(long)]
        cnf_out: PathBuf,
        #[arg(long)]
        seq_out: PathBuf,
    },
    /// Replay a refutation under CL-- with restart markers.
    ResReplay {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        #[arg(long, default_value = "first_new_cut")]
        learning: LearningScheme,
        /// Also write the replay sequence here.
        #[arg(long)]
        seq_out: Option<PathBuf>,
    },
    /// Run solver configurations over an instance family.
    ///
    /// CSV columns: family,params,variant,config,outcome,decisions,conflicts,
    /// learned,fallback,restarts,time_ms.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct GenOutput {
    /// Delete one seeded clause.
    #[arg(long)]
    sat: bool,
    #[arg(long, default_value_t = 0)]
    sat_seed: u64,
    /// Also write the graph in `p peb` format.
    #[arg(long)]
    graph_out: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, default_value = "first_uip")]
    learning: LearningScheme,
    /// Branching sequence file (`.seq`).
    #[arg(long)]
    seq: Option<PathBuf>,
    /// Allow branching on assigned literals.
    #[arg(long)]
    cl_minus_minus: bool,
    /// Honor restart markers in the sequence (needs --cl-minus-minus).
    #[arg(long)]
    restarts: bool,
    #[arg(long, default_value_t = 1_000_000)]
    conflict_budget: u64,
    #[arg(long, default_value_t = 10_000_000)]
    decision_budget: u64,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    family: Family,
    /// Grid sizes, e.g. `2..20` or `5,6,7`.
    #[arg(long, default_value = "2..10")]
    layers: String,
    /// GT_n orders, e.g. `8..12`.
    #[arg(long, default_value = "8..10")]
    n: String,
    #[arg(long, default_value_t = 10)]
    nodes: usize,
    #[arg(long, default_value_t = 5)]
    max_indegree: usize,
    #[arg(long, default_value_t = 6)]
    max_label: usize,
    /// Graph seeds for random pebbling, e.g. `0..4`.
    #[arg(long, default_value = "0..4")]
    seeds: String,
    #[arg(long, default_value_t = 0)]
    sat_seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "unsat,sat")]
    variants: Vec<Variant>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "dpll,cl_default,cl_sequence"
    )]
    configs: Vec<ConfigLabel>,
    #[arg(long, default_value_t = 1_000_000)]
    conflict_budget: u64,
    #[arg(long, default_value_t = 10_000_000)]
    decision_budget: u64,
    /// Convert and check the refutation of every UNSAT learning run.
    #[arg(long)]
    verify_proofs: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write a markdown table.
    #[arg(long)]
    markdown: Option<PathBuf>,
}

/// Parses a list like `2..20` (inclusive), `5,6,7` or `4`.
pub fn parse_list(spec: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let range: RangeInclusive<u64> = match part.split_once("..") {
            Some((a, b)) => {
                let b = b.strip_prefix('=').unwrap_or(b);
                parse_u64(a)?..=parse_u64(b)?
            }
            None => {
                let v = parse_u64(part)?;
                v..=v
            }
        };
        if range.is_empty() {
            return Err(format!("empty range `{part}`"));
        }
        out.extend(range);
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))
}

struct Io<'o, 'e> {
    out: &'o mut dyn Write,
    err: &'e mut dyn Write,
}

type CmdResult = Result<i32, String>;

/// Runs the command line `argv` (program name first). Output goes to `out`,
/// diagnostics to `err`.
pub fn dispatch_to<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let mut io = Io { out, err };
    match run(cli.command, &mut io) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(io.err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

/// [`dispatch_to`] on the process's stdout and stderr.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch_to(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn read_cnf(path: &Path) -> Result<CnfFormula, String> {
    parse_dimacs(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_proof(path: &Path) -> Result<ResolutionProof, String> {
    ResolutionProof::parse(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(io: &mut Io<'_, '_>, path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => write_file(p, text),
        None => io.out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn outcome_code(outcome: &Outcome) -> i32 {
    match outcome {
        Outcome::Sat(_) => EXIT_SAT,
        Outcome::Unsat => EXIT_UNSAT,
        Outcome::BudgetExceeded => EXIT_BUDGET,
    }
}

fn report(io: &mut Io<'_, '_>, result: &SolveResult) -> Result<(), String> {
    report_stats(io, &result.outcome, &result.stats)
}

fn report_stats(io: &mut Io<'_, '_>, outcome: &Outcome, s: &SolveStats) -> Result<(), String> {
    writeln!(
        io.out,
        "{}\ndecisions {}\npropagations {}\nconflicts {}\nlearned {}\nmax_level {}\nfallback {}\nrestarts {}",
        outcome.label(),
        s.decisions,
        s.propagations,
        s.conflicts,
        s.learned_clauses,
        s.max_level,
        s.fallback_decisions,
        s.restarts
    )
    .map_err(|e| e.to_string())
}

fn gen_pebbling(io: &mut Io<'_, '_>, g: &PebblingGraph, out: &GenOutput) -> CmdResult {
    if let Some(p) = &out.graph_out {
        write_file(p, &g.to_text())?;
    }
    let mut f = pebbling_to_cnf(g);
    if out.sat {
        f = make_satisfiable(&f, out.sat_seed);
    }
    emit(io, out.output.as_deref(), &write_dimacs(&f))?;
    Ok(0)
}

fn run(command: Command, io: &mut Io<'_, '_>) -> CmdResult {
    match command {
        Command::GenGrid { layers, out } => {
            if layers == 0 {
                return Err("--layers must be at least 1".into());
            }
            gen_pebbling(io, &gen_grid(layers), &out)
        }
        Command::GenRandpeb {
            nodes,
            max_indegree,
            max_label,
            seed,
            out,
        } => {
            let g = gen_random_pebbling(nodes, max_indegree, max_label, seed)
                .map_err(|e| e.to_string())?;
            gen_pebbling(io, &g, &out)
        }
        Command::GenGtn {
            n,
            sat,
            seed,
            output,
        } => {
            if n < 3 {
                return Err("--n must be at least 3".into());
            }
            let f = if sat {
                gen_gtn_sat(n, seed)
            } else {
                gen_gtn(n)
            };
            emit(io, output.as_deref(), &write_dimacs(&f))?;
            Ok(0)
        }
        Command::GenSeq {
            graph,
            grid,
            gtn,
            output,
        } => {
            let seq = match (graph, gtn) {
                (Some(path), None) => {
                    let g = PebblingGraph::parse(&read(&path)?)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    let s = if grid {
                        grid_peb_seq_1uip(&g)
                    } else {
                        peb_seq_1uip(&g)
                    };
                    s.map_err(|e| e.to_string())?
                }
                (None, Some(n)) if n >= 3 => gtn_seq(n),
                (None, Some(_)) => return Err("--gtn must be at least 3".into()),
                _ => return Err("give either --graph or --gtn".into()),
            };
            emit(io, output.as_deref(), &seq.to_text())?;
            Ok(0)
        }
        Command::Solve {
            cnf,
            solver,
            proof_out,
            model,
        } => {
            let f = read_cnf(&cnf)?;
            let mut cfg = SolverConfig::with_learning(solver.learning);
            if let Some(p) = &solver.seq {
                cfg.sequence = Some(
                    BranchingSequence::parse(&read(p)?)
                        .map_err(|e| format!("{}: {e}", p.display()))?,
                );
            }
            cfg.cl_minus_minus = solver.cl_minus_minus;
            if solver.restarts {
                cfg.restart_policy = RestartPolicy::SequenceMarkersOnly;
            }
            cfg.conflict_budget = Some(solver.conflict_budget);
            cfg.decision_budget = Some(solver.decision_budget);
            cfg.log_proof = proof_out.is_some();
            let result = solve(&f, cfg).map_err(|e| e.to_string())?;
            report(io, &result)?;
            if let (true, Some(m)) = (model, result.outcome.model()) {
                let lits: Vec<String> = f
                    .variables()
                    .map(|v| {
                        let val = m.value(v).unwrap_or(false);
                        (if val {
                            v.index() as i64
                        } else {
                            -(v.index() as i64)
                        })
                        .to_string()
                    })
                    .collect();
                writeln!(io.out, "v {} 0", lits.join(" ")).map_err(|e| e.to_string())?;
            }
            if let (Some(path), true) = (&proof_out, result.outcome.is_unsat()) {
                let log = result
                    .proof
                    .as_ref()
                    .ok_or("no refutation was recorded (plain DPLL runs log none)")?;
                let proof = cl_to_res(log, &f).map_err(|e| e.to_string())?;
                write_file(path, &proof.to_text())?;
            }
            Ok(outcome_code(&result.outcome))
        }
        Command::VerifyProof { cnf, proof } => {
            let f = read_cnf(&cnf)?;
            let p = read_proof(&proof)?;
            match check_res_refutation(&p, &f) {
                Ok(()) => {
                    writeln!(
                        io.out,
                        "VERIFIED {} steps, {} resolutions",
                        p.len(),
                        p.resolution_count()
                    )
                    .map_err(|e| e.to_string())?;
                    Ok(0)
                }
                Err(e) => Err(format!("proof rejected: {e}")),
            }
        }
        Command::PtExtend {
            cnf,
            proof,
            cnf_out,
            seq_out,
        } => {
            let f = read_cnf(&cnf)?;
            let p = read_proof(&proof)?;
            check_res_refutation(&p, &f).map_err(|e| format!("proof rejected: {e}"))?;
            let (ext, seq) = proof_trace_extension(&f, &p).map_err(|e| e.to_string())?;
            write_file(&cnf_out, &write_dimacs(&ext))?;
            write_file(&seq_out, &seq.to_text())?;
            writeln!(io.out, "{} trace variables", ext.num_vars() - f.num_vars())
                .map_err(|e| e.to_string())?;
            Ok(0)
        }
        Command::ResReplay {
            cnf,
            proof,
            learning,
            seq_out,
        } => {
            let f = read_cnf(&cnf)?;
            let p = read_proof(&proof)?;
            check_res_refutation(&p, &f).map_err(|e| format!("proof rejected: {e}"))?;
            let seq = res_to_clmm_sequence(&p).map_err(|e| e.to_string())?;
            if let Some(path) = &seq_out {
                write_file(path, &seq.to_text())?;
            }
            if learning == LearningScheme::None {
                return Err("the replay needs a learning scheme".into());
            }
            let r = replay_clmm(&f, &p, learning).map_err(|e| e.to_string())?;
            report_stats(io, &r.outcome, &r.stats)?;
            let matched = r
                .learned
                .iter()
                .zip(&r.expected)
                .take_while(|(a, b)| a == b)
                .count();
            writeln!(
                io.out,
                "replayed {matched} of {} clauses in order\nexact {}",
                r.expected.len(),
                if r.is_exact() { "yes" } else { "no" }
            )
            .map_err(|e| e.to_string())?;
            Ok(outcome_code(&r.outcome))
        }
        Command::Bench(args) => bench(args, io),
    }
}

fn bench(args: BenchArgs, io: &mut Io<'_, '_>) -> CmdResult {
    let usize_list = |s: &str| -> Result<Vec<usize>, String> {
        Ok(parse_list(s)?.into_iter().map(|v| v as usize).collect())
    };
    let instances = match args.family {
        Family::Grid => {
            let layers = usize_list(&args.layers)?;
            if layers.contains(&0) {
                return Err("grid layers start at 1".into());
            }
            grid_instances(&layers, &args.variants, args.sat_seed)
        }
        Family::Gtn => {
            let ns = usize_list(&args.n)?;
            if ns.iter().any(|&n| n < 3) {
                return Err("GT_n needs n >= 3".into());
            }
            gtn_instances(&ns, &args.variants, args.sat_seed)
        }
        Family::RandomPebbling => random_instances(
            args.nodes,
            args.max_indegree,
            args.max_label,
            &parse_list(&args.seeds)?,
            &args.variants,
        )
        .map_err(|e| e.to_string())?,
    };
    let opts = BenchOptions {
        budgets: Budgets {
            conflicts: args.conflict_budget,
            decisions: args.decision_budget,
        },
        verify_proofs: args.verify_proofs,
    };
    let rows = run_bench(&instances, &args.configs, opts);
    emit(io, args.csv.as_deref(), &to_csv(&rows))?;
    if let Some(p) = &args.markdown {
        write_file(p, &to_markdown(&rows))?;
    }
    if rows.iter().any(|r| r.proof_verified == Some(false)) {
        return Err("a refutation failed to verify".into());
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_list("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_list("1,3..4").unwrap(), vec![1, 3, 4]);
        assert_eq!(parse_list("7").unwrap(), vec![7]);
        assert!(parse_list("5..2").is_err());
        assert!(parse_list("x").is_err());
    }

    #[test]
    fn bad_arguments_exit_with_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(
            dispatch_to(["seqsat", "frobnicate"], &mut out, &mut err),
            EXIT_ERROR
        );
        assert_eq!(
            dispatch_to(["seqsat", "gen-grid"], &mut out, &mut err),
            EXIT_ERROR
        );
        assert_eq!(
            dispatch_to(
                ["seqsat", "solve", "/nonexistent/file.cnf"],
                &mut out,
                &mut err
            ),
            EXIT_ERROR
        );
        assert!(String::from_utf8(err).unwrap().contains("cannot read"));
    }

    #[test]
    fn gtn_to_stdout() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(
            dispatch_to(["seqsat", "gen-gtn", "--n", "10"], &mut out, &mut err),
            0
        );
        let f = parse_dimacs(&String::from_utf8(out).unwrap()).unwrap();
        assert_eq!(f.size(), 775);
    }
}
