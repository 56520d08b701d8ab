use std::path::PathBuf;
use std::process::{Command, Output};

fn seqsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqsat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stat(out: &str, key: &str) -> u64 {
    out.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|v| v.trim().parse().ok()))
        .unwrap_or_else(|| panic!("no `{key}` in:\n{out}"))
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Scratch {
        let dir = std::env::temp_dir().join(format!("seqsat-cli-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn path(&self, file: &str) -> String {
        self.0.join(file).to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

#[test]
fn contradiction_exits_unsat_without_decisions() {
    let dir = Scratch::new("contra");
    let cnf = dir.path("c.cnf");
    std::fs::write(&cnf, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let o = seqsat(&["solve", &cnf]);
    assert_eq!(o.status.code(), Some(20));
    let out = stdout(&o);
    assert!(out.starts_with("UNSAT"));
    assert_eq!(stat(&out, "decisions "), 0);
}

#[test]
fn satisfiable_formula_exits_ten_with_model() {
    let dir = Scratch::new("sat");
    let cnf = dir.path("s.cnf");
    std::fs::write(&cnf, "p cnf 2 2\n1 -2 0\n2 0\n").unwrap();
    let o = seqsat(&["solve", &cnf, "--model"]);
    assert_eq!(o.status.code(), Some(10));
    assert!(stdout(&o).starts_with("SAT"));
}

#[test]
fn malformed_input_is_an_error() {
    let dir = Scratch::new("bad");
    let cnf = dir.path("b.cnf");
    std::fs::write(&cnf, "p cnf 1 1\n2 0\n").unwrap();
    let o = seqsat(&["solve", &cnf]);
    assert!(!matches!(o.status.code(), Some(0 | 10 | 20)));
    assert!(!matches!(
        seqsat(&["solve", &dir.path("missing.cnf")]).status.code(),
        Some(0 | 10 | 20)
    ));
}

#[test]
fn bench_grid_sequences_need_no_fallback() {
    let o = seqsat(&[
        "bench",
        "--family",
        "grid",
        "--layers",
        "2..20",
        "--configs",
        "dpll,cl_sequence",
        "--variants",
        "unsat",
        "--conflict-budget",
        "20000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let mut seen = 0;
    for line in lines {
        let row: Vec<&str> = line.split(',').collect();
        if row[col("config")] == "cl_sequence" {
            seen += 1;
            assert_eq!(row[col("outcome")], "UNSAT", "{line}");
            assert_eq!(row[col("fallback")], "0", "{line}");
        }
    }
    assert_eq!(seen, 19);
}

#[test]
fn proof_pipeline_round_trip() {
    let dir = Scratch::new("pipeline");
    let (cnf, peb, seq, res) = (
        dir.path("g.cnf"),
        dir.path("g.peb"),
        dir.path("g.seq"),
        dir.path("g.res"),
    );
    assert!(
        seqsat(&["gen-grid", "--layers", "4", "--graph-out", &peb, "-o", &cnf])
            .status
            .success()
    );
    assert!(seqsat(&["gen-seq", "--graph", &peb, "-o", &seq])
        .status
        .success());

    let o = seqsat(&["solve", &cnf, "--seq", &seq, "--proof-out", &res]);
    assert_eq!(o.status.code(), Some(20));
    assert_eq!(stat(&stdout(&o), "fallback "), 0);

    let o = seqsat(&["verify-proof", "--cnf", &cnf, "--proof", &res]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("VERIFIED"));

    let o = seqsat(&["res-replay", "--cnf", &cnf, "--proof", &res]);
    assert_eq!(o.status.code(), Some(20));
    assert!(stdout(&o).contains("exact yes"));

    let (pt_cnf, pt_seq) = (dir.path("pt.cnf"), dir.path("pt.seq"));
    let o = seqsat(&[
        "pt-extend",
        "--cnf",
        &cnf,
        "--proof",
        &res,
        "--cnf-out",
        &pt_cnf,
        "--seq-out",
        &pt_seq,
    ]);
    assert!(o.status.success());
    let o = seqsat(&[
        "solve",
        &pt_cnf,
        "--seq",
        &pt_seq,
        "--learning",
        "first_new_cut",
    ]);
    assert_eq!(o.status.code(), Some(20));
    assert_eq!(stat(&stdout(&o), "fallback "), 0);
}

#[test]
fn gtn_generation_and_sequence() {
    let dir = Scratch::new("gtn");
    let (cnf, seq) = (dir.path("gt.cnf"), dir.path("gt.seq"));
    assert!(seqsat(&["gen-gtn", "--n", "6", "-o", &cnf])
        .status
        .success());
    let text = std::fs::read_to_string(&cnf).unwrap();
    assert!(
        text.contains("p cnf 30 141"),
        "{}",
        text.lines().next().unwrap_or("")
    );
    assert!(seqsat(&["gen-seq", "--gtn", "6", "-o", &seq])
        .status
        .success());
    let o = seqsat(&["solve", &cnf, "--seq", &seq]);
    assert_eq!(o.status.code(), Some(20));
}
