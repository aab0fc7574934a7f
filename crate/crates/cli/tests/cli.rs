//! End-to-end tests of the binary: golden outputs, round-trips, determinism
//! and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conmat"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stdout: {} stderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let files: &[(&str, &str)] = &[
            ("iso.model", "model n=2\nterm 1 0 : 1\nterm 0 1 : i\n"),
            (
                "matching.model",
                "model n=2\nterm 0 1 : 1\nterm 1 1 : 1\nterm 2 1 : 1\n",
            ),
            ("unit.spin", "spin n=2\npoint 1 : 1 0\npoint 1 : 0 1\n"),
            ("iso.spin", "spin n=2\npoint 1 : 1 i\n"),
            (
                "lam.oneparam",
                "oneparam n=2\n1 i\n1/2 -1/2*i\nweights 1 -1\n",
            ),
            ("k2.graph", "graph\nvertex a\nvertex b\nedge a b\n"),
            ("circle.graph", "graph\ncircle\n"),
            (
                "k4.graph",
                "graph\nvertex a\nvertex b\nvertex c\nvertex d\n\
                 edge a b\nedge a c\nedge a d\nedge b c\nedge b d\nedge c d\n",
            ),
        ];
        for (name, contents) in files {
            fs::write(dir.path().join(name), contents).unwrap();
        }
        Workspace { dir }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }
}

#[test]
fn eval_golden_values() {
    let ws = Workspace::new();
    let out = run(
        &["eval", "--model", "iso.model", "--graph", "k2.graph"],
        ws.path(),
    );
    assert_eq!(stdout_of(&out), "0\n");
    let out = run(
        &["eval", "--model", "iso.model", "--graph", "circle.graph"],
        ws.path(),
    );
    assert_eq!(stdout_of(&out), "2\n");
    let out = run(
        &["eval", "--model", "matching.model", "--graph", "k4.graph"],
        ws.path(),
    );
    assert_eq!(stdout_of(&out), "3\n");
}

#[test]
fn rank_reports() {
    let ws = Workspace::new();
    let out = run(
        &[
            "rank",
            "--model",
            "iso.model",
            "--k",
            "1",
            "--budget",
            "2",
            "--target",
            "0",
        ],
        ws.path(),
    );
    assert_eq!(
        stdout_of(&out),
        "rank=0 certified=true certificate=hit_invariant_dim fragments=0\n"
    );
    let out = run(
        &[
            "rank",
            "--spin",
            "unit.spin",
            "--k",
            "2",
            "--budget",
            "4",
            "--target",
            "2",
        ],
        ws.path(),
    );
    let text = stdout_of(&out);
    assert!(
        text.starts_with("rank=2 certified=true certificate=hit_invariant_dim"),
        "{text}"
    );
    // Zero model at odd k certifies rank 0 against the diagram dimension.
    fs::write(ws.path().join("zero.model"), "model n=2\n").unwrap();
    let out = run(
        &[
            "rank",
            "--model",
            "zero.model",
            "--k",
            "3",
            "--budget",
            "2",
            "--target",
            "0",
        ],
        ws.path(),
    );
    assert!(stdout_of(&out).starts_with("rank=0 certified=true"));
}

#[test]
fn invdim_and_brauer() {
    let ws = Workspace::new();
    let out = run(&["invdim", "--spin", "unit.spin", "--k", "3"], ws.path());
    assert_eq!(stdout_of(&out), "4\n");
    let out = run(&["brauer", "--n", "2", "--k", "4"], ws.path());
    assert_eq!(stdout_of(&out), "3\n");
    let out = run(&["brauer", "--n", "5", "--k", "1"], ws.path());
    assert_eq!(stdout_of(&out), "0\n");
    // Group file route.
    let group = "group n=2\nmatrix\n1 0\n0 1\nmatrix\n0 1\n1 0\n";
    fs::write(ws.path().join("swap.group"), group).unwrap();
    let out = run(&["invdim", "--group", "swap.group", "--k", "2"], ws.path());
    assert_eq!(stdout_of(&out), "2\n");
}

#[test]
fn spin_analysis_blocks() {
    let ws = Workspace::new();
    let out = run(&["spin", "--spin", "unit.spin", "--kmax", "3"], ws.path());
    assert_eq!(
        stdout_of(&out),
        "closed=true\nstabilizer_order=2\nk=1 dim=1\nk=2 dim=2\nk=3 dim=4\n"
    );
    let out = run(&["spin", "--spin", "iso.spin"], ws.path());
    let text = stdout_of(&out);
    assert!(
        text.starts_with("closed=false\nwitness:\noneparam n=2\n"),
        "{text}"
    );
    assert!(text.contains("weights 1 -1"), "{text}");

    // Closed orbit but no spanning points: no stabilizer table.
    fs::write(ws.path().join("one.spin"), "spin n=2\npoint 1 : 1 0\n").unwrap();
    let out = run(&["spin", "--spin", "one.spin"], ws.path());
    let text = stdout_of(&out);
    assert!(
        text.starts_with("closed=true\nstabilizer=unavailable"),
        "{text}"
    );
}

#[test]
fn limit_prints_model_or_sentinel() {
    let ws = Workspace::new();
    let out = run(
        &[
            "limit",
            "--model",
            "iso.model",
            "--oneparam",
            "lam.oneparam",
            "--e",
            "3",
        ],
        ws.path(),
    );
    assert_eq!(stdout_of(&out), "model n=2\ndegree 3\n");
    // A model with support on the contracting direction has no limit.
    fs::write(ws.path().join("noconv.model"), "model n=2\nterm 1 0 : 1\n").unwrap();
    let out = run(
        &[
            "limit",
            "--model",
            "noconv.model",
            "--oneparam",
            "lam.oneparam",
            "--e",
            "2",
        ],
        ws.path(),
    );
    assert_eq!(stdout_of(&out), "NO_LIMIT\n");
}

#[test]
fn pi_golden_and_consistency_with_eval() {
    let ws = Workspace::new();
    let out = run(&["pi", "--graph", "k2.graph", "--n", "2"], ws.path());
    assert_eq!(stdout_of(&out), "1*y[1,0]^2 + 1*y[0,1]^2\n");

    // Evaluating the printed polynomial at the model's support values equals
    // a direct eval, on a scripted corpus.
    for graph in ["k2.graph", "k4.graph", "circle.graph"] {
        let poly_text = stdout_of(&run(&["pi", "--graph", graph, "--n", "2"], ws.path()));
        let eval_text = stdout_of(&run(
            &["eval", "--model", "matching.model", "--graph", graph],
            ws.path(),
        ));
        let values = |alpha: &[u32]| {
            // matching.model: weight 1 exactly when the second exponent is 1.
            if alpha[1] == 1 {
                1i64
            } else {
                0
            }
        };
        let total = eval_pi_text(poly_text.trim(), &values);
        assert_eq!(total.to_string(), eval_text.trim(), "graph {graph}");
    }
}

/// Minimal evaluator for the printed polynomial format, independent of the
/// library's own evaluation path.
fn eval_pi_text(text: &str, values: &dyn Fn(&[u32]) -> i64) -> i64 {
    if text == "0" {
        return 0;
    }
    let mut total = 0i64;
    for term in text.split(" + ") {
        let mut product = 1i64;
        for factor in term.split('*') {
            if let Some(rest) = factor.strip_prefix("y[") {
                let (idx, pow) = match rest.split_once("]^") {
                    Some((idx, pow)) => (idx, pow.parse::<u32>().unwrap()),
                    None => (rest.strip_suffix(']').unwrap(), 1),
                };
                let alpha: Vec<u32> = idx.split(',').map(|t| t.parse::<u32>().unwrap()).collect();
                product *= values(&alpha).pow(pow);
            } else {
                product *= factor.parse::<i64>().unwrap();
            }
        }
        total += product;
    }
    total
}

#[test]
fn matrix_prints_entries_and_report() {
    let ws = Workspace::new();
    let out = run(
        &[
            "matrix",
            "--model",
            "iso.model",
            "--k",
            "1",
            "--max-vertices",
            "1",
        ],
        ws.path(),
    );
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    // One enumerated fragment (the single half edge) and a report line.
    assert_eq!(
        lines,
        vec!["0", "rank=0 certified=false certificate=none fragments=1"]
    );
}

#[test]
fn emitted_files_reparse_to_equal_values() {
    let ws = Workspace::new();
    // The limit subcommand emits a model file; feeding it back must succeed
    // and evaluate identically.
    let limit = stdout_of(&run(
        &[
            "limit",
            "--model",
            "iso.model",
            "--oneparam",
            "lam.oneparam",
            "--e",
            "1",
        ],
        ws.path(),
    ));
    fs::write(ws.path().join("limit.model"), &limit).unwrap();
    let out = run(
        &["eval", "--model", "limit.model", "--graph", "circle.graph"],
        ws.path(),
    );
    assert_eq!(stdout_of(&out), "2\n");

    // The witness echoed by `spin` is itself a parseable subgroup file.
    let spin_block = stdout_of(&run(&["spin", "--spin", "iso.spin"], ws.path()));
    let witness: String = spin_block
        .lines()
        .skip_while(|l| *l != "witness:")
        .skip(1)
        .map(|l| format!("{l}\n"))
        .collect();
    fs::write(ws.path().join("echo.oneparam"), &witness).unwrap();
    let out = run(
        &[
            "limit",
            "--model",
            "iso.model",
            "--oneparam",
            "echo.oneparam",
            "--e",
            "2",
        ],
        ws.path(),
    );
    assert_eq!(stdout_of(&out), "model n=2\ndegree 2\n");
}

#[test]
fn identical_inputs_give_byte_identical_outputs() {
    let ws = Workspace::new();
    for args in [
        vec![
            "matrix",
            "--model",
            "iso.model",
            "--k",
            "2",
            "--max-vertices",
            "2",
        ],
        vec!["spin", "--spin", "unit.spin"],
        vec!["pi", "--graph", "k4.graph", "--n", "2"],
        vec!["selftest", "--seed", "7", "--rounds", "3"],
    ] {
        let a = stdout_of(&run(&args, ws.path()));
        let b = stdout_of(&run(&args, ws.path()));
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn exit_codes_follow_error_classes() {
    let ws = Workspace::new();
    // Parse error: 2.
    fs::write(ws.path().join("bad.model"), "model n=2\nterm 1 : 1\n").unwrap();
    let out = run(
        &["eval", "--model", "bad.model", "--graph", "k2.graph"],
        ws.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    // Missing file: 2.
    let out = run(
        &["eval", "--model", "missing.model", "--graph", "k2.graph"],
        ws.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    // Precondition violation: 3 (non-spanning spin points).
    fs::write(ws.path().join("nospan.spin"), "spin n=2\npoint 1 : 1 0\n").unwrap();
    let out = run(&["invdim", "--spin", "nospan.spin", "--k", "2"], ws.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension 1 < 2"));
    // Degree-bound violation on eval: 3, named explicitly.
    fs::write(
        ws.path().join("trunc.model"),
        "model n=2\ndegree 1\nterm 1 0 : 1\n",
    )
    .unwrap();
    fs::write(ws.path().join("loop.graph"), "graph\nvertex a\nloop a\n").unwrap();
    let out = run(
        &["eval", "--model", "trunc.model", "--graph", "loop.graph"],
        ws.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree bound 1"));
    // A model file passed as --spin: 3.
    let out = run(&["invdim", "--spin", "iso.model", "--k", "1"], ws.path());
    assert_eq!(out.status.code(), Some(3));
    // Limit at a degree above a declared truncation bound: 3.
    let out = run(
        &[
            "limit",
            "--model",
            "trunc.model",
            "--oneparam",
            "lam.oneparam",
            "--e",
            "4",
        ],
        ws.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("declared degree bound 1"));
}
