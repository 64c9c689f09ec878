use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ssync_core::trace_io::{parse_records, TraceRecord};

fn ssync(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssync"))
        .args(args)
        .output()
        .expect("spawn ssync")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn records(path: &Path) -> Vec<TraceRecord> {
    parse_records(&fs::read_to_string(path).unwrap()).unwrap()
}

const MAJ: &str = "backend = \"exact\"\n[initial]\npoints = [[0, 0], [0, 0], [\"5/2\", 1]]\n[demon]\nkind = \"all_active\"\nseed = 3\n";

#[test]
fn majority_runs_checks_and_renders() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("maj.toml");
    let trace = dir.path().join("maj.jsonl");
    let svg = dir.path().join("maj.svg");
    fs::write(&sc, MAJ).unwrap();

    let o = ssync(&["run", "--scenario", p(&sc), "--out", p(&trace)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let recs = records(&trace);
    assert_eq!(recs.len(), 2);
    assert!(recs[1].gathered);
    assert_eq!(
        recs[1].locations,
        vec![["0/1".to_string(), "0/1".to_string()]; 3]
    );
    assert_eq!(recs[1].moving, vec![2]);

    let o = ssync(&["check", "--trace", p(&trace)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS same_destination"));

    let o = ssync(&["render", "--trace", p(&trace), "--out", p(&svg)]);
    assert_eq!(code(&o), 0);
    let svg = fs::read_to_string(&svg).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<g ").count(), 2);
}

#[test]
fn gathered_start_yields_a_single_record() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("g.toml");
    let trace = dir.path().join("g.jsonl");
    fs::write(
        &sc,
        "backend = \"floating\"\n[initial]\npoints = [[0.5, 1], [0.5, 1], [0.5, 1], [0.5, 1]]\n",
    )
    .unwrap();
    let o = ssync(&["run", "--scenario", p(&sc), "--out", p(&trace)]);
    assert_eq!(code(&o), 0);
    let recs = records(&trace);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].locations[0][0], "5.0000000000000000e-1");
}

#[test]
fn forbidden_start_is_an_input_error_unless_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("bad.toml");
    let trace = dir.path().join("bad.jsonl");
    fs::write(
        &sc,
        "backend = \"exact\"\n[initial]\npoints = [[0,0],[0,0],[3,1],[3,1]]\n",
    )
    .unwrap();
    let o = ssync(&["run", "--scenario", p(&sc), "--out", p(&trace)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("bivalent"));
    // A bivalent start cannot gather: every round either idles or breaks symmetry.
    let o = ssync(&[
        "run",
        "--scenario",
        p(&sc),
        "--out",
        p(&trace),
        "--allow-forbidden",
        "--horizon",
        "5",
    ]);
    assert_ne!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn malformed_inputs_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    assert_eq!(code(&ssync(&["check", "--trace", p(&empty)])), 1);
    assert_eq!(
        code(&ssync(&[
            "render",
            "--trace",
            p(&empty),
            "--out",
            p(&dir.path().join("x.svg"))
        ])),
        1
    );
    let sc = dir.path().join("bad.toml");
    fs::write(
        &sc,
        "backend = \"exact\"\n[initial]\npoints = [[0,0],[1,1]]\n",
    )
    .unwrap();
    assert_eq!(
        code(&ssync(&[
            "run",
            "--scenario",
            p(&sc),
            "--out",
            p(&dir.path().join("t.jsonl"))
        ])),
        1
    );
    assert_eq!(
        code(&ssync(&[
            "check",
            "--trace",
            p(&dir.path().join("missing.jsonl"))
        ])),
        1
    );
}

#[test]
fn horizon_exhaustion_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("slow.toml");
    let trace = dir.path().join("slow.jsonl");
    // Robot 2 is the only one that must move, and the script never activates it.
    fs::write(
        &sc,
        "backend = \"exact\"\nhorizon = 6\n[initial]\npoints = [[0,0],[0,0],[4,1]]\n[demon]\nkind = \"explicit\"\nscript = [[0, 1]]\n",
    )
    .unwrap();
    let o = ssync(&["run", "--scenario", p(&sc), "--out", p(&trace)]);
    assert_eq!(code(&o), 2);
    assert_eq!(records(&trace).len(), 7);
    let o = ssync(&["check", "--trace", p(&trace)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("eventual_gathering"));
}

#[test]
fn corrupted_trace_names_chaining_and_round() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("s.toml");
    let trace = dir.path().join("s.jsonl");
    fs::write(
        &sc,
        "backend = \"exact\"\n[initial]\npoints = [[0,0],[6,0],[2,5],[3,1],[4,1]]\n[demon]\nkind = \"round_robin\"\nseed = 2\n",
    )
    .unwrap();
    assert_eq!(
        code(&ssync(&["run", "--scenario", p(&sc), "--out", p(&trace)])),
        0
    );
    let text = fs::read_to_string(&trace).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    assert!(lines.len() > 2);
    let mut rec: TraceRecord = serde_json::from_str(&lines[2]).unwrap();
    rec.locations[1] = ["99/1".into(), "-7/1".into()];
    lines[2] = serde_json::to_string(&rec).unwrap();
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, lines.join("\n")).unwrap();
    let o = ssync(&["check", "--trace", p(&bad)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("chaining at round 2"), "{}", stderr(&o));
}

#[test]
fn fuzz_is_deterministic_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "fuzz",
        "--runs",
        "10",
        "--seed",
        "77",
        "--out",
        p(dir.path()),
    ];
    let a = ssync(&args);
    let b = ssync(&args);
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert_eq!(stdout(&a), stdout(&b));
    let f = ssync(&[
        "fuzz",
        "--runs",
        "10",
        "--seed",
        "77",
        "--backend",
        "floating",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(code(&f), 0, "{}", stdout(&f));
}

#[test]
fn starving_robot_zero_is_a_fairness_violation_with_replay_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = ssync(&[
        "fuzz",
        "--runs",
        "4",
        "--seed",
        "1",
        "--n-min",
        "3",
        "--n-max",
        "4",
        "--strategies",
        "starve0",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("FAIL fairness"));
    let sc = dir.path().join("counterexample.toml");
    let trace = dir.path().join("counterexample.jsonl");
    assert!(sc.exists() && trace.exists());

    // The replay scenario reproduces the recorded prefix.
    let replay = dir.path().join("replay.jsonl");
    let o = ssync(&["run", "--scenario", p(&sc), "--out", p(&replay)]);
    assert_ne!(code(&o), 1, "{}", stderr(&o));
    let (a, b) = (records(&trace), records(&replay));
    let common = a.len().min(b.len());
    assert!(common > 1);
    for (x, y) in a.iter().zip(&b).take(common).skip(1) {
        assert_eq!(x.locations, y.locations);
        assert_eq!(x.activated, y.activated);
    }
}

#[test]
fn unknown_strategy_is_an_input_error() {
    assert_eq!(
        code(&ssync(&["fuzz", "--runs", "1", "--strategies", "lazy"])),
        1
    );
}
