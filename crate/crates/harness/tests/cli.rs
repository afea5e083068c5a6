use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tilu_harness::artifacts::load_manifest;

fn tilu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilu")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn learn(dir: &Path, scheme: &str, body: &str) -> Output {
    let data = dir.join("data_in.txt");
    fs::write(&data, body).unwrap();
    let out = dir.join("run");
    tilu(&["learn", "--scheme", scheme, data.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

const DATA: &str = "class=thresholds domain=6\n1 ; 0\n2 ; 0\n4 ; 1\n5 ; 1\n6 ; 1\n";

#[test]
fn learn_then_unlearn_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let o = learn(tmp.path(), "tree:thresholds", DATA);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).starts_with("h>2"));
    let run = tmp.path().join("run");
    let m = load_manifest(&run).unwrap();
    assert_eq!((m.n, m.consumed), (5, false));
    for i in 0..5 {
        assert_eq!(fs::read(run.join(format!("tickets/{i}.bin"))).unwrap().len(), m.ticket_bits[i].div_ceil(8));
    }
    let o = tilu(&["unlearn", "--out", run.to_str().unwrap(), "--delete", "1,2"]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o).trim(), "h>1");
    assert_eq!(fs::read_to_string(run.join("unlearned.txt")).unwrap().trim(), "h>1");
    let m = load_manifest(&run).unwrap();
    assert!(m.consumed);
    assert_eq!(m.deleted, Some(vec![1, 2]));
}

#[test]
fn second_unlearn_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(learn(tmp.path(), "sharp:thresholds", DATA).status.success());
    let run = tmp.path().join("run");
    assert!(tilu(&["unlearn", "--out", run.to_str().unwrap(), "--delete", "0"]).status.success());
    let o = tilu(&["unlearn", "--out", run.to_str().unwrap(), "--delete", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("already"));
}

#[test]
fn bad_index_leaves_directory_usable() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(learn(tmp.path(), "chain:thresholds", DATA).status.success());
    let run = tmp.path().join("run");
    let o = tilu(&["unlearn", "--out", run.to_str().unwrap(), "--delete", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!load_manifest(&run).unwrap().consumed);
    assert!(tilu(&["unlearn", "--out", run.to_str().unwrap(), "--delete", "4"]).status.success());
}

#[test]
fn ctz_on_empty_and_full_deletion() {
    let tmp = tempfile::tempdir().unwrap();
    let o = learn(tmp.path(), "ctz", "class=thresholds domain=3\n");
    assert!(o.status.success(), "{o:?}");
    let run = tmp.path().join("run");
    let o = tilu(&["unlearn", "--out", run.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o).trim(), "bottom");

    let tmp = tempfile::tempdir().unwrap();
    assert!(learn(tmp.path(), "ctz", "class=thresholds domain=3\n1 ; 0\n1 ; 0\n").status.success());
    let run = tmp.path().join("run");
    let o = tilu(&["unlearn", "--out", run.to_str().unwrap(), "--delete", "0,1"]);
    assert_eq!(stdout(&o).trim(), "bottom");
}

#[test]
fn oracle_check_exit_codes() {
    let ok = tilu(&["oracle-check", "--scheme", "central:thresholds", "--domain", "4", "--max-n", "3"]);
    assert_eq!(ok.status.code(), Some(0), "{ok:?}");
    let bad = tilu(&["oracle-check", "--scheme", "sharp:thresholds", "--domain", "4", "--max-n", "3", "--corrupt"]);
    assert_eq!(bad.status.code(), Some(1), "{bad:?}");
    let unknown = tilu(&["oracle-check", "--scheme", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn bench_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("b.csv");
    let o = tilu(&["bench", "--scheme", "ctz,sharp:minval", "--max-n", "32", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let mut r = csv::Reader::from_path(&path).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["scheme", "class", "n", "aux_bits", "ticket_bits", "wall_ns"]);
    assert_eq!(r.records().count(), 6);
}
