use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const EXAMPLE1: &[&str] = &["ifc.cmg", "ifc_instance.cmg", "brick.cmg", "example1/brick_instance.cmg", "example1/combined.cmg"];
const EXAMPLE2: &[&str] = &[
    "ifc.cmg",
    "ifc_instance.cmg",
    "brick.cmg",
    "rec.cmg",
    "example2/brick_instance.cmg",
    "example2/rec_instance.cmg",
    "example2/combined.cmg",
];

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn catamerge(args: &[&str], files: &[PathBuf], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catamerge"))
        .args(args)
        .args(files)
        .arg("--out")
        .arg(out)
        .env_remove("CATAMERGE_MAX_ROUNDS")
        .output()
        .expect("binary runs")
}

fn fixtures(names: &[&str]) -> Vec<PathBuf> {
    names.iter().map(|n| fixture(n)).collect()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn check(files: &[PathBuf]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catamerge"))
        .arg("check")
        .args(files)
        .output()
        .unwrap()
}

#[test]
fn check_accepts_both_examples() {
    assert_eq!(code(&check(&fixtures(EXAMPLE1))), 0);
    let o = check(&fixtures(EXAMPLE2));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("ok: 3 schema(s)"));
}

#[test]
fn check_accepts_a_directory() {
    let o = check(&[fixture(""), fixture("example1")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn check_reports_a_dangling_foreign_key() {
    let tmp = TempDir::new().unwrap();
    let bad = write_file(tmp.path(), "bad.cmg", "schema S {\n  entities A\n  foreign_keys\n    f : A -> Ghost\n}\n");
    let o = check(&[bad]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("bad.cmg:4:14") && err.contains("Ghost"), "{err}");
}

#[test]
fn check_reports_an_unknown_attribute_in_a_constraint() {
    let tmp = TempDir::new().unwrap();
    let ext = write_file(
        tmp.path(),
        "ext.cmg",
        "extension X {\n  include IFC BRICK\n  identify BRICK.Location = IFC.IfcSpace\n  constraints\n    forall l:Location -> l.spaceName = l.nope\n}\n",
    );
    let mut files = fixtures(&["ifc.cmg", "brick.cmg"]);
    files.push(ext);
    let o = check(&files);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("nope"), "{}", stderr(&o));
}

#[test]
fn integrate_example_1_writes_the_artifacts() {
    let tmp = TempDir::new().unwrap();
    let o = catamerge(&["integrate", "--trace"], &fixtures(EXAMPLE1), tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["combined.cmg", "saturated.cmg", "trace.log", "BRICK_Point.csv", "Equipment.csv"] {
        assert!(tmp.path().join(name).is_file(), "{name}");
    }
    let points = fs::read_to_string(tmp.path().join("BRICK_Point.csv")).unwrap();
    assert_eq!(points.lines().count(), 1 + 5);
    assert!(String::from_utf8_lossy(&o.stdout).contains("BRICK_Point: 5"));
}

#[test]
fn integrate_with_empty_instances_saturates_to_nothing() {
    let tmp = TempDir::new().unwrap();
    let o = catamerge(&["integrate"], &fixtures(&["ifc.cmg", "brick.cmg", "example1/combined.cmg"]), tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().all(|l| l.ends_with(": 0")), "{stdout}");
}

#[test]
fn conflicting_areas_exit_with_2() {
    let tmp = TempDir::new().unwrap();
    let mut names = EXAMPLE2.to_vec();
    names[5] = "clash/rec_instance.cmg";
    let o = catamerge(&["integrate", "--trace"], &fixtures(&names), tmp.path());
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("`f3`") && err.contains("roomArea"), "{err}");
    assert!(tmp.path().join("trace.log").is_file());
    assert!(!tmp.path().join("saturated.cmg").exists());
}

#[test]
fn round_bound_exits_with_3() {
    let tmp = TempDir::new().unwrap();
    let o = catamerge(&["integrate", "--max-rounds", "1"], &fixtures(EXAMPLE1), tmp.path());
    assert_eq!(code(&o), 3);
    let o = Command::new(env!("CARGO_BIN_EXE_catamerge"))
        .arg("integrate")
        .args(fixtures(EXAMPLE1))
        .arg("--out")
        .arg(tmp.path())
        .env("CATAMERGE_MAX_ROUNDS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn query_reproduces_table_2() {
    let tmp = TempDir::new().unwrap();
    let o = catamerge(&["query", "-q", "TenantBilling"], &fixtures(EXAMPLE2), tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("query_TenantBilling.csv")).unwrap();
    assert_eq!(csv, fs::read_to_string(fixture("expected/table2.csv")).unwrap());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().nth(3).unwrap().starts_with("Person B "), "{stdout}");
}

#[test]
fn query_reproduces_table_1() {
    let tmp = TempDir::new().unwrap();
    let o = catamerge(&["query", "--query", "q", "--explain"], &fixtures(EXAMPLE1), tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("query_q.csv")).unwrap();
    assert_eq!(csv, fs::read_to_string(fixture("expected/table1.csv")).unwrap());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("plan for q\n"));
}

#[test]
fn query_over_empty_instances_is_header_only() {
    let tmp = TempDir::new().unwrap();
    let o = catamerge(&["query", "-q", "q"], &fixtures(&["ifc.cmg", "brick.cmg", "example1/combined.cmg"]), tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("query_q.csv")).unwrap();
    assert_eq!(csv, "IFC_spaceName,IFC_spaceArea,BRICK_timeseriesId\n");
}

#[test]
fn unknown_query_exits_with_1_before_running() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("never");
    let o = catamerge(&["query", "-q", "Nope"], &fixtures(EXAMPLE2), &out);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("unknown query `Nope`"));
    assert!(!out.exists());
}

#[test]
fn roundtrip_reports_gained_areas() {
    let tmp = TempDir::new().unwrap();
    let o = catamerge(&["roundtrip", "--schema", "REC"], &fixtures(EXAMPLE2), tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = fs::read_to_string(tmp.path().join("roundtrip_REC.txt")).unwrap();
    assert_eq!(report, String::from_utf8_lossy(&o.stdout));
    assert!(report.contains("Room.roomArea: gained 5"), "{report}");
    assert!(!report.contains(": lost"), "{report}");
}

#[test]
fn untouched_tables_round_trip_with_zero_deltas() {
    let tmp = TempDir::new().unwrap();
    let o = catamerge(&["roundtrip", "--schema", "IFC"], &fixtures(EXAMPLE1), tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = String::from_utf8_lossy(&o.stdout);
    let row: Vec<&str> = report
        .lines()
        .find(|l| l.starts_with("PropertySet "))
        .unwrap()
        .split_whitespace()
        .collect();
    assert_eq!(row, ["PropertySet", "5", "5", "0", "0", "0"]);
}

#[test]
fn roundtrip_to_a_foreign_schema_exits_with_1() {
    let tmp = TempDir::new().unwrap();
    let mut files = fixtures(EXAMPLE1);
    files.push(fixture("rec.cmg"));
    let o = catamerge(&["roundtrip", "--schema", "REC"], &files, tmp.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn usage_errors_exit_with_1() {
    let o = Command::new(env!("CARGO_BIN_EXE_catamerge")).arg("frobnicate").output().unwrap();
    assert_eq!(code(&o), 1);
    let o = Command::new(env!("CARGO_BIN_EXE_catamerge")).arg("--help").output().unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn reruns_are_byte_identical_and_inputs_untouched() {
    let inputs = fixtures(EXAMPLE2);
    let before: Vec<Vec<u8>> = inputs.iter().map(|p| fs::read(p).unwrap()).collect();
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let o = catamerge(&["query", "-q", "TenantBilling", "--trace"], &inputs, dir.path());
        assert_eq!(code(&o), 0);
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 10);
    for n in &names {
        assert_eq!(fs::read(a.path().join(n)).unwrap(), fs::read(b.path().join(n)).unwrap(), "{n:?}");
    }
    let after: Vec<Vec<u8>> = inputs.iter().map(|p| fs::read(p).unwrap()).collect();
    assert_eq!(before, after);
}
