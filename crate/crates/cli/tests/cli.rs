use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(format!("{name}.json"))
}

fn extend(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extend")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_octahedron_finds_one_ball() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = extend(&["classify", path(&data("octahedron")), "--json", path(&json)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["class_count"], 1);
    assert_eq!(r["classes"][0]["invariants"]["ball_verdict"], "ball");
    assert!(r.get("timing_ms").is_none());
}

#[test]
fn reversed_sphere_exits_with_no_extension() {
    let o = extend(&["classify", path(&data("reversed_octahedron"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("winding number -1"), "{}", stderr(&o));
}

#[test]
fn input_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"vertices\": [[0,0,0]], \"triangles\": [[0,0,0]]}").unwrap();
    for args in [
        vec!["classify", path(&bad)],
        vec!["classify", "/nonexistent/surface.json"],
        vec!["classify", path(&data("coplanar_octahedra"))],
        vec!["classify", path(&data("octahedron")), "--cell-budget", "0"],
        vec!["frobnicate"],
    ] {
        assert_eq!(extend(&args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn exhausted_cell_budget_is_partial() {
    let o = extend(&["strata", path(&data("octahedron")), "--cell-budget", "3"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn roundtrip_two_sheet_passes() {
    let o = extend(&["roundtrip", path(&data("two_sheet_sphere"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().count() >= 1 && out.lines().all(|l| l.starts_with("PASS ")), "{out}");
}

#[test]
fn strata_exports_boundary_meshes() {
    let dir = tempfile::tempdir().unwrap();
    let off = dir.path().join("off");
    let o = extend(&["strata", path(&data("two_sheet_sphere")), "--export-off", path(&off), "--json", path(&dir.path().join("s.json"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(off.join("stratum_2.off")).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("OFF"));
    let counts: Vec<usize> = lines.next().unwrap().split(' ').map(|c| c.parse().unwrap()).collect();
    // Every edge borders two faces.
    let faces: Vec<Vec<usize>> = lines.skip(counts[0]).map(|l| l.split(' ').skip(1).map(|c| c.parse().unwrap()).collect()).collect();
    let edges: usize = faces.iter().map(Vec::len).sum::<usize>() / 2;
    assert_eq!(counts[0] as i64 - edges as i64 + counts[1] as i64, 2);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(r["n"], 2);
    assert_eq!(r["levels"][1]["boundary_euler"], 2);
}

#[test]
fn classify_exports_class_meshes() {
    let dir = tempfile::tempdir().unwrap();
    let o = extend(&["classify", path(&data("two_sheet_sphere")), "--export-off", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["class_0_boundary.off", "class_0_x1.off", "class_0_x2.off"] {
        assert!(std::fs::read_to_string(dir.path().join(name)).unwrap().starts_with("OFF\n"), "{name}");
    }
    // X_1 is empty for this surface.
    assert_eq!(std::fs::read_to_string(dir.path().join("class_0_x1.off")).unwrap(), "OFF\n0 0 0\n");
}

#[test]
fn classify_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(extend(&["classify", path(&data("two_sheet_sphere")), "--json", path(&a)]).status.code(), Some(0));
    assert_eq!(extend(&["classify", path(&data("two_sheet_sphere")), "--json", path(&b), "--threads", "1"]).status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn nondeterministic_mode_records_timing() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    extend(&["classify", path(&data("octahedron")), "--json", path(&json), "--deterministic", "false"]);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(r["timing_ms"].is_u64());
}

#[test]
fn inscribed_and_complexes_dump_json() {
    let dir = tempfile::tempdir().unwrap();
    let i = dir.path().join("i.json");
    let o = extend(&["inscribed", path(&data("nested_shells")), "--json", path(&i)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("|I(zeta)| = 2"));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&i).unwrap()).unwrap();
    assert_eq!(r["good_count"], 2);

    let c = dir.path().join("c.json");
    let o = extend(&["complexes", path(&data("two_sheet_sphere")), "--level", "2", "--dump-json", path(&c)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&c).unwrap()).unwrap();
    let complexes = r["complexes"].as_array().unwrap();
    assert_eq!(complexes.len(), 1);
    assert!(!complexes[0]["good"].as_array().unwrap().is_empty());
    assert_eq!(extend(&["complexes", path(&data("two_sheet_sphere")), "--level", "5"]).status.code(), Some(3));
}

#[test]
fn jitter_is_seeded_and_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("j.json");
    let o = extend(&["jitter", path(&data("octahedron")), "--seed", "11", "--output", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let again = extend(&["jitter", path(&data("octahedron")), "--seed", "11"]);
    assert_eq!(stdout(&again), std::fs::read_to_string(&out).unwrap());
    let o = extend(&["classify", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}
