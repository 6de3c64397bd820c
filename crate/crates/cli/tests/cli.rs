//! End-to-end tests of the `ptx` binary: exit codes, report shapes,
//! emitted manifests, and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn ptx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn check_passes_on_bundled_fixtures() {
    for name in ["so3.json", "matrix2.json", "so3_base_only.json"] {
        let out = ptx(&["check", fixture(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stdout(&out));
        let text = stdout(&out);
        assert!(text.contains("base Jacobi: ok"));
        assert!(text.contains("triple conditions: ok"));
        assert!(text.contains("generator Jacobiator: ok"));
        assert!(text.contains("all checks passed"));
    }
}

#[test]
fn check_fails_on_broken_structure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(
        &path,
        r#"{
            "variables": ["x1", "x2", "x3"],
            "fiber_rank": 0,
            "poisson": { "1,2": "x1", "1,3": "x3" }
        }"#,
    )
    .unwrap();
    let out = ptx(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("base Jacobi: 1 violation(s)"));
    assert!(text.contains("(x1,x2,x3): residual -x3"));
    assert!(text.contains("checks FAILED"));
}

#[test]
fn bracket_values_match_fixture() {
    let so3 = fixture("so3.json");
    let out = ptx(&[
        "bracket",
        so3.to_str().unwrap(),
        "--lhs",
        "x1;0,0,0",
        "--rhs",
        "x2;0,0,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "x3 ; 0,0,0");

    let out = ptx(&[
        "bracket",
        so3.to_str().unwrap(),
        "--lhs",
        "0;1,0,0",
        "--rhs",
        "0;0,1,0",
    ]);
    assert_eq!(stdout(&out).trim(), "0 ; 0,0,1");
}

#[test]
fn bracket_rejects_malformed_elements() {
    let so3 = fixture("so3.json");
    let out = ptx(&[
        "bracket",
        so3.to_str().unwrap(),
        "--lhs",
        "x1",
        "--rhs",
        "x2;0,0,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = ptx(&[
        "bracket",
        so3.to_str().unwrap(),
        "--lhs",
        "x1/x2;0,0,0",
        "--rhs",
        "0;0,0,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn casimir_reports_expected_basis() {
    let out = ptx(&[
        "casimir",
        fixture("so3_base_only.json").to_str().unwrap(),
        "--max-degree",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("2 element(s)"));
    assert!(text.contains("x1^2 + x2^2 + x3^2"));
}

#[test]
fn center_sizes() {
    let out = ptx(&[
        "center",
        fixture("so3.json").to_str().unwrap(),
        "--max-degree",
        "1",
    ]);
    assert!(stdout(&out).contains("0 element(s)"));
    let out = ptx(&[
        "center",
        fixture("matrix2.json").to_str().unwrap(),
        "--max-degree",
        "0",
    ]);
    assert!(stdout(&out).contains("4 element(s)"));
}

#[test]
fn curvature_is_flat_on_fixture() {
    let out = ptx(&[
        "curvature",
        fixture("so3.json").to_str().unwrap(),
        "--i",
        "1",
        "--j",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines() {
        assert!(line.ends_with("= (0, 0, 0)"), "{line}");
    }
    let out = ptx(&[
        "curvature",
        fixture("so3.json").to_str().unwrap(),
        "--i",
        "9",
        "--j",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cohomology_centerless_is_trivial() {
    for degree in ["0", "1", "2", "3"] {
        let out = ptx(&[
            "cohomology",
            fixture("so3.json").to_str().unwrap(),
            "--rank",
            "1",
            "--degree",
            degree,
            "--center-valued",
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(stdout(&out).contains("cocycles 0, coboundaries 0, H = 0"));
    }
}

#[test]
fn cohomology_falls_back_to_filtered_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nongraded.json");
    std::fs::write(
        &path,
        r#"{
            "variables": ["x1", "x2"],
            "fiber_rank": 1,
            "poisson": { "1,2": "x1 + 1" }
        }"#,
    )
    .unwrap();
    let out = ptx(&[
        "cohomology",
        path.to_str().unwrap(),
        "--rank",
        "1",
        "--degree",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("not homogeneous"));
    assert!(text.contains("filtered bounds"));
    assert!(!text.contains("H ="));
}

#[test]
fn module_form_verdicts() {
    let out = ptx(&["module-form", fixture("matrix2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("module form confirmed"));

    let out = ptx(&["module-form", fixture("so3.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("nonzero fiber bracket"));
}

#[test]
fn gauge_transport_and_emit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let gauge_path = dir.path().join("gauge.json");
    std::fs::write(
        &gauge_path,
        r#"{
            "mu": [["1","0","0"], ["0","1","0"], ["0","0","1"]]
        }"#,
    )
    .unwrap();
    let emitted = dir.path().join("out.json");
    let out = ptx(&[
        "gauge",
        fixture("so3.json").to_str().unwrap(),
        "--gauge",
        gauge_path.to_str().unwrap(),
        "--emit",
        emitted.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("triple conditions: ok"));

    // The emitted manifest passes the full check.
    let out = ptx(&["check", emitted.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // A gauge with a wrong inverse is a usage error.
    let bad_path = dir.path().join("bad.json");
    std::fs::write(
        &bad_path,
        r#"{
            "phi11": [["1","0","0"],["0","1","0"],["0","0","1"]],
            "phi11_inv": [["2","0","0"],["0","1","0"],["0","0","1"]]
        }"#,
    )
    .unwrap();
    let out = ptx(&[
        "gauge",
        fixture("so3.json").to_str().unwrap(),
        "--gauge",
        bad_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn deform_by_closed_cocycle() {
    let dir = tempfile::tempdir().unwrap();
    let cocycle_path = dir.path().join("c.json");
    // On the matrix module fixture the fiber is abelian, so constant
    // multiples of any element are central; this one is closed.
    std::fs::write(
        &cocycle_path,
        r#"{ "entries": { "1,2": ["x3", "0", "0", "x3"] } }"#,
    )
    .unwrap();
    let emitted = dir.path().join("deformed.json");
    let out = ptx(&[
        "deform",
        fixture("matrix2.json").to_str().unwrap(),
        "--cocycle",
        cocycle_path.to_str().unwrap(),
        "--t",
        "1/3",
        "--emit",
        emitted.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = ptx(&["check", emitted.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // Deforming a centerless fixture with a non-central cocycle is a
    // mathematical rejection, not a usage error.
    let bad = dir.path().join("bad_c.json");
    std::fs::write(&bad, r#"{ "entries": { "1,2": ["1", "0", "0"] } }"#).unwrap();
    let out = ptx(&[
        "deform",
        fixture("so3.json").to_str().unwrap(),
        "--cocycle",
        bad.to_str().unwrap(),
        "--t",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("rejected"));
}

#[test]
fn ham_prints_block_form() {
    let out = ptx(&[
        "ham",
        fixture("so3.json").to_str().unwrap(),
        "--elem",
        "x1;0,0,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("X00(x2) = x3"));
    assert!(text.contains("X00(x3) = -x2"));
    assert!(text.contains("X11(e2) = (0, 0, 1)"));
}

#[test]
fn poiss_check_verdicts() {
    let dir = tempfile::tempdir().unwrap();

    // The Hamiltonian derivation of x1 + 0, written out as a block file.
    let ham = dir.path().join("ham.json");
    std::fs::write(
        &ham,
        r#"{
            "x00": ["0", "x3", "-x2"],
            "x11": [["0","0","0"],["0","0","-1"],["0","1","0"]]
        }"#,
    )
    .unwrap();
    let out = ptx(&[
        "poiss-check",
        fixture("so3.json").to_str().unwrap(),
        "--derivation",
        ham.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("poisson derivation: yes"));

    // The identity on the fiber is not a Poisson derivation.
    let ident = dir.path().join("ident.json");
    std::fs::write(
        &ident,
        r#"{ "x11": [["1","0","0"],["0","1","0"],["0","0","1"]] }"#,
    )
    .unwrap();
    let out = ptx(&[
        "poiss-check",
        fixture("so3.json").to_str().unwrap(),
        "--derivation",
        ident.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("poisson derivation: no"));

    // A nonzero x01 on a free module violates the block preconditions.
    let malformed = dir.path().join("malformed.json");
    std::fs::write(&malformed, r#"{ "x01": ["1", "0", "0"] }"#).unwrap();
    let out = ptx(&[
        "poiss-check",
        fixture("so3.json").to_str().unwrap(),
        "--derivation",
        malformed.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exactness_outcomes() {
    let dir = tempfile::tempdir().unwrap();

    // An exact target on the matrix module fixture: the differential
    // of a constant identity-valued translation has x3-linear entries.
    let exact = dir.path().join("exact.json");
    std::fs::write(
        &exact,
        r#"{ "entries": {
            "1,2": ["x3","0","0","x3"],
            "1,3": ["-x2","0","0","-x2"],
            "2,3": ["x1","0","0","x1"]
        } }"#,
    )
    .unwrap();
    let out = ptx(&[
        "exactness",
        fixture("matrix2.json").to_str().unwrap(),
        "--cocycle",
        exact.to_str().unwrap(),
        "--max-degree",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("primitive found"));

    // A closed non-exact target: on the zero structure the
    // differential vanishes identically, so nonzero targets have no
    // primitive and the grading certifies it.
    let zero_manifest = dir.path().join("zero.json");
    std::fs::write(
        &zero_manifest,
        r#"{ "variables": ["x1", "x2"], "fiber_rank": 1 }"#,
    )
    .unwrap();
    let nonexact = dir.path().join("nonexact.json");
    std::fs::write(&nonexact, r#"{ "entries": { "1,2": ["1"] } }"#).unwrap();
    let out = ptx(&[
        "exactness",
        zero_manifest.to_str().unwrap(),
        "--cocycle",
        nonexact.to_str().unwrap(),
        "--max-degree",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("certified"));
}

#[test]
fn io_errors_exit_two() {
    let out = ptx(&["check", "/nonexistent/path.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ptx(&["jacobi"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        vec!["check", fixture("so3.json").to_str().unwrap()],
        vec![
            "casimir",
            fixture("so3_base_only.json").to_str().unwrap(),
            "--max-degree",
            "2",
        ],
        vec!["module-form", fixture("matrix2.json").to_str().unwrap()],
    ] {
        let a = ptx(&args);
        let b = ptx(&args);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.status.code(), b.status.code());
    }
}
