//! Command-level behavior beyond the acceptance gate: machine output,
//! view selection, conversion round trips through the binary, and the
//! schema's block-addressed diagnostics.

use std::path::{Path, PathBuf};
use std::process::Command;

use causalview_cli::schema::{load_scenario, save_scenario, Scenario};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_causalview"))
}

#[test]
fn polarizer_fixture_prints_both_views_and_gap() {
    let out = bin()
        .args(["table", "--view", "both"])
        .arg(fixture("polarizer_quarter.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("causal view"), "{text}");
    assert!(text.contains("spacelike view"));
    assert!(text.contains("max gap between views"));
    // crossed polarizers: p(a=r, b=t) = 1/2
    assert!(text.contains("0.500000"));
}

#[test]
fn machine_verify_reports_gaps_as_json() {
    let out = bin()
        .args(["verify", "--format", "machine"])
        .arg(fixture("tripartite_embed.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["kind"], "tripartite_causal");
    assert_eq!(json["pass"], true);
    assert!(json["equivalence_gap"].as_f64().unwrap() < 1e-10);
    assert!(json["route_gap"].as_f64().unwrap() < 1e-10);
}

#[test]
fn nosignal_product_state_deviations_vanish() {
    let out = bin()
        .args([
            "nosignal",
            "--format",
            "machine",
            "--extra-povms",
            "3",
            "--seed",
            "9",
        ])
        .arg(fixture("product_spacelike.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["direction_a_to_b"].as_f64().unwrap() < 1e-12);
    assert!(json["direction_b_to_a"].as_f64().unwrap() < 1e-12);
    assert_eq!(json["pass"], true);
}

#[test]
fn convert_round_trip_through_binary() {
    let dir = tempfile::tempdir().unwrap();
    let spacelike = dir.path().join("sp.json");
    let back = dir.path().join("back.json");

    let st = bin()
        .args(["convert", "--direction", "to-spacelike", "--out"])
        .arg(&spacelike)
        .arg(fixture("bell_causal.json"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let st = bin()
        .args(["convert", "--direction", "to-causal", "--out"])
        .arg(&back)
        .arg(&spacelike)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));

    let Scenario::Causal(original) = load_scenario(&fixture("bell_causal.json")).unwrap() else {
        panic!("fixture kind")
    };
    let Scenario::Causal(returned) = load_scenario(&back).unwrap() else {
        panic!("converted kind")
    };
    let gap = original
        .joint_distribution()
        .max_abs_gap(&returned.joint_distribution())
        .unwrap();
    assert!(gap < 1e-9, "distribution changed by {gap:.3e}");
}

#[test]
fn convert_rejects_direction_kind_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["convert", "--direction", "to-causal", "--out"])
        .arg(dir.path().join("x.json"))
        .arg(fixture("bell_causal.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tripartite_spacelike_file_has_no_causal_view() {
    let dir = tempfile::tempdir().unwrap();
    let spacelike = dir.path().join("tri_sp.json");
    let st = bin()
        .args(["convert", "--direction", "to-spacelike", "--out"])
        .arg(&spacelike)
        .arg(fixture("tripartite_embed.json"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));

    let out = bin()
        .args(["table", "--view", "causal"])
        .arg(&spacelike)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // the spacelike table of the converted file is still printable
    let st = bin()
        .args(["table", "--view", "spacelike"])
        .arg(&spacelike)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
}

#[test]
fn malformed_json_and_unknown_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ \"kind\": \"causal\", ").unwrap();
    let out = bin().args(["table"]).arg(&broken).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["table", "--view", "sideways"])
        .arg(fixture("bell_causal.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let missing = bin()
        .args(["table"])
        .arg(dir.path().join("nope.json"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn validate_tol_flag_reaches_the_loader() {
    // every entry of the bell fixture is exact in f64, so even a brutally
    // tight structural tolerance accepts it
    let st = bin()
        .args(["table", "--validate-tol", "1e-15", "--view", "causal"])
        .arg(fixture("bell_causal.json"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
}

#[test]
fn schema_names_offending_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ragged.json");
    std::fs::write(
        &path,
        r#"{
  "kind": "causal",
  "dims": { "a": 2, "b": 2 },
  "rho": [ [[0.5,0],[0,0]], [[0,0]] ],
  "kraus": [ [[[1,0],[0,0]],[[0,0],[1,0]]] ],
  "povm_a": { "labels": ["0"], "effects": [ [[[1,0],[0,0]],[[0,0],[1,0]]] ] },
  "povm_b": { "labels": ["0"], "effects": [ [[[1,0],[0,0]],[[0,0],[1,0]]] ] }
}"#,
    )
    .unwrap();
    let err = load_scenario(&path).unwrap_err();
    let msg = format!("{err:#}");
    assert!(msg.contains("'rho'") && msg.contains("row 1"), "{msg}");
}

#[test]
fn saved_files_replay_bit_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let s1 = load_scenario(&fixture("bell_spacelike.json")).unwrap();
    let path = dir.path().join("copy.json");
    save_scenario(&path, &s1).unwrap();
    let s2 = load_scenario(&path).unwrap();
    let (Scenario::Spacelike(a), Scenario::Spacelike(b)) = (&s1, &s2) else {
        panic!("kinds")
    };
    assert_eq!(a.tau().mat().entries(), b.tau().mat().entries());
}

#[test]
fn suite_machine_output_is_parseable_and_deterministic() {
    let run = || {
        let out = bin()
            .args([
                "suite", "--trials", "24", "--dims", "2,3", "--seed", "11", "--format", "machine",
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a, b, "same seed must reproduce the same report");
    assert_eq!(a["pass"], true);
    assert!(a["worst_equivalence_gap"].as_f64().unwrap() < 1e-9);

    let tri = bin()
        .args([
            "suite",
            "--trials",
            "12",
            "--dims",
            "2,3",
            "--seed",
            "4",
            "--tripartite",
            "--format",
            "machine",
        ])
        .output()
        .unwrap();
    assert_eq!(tri.status.code(), Some(0));
}

#[test]
fn demo_polarizer_machine_output_matches_analytic() {
    let out = bin()
        .args([
            "demo",
            "polarizer",
            "--alpha",
            "0.0",
            "--beta",
            "0.5235987755982988",
            "--p",
            "0.5",
            "--format",
            "machine",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // p/2 · sin²(π/6) = 0.125
    assert!((json["analytic_rt"].as_f64().unwrap() - 0.125).abs() < 1e-12);
    assert_eq!(json["pass"], true);

    let bad = bin()
        .args([
            "demo",
            "polarizer",
            "--alpha",
            "0",
            "--beta",
            "1",
            "--p",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
