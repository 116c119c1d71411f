//! End-to-end tests driving the `etamod` binary.

use std::process::{Command, Output};

use etamod_cli::report::{CheegerReport, EtaReport, FixedPointsReport};
use etamod_core::classify::ClassReport;

fn etamod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etamod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = etamod(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn eta_dim5_value_and_trace() {
    let text = stdout(&["eta", "--n", "3", "--d", "5"]);
    assert!(text.contains("relative eta-invariant: -5/4"));
    assert!(text.contains("5 isolated involution fixed points"));

    let json = stdout(&["eta", "--n", "3", "--d", "5", "--format", "json"]);
    let rep: EtaReport = serde_json::from_str(&json).unwrap();
    assert_eq!(rep.eta, "-5/4");
    assert_eq!(rep.derivation.fixed_points, 5);
}

#[test]
fn eta_plumbing_value() {
    let json = stdout(&["eta", "--k", "2", "--d", "1", "--format", "json"]);
    let rep: EtaReport = serde_json::from_str(&json).unwrap();
    assert_eq!(rep.eta, "-1/16");
}

#[test]
fn eta_rejects_bad_parity_with_machine_readable_error() {
    let out = etamod(&["eta", "--n", "4", "--d", "3"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    let obj: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert!(obj["error"].as_str().unwrap().contains("parity"));
    assert!(out.stdout.is_empty());
}

#[test]
fn eta_requires_exactly_one_pipeline() {
    let out = etamod(&["eta", "--d", "3"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("exactly one of --n or --k"));
}

#[test]
fn fixedpoints_report() {
    let json = stdout(&[
        "fixedpoints",
        "--n",
        "3",
        "--d",
        "3",
        "--epsilon",
        "1/8",
        "--format",
        "json",
    ]);
    let rep: FixedPointsReport = serde_json::from_str(&json).unwrap();
    assert_eq!(rep.count, 3);
    for p in &rep.points {
        assert!((p.radius - 0.5).abs() < 1e-12);
        assert_eq!(p.power_exact, Some(true));
        assert_eq!(p.isotropy.group, "O(3)");
    }
    assert_eq!(rep.permutation.images, vec![1, 2, 0]);
    assert!(rep.permutation.is_full_cycle);

    let single = stdout(&["fixedpoints", "--n", "3", "--d", "1", "--epsilon", "1/2"]);
    assert!(single.contains("1 fixed points"));

    let out = etamod(&["fixedpoints", "--n", "3", "--d", "3", "--epsilon", "0"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("singular"));
}

#[test]
fn classify_dim5_scan() {
    let json = stdout(&["classify", "--dim", "5", "--d-max", "51", "--format", "json"]);
    let rep: ClassReport = serde_json::from_str(&json).unwrap();
    assert_eq!(rep.dimension, 5);
    assert_eq!(rep.rows.len(), 26);
    // four residue classes attained already among d <= 7
    let keys: std::collections::BTreeSet<&str> = rep
        .rows
        .iter()
        .filter(|r| r.d <= 7)
        .map(|r| r.diffeo_class_key.as_str())
        .collect();
    assert_eq!(keys.len(), 4);
    assert_eq!(rep.component_lower_bound, 26);

    let single = stdout(&["classify", "--dim", "5", "--d-max", "1", "--format", "json"]);
    let rep: ClassReport = serde_json::from_str(&single).unwrap();
    assert_eq!(rep.rows.len(), 1);
    assert_eq!(rep.rows[0].d, 1);
}

#[test]
fn classify_family_mode_and_csv() {
    let json = stdout(&[
        "classify", "--k", "2", "--family", "1", "--count", "5", "--format", "json",
    ]);
    let rep: ClassReport = serde_json::from_str(&json).unwrap();
    let fam = rep.family.as_ref().unwrap();
    assert_eq!(fam.members.len(), 5);
    assert_eq!(fam.component_lower_bound, 5);
    let distinct: std::collections::BTreeSet<_> = fam.etas.iter().collect();
    assert_eq!(distinct.len(), 5);

    let csv = stdout(&[
        "classify", "--k", "2", "--family", "1", "--count", "5", "--format", "csv",
    ]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "d,n_or_k,eta_num,eta_den,diffeo_class,kervaire,components"
    );
    let first = lines.next().unwrap();
    assert!(first.starts_with("65,2,-65,16,"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn classify_rejects_invalid_combinations() {
    for args in [
        &["classify", "--dim", "6", "--d-max", "3"][..],
        &["classify", "--dim", "5", "--d-max", "3", "--family", "3"][..],
        &["classify", "--d-max", "3"][..],
    ] {
        let out = etamod(args);
        assert!(!out.status.success(), "{args:?} must fail");
    }
}

#[test]
fn cheeger_hopf_profile_matches_collapsing_sphere() {
    let json = stdout(&[
        "cheeger", "--chart", "hopf", "--t", "0,1,10", "--format", "json",
    ]);
    let rep: CheegerReport = serde_json::from_str(&json).unwrap();
    assert_eq!(rep.chart_count, 1);
    let profile = &rep.charts[0].profile;
    assert_eq!(profile.len(), 3);
    for row in profile {
        let mu_sq = 1.0 / (1.0 + row.t);
        assert!((row.alpha - mu_sq).abs() < 1e-10);
        assert!((row.plane_bound - mu_sq).abs() < 1e-10);
    }
}

#[test]
fn cheeger_torus_is_never_certified() {
    let text = stdout(&[
        "cheeger",
        "--chart",
        "torus",
        "--t-max",
        "100",
        "--grid-density",
        "4",
    ]);
    assert!(text.contains("none (not certified)"));
}

#[test]
fn cheeger_brieskorn_certificate() {
    let json = stdout(&[
        "cheeger", "--chart", "brieskorn", "--n", "3", "--d", "3", "--samples", "4", "--t-max",
        "1000", "--grid-density", "8", "--format", "json",
    ]);
    let rep: CheegerReport = serde_json::from_str(&json).unwrap();
    assert_eq!(rep.chart_count, 4);
    for c in &rep.charts {
        assert!(c.noncommuting_pair);
    }
    let verdict = rep.t0.as_ref().unwrap();
    assert!(verdict.certified);
    assert!(verdict.t0.unwrap() <= 1000.0);
}

#[test]
fn cheeger_reads_chart_files_and_reports_first_failing_invariant() {
    let dir = std::env::temp_dir().join("etamod-cli-test");
    std::fs::create_dir_all(&dir).unwrap();

    let good = dir.join("charts.json");
    std::fs::write(
        &good,
        r#"{
  "lie_algebra": {"dimension": 1, "q": [1.0], "structure_constants": [0.0]},
  "charts": [
    {"dimension": 3,
     "metric": [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
     "killing": [1.0, 0.0, 0.0],
     "sec_h_const": 1.0}
  ]
}"#,
    )
    .unwrap();
    let json = stdout(&[
        "cheeger",
        "--chart",
        good.to_str().unwrap(),
        "--t",
        "0,1",
        "--format",
        "json",
    ]);
    let rep: CheegerReport = serde_json::from_str(&json).unwrap();
    assert_eq!(rep.charts[0].vertical_dim, 1);

    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        r#"{
  "lie_algebra": {"dimension": 1, "q": [-1.0], "structure_constants": [0.0]},
  "charts": []
}"#,
    )
    .unwrap();
    let out = etamod(&["cheeger", "--chart", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("positive definite"));
}

#[test]
fn json_reports_round_trip_byte_identically() {
    for args in [
        &["eta", "--n", "3", "--d", "7", "--format", "json"][..],
        &["fixedpoints", "--n", "3", "--d", "5", "--epsilon", "1/2", "--format", "json"][..],
        &["classify", "--dim", "5", "--d-max", "19", "--format", "json"][..],
        &["cheeger", "--chart", "hopf", "--t", "0,2", "--format", "json"][..],
    ] {
        let first = stdout(args);
        let reserialized = match args[0] {
            "eta" => {
                let rep: EtaReport = serde_json::from_str(&first).unwrap();
                serde_json::to_string_pretty(&rep).unwrap() + "\n"
            }
            "fixedpoints" => {
                let rep: FixedPointsReport = serde_json::from_str(&first).unwrap();
                serde_json::to_string_pretty(&rep).unwrap() + "\n"
            }
            "classify" => {
                let rep: ClassReport = serde_json::from_str(&first).unwrap();
                serde_json::to_string_pretty(&rep).unwrap() + "\n"
            }
            "cheeger" => {
                let rep: CheegerReport = serde_json::from_str(&first).unwrap();
                serde_json::to_string_pretty(&rep).unwrap() + "\n"
            }
            _ => unreachable!(),
        };
        assert_eq!(first, reserialized, "round trip for {args:?}");
    }
}

#[test]
fn output_flag_writes_to_file_and_runs_are_deterministic() {
    let dir = std::env::temp_dir().join("etamod-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("eta.json");
    let args = [
        "eta",
        "--n",
        "3",
        "--d",
        "9",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ];
    let out = etamod(&args);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let first = std::fs::read_to_string(&path).unwrap();
    let out = etamod(&args);
    assert!(out.status.success());
    let second = std::fs::read_to_string(&path).unwrap();
    assert_eq!(first, second);

    // seeded sampling is deterministic too
    let a = stdout(&[
        "cheeger", "--chart", "brieskorn", "--samples", "3", "--seed", "5", "--t", "1",
        "--format", "json",
    ]);
    let b = stdout(&[
        "cheeger", "--chart", "brieskorn", "--samples", "3", "--seed", "5", "--t", "1",
        "--format", "json",
    ]);
    assert_eq!(a, b);
}

#[test]
fn csv_rejected_for_unsupported_commands() {
    let out = etamod(&[
        "cheeger", "--chart", "hopf", "--t", "1", "--format", "csv",
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("csv output is defined for eta and classify only"));
}
