use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hgp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgp"))
        .args(args)
        .current_dir(dir)
        .env("HGP_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn gen_900(dir: &Path) {
    let out = hgp(dir, &["gen", "--n", "24", "--m", "18", "--dv", "3", "--dc", "4", "--seed", "7", "--out", "g.txt"]);
    assert!(out.status.success());
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn column(table: &[Vec<String>], name: &str) -> usize {
    table[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn gen_reports_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = hgp(dir.path(), &["gen", "--n", "24", "--m", "18", "--dv", "3", "--dc", "4", "--seed", "7", "--summary", "s.json"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("N=900"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 7);
    assert_eq!(summary["M_X"], 432);

    let toy = hgp(dir.path(), &["gen", "--n", "4", "--m", "3", "--dv", "3", "--dc", "4"]);
    assert!(stdout(&toy).contains("N=25"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = hgp(dir.path(), &["gen", "--n", "10", "--m", "9", "--dv", "3", "--dc", "4"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(hgp(dir.path(), &["gen", "--n", "10"]).status.code(), Some(1));
    assert_eq!(hgp(dir.path(), &["sweep", "--n", "4", "--m", "3", "--p", "1.5"]).status.code(), Some(1));
    assert_eq!(hgp(dir.path(), &["sweep", "--n", "4", "--m", "3", "--p", "0.1", "--decoder", "bp"]).status.code(), Some(1));
    assert_eq!(hgp(dir.path(), &["sweep", "--n", "4", "--m", "3", "--p", "0", "--decoder", "bp+ssf"]).status.code(), Some(1));
    assert_eq!(hgp(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn graph_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    gen_900(dir.path());
    let out = hgp(dir.path(), &["sweep", "--graph", "g.txt", "--p", "0.01", "--trials", "64"]);
    assert!(out.status.success());
    let t = rows(&stdout(&out));
    assert_eq!(t[1][column(&t, "graph_seed")], "7");
    assert_eq!(t[1][column(&t, "N")], "900");
}

#[test]
fn calibration_is_deterministic_and_positive() {
    let dir = tempfile::tempdir().unwrap();
    gen_900(dir.path());
    let run = |name: &str| {
        let out = hgp(dir.path(), &["calibrate", "--graph", "g.txt", "--p", "0.02", "--samples", "800", "--seed", "5", "--out", name]);
        assert!(out.status.success());
        fs::read_to_string(dir.path().join(name)).unwrap()
    };
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    let cal: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(cal["q_v"].as_f64().unwrap() > 0.0 && cal["q_c"].as_f64().unwrap() > 0.0);
    assert_eq!(cal["seed"], 5);
    assert_eq!(cal["fallback"], false);
}

#[test]
fn calibration_without_stops_falls_back() {
    let dir = tempfile::tempdir().unwrap();
    gen_900(dir.path());
    let out = hgp(dir.path(), &["calibrate", "--graph", "g.txt", "--p", "1e-6", "--samples", "10"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let cal: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("calibration_g7_p0.000001.json")).unwrap()).unwrap();
    assert_eq!(cal["fallback"], true);
}

#[test]
fn sweep_rows_and_zero_rate() {
    let dir = tempfile::tempdir().unwrap();
    gen_900(dir.path());
    let out = hgp(
        dir.path(),
        &[
            "sweep", "--graph", "g.txt", "--p", "0,0.02", "--decoder", "ssf,ssf+pal", "--trials", "300",
            "--seed", "9", "--calibrate-samples", "500", "--out", "r.csv", "--json", "r.json", "--dump-trials",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = rows(&fs::read_to_string(dir.path().join("r.csv")).unwrap());
    assert_eq!(t.len(), 5);
    let (fails, seed, p) = (column(&t, "failures"), column(&t, "seed"), column(&t, "p"));
    for row in &t[1..] {
        assert_eq!(row[seed], "9");
        if row[p] == "0.0" {
            assert_eq!(row[fails], "0");
        }
    }
    assert!(dir.path().join("calibration_g7_p0.02.json").exists());
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 9);
    assert_eq!(json["points"][0]["records"].as_array().unwrap().len(), 300);
}

#[test]
fn sweeps_repeat_exactly() {
    let dir = tempfile::tempdir().unwrap();
    gen_900(dir.path());
    let run = || {
        let out = hgp(dir.path(), &["sweep", "--graph", "g.txt", "--p", "0.02", "--trials", "500", "--seed", "4"]);
        let t = rows(&stdout(&out));
        let time = column(&t, "mean_time_us");
        t.into_iter().map(|mut r| {
            r.remove(time);
            r
        }).collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn pal_without_calibration_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    gen_900(dir.path());
    let out = hgp(dir.path(), &["sweep", "--graph", "g.txt", "--p", "0.03", "--decoder", "ssf+pal", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no calibration"));
}

#[test]
fn bp_decoder_dispatch() {
    let dir = tempfile::tempdir().unwrap();
    gen_900(dir.path());
    let out = hgp(dir.path(), &["sweep", "--graph", "g.txt", "--p", "0.02", "--decoder", "bp+ssf", "--R", "30", "--trials", "100"]);
    assert!(out.status.success());
    let t = rows(&stdout(&out));
    assert_eq!(t[1][column(&t, "decoder")], "bp+ssf");
}

#[test]
fn check_mode_flags_exhausted_budget() {
    let dir = tempfile::tempdir().unwrap();
    gen_900(dir.path());
    let out = hgp(
        dir.path(),
        &["sweep", "--graph", "g.txt", "--p", "0.01", "--min-failures", "100", "--max-trials", "50", "--check"],
    );
    assert_eq!(out.status.code(), Some(3));
    let ok = hgp(dir.path(), &["sweep", "--graph", "g.txt", "--p", "0.01", "--trials", "50", "--check"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn decode_syndrome_and_error_files() {
    let dir = tempfile::tempdir().unwrap();
    gen_900(dir.path());
    fs::write(dir.path().join("e.txt"), "# two VV qubits and one CC qubit\n5 100\n650\n").unwrap();
    let out = hgp(dir.path(), &["decode", "--graph", "g.txt", "--error", "e.txt", "--seed", "3"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["halted"], false);
    assert_eq!(report["logical_failure"], false);
    assert_eq!(report["seed"], 3);

    fs::write(dir.path().join("s.txt"), "").unwrap();
    let out = hgp(dir.path(), &["decode", "--graph", "g.txt", "--syndrome", "s.txt"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["correction"].as_array().unwrap().len(), 0);

    fs::write(dir.path().join("bad.txt"), "5 x").unwrap();
    assert_eq!(hgp(dir.path(), &["decode", "--graph", "g.txt", "--syndrome", "bad.txt"]).status.code(), Some(1));
}

#[test]
fn profile_variants_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = hgp(dir.path(), &["profile", "--n", "24", "--m", "18", "--trials", "20", "--seed", "2"]);
    assert!(out.status.success());
    let t = rows(&stdout(&out));
    assert_eq!(t.len(), 5);
    let (same, seed) = (column(&t, "identical_outcomes"), column(&t, "seed"));
    assert!(t[1..].iter().all(|r| r[same] == "true" && r[seed] == "2"));
}
