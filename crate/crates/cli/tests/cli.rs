use std::process::{Command, Output};

use cavitherm_cli::Dataset;

fn cavitherm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavitherm")).args(args).env("RUST_LOG", "error").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn spectrum_csv_to_stdout() {
    let o = cavitherm(&["spectrum", "spectrum.grid.per_decade=5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "omega_over_Te,gamma_ratio,T_star_over_Te,n_over_nB_Te,regime");
    // 5 ratios over the default decade span
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len() % 5, 0);
    assert!(rows.iter().all(|r| r.split(',').count() == 5));
}

#[test]
fn json_and_csv_carry_the_same_rows() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["spectrum", "resonance"] {
        let json_path = dir.path().join(format!("{cmd}.json"));
        let csv = cavitherm(&[cmd, "--format", "csv"]);
        let json = cavitherm(&[cmd, "--format", "json", "--out", json_path.to_str().unwrap()]);
        assert!(csv.status.success() && json.status.success());
        assert!(json.stdout.is_empty());
        let ds = Dataset::from_json(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
        assert_eq!(ds.to_csv(), stdout(&csv), "{cmd}");
        assert_eq!(ds.meta["command"], cmd);
    }
}

#[test]
fn si_units_add_columns() {
    let o = cavitherm(&["spectrum", "--units", "si", "spectrum.grid.per_decade=2"]);
    assert!(o.status.success());
    let header = stdout(&o).lines().next().unwrap().to_string();
    assert!(header.ends_with("omega_rad_s,T_star_K"), "{header}");
}

#[test]
fn rates_rejects_natural_units() {
    let o = cavitherm(&["rates", "--units", "natural"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_override_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "format = \"json\"\n[spectrum]\nt_mirror = 0.4\ngamma_ratios = [1.0]\n").unwrap();
    let o = cavitherm(&["spectrum", "--config", path.to_str().unwrap(), "spectrum.t_mirror=0.3", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("omega_over_Te,"));
    // ω → 0 with equal rates: T* → (1 + 0.3) / 2
    let first: Vec<f64> = text.lines().nth(1).unwrap().split(',').take(3).map(|c| c.parse().unwrap()).collect();
    assert!((first[2] - 0.65).abs() < 1e-2, "{first:?}");
}

#[test]
fn unknown_key_is_an_error() {
    let o = cavitherm(&["spectrum", "spectrum.t_mirorr=0.3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("t_mirorr"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[nonlinear]\ncaps = [14, 6]\n").unwrap();
    let o = cavitherm(&["nonlinear", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_values_name_the_key() {
    let o = cavitherm(&["resonance", "resonance.t_mirror=-1.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resonance.t_mirror"));
}

#[test]
fn check_passes_and_injected_fault_fails() {
    let ok = cavitherm(&["check", "--seed", "7", "check.draws=10"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).lines().filter(|l| l.starts_with("PASS")).count() >= 10);

    let bad = cavitherm(&["check", "--seed", "7", "check.draws=10", "check.inject_fault=\"rate-sign\""]);
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout(&bad);
    assert!(text.lines().any(|l| l.starts_with("FAIL bath.detailed_balance")), "{text}");
}

#[test]
fn small_nonlinear_scan() {
    let o = cavitherm(&[
        "nonlinear",
        "--format",
        "json",
        "nonlinear.caps=[6, 3, 1]",
        "nonlinear.g_over_gamma1=[0.0, 0.5]",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ds = Dataset::from_json(&stdout(&o)).unwrap();
    assert_eq!(ds.rows.len(), 6);
    let status = ds.column("status").unwrap();
    assert!(status.iter().all(|s| s.as_str() == Some("ok")));
}
