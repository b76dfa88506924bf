use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_euler-taylor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// `(first column, second column)` of each data row.
fn columns(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compute_writes_exact_norms() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["compute", "--datum", "bnw", "--order", "5", "--n", "3", "--output-dir", s(dir.path())]);
    let rows = columns(&read(dir.path(), "norms.csv"));
    let exact: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(exact, ["96", "6912", "45440", "3695360/9", "1366793248/675", "2243123779689032/186046875"]);
    assert_eq!(rows[3][2], "4.105955555555556e5");
    for j in 0..=5 {
        assert!(dir.path().join("checkpoints").join(format!("u_{j}.coeff")).exists());
    }
}

#[test]
fn order_zero_has_only_the_datum() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["compute", "--order", "0", "--output-dir", s(dir.path())]);
    assert_eq!(read(dir.path(), "norms.csv"), "j,squared_norm_exact,squared_norm\n0,96,9.600000000000000e1\n");
}

#[test]
fn symmetry_switch_gives_identical_checkpoints_and_reruns_are_idempotent() {
    let on = tempfile::tempdir().unwrap();
    let off = tempfile::tempdir().unwrap();
    ok(&["compute", "--order", "7", "--symmetry", "off", "--output-dir", s(off.path())]);
    ok(&["compute", "--order", "7", "--symmetry", "on", "--threads", "1", "--output-dir", s(on.path())]);
    for j in 0..=7 {
        let name = format!("checkpoints/u_{j}.coeff");
        assert_eq!(read(on.path(), &name), read(off.path(), &name), "order {j}");
    }
    let before = read(on.path(), "norms.csv");
    ok(&["compute", "--order", "7", "--output-dir", s(on.path())]);
    assert_eq!(read(on.path(), "norms.csv"), before);
    // Resuming to a higher order keeps the earlier checkpoints.
    let u5 = read(on.path(), "checkpoints/u_5.coeff");
    ok(&["compute", "--order", "8", "--output-dir", s(on.path())]);
    assert_eq!(read(on.path(), "checkpoints/u_5.coeff"), u5);
    assert_eq!(columns(&read(on.path(), "norms.csv")).len(), 9);
}

#[test]
fn analyze_emits_the_norm_series_and_scans() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["compute", "--order", "10", "--output-dir", s(dir.path())]);
    ok(&["analyze", "--output-dir", s(dir.path()), "--t", "0,0.25"]);
    let nu = columns(&read(dir.path(), "nu.csv"));
    let even: Vec<&str> = nu.iter().step_by(2).map(|r| r[1].as_str()).collect();
    assert_eq!(
        even,
        [
            "96",
            "6656",
            "258304/9",
            "2825587712/14175",
            "52545219363488/496621125",
            "10025320340466597351685768/5627635784943046875"
        ]
    );
    assert!(nu.iter().skip(1).step_by(2).all(|r| r[1] == "0"));

    let scan = columns(&read(dir.path(), "scan.csv"));
    assert!(scan.iter().filter(|r| r[1] == "0").all(|r| r[2] == "96"));
    assert_eq!(scan.len(), 11 * 2);

    // ‖u_10‖_3^{-1/10}; the reference is a 50-digit evaluation of the exact
    // squared norm's -1/20 power.
    let root = columns(&read(dir.path(), "roottest.csv"));
    let j10: f64 = root[9][1].parse().unwrap();
    assert!((j10 - 0.267_574_879_895_558).abs() < 1e-12, "{j10}");

    let remainder = read(dir.path(), "remainder.csv");
    assert!(remainder.lines().skip(1).all(|l| l.ends_with("conjectural (extrapolated monotonicity)")));
    let fit = read(dir.path(), "fit.csv");
    assert!(fit.lines().skip(1).all(|l| l.ends_with(",conjectural")));
}

#[test]
fn pade_reports_parity_and_poles() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["compute", "--order", "24", "--output-dir", s(dir.path())]);
    ok(&["pade", "--output-dir", s(dir.path()), "--diagonal", "12,11,0"]);
    let rows = columns(&read(dir.path(), "pade.csv"));
    assert_eq!(rows[0][..3], ["12", "12", "true"]);
    let t_min: f64 = rows[0][3].parse().unwrap();
    assert!((t_min - 0.549617).abs() < 1e-4, "{t_min}");
    let t_real: f64 = rows[0][6].parse().unwrap();
    assert!((t_real - 0.626199).abs() < 1e-4, "{t_real}");
    assert_eq!(rows[1][..3], ["11", "11", "false"]);
    assert_eq!(rows[2], ["0", "0", "true", "", "", "", "", "", ""]);
}

#[test]
fn report_dumps_the_profile() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["report", "--output-dir", s(dir.path())]);
    let profile = read(dir.path(), "profile.txt");
    assert_eq!(profile.lines().count(), 26);
    let presentation = read(dir.path(), "presentation.txt");
    assert!(presentation.contains("dihedral of order 12"));
    assert!(presentation.contains("dihedral of order 6"));
    assert!(!presentation.contains("fails"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["compute"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "--order", "2", "--threads", "0"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--output-dir", s(dir.path())]).status.code(), Some(3));

    ok(&["compute", "--order", "3", "--output-dir", s(dir.path())]);
    assert_eq!(run(&["analyze", "--order", "4", "--output-dir", s(dir.path())]).status.code(), Some(3));
    assert_eq!(run(&["pade", "--order", "3", "--diagonal", "2", "--output-dir", s(dir.path())]).status.code(), Some(3));

    let bad = dir.path().join("bad.datum");
    std::fs::write(&bad, "1 1 0 1 0 -1 0 0 0\n").unwrap();
    assert_eq!(run(&["compute", "--order", "1", "--datum", s(&bad), "--output-dir", s(dir.path())]).status.code(), Some(3));

    let cp = dir.path().join("checkpoints/u_2.coeff");
    let text = std::fs::read_to_string(&cp).unwrap();
    std::fs::write(&cp, text.replacen('1', "7", 1)).unwrap();
    let out = run(&["compute", "--order", "4", "--output-dir", s(dir.path())]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::write(&cp, text).unwrap();

    std::fs::write(dir.path().join("checkpoints/.lock"), "").unwrap();
    assert_eq!(run(&["compute", "--order", "4", "--output-dir", s(dir.path())]).status.code(), Some(3));
}
