use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stokes-lfa")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// The number printed after `key = `.
fn value_after(text: &str, key: &str) -> f64 {
    let start = text.find(key).unwrap_or_else(|| panic!("`{key}` missing in:\n{text}")) + key.len();
    text[start..].split_whitespace().next().unwrap().parse().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stokes-lfa-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn smooth_dwj_posd_at_published_parameters() {
    let o = run(&["smooth", "--disc", "posd", "--scheme", "dwj1", "--alpha1", "1.451", "--alpha2", "1.0", "--omega", "1.290"]);
    assert!(o.status.success());
    assert!((value_after(&stdout(&o), "mu = ") - 0.618).abs() < 5e-3);
}

#[test]
fn smooth_optimal_prsd_dwj_hits_the_closed_form() {
    let o = run(&["smooth", "--disc", "prsd", "--scheme", "dwj1", "--optimal"]);
    assert!(o.status.success());
    assert!((value_after(&stdout(&o), "mu = ") - 65.0 / 97.0).abs() < 5e-3);
}

#[test]
fn smooth_bsr_posd() {
    let o = run(&["smooth", "--disc", "posd", "--scheme", "bsr", "--alpha", "1", "--omega", "0.8889"]);
    assert!((value_after(&stdout(&o), "mu = ") - 1.0 / 3.0).abs() < 5e-3);
}

#[test]
fn twogrid_dwj_posd_w11() {
    let args = ["twogrid", "--disc", "posd", "--scheme", "dwj1", "--alpha1", "1.451", "--alpha2", "1", "--omega", "1.29"];
    let o = run(&[&args[..], &["--nu1", "1", "--nu2", "1"]].concat());
    assert!(o.status.success());
    assert!((value_after(&stdout(&o), "rho = ") - 0.382).abs() < 2e-3);
}

#[test]
fn twogrid_prsd_bsr_galerkin_matches_smoothing() {
    let o = run(&["twogrid", "--disc", "prsd", "--scheme", "bsr", "--alpha", "1", "--omega", "0.8889", "--coarsen", "galerkin"]);
    assert!(o.status.success());
    assert!((value_after(&stdout(&o), "rho = ") - 1.0 / 3.0).abs() < 5e-3);
}

#[test]
fn spectrum_csv_has_header_comment_and_rows() {
    let path = scratch("spectrum.csv");
    let o = run(&["twogrid", "--disc", "posd", "--scheme", "bsr", "--omega", "0.8889", "--samples", "8", "--spectrum", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# "));
    assert!(text.contains("theta1,theta2,re,im,abs"));
    // 4×4 low frequencies minus the origin, 12 eigenvalues each
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 15 * 12);
}

#[test]
fn sweep_writes_a_grid() {
    let path = scratch("sweep.csv");
    let o = run(&[
        "twogrid", "--disc", "posd", "--scheme", "bsr", "--samples", "8", "--sweep", "alpha,omega", "--x-range", "0.8:1.2:0.2",
        "--y-range", "0.8:1.0:0.1", "--out", path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 9);
}

#[test]
fn optimize_finds_the_bsr_optimum() {
    let o = run(&[
        "optimize", "--disc", "posd", "--scheme", "bsr", "--smoothing", "--vary", "alpha=1:1:1", "--vary", "omega=0.5:1.2:0.01",
        "--samples", "32",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((value_after(&stdout(&o), "= ") - 1.0 / 3.0).abs() < 1e-2);
}

#[test]
fn tables_list_covers_every_table() {
    let o = run(&["tables", "list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 16);
    for id in ["posd-dwj-w", "prsd-ibsr-innerw", "q2q1-ibsr2", "q2q1-ibsr3"] {
        assert!(text.contains(id), "{id}");
    }
}

#[test]
fn unknown_table_is_a_usage_error() {
    let o = run(&["table", "no-such-table"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flags_exit_with_usage_code() {
    assert_eq!(run(&["smooth", "--disc", "mac"]).status.code(), Some(2));
    assert_eq!(run(&["smooth", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["smooth", "--disc", "q2q1", "--scheme", "dwj1", "--optimal"]).status.code(), Some(2));
    assert_eq!(run(&["smooth", "--scheme", "bsr", "--alpha", "-1"]).status.code(), Some(2));
}

#[test]
fn cost_prints_the_itemized_counts() {
    let o = run(&["cost"]);
    let text = stdout(&o);
    for n in ["111", "166", "303", "84"] {
        assert!(text.contains(n), "{n}");
    }
    for e in ["0.455", "0.332", "0.230", "0.542"] {
        assert!(text.contains(e), "{e}");
    }
}

#[test]
fn solve_is_deterministic_per_seed_and_appends_csv() {
    let path = scratch("solve.csv");
    let _ = std::fs::remove_file(&path);
    let args = ["solve", "--disc", "posd", "--scheme", "bsr", "--omega", "0.8889", "--nu1", "1", "--nu2", "1", "--n", "16", "--k", "10"];
    let a = run(&[&args[..], &["--seed", "7", "--out", path.to_str().unwrap()]].concat());
    let b = run(&[&args[..], &["--seed", "7", "--out", path.to_str().unwrap()]].concat());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let strip = |o: &Output| stdout(o).split('[').next().unwrap().to_string();
    assert_eq!(strip(&a), strip(&b));
    let text = std::fs::read_to_string(&path).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("id,n,cycle,nu1,nu2,rho_hat,rho_lfa,wall_time_s"));
    assert_eq!(text.lines().filter(|l| l.starts_with("cli,")).count(), 2);
}

#[test]
fn solve_reads_a_config() {
    let cfg = scratch("exp.toml");
    std::fs::write(
        &cfg,
        "[[experiment]]\nid = \"dwj-small\"\ndisc = \"posd\"\nscheme = \"dwj1\"\nparams = { alpha1 = 1.451, alpha2 = 1.0, omega = 1.29 }\nnu1 = 1\nnu2 = 1\nn = 16\nk = 10\n",
    )
    .unwrap();
    let o = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("dwj-small"));
}

#[test]
fn table_flags_divergent_q2q1_entries() {
    let path = scratch("q2.csv");
    let o = run(&["table", "q2q1-ibsr2", "--sizes", "16", "--k", "40", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(&path).unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    // W(0,1) and W(1,0) blow up; the rest converge
    for r in &rows[..2] {
        assert_eq!(&r[10], "true", "{r:?}");
    }
    for r in &rows[2..] {
        assert_eq!(&r[10], "false", "{r:?}");
    }
}
