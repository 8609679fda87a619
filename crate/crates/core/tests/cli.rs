use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ndarray::array;
use tempfile::tempdir;

use sparse_l0::io::{save_dense_matrix, write_vector};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sparse-l0"));
    cmd.env("SPARSE_L0_WORKERS", "1");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn trace_h(path: &Path) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn solve_generated_instance() {
    let dir = tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["solve", "--method", "apiht", "--gen-cs", "m=100,n=300,s=3", "--seed", "7", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["x_final.txt", "result.json", "trace.csv", "config.toml"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let h = trace_h(&dir.path().join("trace.csv"));
    assert!(!h.is_empty());
    assert!(h.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "converged");
    assert_eq!(summary["method"], "APIHT");
    assert_eq!(summary["seed"], 7);
}

#[test]
fn echoed_config_reproduces_run() {
    let dir = tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let o = run(&[
        "solve", "--method", "epiht", "--gen-cs", "m=60,n=150,s=3", "--seed", "3", "--lambda", "0.2", "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cfg = first.join("config.toml");
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["x_final.txt", "trace.csv", "config.toml"] {
        assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn unknown_method_is_an_error() {
    let dir = tempdir().unwrap();
    let o = run(&["solve", "--method", "bogus", "--gen-cs", "m=10,n=20,s=2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("unknown method"), "{err}");
    assert_eq!(err.trim().lines().count(), 1);
}

#[test]
fn iteration_cap_gives_exit_two() {
    let dir = tempdir().unwrap();
    let o = run(&[
        "solve", "--method", "piht", "--gen-cs", "m=100,n=300,s=3", "--seed", "7", "--max-iter", "1", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn malformed_config_is_an_error() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[solver\nlambda = ").unwrap();
    let o = run(&["bench-cs", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("config"));
}

#[test]
fn solve_from_matrix_files() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.l0pk");
    let b = dir.path().join("b.txt");
    save_dense_matrix(&a, ndarray::Array2::<f64>::eye(3).view()).unwrap();
    write_vector(&array![2.0, 0.1, 1.5], &b).unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "solve", "--matrix", a.to_str().unwrap(), "--rhs", b.to_str().unwrap(), "--lambda", "0.5", "--cold-start",
        "--method", "piht", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let x = sparse_l0::io::read_vector(out.join("x_final.txt")).unwrap();
    assert!((x[0] - 2.0).abs() < 1e-9 && x[1] == 0.0 && (x[2] - 1.5).abs() < 1e-9);
}

#[test]
fn solve_from_libsvm_file() {
    let dir = tempdir().unwrap();
    let data = dir.path().join("d.svm");
    let mut text = String::new();
    for i in 0..40 {
        let v = (i as f64 - 19.5) / 10.0;
        let label = if v > 0.0 { "+1" } else { "-1" };
        text.push_str(&format!("{label} 1:{v} 2:{}\n", (i % 7) as f64 / 7.0));
    }
    fs::write(&data, text).unwrap();
    let out = dir.path().join("out");
    let o = run(&["solve", "--libsvm", data.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(matches!(o.status.code(), Some(0) | Some(2)), "{}", stderr(&o));
    let cfg = fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(cfg.contains("lambda = 5e-5") || cfg.contains("lambda = 0.00005"), "{cfg}");
}

#[test]
fn bench_cs_small_grid_and_determinism() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "m = 40\nsizes = [[100, 2], [120, 3]]\nreplicates = 2\nseed = 11\n").unwrap();
    let mut csvs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = run(&["bench-cs", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("iterations (mean/std)"));
        let text = fs::read_to_string(out.join("report.csv")).unwrap();
        assert_eq!(text.lines().count(), 1 + 6 * 2);
        assert!(out.join("report.json").exists());
        let stripped: Vec<String> = text
            .lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.drain(5..7);
                f.join(",")
            })
            .collect();
        csvs.push(stripped);
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn bench_cs_rejects_zero_replicates() {
    let dir = tempdir().unwrap();
    let o = run(&["bench-cs", "--replicates", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("replicates"));
}

#[test]
fn bench_cs_reports_failed_cells() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "m = 30\nsizes = [[60, 2]]\nreplicates = 1\n[options]\nifb_beta = 0.6\n").unwrap();
    let o = run(&["bench-cs", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("failures:") && text.contains("IFB"), "{text}");
}

#[test]
fn bench_logreg_synthetic() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "[synthetic]\nn_samples = 80\nn_features = 20\ns_true = 3\n").unwrap();
    let o = run(&[
        "bench-logreg", "--config", cfg.to_str().unwrap(), "--method", "piht,apiht", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("accuracy"));
    let report = sparse_l0::io::read_report_json(dir.path().join("report.json")).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert!(report.rows.iter().all(|r| r.accuracy_mean.unwrap() > 0.5));
}

#[test]
fn check_command() {
    let o = run(&["check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), 4);

    let o = run(&["check", "--only", "prox"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = run(&["check", "--only", "prox", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL prox") && text.contains("counterexample"), "{text}");
}

#[test]
fn help_exits_cleanly() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("inject"));
}
