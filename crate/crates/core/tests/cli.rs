use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cutstokes3f"))
        .args(args)
        .current_dir(dir)
        .env_remove("CUTSTOKES_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

const SMALL: &str = "experiment.kind = convergence\nmesh.levels = 4, 6, 8\n";

#[test]
fn run_writes_csv_matrix_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.cfg", SMALL);
    let out = cli(
        &["run", &cfg, "--out", "table.csv", "--export-matrix", "k.txt", "--svg", "mesh.svg"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "level,h,ndof,err_L2_u,err_H1_u,err_L2_p,err_L2_sigma,triple_norm");
    assert_eq!(lines.len(), 6);
    assert!(lines[4].starts_with("eoc_last,,,"));
    assert!(lines[5].starts_with("eoc_fit,,,"));

    let matrix = std::fs::read_to_string(dir.path().join("k.txt")).unwrap();
    let first: Vec<&str> = matrix.lines().next().unwrap().split(' ').collect();
    assert_eq!(first.len(), 3);
    assert!(first[2].parse::<f64>().is_ok());
    let svg = std::fs::read_to_string(dir.path().join("mesh.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn csv_goes_to_stdout_or_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.cfg", SMALL);
    let out = cli(&["run", &cfg], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("level,h,ndof"));

    let cfg = write(dir.path(), "b.cfg", &format!("{SMALL}output.path = from_config.csv\n"));
    let out = cli(&["run", &cfg], dir.path());
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(dir.path().join("from_config.csv").exists());
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = write(dir.path(), "k.cfg", "experiment.kind = convergence\nmesh.levelz = 4\n");
    let one_level = write(dir.path(), "l.cfg", "experiment.kind = convergence\nmesh.levels = 8\n");
    let bad_value = write(dir.path(), "v.cfg", "experiment.kind = sliver\nsweep.epsilons = 0.5, 1.5\n");
    for cfg in [bad_key.as_str(), one_level.as_str(), bad_value.as_str(), "missing.cfg"] {
        let out = cli(&["run", cfg], dir.path());
        assert_eq!(out.status.code(), Some(2), "{cfg}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let err = String::from_utf8_lossy(&cli(&["run", &bad_key], dir.path()).stderr).to_string();
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn bad_thread_cap_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.cfg", SMALL);
    let out = Command::new(env!("CARGO_BIN_EXE_cutstokes3f"))
        .args(["run", &cfg])
        .env("CUTSTOKES_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_3() {
    // too many unknowns for the dense singular value decomposition
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "big.cfg",
        "experiment.kind = condition\nmesh.levels = 60\nsweep.epsilons = 0.5\nsweep.gamma_sigmas = 0.1\n",
    );
    let out = cli(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.cfg", SMALL);
    let one = Command::new(env!("CARGO_BIN_EXE_cutstokes3f"))
        .args(["run", &cfg])
        .env("CUTSTOKES_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_cutstokes3f"))
        .args(["run", &cfg])
        .env("CUTSTOKES_THREADS", "3")
        .output()
        .unwrap();
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
}
