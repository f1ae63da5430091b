//! End-to-end checks of the command-line front end: exit codes, CSV
//! shapes, and byte-level determinism of reruns.

use std::path::Path;
use std::process::Command;

fn relaxcat() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relaxcat"))
}

fn write_config(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn run_command_writes_csvs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "run.cfg",
        "case = XinJin-square\nscheme = catmood2_tay\nn_cells = 200\neps = 1\n",
    );
    let out1 = dir.path().join("out1");
    let out2 = dir.path().join("out2");
    for out in [&out1, &out2] {
        let status = relaxcat()
            .args(["run", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }

    let solution = std::fs::read_to_string(out1.join("solution.csv")).unwrap();
    let mut lines = solution.lines();
    assert_eq!(lines.next(), Some("x,u,v"));
    assert_eq!(lines.count(), 200);
    assert!(!solution.contains(' '));
    assert!(!solution.contains('\r'));

    let diags = std::fs::read_to_string(out1.join("diagnostics.csv")).unwrap();
    assert!(diags.starts_with("step,t,dt,cells_flagged_cad,cells_flagged_pad,cells_flagged_nad\n"));
    // The square wave with tight tolerances must fire the detectors.
    let fired: usize = diags
        .lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .skip(3)
                .map(|v| v.parse::<usize>().unwrap())
                .sum::<usize>()
        })
        .sum();
    assert!(fired > 0);

    let timing = std::fs::read_to_string(out1.join("timing.csv")).unwrap();
    assert!(timing.starts_with("repeat,seconds\n"));
    assert_eq!(timing.lines().count(), 2);

    // Reruns are byte identical for the deterministic outputs.
    for name in ["solution.csv", "diagnostics.csv"] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
}

#[test]
fn unknown_scheme_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.cfg",
        "case = XinJin-square\nscheme = cat9\n",
    );
    let output = relaxcat()
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("unknown scheme"), "stderr: {stderr}");
}

#[test]
fn unknown_case_and_key_exit_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "case.cfg",
        "case = NoSuchCase\nscheme = cat2_tay\n",
    );
    let output = relaxcat()
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    let config = write_config(dir.path(), "key.cfg", "caze = XinJin-square\n");
    let output = relaxcat()
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("unknown key"));
}

#[test]
fn convergence_command_emits_table() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let config = write_config(
        dir.path(),
        "conv.cfg",
        "case = XinJin-square\nschemes = cat2_tay, imex_rk2\ngrids = 50,100\neps_list = 1,1e-8\nreference_n = 400\n",
    );
    let out = dir.path().join("out");
    let status = relaxcat()
        .args(["convergence", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .env("RELAXCAT_CACHE_DIR", &cache)
        .status()
        .unwrap();
    assert!(status.success());
    let table = std::fs::read_to_string(out.join("convergence.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("scheme,eps,N,l1_error,eoc"));
    // 2 schemes x 2 eps x 2 grids.
    assert_eq!(lines.count(), 8);
    assert!(cache.is_dir(), "reference cache must be honored");
}

#[test]
fn stability_command_emits_region() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "stab.cfg",
        "schemes = cat2_trap, cat2_tay\nstability.a_values = 0.25, 0.5, 0.75\neps = 1e-14\nstability.k_samples = 16\nstability.mu_tol = 0.05\n",
    );
    let out = dir.path().join("out");
    let status = relaxcat()
        .args(["stability", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let table = std::fs::read_to_string(out.join("stability.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("a,eps,mu_max,scheme"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let mu: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!(mu > 0.0 && mu <= 1.6);
    }
}

#[test]
fn list_cases_names_the_registry() {
    let output = relaxcat().arg("list-cases").output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    for name in [
        "XinJin-smooth",
        "XinJin-square",
        "Broadwell-smooth",
        "Broadwell-RP1",
        "Broadwell-RP2",
        "EulerHeat-RP",
    ] {
        assert!(stdout.contains(name), "missing {name}");
    }
}

#[test]
fn seed_check_passes() {
    let output = relaxcat().arg("--seed-check").output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("0 failures"), "stdout: {stdout}");
}

#[test]
fn missing_command_is_a_config_error() {
    let output = relaxcat().output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}
