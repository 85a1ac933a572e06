use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("largediff-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_largediff"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn repeated_runs_write_identical_files() {
    let dir = scratch("repeat");
    let (a, b) = (dir.join("a"), dir.join("b"));
    for out in [&a, &b] {
        let o = run(&["spectrum", "--n", "32", "--eps-lo", "0.015625", "--seed", "5", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["spectrum_gap.csv", "projection.csv", "eigenspace.csv", "summary.txt"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let csv = fs::read_to_string(a.join("projection.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("eps,delta,error,flag"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 4);
    // 17 significant digits
    assert_eq!(first[1].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    let summary = fs::read_to_string(a.join("summary.txt")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.lines().all(|l| l.contains("alpha=") && l.contains("C=") && l.contains("R2=") && l.contains("pass=")));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_file_and_flags_combine() {
    let dir = scratch("config");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "# small run\nn = 32   # elements\nfamily = const\nslope_floor = 0.9\n").unwrap();
    let out = dir.join("out");
    let o = run(&["norm-ratio", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("norm_ratio.csv").exists());
    fs::write(&cfg, "n = 32\nfamily = f1\nslope_floor = 4\n").unwrap();
    let o = run(&["resolvent-rate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("resolvent"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = scratch("errors");
    let cfg = dir.join("bad.cfg");
    fs::write(&cfg, "n = 32\nfoo = 1\n").unwrap();
    let out = dir.join("out");
    let out_s = out.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["equilibria", "--config", cfg.to_str().unwrap(), "--out", out_s],
        vec!["equilibria", "--config", "/nonexistent/run.cfg", "--out", out_s],
        vec!["manifold", "--family", "f7", "--out", out_s],
        vec!["resolvent-rate", "--eps-hi", "0.1", "--eps-lo", "0.05", "--out", out_s],
        vec!["resolvent-rate", "--family", "f2", "--eps-hi", "1", "--n", "16", "--out", out_s],
        vec![],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    fs::remove_dir_all(&dir).unwrap();
}
