//! End-to-end checks of the `ntlab` binary: exit codes, persistence,
//! idempotent sweeps and the CSV contract.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ntlab"))
}

fn tmp_dir(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("ntlab-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&p);
    fs::create_dir_all(&p).unwrap();
    p
}

#[test]
fn single_point_mean_prints_split_and_persists() {
    let dir = tmp_dir("single");
    let out = dir.join("records.jsonl");
    let run = bin()
        .args(["mean", "--d", "2", "--x", "1e3", "--y", "100", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        run.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("S1 ="));
    assert!(stdout.contains("ratio ="));

    let csv = fs::read_to_string(dir.join("records.csv")).unwrap();
    assert!(csv.starts_with("command,d,x,y,S,S1,S2,main_term,abs_error,envelope,ratio"));
    assert!(csv.lines().nth(1).unwrap().starts_with("mean,2,1000,100,"));

    // A second identical invocation leaves the record store untouched.
    let before = fs::read(&out).unwrap();
    let run = bin()
        .args(["mean", "--d", "2", "--x", "1e3", "--y", "100", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(run.status.success());
    assert_eq!(fs::read(&out).unwrap(), before);
}

#[test]
fn sweep_is_cached_and_idempotent() {
    let dir = tmp_dir("sweep");
    let cfg = dir.join("sweep.cfg");
    fs::write(&cfg, "# grid\n[mean]\nd = 2\nx = 3e2, 4e2\ny = 30, 40\n").unwrap();
    let out = dir.join("records.jsonl");

    let run = bin()
        .arg("mean")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        run.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("executed 4 point(s), 0 cached"));
    let first = fs::read(&out).unwrap();
    assert_eq!(first.iter().filter(|&&b| b == b'\n').count(), 4);

    let run = bin()
        .arg("mean")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(run.status.success());
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("executed 0 point(s), 4 cached"));
    assert_eq!(
        fs::read(&out).unwrap(),
        first,
        "re-run must leave the file identical"
    );
}

#[test]
fn cache_flag_borrows_keys_from_another_store() {
    let dir = tmp_dir("cache");
    let cfg = dir.join("sweep.cfg");
    fs::write(&cfg, "[mean]\nd = 2\nx = 3e2\ny = 30\n").unwrap();
    let warm = dir.join("warm.jsonl");
    let out = dir.join("fresh.jsonl");

    let run = bin()
        .arg("mean")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&warm)
        .output()
        .unwrap();
    assert!(run.status.success());

    let run = bin()
        .arg("mean")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--cache")
        .arg(&warm)
        .output()
        .unwrap();
    assert!(run.status.success());
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("executed 0 point(s), 1 cached"));
    assert!(!out.exists() || fs::read_to_string(&out).unwrap().is_empty());
}

#[test]
fn config_errors_exit_2() {
    let dir = tmp_dir("bad");
    let cfg = dir.join("bad.cfg");
    fs::write(&cfg, "[mean]\nx 100\n").unwrap();
    let run = bin()
        .arg("mean")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(
        stderr.contains("line 2"),
        "error must name the offending line: {stderr}"
    );

    // Unknown command.
    let run = bin().arg("frobnicate").output().unwrap();
    assert_eq!(run.status.code(), Some(2));

    // Config without the requested section.
    fs::write(&cfg, "[jutila]\nx = 50\ny = 50\n").unwrap();
    let run = bin()
        .arg("mean")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(2));

    // Bad single-point parameter values are config errors too.
    let run = bin()
        .args(["mean", "--x", "500", "--y", "1"])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn verify_commands_succeed_on_honest_mathematics() {
    let run = bin().args(["polya-verify", "--x", "120"]).output().unwrap();
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("worst_ratio"));

    let run = bin()
        .args([
            "poisson-verify",
            "--k",
            "3",
            "--x",
            "200",
            "--z",
            "1",
            "--U",
            "8",
        ])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0));

    let run = bin()
        .args(["gauss-verify", "--k", "99", "--m", "10"])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0));
}

#[test]
fn smooth_mean_accepts_capital_y_alias() {
    let run = bin()
        .args(["smooth-mean", "--x", "300", "--Y", "32"])
        .output()
        .unwrap();
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("S21"));
    assert!(stdout.contains("main_term"));
}
