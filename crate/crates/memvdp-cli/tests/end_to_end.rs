//! Drives the compiled binary the way a user would.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_memvdp"))
}

fn small_model_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(
        &path,
        "schema_version = 1\nkind = \"model-sim\"\n\
         [model]\nt_s = 600.0\nt_end = 1200.0\n",
    )
    .unwrap();
    path
}

#[test]
fn iv_sweep_writes_the_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("iv_out");
    let status = bin().args(["iv-sweep", "--out"]).arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    for f in ["iv.csv", "summary.json", "resolved_config.toml"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["set_events"], 1);
    assert_eq!(summary["reset_events"], 1);
    assert_eq!(summary["final_state"], "hrs");
}

#[test]
fn model_run_then_reanalysis_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_model_config(dir.path());
    let out = dir.path().join("run");
    let status = bin()
        .args(["simulate-model", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let trace = out.join("trace.csv");
    assert!(trace.is_file());

    let out2 = dir.path().join("reanalysis");
    let status = bin()
        .arg("analyze")
        .arg(&trace)
        .arg("--out")
        .arg(&out2)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out2.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["trace_kind"], "model");
    let run_summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap())
            .unwrap();
    // Same trace, same detector: identical spike counts.
    assert_eq!(summary["spike_counts"], run_summary["spike_counts"]);
}

#[test]
fn identical_configs_give_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_model_config(dir.path());
    let run = |out: &Path| {
        let status = bin()
            .args(["simulate-model", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&a);
    run(&b);
    for f in ["trace.csv", "spikes1.csv", "spikes2.csv", "summary.json", "resolved_config.toml"] {
        let fa = std::fs::read(a.join(f)).unwrap();
        let fb = std::fs::read(b.join(f)).unwrap();
        assert_eq!(fa, fb, "{f} differs between identical runs");
    }
}

#[test]
fn json_format_swaps_the_trace_container() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_model_config(dir.path());
    let out = dir.path().join("json_run");
    let status = bin()
        .args(["simulate-model", "--format", "json", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("trace.json").is_file());
    assert!(!out.join("trace.csv").exists());
    let rows: Vec<[f64; 6]> =
        serde_json::from_str(&std::fs::read_to_string(out.join("trace.json")).unwrap()).unwrap();
    assert!(!rows.is_empty());
    assert_eq!(rows[0][1], 0.1);
}

#[test]
fn invalid_config_exits_with_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        "schema_version = 1\nkind = \"model-sim\"\n[model]\nalpha1 = -3.0\n",
    )
    .unwrap();
    let out = bin()
        .args(["simulate-model", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("alpha1"), "{stderr}");
}

#[test]
fn unreadable_trace_exits_with_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("garbage.csv");
    std::fs::write(&trace, "nonsense,header\n1,2\n").unwrap();
    let out = bin()
        .arg("analyze")
        .arg(&trace)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_output_parent_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "").unwrap();
    // A file where a directory is needed makes create_dir_all fail.
    let out = bin()
        .args(["iv-sweep", "--out"])
        .arg(blocker.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn divergent_model_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("divergent.toml");
    // A huge step on a stiff relaxation cycle overflows the state.
    std::fs::write(
        &cfg,
        "schema_version = 1\nkind = \"model-sim\"\n[model]\nt_end = 100.0\ndt = 2.0\n",
    )
    .unwrap();
    let out = bin()
        .args(["simulate-model", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
