use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_echo-lattice"));
    c.env_remove("ECHO_LATTICE_OUT");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

const CUSTOM: &str = r#"
[params]
xi = 100.0
epsilon = 0.05
k_trunc = 4

[lattice]
scenario = "custom"
t_start = 0.0
t_end = 20.0
mode = 0
record_uniform = 20
spill_limit = 1.0
"#;

#[test]
fn toy_passes() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["toy", "--out", "out"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(text(&o).contains("PASS"));
    assert!(d.path().join("out/manifest.json").exists());
    assert!(d.path().join("out/toy.csv").exists());
}

#[test]
fn bad_config_reports_position() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("bad.toml"), "[params]\nalpha = 1.0\nbogus = 3\n").unwrap();
    let o = run(&["toy", "--config", "bad.toml", "--out", "out"], d.path());
    assert_eq!(o.status.code(), Some(1));
    let t = text(&o);
    assert!(t.contains("line 3"), "{t}");
    assert!(t.contains("column"), "{t}");
}

#[test]
fn failed_verdict_exits_two() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("c.toml"), "[toy]\nexponent_margin = -0.5\n").unwrap();
    let o = run(&["toy", "--config", "c.toml", "--out", "out"], d.path());
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
    assert!(text(&o).contains("FAIL"));
    let o = run(&["toy", "--config", "c.toml", "--out", "out", "--verdicts", "off"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
}

#[test]
fn env_overrides_out() {
    let d = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["toy", "--out", "ignored"])
        .env("ECHO_LATTICE_OUT", d.path().join("env-out"))
        .current_dir(d.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(d.path().join("env-out/manifest.json").exists());
    assert!(!d.path().join("ignored").exists());
}

#[test]
fn fixed_step_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("c.toml"), CUSTOM).unwrap();
    for out in ["a", "b"] {
        let o = run(&["lattice", "--config", "c.toml", "--out", out, "--fixed-step", "0.01"], d.path());
        assert_ne!(o.status.code(), Some(1), "{}", text(&o));
    }
    let a = std::fs::read(d.path().join("a/records.csv")).unwrap();
    let b = std::fs::read(d.path().join("b/records.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn sweep_writes_every_cell() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(
        d.path().join("s.toml"),
        "[sweep]\ncell = \"bounds\"\nepsilons = [0.01, 0.02]\nsigmas = [2.0, 3.0]\n",
    )
    .unwrap();
    let o = run(&["sweep", "--config", "s.toml", "--out", "out", "--jobs", "2"], d.path());
    assert_ne!(o.status.code(), Some(1), "{}", text(&o));
    let out = d.path().join("out");
    let cells: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with("cell-"))
        .collect();
    assert_eq!(cells.len(), 4);
    for c in &cells {
        assert!(c.path().join("manifest.json").exists());
    }
    assert!(out.join("aggregate.csv").exists());
    assert!(out.join("aggregate.json").exists());
    assert!(out.join("manifest.json").exists());
}
