use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nscert_cli::{Overrides, RunConfig};

fn nscert(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_nscert"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const TG3: &str = "grid.n = 8\nscenario.id = \"taylor_green_3d\"\nrun.horizon = 0.02\n";

#[test]
fn simulate_writes_norms_multiplier_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = format!("{TG3}regularization.kind = \"leray\"\nregularization.epsilon = 0.3\nscheme.h = 0.005\n");
    let o = nscert(dir.path(), &cfg, &["simulate", "--out", out.to_str().unwrap(), "--snapshot-every", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let norms = fs::read_to_string(out.join("norms.csv")).unwrap();
    assert!(norms.starts_with("t,linf,l2,grad_l2\n"));
    assert_eq!(norms.lines().count(), 1 + 5);
    assert!(fs::read_to_string(out.join("multiplier.csv")).unwrap().starts_with("k,multiplier\n"));
    let snaps = fs::read_dir(out.join("snapshots")).unwrap().count();
    assert_eq!(snaps, 3);
    assert!(out.join("final.nscf").exists());
}

#[test]
fn certification_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = format!("{TG3}regularization.kind = \"projection\"\nregularization.epsilon = 0.5\n");
    let o = nscert(dir.path(), &cfg, &["certify-global", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("fail: epsilon <= threshold"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("global.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn configuration_errors_exit_two_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (format!("{TG3}regularization.kind = \"leray\"\n"), "regularization.epsilon"),
        (format!("{TG3}regularization.kind = \"none\"\ngrid.nn = 3\n"), "grid.nn"),
        (format!("{TG3}regularization.kind = \"none\"\nscheme.h = \"fast\"\n"), "scheme.h"),
        (format!("{TG3}regularization.kind = \"leray\"\nregularization.epsilon = -1.0\n"), "regularization.epsilon"),
        ("grid.n = 8\nscenario.id = \"vortex\"\n".to_string(), "scenario.id"),
    ];
    for (cfg, key) in cases {
        let o = nscert(dir.path(), &cfg, &["simulate", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{key}");
        assert!(stderr(&o).contains(&format!("`{key}`")), "{key}: {}", stderr(&o));
    }
}

#[test]
fn blow_up_exits_three_with_last_valid_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // An oversized step on strong data drives the state out of range.
    let cfg = "grid.n = 16\nscenario.id = \"random\"\nscenario.amplitude = 200.0\nregularization.kind = \"none\"\n\
               run.horizon = 1.0\nscheme.h = 0.05\nscheme.cfl_factor = 1000.0\n";
    let o = nscert(dir.path(), cfg, &["simulate", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("after t = 0.05"), "{}", stderr(&o));
    // Norms up to the last valid time are still written.
    assert_eq!(fs::read_to_string(out.join("norms.csv")).unwrap().lines().count(), 3);
}

#[test]
fn io_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let cfg = format!("{TG3}regularization.kind = \"none\"\n");
    let o = nscert(dir.path(), &cfg, &["simulate", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let o = Command::new(env!("CARGO_BIN_EXE_nscert"))
        .args(["simulate", "--config", dir.path().join("missing.toml").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn diagnose_calibrate_and_batch_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = format!(
        "{TG3}regularization.kind = \"leray\"\nregularization.epsilon = 0.3\n\
         calibrate.scenarios = [\"taylor_green_3d\"]\n\
         batch.scenarios = [\"taylor_green_3d\", \"random_1\"]\nbatch.verbs = [\"simulate\", \"diagnose\"]\n"
    );
    let o = nscert(dir.path(), &cfg, &["calibrate", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let k: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("bound_constants.json")).unwrap()).unwrap();
    assert!(k["gradient"].as_f64().unwrap() > 0.0);

    let cfg = format!("{cfg}diagnostics.constants = \"out/bound_constants.json\"\n");
    let o = nscert(dir.path(), &cfg, &["diagnose", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["diagnostics.json", "diagnostics_gradient.csv", "diagnostics_duhamel.csv", "diagnostics_decay.csv"] {
        assert!(out.join(name).exists(), "{name}");
    }

    let o = nscert(dir.path(), &cfg, &["batch", "--out", out.to_str().unwrap()]);
    let rows: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("batch.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 4);
    assert!(out.join("random_1").join("norms.csv").exists());
    let worst = rows.as_array().unwrap().iter().map(|r| r["status"].as_i64().unwrap()).max().unwrap();
    assert_eq!(o.status.code(), Some(worst as i32));
}

#[test]
fn overrides_take_precedence() {
    let text = "grid.n = 8\nscenario.id = \"random\"\nscenario.seed = 3\nregularization.kind = \"none\"\n\
                run.horizon = 0.1\noutput.dir = \"runs\"\noutput.snapshot_every = 7\n";
    let base = Path::new("/data");
    let plain = RunConfig::parse(text, base, &Overrides::default()).unwrap();
    assert_eq!(plain.scenario.name(), "random_3");
    // Output paths are relative to the working directory, not the config.
    assert_eq!(plain.out_dir, Path::new("runs"));
    assert_eq!(plain.snapshot_every, 7);
    let ov = Overrides { out: Some("/tmp/x".into()), seed: Some(11), snapshot_every: Some(2) };
    let over = RunConfig::parse(text, base, &ov).unwrap();
    assert_eq!(over.scenario.name(), "random_11");
    assert_eq!(over.out_dir, Path::new("/tmp/x"));
    assert_eq!(over.snapshot_every, 2);
}
