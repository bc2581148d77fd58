//! The `bfdyn` binary: exit codes, persistence and determinism.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bfdyn(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bfdyn")).args(args).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn records(dir: &Path) -> Vec<serde_json::Value> {
    fs::read_to_string(dir.join("records.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn list_prints_the_inventory() {
    let (code, out) = bfdyn(&["check", "--list"]);
    assert_eq!(code, 0);
    for name in ["u-unitary", "v-number", "w-total", "cubic-comm", "aaaa"] {
        assert!(out.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn default_check_passes_and_corruption_fails() {
    let dir = tempfile::tempdir().unwrap();
    let ok = dir.path().join("ok");
    assert_eq!(bfdyn(&["check", "--out", path(&ok), "--set", "samples=20"]).0, 0);
    assert!(records(&ok).iter().all(|r| r["config_hash"].is_string()));

    let table = dir.path().join("odd.txt");
    fs::write(&table, "# V(1) != V(-1)\n1 1.0 0\n-1 0.3 0\n").unwrap();
    let pot = format!("pair={}", path(&table));
    let rejected = dir.path().join("rejected");
    assert_eq!(bfdyn(&["check", "--out", path(&rejected), "--potential-file", &pot]).0, 2);
    let bad = dir.path().join("bad");
    let args = ["check", "--out", path(&bad), "--potential-file", &pot, "--set", "unchecked_potentials=true"];
    assert_eq!(bfdyn(&args).0, 1);
    let failed: Vec<_> = records(&bad)
        .into_iter()
        .filter(|r| r["kind"] == "identity" && r["data"]["passed"] == false)
        .map(|r| r["data"]["name"].as_str().unwrap().to_string())
        .collect();
    assert!(failed.iter().any(|n| n.starts_with("v-")), "{failed:?}");
}

#[test]
fn usage_errors() {
    assert_eq!(bfdyn(&["frobnicate"]).0, 2);
    assert_eq!(bfdyn(&["evolve", "--set", "dim=9"]).0, 2);
    assert_eq!(bfdyn(&["evolve", "--set", "no_such_key=1"]).0, 2);
    assert_eq!(bfdyn(&["evolve", "--config", "/nonexistent/config.toml"]).0, 2);
    assert_eq!(bfdyn(&["spectrum", "--preset", "lumpy"]).0, 2);
}

#[test]
fn evolve_free_model_is_constant_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let args = ["evolve", "--out", path(&out), "--preset", "zero", "--set", "flavor=\"aux\""];
        assert_eq!(bfdyn(&args).0, 0);
        out
    };
    let (a, b) = (run("a"), run("b"));
    assert_eq!(fs::read(a.join("records.jsonl")).unwrap(), fs::read(b.join("records.jsonl")).unwrap());
    let obs: Vec<_> = records(&a).into_iter().filter(|r| r["kind"] == "observables").collect();
    assert_eq!(obs.len(), 21);
    for o in &obs {
        assert!((o["data"]["alpha"].as_f64().unwrap() - 4.0).abs() < 1e-10);
        assert!((o["data"]["energy"].as_f64().unwrap() - obs[0]["data"]["energy"].as_f64().unwrap()).abs() < 1e-10);
    }
    let dat = fs::read_to_string(a.join("alpha_aux_N4.dat")).unwrap();
    assert_eq!(dat.lines().filter(|l| !l.starts_with('#')).count(), 21);
}

#[test]
fn full_and_aux_traces_differ_by_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    let mut last = Vec::new();
    for flavor in ["full", "aux"] {
        let out = dir.path().join(flavor);
        let f = format!("flavor=\"{flavor}\"");
        assert_eq!(bfdyn(&["evolve", "--out", path(&out), "--set", &f, "--set", "t_max=1.0"]).0, 0);
        let obs: Vec<_> = records(&out).into_iter().filter(|r| r["kind"] == "observables").collect();
        last.push(obs.last().unwrap()["data"]["alpha"].as_f64().unwrap());
    }
    assert_ne!(last[0], last[1]);
    assert!((last[0] - last[1]).abs() < 0.1);
}

#[test]
fn converge_persists_completed_cells_on_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("partial");
    let args = ["converge", "--out", path(&out), "--set", "n_list=[4, 8, 32]", "--set", "max_substeps=10"];
    assert_eq!(bfdyn(&args).0, 3);
    let recs = records(&out);
    let cells: Vec<u64> = recs.iter().filter(|r| r["kind"] == "cell").map(|r| r["data"]["n"].as_u64().unwrap()).collect();
    assert_eq!(cells, vec![4, 8]);
    assert!(recs.iter().any(|r| r["kind"] == "cell-failure" && r["data"]["n"] == 32));
}

#[test]
fn converge_at_time_zero_gives_a_zero_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero");
    assert_eq!(bfdyn(&["converge", "--out", path(&out), "--set", "time=0.0", "--set", "n_list=[2, 4]"]).0, 0);
    for r in records(&out).iter().filter(|r| r["kind"] == "cell") {
        assert_eq!(r["data"]["total"].as_f64().unwrap(), 0.0);
    }
    assert!(out.join("error_total.dat").exists());
}

#[test]
fn spectrum_from_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("experiment.toml");
    fs::write(&cfg, "pair_potential = \"gauss\"\nspectrum_caps = [2, 4, 6, 8]\n").unwrap();
    let out = dir.path().join("spectrum");
    assert_eq!(bfdyn(&["spectrum", "--config", path(&cfg), "--out", path(&out)]).0, 0);
    let r = &records(&out)[0];
    assert_eq!(r["kind"], "spectrum");
    assert!(r["data"]["max_deviation"].as_f64().unwrap() < 1e-6);
    assert!(out.join("spectrum.dat").exists());
    assert!(fs::read_to_string(out.join("config.toml")).unwrap().contains("gauss"));
}
