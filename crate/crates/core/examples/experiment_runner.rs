//! Driving the runner from code: a config with overrides, a small
//! convergence sweep and its records.

use bfdyn::runner::{cmd_converge, ExperimentConfig};

fn main() -> bfdyn::Result<()> {
    let mut cfg = ExperimentConfig::from_toml_str(
        r#"
        n_list = [2, 4, 8]
        time = 0.5
        bf_cap = 8
        "#,
    )?;
    cfg.set("tracer_mass", "2.0")?;
    cfg.out = std::env::temp_dir().join("bfdyn-runner-example");
    println!("config hash {}", cfg.hash());

    let outcome = cmd_converge(&cfg)?;
    println!("passed: {}", outcome.passed);
    let records = std::fs::read_to_string(cfg.out.join("records.jsonl"))?;
    for line in records.lines() {
        let v: serde_json::Value = serde_json::from_str(line)?;
        println!("{:<16} {}", v["kind"].as_str().unwrap_or(""), v["data"]);
    }
    Ok(())
}
