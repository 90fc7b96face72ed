//! Load one of the shipped configs, shrink it, and run it in-process.
//!
//! ```text
//! cargo run --example run_config -- configs/constraint_check.json
//! ```

use std::path::PathBuf;
use taylor_lab::experiment::{run, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/constraint_check.json")
        });
    let mut cfg = RunConfig::load(&path)?;
    cfg.samples = cfg.samples.min(10);
    cfg.validate()?;

    let out = std::env::temp_dir().join(format!("taylor-lab-{}", cfg.kind.name()));
    let report = run(&cfg, &out)?;
    println!(
        "{} ({} checks), passed: {}",
        cfg.kind.name(),
        report.checks.len(),
        report.passed
    );
    for name in &report.artifacts {
        println!("  wrote {}", out.join(name).display());
    }
    Ok(())
}
