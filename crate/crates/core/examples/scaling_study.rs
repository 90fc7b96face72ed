//! Small scaling study driven through the experiment layer: remainder and
//! constraint-term sizes as ε shrinks.

use std::f64::consts::PI;
use taylor_lab::experiment::{run, ExperimentKind, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let json = format!(
        r#"{{"schema_version": 1, "kind": "scaling-study", "truncation": 32, "band": 4,
            "eps_sweep": [{}, {}, {}]}}"#,
        1.0 / (4.0 * PI),
        1.0 / (8.0 * PI),
        1.0 / (16.0 * PI)
    );
    let cfg = RunConfig::from_json(&json)?;
    assert_eq!(cfg.kind, ExperimentKind::ScalingStudy);
    let out = std::env::temp_dir().join("taylor-lab-scaling-example");
    let report = run(&cfg, &out)?;
    for c in &report.checks {
        println!(
            "{:<24} measured {:.3e}  threshold {:.3e}  {}",
            c.name,
            c.measured,
            c.threshold,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    println!("{}", std::fs::read_to_string(out.join("eps_scaling.csv"))?);
    Ok(())
}
