//! Prequential replay of a scenario; prints the per-day hit ratio curve.
//!
//! `cargo run --example replay_scenario -- sudden_shift`

use intentspace::evaluation::replay;
use intentspace::synthgen::{generate, scenario};
use intentspace::EngineConfig;

fn main() -> intentspace::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "gradual_drift".into());
    let (spec, drifts) = scenario(&name)?;
    let events = generate(&spec, &drifts)?;
    let report = replay(&events, &EngineConfig::default())?;
    println!("{name}: {} instances, overall hit ratio {:.3}", report.instances, report.overall_hit_ratio);
    for d in &report.per_day_hit_ratio {
        let bar = "#".repeat((d.ratio * 40.0).round() as usize);
        println!("day {:3} {:5.3} {:3} nodes |{bar}", d.day, d.ratio, d.live_nodes);
    }
    for (n, p) in &report.precision_at {
        println!("Precision@{n}: {p:.3} (conventional {:.3})", report.conventional_precision_at[n]);
    }
    Ok(())
}
