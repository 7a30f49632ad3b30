//! Switches off drift and sequence matching in turn and compares hit ratios.

use intentspace::evaluation::replay;
use intentspace::synthgen::{generate, Scenario};
use intentspace::EngineConfig;

fn main() -> intentspace::Result<()> {
    let full = EngineConfig::default();
    let mut fixed = full;
    fixed.store.drift = false;
    let mut context_only = full;
    context_only.predictor.sequence_matching = false;

    for s in [Scenario::GradualDrift, Scenario::BranchingSequence] {
        let (spec, drifts) = s.spec();
        let events = generate(&spec, &drifts)?;
        println!("{}:", s.name());
        for (label, cfg) in [("full", &full), ("no drift", &fixed), ("context only", &context_only)] {
            let r = replay(&events, cfg)?;
            println!("  {label:13} overall {:.3}, days 10-21 {:.3}", r.overall_hit_ratio, r.mean_ratio(10, 21));
        }
    }
    Ok(())
}
