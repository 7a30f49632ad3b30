//! Sweeps the decay factor and the score cutoff on the noisy drift scenario.

use intentspace::evaluation::{sweep, ReplayOptions, SweepParam};
use intentspace::synthgen::{generate, Scenario};
use intentspace::EngineConfig;

fn main() -> intentspace::Result<()> {
    let (spec, drifts) = Scenario::OneOffNoise.spec();
    let events = generate(&spec, &drifts)?;
    let base = EngineConfig::default();
    let opts = ReplayOptions { jobs: 0 };

    let ks = [0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
    for (k, r) in sweep(&events, &base, SweepParam::DecayK, &ks, opts)? {
        println!("decay_k {k:.1}: {r:.3}");
    }
    let cs: Vec<f64> = (90..=99).map(|c| f64::from(c) / 100.0).collect();
    for (c, r) in sweep(&events, &base, SweepParam::CutoffC, &cs, opts)? {
        println!("cutoff_c {c:.2}: {r:.3}");
    }
    Ok(())
}
