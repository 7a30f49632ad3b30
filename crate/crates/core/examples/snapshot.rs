//! Saves an engine to bytes, restores it and checks it answers identically.

use intentspace::evaluation::replay;
use intentspace::synthgen::{generate, Scenario};
use intentspace::{Engine, EngineConfig};

fn main() -> intentspace::Result<()> {
    let (spec, drifts) = Scenario::Steady.spec();
    let events = generate(&spec, &drifts)?;
    let config = EngineConfig::default();
    let report = replay(&events, &config)?;
    let engine = &report.users[0].engine;

    let bytes = engine.snapshot();
    println!("snapshot: {} bytes, {} nodes, {} intents", bytes.len(), engine.store().len(), engine.registry().len());
    let restored = Engine::from_snapshot(&bytes, config.predictor, config.window_minutes)?;
    assert_eq!(restored.snapshot(), bytes);

    // Same slot as the last Read News, one week on.
    let last = events.iter().rev().find(|e| e.intent == "Read News").unwrap();
    let mut query = last.raw()?;
    query.timestamp += chrono::Duration::days(7);
    let a = engine.predict(&query)?;
    let b = restored.predict(&query)?;
    let top = |r: &intentspace::PredictionResult, e: &Engine| r.top().map(|x| e.label(x).unwrap().to_owned());
    println!("top before: {:?}, after restore: {:?}", top(&a, engine), top(&b, &restored));
    Ok(())
}
