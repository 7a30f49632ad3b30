//! Learns a short routine with the engine and ranks intents for a query,
//! with and without a matching recent sequence.

use chrono::NaiveDate;
use intentspace::embedding::RawContext;
use intentspace::{Engine, EngineConfig};

fn main() -> intentspace::Result<()> {
    let mut engine = Engine::new(EngineConfig::default())?;
    let start = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
    let home = (12.97, 77.692);
    for day in 0..7u32 {
        let date = start + chrono::Duration::days(day.into());
        let routine = [("Check Mail", 7, 0), ("Read News", 7, 30), ("Commutes to Office", 8, 15)];
        for (intent, h, m) in routine {
            let raw = RawContext::new(date.and_hms_opt(h, m, 0).unwrap(), home.0, home.1)?;
            engine.learn(intent, &raw)?;
        }
    }

    let query = RawContext::new(
        NaiveDate::from_ymd_opt(2024, 1, 8).unwrap().and_hms_opt(7, 40, 0).unwrap(),
        home.0,
        home.1,
    )?;
    for (title, recent) in [
        ("no history", engine.recent(query.timestamp)?),
        ("after Check Mail", {
            let mut e = engine.clone();
            let at = query.timestamp - chrono::Duration::minutes(30);
            e.learn("Check Mail", &RawContext::new(at, home.0, home.1)?)?;
            e.recent(query.timestamp)?
        }),
    ] {
        let result = engine.predict_with(&query, &recent)?;
        println!("{title} (fallback: {}):", result.fallback_used);
        for r in &result.ranked {
            println!(
                "  {:20} spatial {:.4} seq {:.3} dist {:.4} w {:.3}",
                engine.label(r.intent)?,
                r.spatial_score,
                r.seq_similarity,
                r.distance,
                r.weight
            );
        }
    }
    Ok(())
}
