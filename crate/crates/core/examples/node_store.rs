//! Feeds a drifting commute into a node store and shows fusion, drift,
//! decay and pruning day by day.

use chrono::NaiveDate;
use intentspace::embedding::{embed, EmbeddingConfig, RawContext};
use intentspace::nodestore::{NodeStore, StoreConfig};
use intentspace::seqmetric::{IntentId, IntentSequence};

fn main() -> intentspace::Result<()> {
    let cfg = StoreConfig::default();
    let mut store = NodeStore::new(EmbeddingConfig::default(), cfg)?;
    let start = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
    let commute = IntentId(0);
    let news = IntentId(1);

    for day in 0..10u32 {
        let date = start + chrono::Duration::days(day.into());
        // The commute slips five minutes later each day.
        let t = date.and_hms_opt(9, 0, 0).unwrap() + chrono::Duration::minutes(5 * i64::from(day));
        let raw = RawContext::new(t, 12.97, 77.69)?;
        let p = embed(&raw, store.embedding())?;
        let (id, what) = store.observe(commute, &p, &raw, &IntentSequence::empty(90), raw.day_index())?;
        if day < 2 {
            // A news habit that stops after two days and is eventually pruned.
            let raw = RawContext::new(date.and_hms_opt(20, 0, 0).unwrap(), 12.97, 77.69)?;
            let p = embed(&raw, store.embedding())?;
            store.observe(news, &p, &raw, &IntentSequence::empty(90), raw.day_index())?;
        }
        let node = store.node(id).unwrap();
        println!(
            "day {day}: observed {} -> node {id} {what:?}, weight {:.3}, centroid {:.1} min, live nodes {}",
            t.time(),
            node.weight,
            node.raw.minutes_of_day,
            store.len()
        );
    }
    Ok(())
}
