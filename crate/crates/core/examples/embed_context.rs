//! Embeds a few contexts and prints their coordinates and distances.

use chrono::NaiveDate;
use intentspace::embedding::{embed, euclidean_distance, EmbeddingConfig, RawContext};

fn main() -> intentspace::Result<()> {
    let monday = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
    let at = |d: u32, h, m| (monday + chrono::Duration::days(d.into())).and_hms_opt(h, m, 0).unwrap();
    let cfg = EmbeddingConfig::default();

    let contexts = [
        ("Mon 08:14 home", RawContext::new(at(0, 8, 14), 12.97, 77.69)?),
        ("Tue 08:14 home", RawContext::new(at(1, 8, 14), 12.97, 77.69)?),
        ("Mon 23:59 home", RawContext::new(at(0, 23, 59), 12.97, 77.69)?),
        ("Tue 00:01 home", RawContext::new(at(1, 0, 1), 12.97, 77.69)?),
        ("Mon 08:14 office", RawContext::new(at(0, 8, 14), 13.01, 77.74)?),
    ];
    let vectors: Vec<_> = contexts
        .iter()
        .map(|(_, raw)| embed(raw, &cfg))
        .collect::<Result<_, _>>()?;
    for ((name, _), v) in contexts.iter().zip(&vectors) {
        println!("{name:18} {v}");
    }
    println!();
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let d = euclidean_distance(&vectors[i], &vectors[j])?;
            println!("{:18} <-> {:18} {d:.4}", contexts[i].0, contexts[j].0);
        }
    }
    Ok(())
}
