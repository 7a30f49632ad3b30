use chrono::{Duration, NaiveDate};
use proptest::prelude::*;

use intentspace::embedding::{embed, embed_time_of_day, euclidean_distance, EmbeddingConfig, RawContext};
use intentspace::evaluation::{conventional_precision_at_n, precision_at_n, Recommendation};
use intentspace::nodestore::{self, blend, NodeStore, StoreConfig};
use intentspace::seqmetric::{jaro, levenshtein, IntentId, IntentRegistry, IntentSequence, Winkler};

fn seq() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..6, 0..=12)
}

fn raw_at(minute: i64, lat: f64, lon: f64) -> RawContext {
    let t = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap()
        + Duration::minutes(minute);
    RawContext::new(t, lat, lon).unwrap()
}

proptest! {
    #[test]
    fn levenshtein_matches_oracle_and_is_a_metric(a in seq(), b in seq(), c in seq()) {
        let ab = levenshtein(&a, &b);
        prop_assert_eq!(ab, strsim::generic_levenshtein(&a, &b));
        prop_assert_eq!(ab, levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &a), 0);
        prop_assert!(ab <= a.len().max(b.len()));
        prop_assert!(ab >= a.len().abs_diff(b.len()));
        prop_assert!(levenshtein(&a, &c) <= ab + levenshtein(&b, &c));
    }

    #[test]
    fn jaro_matches_oracle_and_is_bounded(a in seq(), b in seq()) {
        let j = jaro(&a, &b);
        prop_assert!((0.0..=1.0).contains(&j));
        prop_assert!((j - jaro(&b, &a)).abs() < 1e-12);
        if !a.is_empty() && !b.is_empty() {
            prop_assert!((j - strsim::generic_jaro(&a, &b)).abs() < 1e-12);
            prop_assert_eq!(jaro(&a, &a), 1.0);
        }
    }

    #[test]
    fn winkler_boost_is_bounded_and_monotone(a in seq(), b in seq()) {
        let w = Winkler::default();
        let j = jaro(&a, &b);
        let jw = w.similarity(&a, &b);
        prop_assert!(jw >= j - 1e-15);
        prop_assert!(jw <= 1.0 + 1e-15);
        if j > 0.7 {
            prop_assert!((jw - strsim::generic_jaro_winkler(&a, &b)).abs() < 1e-12);
        }
    }

    #[test]
    fn time_embedding_is_on_the_circle(m in 0u32..1440) {
        let (s, c) = embed_time_of_day(m).unwrap();
        prop_assert!((s.hypot(c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_distance_is_symmetric(m1 in 0i64..20160, m2 in 0i64..20160, lat in 12.0f64..14.0, lon in 77.0f64..79.0) {
        let cfg = EmbeddingConfig::default();
        let a = embed(&raw_at(m1, lat, lon), &cfg).unwrap();
        let b = embed(&raw_at(m2, lat, lon), &cfg).unwrap();
        let d = euclidean_distance(&a, &b).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert_eq!(d, euclidean_distance(&b, &a).unwrap());
        // Time coordinates alone can never be further apart than two diameters.
        prop_assert!(d <= 2.0 * (cfg.day_radius().hypot(cfg.week_radius())) + 1e-9);
    }

    #[test]
    fn blend_stays_between_endpoints(old in prop::collection::vec(-5.0f64..5.0, 6), new in prop::collection::vec(-5.0f64..5.0, 6), w in 0.0f64..50.0) {
        let mid = blend(&old, &new, w);
        for ((o, n), m) in old.iter().zip(&new).zip(&mid) {
            prop_assert!(*m >= o.min(*n) - 1e-12 && *m <= o.max(*n) + 1e-12);
        }
    }

    #[test]
    fn store_nearest_matches_linear_scan(
        obs in prop::collection::vec((0i64..20160, 0u32..4, 0u32..5), 1..60),
        query in 0i64..20160,
        n in 1usize..8,
    ) {
        let mut store = NodeStore::new(EmbeddingConfig::default(), StoreConfig::default()).unwrap();
        let mut sorted = obs.clone();
        sorted.sort_by_key(|o| o.0);
        for (minute, intent, place) in sorted {
            let raw = raw_at(minute, 12.9 + f64::from(place) * 0.02, 77.6);
            let p = embed(&raw, store.embedding()).unwrap();
            store.observe(IntentId(intent), &p, &raw, &IntentSequence::empty(90), raw.day_index()).unwrap();
        }
        let q = embed(&raw_at(query, 12.95, 77.6), store.embedding()).unwrap();
        let got: Vec<u64> = store.nearest(&q, n).unwrap().into_iter().map(|x| x.0).collect();
        let mut all: Vec<_> = store.nodes().map(|node| {
            let d2: f64 = node.position.0.iter().zip(&q.0).map(|(x, y)| (x - y) * (x - y)).sum();
            (d2, node.weight, node.id)
        }).collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)).then(a.2.cmp(&b.2)));
        let want: Vec<u64> = all.into_iter().take(n).map(|x| x.2).collect();
        prop_assert_eq!(got, want);
        for node in store.nodes() {
            prop_assert!(node.weight >= 1.0);
        }
    }

    #[test]
    fn snapshot_round_trips(
        obs in prop::collection::vec((0i64..40000, 0u32..5, 0u32..3), 0..80),
        k in 0.4f64..=1.0,
    ) {
        let cfg = StoreConfig { decay_k: k, ..Default::default() };
        let mut store = NodeStore::new(EmbeddingConfig::default(), cfg).unwrap();
        let mut registry = IntentRegistry::new();
        for i in 0..5 {
            registry.intern(&format!("intent {i}"));
        }
        let mut sorted = obs.clone();
        sorted.sort_by_key(|o| o.0);
        let mut prev: Vec<IntentId> = Vec::new();
        for (minute, intent, place) in sorted {
            let raw = raw_at(minute, 12.9 + f64::from(place) * 0.05, 77.6);
            let p = embed(&raw, store.embedding()).unwrap();
            let recent = IntentSequence::new(prev.iter().rev().take(3).copied().collect(), 90);
            store.observe(IntentId(intent), &p, &raw, &recent, raw.day_index()).unwrap();
            prev.push(IntentId(intent));
        }
        let bytes = nodestore::snapshot(&store, &registry);
        let (back, reg) = nodestore::restore(&bytes).unwrap();
        prop_assert_eq!(reg.labels(), registry.labels());
        prop_assert_eq!(back.len(), store.len());
        for (a, b) in store.nodes().zip(back.nodes()) {
            prop_assert_eq!(a, b);
        }
        prop_assert_eq!(nodestore::snapshot(&back, &reg), bytes);
    }

    #[test]
    fn truncated_snapshots_are_rejected(cut in 0usize..200) {
        let store = NodeStore::new(EmbeddingConfig::default(), StoreConfig::default()).unwrap();
        let mut reg = IntentRegistry::new();
        reg.intern("Read News");
        let bytes = nodestore::snapshot(&store, &reg);
        let cut = cut.min(bytes.len() - 1);
        prop_assert!(nodestore::restore(&bytes[..cut]).is_err());
    }

    #[test]
    fn precision_is_monotone_in_n(
        users in prop::collection::vec(
            prop::collection::vec((prop::collection::vec(0u32..12, 0..10), 0u32..12), 0..6),
            1..5,
        ),
    ) {
        let recs: Vec<Vec<Recommendation>> = users.into_iter().map(|u| {
            u.into_iter().map(|(mut top, truth)| {
                top.dedup();
                Recommendation { top: top.into_iter().map(IntentId).collect(), truth: IntentId(truth) }
            }).collect()
        }).collect();
        let mut last = 0.0;
        for n in 1..=12 {
            let p = precision_at_n(&recs, n).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!(p >= last);
            prop_assert!(conventional_precision_at_n(&recs, n).unwrap() <= p + 1e-12);
            last = p;
        }
    }
}
