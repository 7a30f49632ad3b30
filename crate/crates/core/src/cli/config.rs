//! Flat TOML configuration. Every key is optional and falls back to the
//! library default; unknown keys are rejected.
//!
//! ```toml
//! geo_scale = 10.0
//! time_weight = 1.0
//! week_weight = 0.1
//! decay_k = 0.6
//! prune_threshold = 0.3
//! fusion_radius = 0.35
//! neighbor_count = 5        # store neighborhood and predictor k-NN
//! sequence_capacity = 8
//! decay_period = "daily"    # or "weekly"
//! drift = true
//! rebuild_fraction = 0.25
//! score_cutoff = 0.94
//! distance_epsilon = 1e-6
//! top_n = 10
//! sequence_matching = true
//! winkler_p = 0.1
//! prefix_cap = 4
//! window_minutes = 90
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::nodestore::DecayPeriod;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatConfig {
    pub geo_scale: Option<f64>,
    pub time_weight: Option<f64>,
    pub week_weight: Option<f64>,
    pub decay_k: Option<f64>,
    pub prune_threshold: Option<f64>,
    pub fusion_radius: Option<f64>,
    pub neighbor_count: Option<usize>,
    pub sequence_capacity: Option<usize>,
    pub decay_period: Option<DecayPeriod>,
    pub drift: Option<bool>,
    pub rebuild_fraction: Option<f64>,
    pub score_cutoff: Option<f64>,
    pub distance_epsilon: Option<f64>,
    pub top_n: Option<usize>,
    pub sequence_matching: Option<bool>,
    pub winkler_p: Option<f64>,
    pub prefix_cap: Option<usize>,
    pub window_minutes: Option<u32>,
}

impl FlatConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Overlays the set keys onto `base` and validates the result.
    pub fn apply(&self, base: EngineConfig) -> Result<EngineConfig> {
        let mut c = base;
        macro_rules! set {
            ($($key:ident => $($target:expr),+;)*) => {
                $(if let Some(v) = self.$key { $($target = v;)+ })*
            };
        }
        set! {
            geo_scale => c.embedding.geo_scale;
            time_weight => c.embedding.time_weight;
            week_weight => c.embedding.week_weight;
            decay_k => c.store.decay_k;
            prune_threshold => c.store.prune_threshold;
            fusion_radius => c.store.fusion_radius;
            neighbor_count => c.store.neighbor_count, c.predictor.neighbor_count;
            sequence_capacity => c.store.sequence_capacity;
            decay_period => c.store.decay_period;
            drift => c.store.drift;
            rebuild_fraction => c.store.rebuild_fraction;
            score_cutoff => c.predictor.score_cutoff;
            distance_epsilon => c.predictor.distance_epsilon;
            top_n => c.predictor.top_n;
            sequence_matching => c.predictor.sequence_matching;
            winkler_p => c.predictor.winkler_p;
            prefix_cap => c.predictor.prefix_cap;
            window_minutes => c.window_minutes;
        }
        c.validate()?;
        Ok(c)
    }
}
