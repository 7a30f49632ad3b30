//! Next-intent prediction over a [`NodeStore`].
//!
//! 1. fetch the `n` nearest nodes to the query position;
//! 2. score each with `tanh(w / d)`;
//! 3. keep nodes scoring at least the cutoff `c`;
//! 4. compare the recent intent sequence with each survivor's stored
//!    sequences (Jaro-Winkler, best match per node);
//! 5. rank survivors by sequence similarity.
//!
//! When nothing survives the cutoff the candidates are ranked by spatial
//! score alone and `fallback_used` is set.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::embedding::ContextVector;
use crate::error::{out_of_range, Error, Result};
use crate::nodestore::{IntentNode, NodeId, NodeStore};
use crate::seqmetric::{IntentId, IntentSequence, Winkler, DEFAULT_PREFIX_CAP, DEFAULT_WINKLER_P};

/// Similarity assigned when either side has no sequence to compare.
pub const NEUTRAL_SIMILARITY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictorConfig {
    pub neighbor_count: usize,
    pub score_cutoff: f64,
    pub distance_epsilon: f64,
    /// Length of the deduplicated intent list used for top-N metrics.
    pub top_n: usize,
    /// When false, ranking is by spatial score only (context-only pipeline).
    pub sequence_matching: bool,
    pub winkler_p: f64,
    pub prefix_cap: usize,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        Self {
            neighbor_count: 5,
            score_cutoff: 0.94,
            distance_epsilon: 1e-6,
            top_n: 10,
            sequence_matching: true,
            winkler_p: DEFAULT_WINKLER_P,
            prefix_cap: DEFAULT_PREFIX_CAP,
        }
    }
}

impl PredictorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.neighbor_count == 0 {
            return Err(Error::Config("neighbor_count must be >= 1".into()));
        }
        if !(self.score_cutoff > 0.0 && self.score_cutoff < 1.0) {
            return Err(Error::Config(format!(
                "score_cutoff must lie in (0, 1), got {}",
                self.score_cutoff
            )));
        }
        if !(self.distance_epsilon > 0.0 && self.distance_epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "distance_epsilon must be > 0, got {}",
                self.distance_epsilon
            )));
        }
        if self.top_n == 0 {
            return Err(Error::Config("top_n must be >= 1".into()));
        }
        self.winkler()?;
        Ok(())
    }

    pub fn winkler(&self) -> Result<Winkler> {
        Winkler::new(self.winkler_p, self.prefix_cap)
    }
}

/// `tanh(weight / max(distance, epsilon))`.
pub fn spatial_score(weight: f64, distance: f64, epsilon: f64) -> Result<f64> {
    if weight.is_nan() || weight <= 0.0 {
        return Err(out_of_range("node weight", weight));
    }
    Ok(spatial_ratio(weight, distance, epsilon).tanh())
}

/// The argument of the score's `tanh`; ranks identically and does not
/// saturate.
fn spatial_ratio(weight: f64, distance: f64, epsilon: f64) -> f64 {
    weight / distance.max(epsilon)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedIntent {
    pub intent: IntentId,
    pub node_id: NodeId,
    pub spatial_score: f64,
    pub seq_similarity: f64,
    pub distance: f64,
    pub weight: f64,
    /// Passed the score cutoff and was ranked by sequence similarity.
    pub survived: bool,
    ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionResult {
    /// Best first, one entry per intent.
    pub ranked: Vec<RankedIntent>,
    pub fallback_used: bool,
}

impl PredictionResult {
    pub fn top(&self) -> Option<IntentId> {
        self.ranked.first().map(|r| r.intent)
    }

    pub fn top_intents(&self, n: usize) -> Vec<IntentId> {
        self.ranked.iter().take(n).map(|r| r.intent).collect()
    }
}

/// Best Jaro-Winkler match between `recent` and the node's stored sequences.
pub fn sequence_similarity(node: &IntentNode, recent: &IntentSequence, winkler: &Winkler) -> f64 {
    if recent.is_empty() || node.sequences.is_empty() {
        return NEUTRAL_SIMILARITY;
    }
    node.sequences
        .iter()
        .map(|s| winkler.similarity(recent.as_slice(), s.as_slice()))
        .fold(0.0, f64::max)
}

fn by_spatial(a: &RankedIntent, b: &RankedIntent) -> Ordering {
    b.ratio
        .total_cmp(&a.ratio)
        .then_with(|| b.weight.total_cmp(&a.weight))
        .then(a.node_id.cmp(&b.node_id))
}

fn by_sequence(a: &RankedIntent, b: &RankedIntent) -> Ordering {
    b.seq_similarity
        .total_cmp(&a.seq_similarity)
        .then_with(|| by_spatial(a, b))
}

/// Scores candidate nodes and ranks them. `pool` holds `(node, distance)`
/// in spatial order; only the first `neighbor_count` enter the pipeline,
/// the rest only pad the top-N list.
pub(crate) fn rank_candidates<'a>(
    pool: impl IntoIterator<Item = (&'a IntentNode, f64)>,
    recent: &IntentSequence,
    cfg: &PredictorConfig,
) -> Result<PredictionResult> {
    let winkler = cfg.winkler()?;
    let mut candidates = Vec::new();
    let mut extras = Vec::new();
    for (i, (node, distance)) in pool.into_iter().enumerate() {
        let ratio = spatial_ratio(node.weight, distance, cfg.distance_epsilon);
        let spatial_score = ratio.tanh();
        let entry = RankedIntent {
            intent: node.intent,
            node_id: node.id,
            spatial_score,
            seq_similarity: sequence_similarity(node, recent, &winkler),
            distance,
            weight: node.weight,
            survived: false,
            ratio,
        };
        if i < cfg.neighbor_count {
            candidates.push(entry);
        } else {
            extras.push(entry);
        }
    }

    for c in &mut candidates {
        c.survived = c.spatial_score >= cfg.score_cutoff;
    }
    let (mut survivors, mut rest): (Vec<_>, Vec<_>) =
        candidates.into_iter().partition(|c| c.survived);
    let fallback_used = survivors.is_empty() && !rest.is_empty();
    if cfg.sequence_matching {
        survivors.sort_by(by_sequence);
    } else {
        survivors.sort_by(by_spatial);
    }
    rest.sort_by(by_spatial);
    extras.sort_by(by_spatial);

    let mut seen = HashSet::new();
    let ranked = survivors
        .into_iter()
        .chain(rest)
        .chain(extras)
        .filter(|r| seen.insert(r.intent))
        .collect();
    Ok(PredictionResult {
        ranked,
        fallback_used,
    })
}

/// Predicts the next intent at `query` given the intents that preceded it.
pub fn predict(
    store: &NodeStore,
    query: &ContextVector,
    recent: &IntentSequence,
    cfg: &PredictorConfig,
) -> Result<PredictionResult> {
    cfg.validate()?;
    let fetch = cfg.neighbor_count.max(cfg.top_n);
    let hits = store.nearest(query, fetch)?;
    let pool = hits.into_iter().map(|(id, d)| {
        (
            store.node(id).expect("nearest returns live nodes"),
            d,
        )
    });
    rank_candidates(pool, recent, cfg)
}
