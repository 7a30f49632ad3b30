//! The vector space of weighted intent nodes.
//!
//! Every observed event either creates a node or fuses into the nearest live
//! node of the same intent within `fusion_radius`. Fusion decays the old
//! weight by `k^d` and adds one, and drags the node's position toward the new
//! observation by a weight-proportional running average. Nodes in the touched
//! neighborhood whose decayed weight falls below `prune_threshold` are
//! dropped.

mod kdtree;
mod snapshot;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

pub use self::kdtree::{KdTree, SearchStats};
pub use self::snapshot::{restore, snapshot, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};

use crate::embedding::{
    pair_to_fraction, reproject_pair, ContextVector, EmbeddingConfig, RawContext, DAY_COS,
    DAY_SIN, LAT, LON, MINUTES_PER_DAY, MINUTES_PER_WEEK, WEEK_COS, WEEK_SIN,
};
use crate::error::{Error, Result};
use crate::seqmetric::{IntentId, IntentSequence};

pub type NodeId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayPeriod {
    Daily,
    Weekly,
}

impl DecayPeriod {
    /// Whole decay periods between two day indices.
    pub fn elapsed(self, from_day: i64, to_day: i64) -> u32 {
        let days = (to_day - from_day).max(0);
        let periods = match self {
            DecayPeriod::Daily => days,
            DecayPeriod::Weekly => days / 7,
        };
        u32::try_from(periods).unwrap_or(u32::MAX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoreConfig {
    pub decay_k: f64,
    pub prune_threshold: f64,
    pub fusion_radius: f64,
    pub neighbor_count: usize,
    pub sequence_capacity: usize,
    pub decay_period: DecayPeriod,
    /// Apply the running-average relocation on fusion.
    pub drift: bool,
    /// Rebuild the index once tombstones exceed this fraction of live nodes.
    pub rebuild_fraction: f64,
}

impl Default for StoreConfig {
    fn default() -> Self {
        Self {
            decay_k: 0.6,
            prune_threshold: 0.3,
            fusion_radius: 0.35,
            neighbor_count: 5,
            sequence_capacity: 8,
            decay_period: DecayPeriod::Daily,
            drift: true,
            rebuild_fraction: 0.25,
        }
    }
}

impl StoreConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(0.4..=1.0).contains(&self.decay_k) {
            return fail(format!("decay_k must lie in [0.4, 1], got {}", self.decay_k));
        }
        if !(self.prune_threshold >= 0.0 && self.prune_threshold.is_finite()) {
            return fail(format!("prune_threshold must be >= 0, got {}", self.prune_threshold));
        }
        if !(self.fusion_radius > 0.0 && self.fusion_radius.is_finite()) {
            return fail(format!("fusion_radius must be > 0, got {}", self.fusion_radius));
        }
        if self.neighbor_count == 0 {
            return fail("neighbor_count must be >= 1".into());
        }
        if self.sequence_capacity == 0 {
            return fail("sequence_capacity must be >= 1".into());
        }
        if !(self.rebuild_fraction > 0.0 && self.rebuild_fraction.is_finite()) {
            return fail(format!("rebuild_fraction must be > 0, got {}", self.rebuild_fraction));
        }
        Ok(())
    }
}

/// Weight-averaged raw features, kept for human-readable reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawCentroid {
    pub minutes_of_day: f64,
    pub minutes_of_week: f64,
    pub latitude: f64,
    pub longitude: f64,
}

impl RawCentroid {
    fn from_raw(raw: &RawContext) -> Self {
        Self {
            minutes_of_day: f64::from(raw.minute_of_day()),
            minutes_of_week: f64::from(raw.minute_of_week()),
            latitude: raw.latitude,
            longitude: raw.longitude,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntentNode {
    pub id: NodeId,
    pub intent: IntentId,
    pub position: ContextVector,
    pub weight: f64,
    pub last_touch_day: i64,
    pub sequences: VecDeque<IntentSequence>,
    pub raw: RawCentroid,
}

impl IntentNode {
    /// Weight after passive aging to `day`, without the fusion increment.
    pub fn effective_weight(&self, k: f64, period: DecayPeriod, day: i64) -> f64 {
        k.powi(period.elapsed(self.last_touch_day, day) as i32) * self.weight
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {
    Created,
    Fused,
}

/// `k^d * w_old + 1`.
pub fn decay_weight(w_old: f64, k: f64, d: u32) -> f64 {
    k.powi(d as i32) * w_old + 1.0
}

/// Per-coordinate running average `(old * w + new) / (w + 1)`.
pub fn blend(old: &[f64], new: &[f64], weight: f64) -> Vec<f64> {
    old.iter()
        .zip(new)
        .map(|(o, n)| (o * weight + n) / (weight + 1.0))
        .collect()
}

/// Moves `node` toward an observation at `position`, using the node's
/// current (pre-increment) weight. Cyclic pairs are pulled back onto their
/// circles; a pair that averages to the origin keeps its previous angle.
pub fn drift_node(
    node: &mut IntentNode,
    raw: &RawContext,
    position: &ContextVector,
    embedding: &EmbeddingConfig,
) {
    let w = node.weight;
    let old = node.position.0.clone();
    let mut moved = blend(&old, &position.0, w);
    for (s, c, radius) in [
        (DAY_SIN, DAY_COS, embedding.day_radius()),
        (WEEK_SIN, WEEK_COS, embedding.week_radius()),
    ] {
        match reproject_pair(moved[s], moved[c], radius) {
            Some((ps, pc)) => {
                moved[s] = ps;
                moved[c] = pc;
            }
            None => {
                moved[s] = old[s];
                moved[c] = old[c];
            }
        }
    }
    node.raw.minutes_of_day =
        pair_to_fraction(moved[DAY_SIN], moved[DAY_COS]) * f64::from(MINUTES_PER_DAY);
    node.raw.minutes_of_week =
        pair_to_fraction(moved[WEEK_SIN], moved[WEEK_COS]) * f64::from(MINUTES_PER_WEEK);
    node.raw.latitude = (node.raw.latitude * w + raw.latitude) / (w + 1.0);
    node.raw.longitude = (node.raw.longitude * w + raw.longitude) / (w + 1.0);
    debug_assert!(moved[LAT].is_finite() && moved[LON].is_finite());
    node.position = ContextVector(moved);
}

/// Orders `f64` weights so that the heavier node sorts first.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Heavier(f64);

impl Eq for Heavier {}

impl PartialOrd for Heavier {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Heavier {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.0.total_cmp(&self.0)
    }
}

/// Live intent nodes plus the spatial index over their positions.
#[derive(Debug, Clone)]
pub struct NodeStore {
    embedding: EmbeddingConfig,
    config: StoreConfig,
    nodes: BTreeMap<NodeId, IntentNode>,
    index: KdTree,
    current_day: Option<i64>,
    next_id: NodeId,
}

impl NodeStore {
    pub fn new(embedding: EmbeddingConfig, config: StoreConfig) -> Result<Self> {
        embedding.validate()?;
        config.validate()?;
        Ok(Self {
            index: KdTree::new(embedding.dims),
            embedding,
            config,
            nodes: BTreeMap::new(),
            current_day: None,
            next_id: 0,
        })
    }

    pub fn embedding(&self) -> &EmbeddingConfig {
        &self.embedding
    }

    pub fn config(&self) -> &StoreConfig {
        &self.config
    }

    pub fn dims(&self) -> usize {
        self.embedding.dims
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn current_day(&self) -> Option<i64> {
        self.current_day
    }

    pub fn node(&self, id: NodeId) -> Option<&IntentNode> {
        self.nodes.get(&id)
    }

    /// Live nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &IntentNode> {
        self.nodes.values()
    }

    pub fn tombstones(&self) -> usize {
        self.index.tombstones()
    }

    fn check_dims(&self, v: &ContextVector) -> Result<()> {
        if v.dims() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                got: v.dims(),
            });
        }
        Ok(())
    }

    /// Learns one event: fuses it into the nearest same-intent node within
    /// the fusion radius or creates a new node, then prunes the neighborhood.
    pub fn observe(
        &mut self,
        intent: IntentId,
        position: &ContextVector,
        raw: &RawContext,
        preceding: &IntentSequence,
        day: i64,
    ) -> Result<(NodeId, Observation)> {
        self.check_dims(position)?;
        if !position.is_finite() {
            return Err(Error::Config("position has non-finite coordinates".into()));
        }
        if let Some(current) = self.current_day {
            if day < current {
                return Err(Error::Unordered(format!(
                    "observation on day {day} after day {current}"
                )));
            }
        }
        let target = self
            .index
            .within(&position.0, self.config.fusion_radius)
            .into_iter()
            .filter(|(id, _)| self.nodes[id].intent == intent)
            .min_by(|a, b| {
                a.1.total_cmp(&b.1)
                    .then_with(|| Heavier(self.nodes[&a.0].weight).cmp(&Heavier(self.nodes[&b.0].weight)))
                    .then(a.0.cmp(&b.0))
            })
            .map(|(id, _)| id);

        let cfg = self.config;
        let (id, outcome) = match target {
            Some(id) => {
                let embedding = self.embedding;
                let node = self.nodes.get_mut(&id).expect("indexed node is live");
                if cfg.drift {
                    drift_node(node, raw, position, &embedding);
                }
                let d = cfg.decay_period.elapsed(node.last_touch_day, day);
                node.weight = decay_weight(node.weight, cfg.decay_k, d);
                node.last_touch_day = day;
                if node.sequences.len() == cfg.sequence_capacity {
                    node.sequences.pop_front();
                }
                node.sequences.push_back(preceding.clone());
                if cfg.drift {
                    let moved = node.position.0.clone();
                    self.index.insert(id, &moved);
                }
                (id, Observation::Fused)
            }
            None => {
                let id = self.next_id;
                self.next_id += 1;
                let node = IntentNode {
                    id,
                    intent,
                    position: position.clone(),
                    weight: 1.0,
                    last_touch_day: day,
                    sequences: VecDeque::from([preceding.clone()]),
                    raw: RawCentroid::from_raw(raw),
                };
                self.index.insert(id, &position.0);
                self.nodes.insert(id, node);
                (id, Observation::Created)
            }
        };
        self.current_day = Some(day);
        self.prune_around(position, day, Some(id));
        Ok((id, outcome))
    }

    /// The `n` live nodes closest to `query`, ascending by distance; ties go
    /// to the heavier node, then the older one.
    pub fn nearest(&self, query: &ContextVector, n: usize) -> Result<Vec<(NodeId, f64)>> {
        Ok(self.nearest_with_stats(query, n)?.0)
    }

    pub fn nearest_with_stats(
        &self,
        query: &ContextVector,
        n: usize,
    ) -> Result<(Vec<(NodeId, f64)>, SearchStats)> {
        self.check_dims(query)?;
        Ok(self
            .index
            .nearest(&query.0, n, |id| Heavier(self.nodes[&id].weight)))
    }

    /// Removes stale nodes among the neighbors of `around`. Returns how many
    /// were removed.
    pub fn prune_neighborhood(&mut self, around: &ContextVector, day: i64) -> Result<usize> {
        self.check_dims(around)?;
        Ok(self.prune_around(around, day, None))
    }

    fn prune_around(&mut self, around: &ContextVector, day: i64, keep: Option<NodeId>) -> usize {
        let mut hood: BTreeSet<NodeId> = self
            .index
            .nearest(&around.0, self.config.neighbor_count, |id| {
                Heavier(self.nodes[&id].weight)
            })
            .0
            .into_iter()
            .map(|(id, _)| id)
            .collect();
        hood.extend(
            self.index
                .within(&around.0, self.config.fusion_radius)
                .into_iter()
                .map(|(id, _)| id),
        );
        if let Some(k) = keep {
            hood.remove(&k);
        }
        self.prune_ids(hood, day)
    }

    /// Sweeps every live node.
    pub fn prune_all(&mut self, day: i64) -> usize {
        let ids: Vec<NodeId> = self.nodes.keys().copied().collect();
        self.prune_ids(ids, day)
    }

    fn prune_ids(&mut self, ids: impl IntoIterator<Item = NodeId>, day: i64) -> usize {
        let StoreConfig {
            decay_k,
            decay_period,
            prune_threshold,
            ..
        } = self.config;
        let mut removed = 0;
        for id in ids {
            let stale = self.nodes.get(&id).is_some_and(|n| {
                n.effective_weight(decay_k, decay_period, day) < prune_threshold
            });
            if stale {
                self.nodes.remove(&id);
                self.index.remove(id);
                removed += 1;
            }
        }
        if removed > 0 {
            self.maybe_rebuild();
        }
        removed
    }

    fn maybe_rebuild(&mut self) {
        let live = self.index.len() as f64;
        if self.index.tombstones() as f64 > self.config.rebuild_fraction * live.max(1.0) {
            self.index.rebuild();
        }
    }

    /// Reassembles a store from decoded parts and rebuilds the index.
    pub(crate) fn from_parts(
        embedding: EmbeddingConfig,
        config: StoreConfig,
        nodes: Vec<IntentNode>,
        current_day: Option<i64>,
        next_id: NodeId,
    ) -> Result<Self> {
        let mut store = Self::new(embedding, config)?;
        for node in nodes {
            store.check_dims(&node.position)?;
            if node.id >= next_id {
                return Err(Error::Corrupt(format!(
                    "node id {} not below next id {next_id}",
                    node.id
                )));
            }
            store.index.insert(node.id, &node.position.0);
            if store.nodes.insert(node.id, node).is_some() {
                return Err(Error::Corrupt("duplicate node id".into()));
            }
        }
        store.index.rebuild();
        store.current_day = current_day;
        store.next_id = next_id;
        Ok(store)
    }

    pub(crate) fn next_id(&self) -> NodeId {
        self.next_id
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::embed;
    use chrono::{NaiveDate, NaiveDateTime};

    fn ts(day: u32, hh: u32, mm: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2024, 1, day)
            .unwrap()
            .and_hms_opt(hh, mm, 0)
            .unwrap()
    }

    fn raw(t: NaiveDateTime) -> RawContext {
        RawContext::new(t, 12.97, 77.69).unwrap()
    }

    fn store(cfg: StoreConfig) -> NodeStore {
        NodeStore::new(EmbeddingConfig::default(), cfg).unwrap()
    }

    fn observe(s: &mut NodeStore, intent: u32, t: NaiveDateTime) -> (NodeId, Observation) {
        let r = raw(t);
        let p = embed(&r, s.embedding()).unwrap();
        s.observe(IntentId(intent), &p, &r, &IntentSequence::empty(90), r.day_index())
            .unwrap()
    }

    #[test]
    fn decay_weight_examples() {
        assert_eq!(decay_weight(1.0, 0.6, 0), 2.0);
        assert_eq!(decay_weight(1.0, 0.3, 0), 2.0);
        assert_eq!(decay_weight(4.5, 1.0, 17), 5.5);
        assert!((decay_weight(1.0, 0.6, 1) - 1.6).abs() < 1e-15);
    }

    #[test]
    fn first_event_creates_weight_one() {
        let mut s = store(StoreConfig::default());
        let (id, obs) = observe(&mut s, 0, ts(1, 9, 0));
        assert_eq!(obs, Observation::Created);
        assert_eq!(s.node(id).unwrap().weight, 1.0);
    }

    #[test]
    fn same_intent_same_context_fuses() {
        let mut s = store(StoreConfig::default());
        let (a, _) = observe(&mut s, 0, ts(1, 9, 0));
        let (b, obs) = observe(&mut s, 0, ts(1, 9, 0));
        assert_eq!(a, b);
        assert_eq!(obs, Observation::Fused);
        assert_eq!(s.node(a).unwrap().weight, 2.0);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn different_intent_never_fuses() {
        let mut s = store(StoreConfig::default());
        observe(&mut s, 0, ts(1, 9, 0));
        let (_, obs) = observe(&mut s, 1, ts(1, 9, 0));
        assert_eq!(obs, Observation::Created);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn fusion_decays_by_elapsed_days() {
        let mut s = store(StoreConfig::default());
        let (id, _) = observe(&mut s, 0, ts(1, 9, 0));
        observe(&mut s, 0, ts(2, 9, 0));
        assert!((s.node(id).unwrap().weight - 1.6).abs() < 1e-12);
        assert_eq!(s.node(id).unwrap().last_touch_day, raw(ts(2, 9, 0)).day_index());
    }

    #[test]
    fn weekly_period_counts_whole_weeks() {
        assert_eq!(DecayPeriod::Weekly.elapsed(0, 6), 0);
        assert_eq!(DecayPeriod::Weekly.elapsed(0, 7), 1);
        assert_eq!(DecayPeriod::Daily.elapsed(3, 10), 7);
        assert_eq!(DecayPeriod::Daily.elapsed(10, 3), 0);
    }

    fn minutes_of(node: &IntentNode) -> f64 {
        pair_to_fraction(node.position.0[DAY_SIN], node.position.0[DAY_COS]) * 1440.0
    }

    #[test]
    fn drift_lands_on_arc_midpoint() {
        let mut s = store(StoreConfig::default());
        let (id, _) = observe(&mut s, 0, ts(1, 9, 0));
        observe(&mut s, 0, ts(1, 10, 0));
        let node = s.node(id).unwrap();
        assert!((minutes_of(node) - 570.0).abs() < 1e-6);
        assert!((node.raw.minutes_of_day - 570.0).abs() < 1e-6);
    }

    #[test]
    fn drift_across_midnight_stays_near_midnight() {
        let cfg = EmbeddingConfig::default();
        let r0 = raw(ts(1, 23, 50));
        let r1 = raw(ts(1, 0, 10));
        let mut node = IntentNode {
            id: 0,
            intent: IntentId(0),
            position: embed(&r0, &cfg).unwrap(),
            weight: 1.0,
            last_touch_day: 0,
            sequences: VecDeque::new(),
            raw: RawCentroid::from_raw(&r0),
        };
        drift_node(&mut node, &r1, &embed(&r1, &cfg).unwrap(), &cfg);
        let m = minutes_of(&node);
        let from_midnight = m.min(1440.0 - m);
        assert!(from_midnight < 1e-6, "landed at {m}");
    }

    #[test]
    fn drift_at_own_position_does_not_move() {
        let mut s = store(StoreConfig::default());
        let (id, _) = observe(&mut s, 0, ts(1, 9, 0));
        let before = s.node(id).unwrap().position.clone();
        observe(&mut s, 0, ts(1, 9, 0));
        let after = &s.node(id).unwrap().position;
        for (a, b) in before.0.iter().zip(&after.0) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn antipodal_average_keeps_old_angle() {
        let cfg = EmbeddingConfig::unit();
        let mut node = IntentNode {
            id: 0,
            intent: IntentId(0),
            position: ContextVector(vec![0.0, 1.0, 0.0, 1.0, 0.0, 0.0]),
            weight: 1.0,
            last_touch_day: 0,
            sequences: VecDeque::new(),
            raw: RawCentroid {
                minutes_of_day: 0.0,
                minutes_of_week: 0.0,
                latitude: 0.0,
                longitude: 0.0,
            },
        };
        let r = RawContext::new(ts(3, 12, 0), 0.0, 0.0).unwrap();
        drift_node(&mut node, &r, &ContextVector(vec![0.0, -1.0, 0.0, -1.0, 0.0, 0.0]), &cfg);
        assert_eq!(&node.position.0[..4], &[0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn drift_disabled_keeps_position() {
        let mut s = store(StoreConfig {
            drift: false,
            ..Default::default()
        });
        let (id, _) = observe(&mut s, 0, ts(1, 9, 0));
        let before = s.node(id).unwrap().position.clone();
        observe(&mut s, 0, ts(1, 9, 30));
        assert_eq!(s.node(id).unwrap().position, before);
        assert_eq!(s.node(id).unwrap().weight, 2.0);
    }

    #[test]
    fn stale_neighbor_is_pruned_after_three_days() {
        let mut s = store(StoreConfig::default());
        let (old, _) = observe(&mut s, 0, ts(1, 9, 0));
        observe(&mut s, 1, ts(3, 9, 0));
        assert!(s.node(old).is_some(), "0.6^2 = 0.36 survives");
        observe(&mut s, 1, ts(4, 9, 0));
        assert!(s.node(old).is_none(), "0.6^3 = 0.216 is pruned");
    }

    #[test]
    fn no_aging_without_decay() {
        let mut s = store(StoreConfig {
            decay_k: 1.0,
            ..Default::default()
        });
        observe(&mut s, 0, ts(1, 9, 0));
        for day in 2..=28 {
            observe(&mut s, 1, ts(day, 9, 0));
        }
        assert_eq!(s.prune_all(raw(ts(31, 0, 0)).day_index()), 0);
        assert!(s.nodes().any(|n| n.intent == IntentId(0)));
    }

    #[test]
    fn explicit_prune_uses_effective_weight() {
        let mut s = store(StoreConfig::default());
        let (id, _) = observe(&mut s, 0, ts(1, 9, 0));
        let r = raw(ts(1, 9, 0));
        let p = embed(&r, s.embedding()).unwrap();
        assert_eq!(s.prune_neighborhood(&p, r.day_index()).unwrap(), 0);
        assert_eq!(s.prune_neighborhood(&p, r.day_index() + 3).unwrap(), 1);
        assert!(s.node(id).is_none());
    }

    #[test]
    fn sequences_are_bounded() {
        let mut s = store(StoreConfig {
            sequence_capacity: 3,
            ..Default::default()
        });
        let r = raw(ts(1, 9, 0));
        let p = embed(&r, s.embedding()).unwrap();
        let mut id = 0;
        for i in 0..5 {
            let seq = IntentSequence::new(vec![IntentId(i)], 90);
            id = s.observe(IntentId(9), &p, &r, &seq, r.day_index()).unwrap().0;
        }
        let seqs: Vec<u32> = s.node(id).unwrap().sequences.iter().map(|q| q.items[0].0).collect();
        assert_eq!(seqs, vec![2, 3, 4]);
    }

    #[test]
    fn rejects_dimension_mismatch_and_time_travel() {
        let mut s = store(StoreConfig::default());
        let r = raw(ts(2, 9, 0));
        let bad = ContextVector(vec![0.0; 4]);
        assert!(matches!(
            s.observe(IntentId(0), &bad, &r, &IntentSequence::empty(90), 0),
            Err(Error::DimensionMismatch { .. })
        ));
        observe(&mut s, 0, ts(2, 9, 0));
        let p = embed(&r, s.embedding()).unwrap();
        assert!(matches!(
            s.observe(IntentId(0), &p, &r, &IntentSequence::empty(90), r.day_index() - 1),
            Err(Error::Unordered(_))
        ));
        assert!(s.nearest(&bad, 3).is_err());
    }

    #[test]
    fn config_validation() {
        for bad in [
            StoreConfig { decay_k: 0.3, ..Default::default() },
            StoreConfig { decay_k: 1.1, ..Default::default() },
            StoreConfig { fusion_radius: 0.0, ..Default::default() },
            StoreConfig { neighbor_count: 0, ..Default::default() },
            StoreConfig { prune_threshold: -1.0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
        assert!(StoreConfig { decay_k: 0.4, ..Default::default() }.validate().is_ok());
    }

    #[test]
    fn nearest_breaks_ties_by_weight_then_age() {
        // Without drift the fused node keeps its exact coordinates.
        let mut s = store(StoreConfig { drift: false, ..Default::default() });
        let (a, _) = observe(&mut s, 0, ts(1, 9, 0));
        let (b, _) = observe(&mut s, 1, ts(1, 9, 0));
        let (c, _) = observe(&mut s, 2, ts(1, 9, 0));
        observe(&mut s, 2, ts(1, 9, 0));
        let r = raw(ts(1, 9, 0));
        let q = embed(&r, s.embedding()).unwrap();
        let ids: Vec<NodeId> = s.nearest(&q, 3).unwrap().into_iter().map(|x| x.0).collect();
        assert_eq!(ids, vec![c, a, b]);
    }
}
