//! Prequential replay and the metrics computed from it.
//!
//! Every event is first predicted from what the engine has learned so far and
//! only then learned, so a prediction never sees its own label. Each user gets
//! an isolated engine; users may be replayed in parallel.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::day_index;
use crate::engine::{Engine, EngineConfig};
use crate::error::{Error, Result};
use crate::event::ContextEvent;
use crate::seqmetric::IntentId;

/// N values reported in summaries.
pub const PRECISION_NS: [usize; 3] = [1, 5, 10];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayStats {
    /// 1-based day number counted from the user's first event.
    pub day: i64,
    pub instances: u64,
    pub hits: u64,
    pub ratio: f64,
    pub live_nodes: u64,
}

/// A top-N recommendation list next to the intent that actually followed.
#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub top: Vec<IntentId>,
    pub truth: IntentId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    /// Position of the event within its user's stream.
    pub event_index: usize,
    pub day: i64,
    pub hit: bool,
    pub fallback_used: bool,
    pub recommendation: Recommendation,
}

#[derive(Debug, Clone)]
pub struct UserReplay {
    pub user_id: String,
    pub days: Vec<DayStats>,
    pub instances: Vec<InstanceRecord>,
    pub final_live_nodes: usize,
    pub predict_micros_total: f64,
    /// The user's engine after the last event.
    pub engine: Engine,
}

impl UserReplay {
    pub fn hits(&self) -> u64 {
        self.days.iter().map(|d| d.hits).sum()
    }

    pub fn instance_count(&self) -> u64 {
        self.days.iter().map(|d| d.instances).sum()
    }

    pub fn overall_hit_ratio(&self) -> f64 {
        ratio(self.hits(), self.instance_count())
    }

    pub fn recommendations(&self) -> Vec<Recommendation> {
        self.instances.iter().map(|i| i.recommendation.clone()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    /// Pooled over users: hits and instances summed per day number.
    pub per_day_hit_ratio: Vec<DayStats>,
    pub overall_hit_ratio: f64,
    pub instances: u64,
    pub hits: u64,
    /// Precision@N as instance-level overlap with the truth set.
    pub precision_at: BTreeMap<usize, f64>,
    /// Conventional precision: overlap divided by N.
    pub conventional_precision_at: BTreeMap<usize, f64>,
    pub node_count_series: Vec<(i64, u64)>,
    pub avg_predict_micros: f64,
    pub users: Vec<UserReplay>,
}

impl ReplayReport {
    pub fn day(&self, day: i64) -> Option<&DayStats> {
        self.per_day_hit_ratio.iter().find(|d| d.day == day)
    }

    /// Instance-weighted mean ratio over days `from..=to`.
    pub fn mean_ratio(&self, from: i64, to: i64) -> f64 {
        let (hits, inst) = self
            .per_day_hit_ratio
            .iter()
            .filter(|d| (from..=to).contains(&d.day))
            .fold((0, 0), |(h, n), d| (h + d.hits, n + d.instances));
        ratio(hits, inst)
    }
}

fn ratio(hits: u64, instances: u64) -> f64 {
    if instances == 0 {
        0.0
    } else {
        hits as f64 / instances as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayOptions {
    /// Worker threads for per-user parallelism; 0 lets the pool decide.
    pub jobs: usize,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        Self { jobs: 1 }
    }
}

/// Splits a mixed log into per-user streams, in order of first appearance,
/// and checks each stream is time-ordered.
pub fn split_users(events: &[ContextEvent]) -> Result<Vec<(String, Vec<ContextEvent>)>> {
    let mut order: Vec<String> = Vec::new();
    let mut by_user: BTreeMap<String, Vec<ContextEvent>> = BTreeMap::new();
    for e in events {
        let stream = by_user.entry(e.user_id.clone()).or_insert_with(|| {
            order.push(e.user_id.clone());
            Vec::new()
        });
        if let Some(prev) = stream.last() {
            if e.timestamp < prev.timestamp {
                return Err(Error::Unordered(format!(
                    "user {}: event at {} follows {}",
                    e.user_id, e.timestamp, prev.timestamp
                )));
            }
        }
        stream.push(e.clone());
    }
    Ok(order
        .into_iter()
        .map(|u| {
            let stream = by_user.remove(&u).unwrap_or_default();
            (u, stream)
        })
        .collect())
}

/// Replays one user's time-ordered stream.
pub fn replay_user(user_id: &str, events: &[ContextEvent], config: &EngineConfig) -> Result<UserReplay> {
    let mut engine = Engine::new(*config)?;
    let top_n = config.predictor.top_n.max(*PRECISION_NS.iter().max().unwrap_or(&1));
    let mut days: Vec<DayStats> = Vec::new();
    let mut instances = Vec::with_capacity(events.len());
    let mut micros = 0.0;
    let first_day = events.first().map(|e| day_index(&e.timestamp));

    for (i, event) in events.iter().enumerate() {
        let raw = event.raw()?;
        let day = day_index(&event.timestamp) - first_day.unwrap_or(0) + 1;

        let recent = engine.recent(raw.timestamp)?;
        let started = Instant::now();
        let result = engine.predict_with(&raw, &recent)?;
        micros += started.elapsed().as_secs_f64() * 1e6;

        // Ids are stable: the registry only grows.
        let top: Vec<IntentId> = result.top_intents(top_n);
        let hit = match top.first() {
            Some(&id) => engine.label(id)? == event.intent,
            None => false,
        };

        engine.learn(&event.intent, &raw)?;
        let truth = engine
            .registry()
            .get(&event.intent)
            .expect("learned intent is registered");

        match days.last_mut() {
            Some(d) if d.day == day => {
                d.instances += 1;
                d.hits += u64::from(hit);
            }
            _ => days.push(DayStats {
                day,
                instances: 1,
                hits: u64::from(hit),
                ratio: 0.0,
                live_nodes: 0,
            }),
        }
        if let Some(d) = days.last_mut() {
            d.live_nodes = engine.store().len() as u64;
        }
        instances.push(InstanceRecord {
            event_index: i,
            day,
            hit,
            fallback_used: result.fallback_used,
            recommendation: Recommendation { top, truth },
        });
    }
    for d in &mut days {
        d.ratio = ratio(d.hits, d.instances);
    }
    Ok(UserReplay {
        user_id: user_id.to_owned(),
        days,
        instances,
        final_live_nodes: engine.store().len(),
        predict_micros_total: micros,
        engine,
    })
}

/// Replays every user in `events` and aggregates the results.
pub fn replay(events: &[ContextEvent], config: &EngineConfig) -> Result<ReplayReport> {
    replay_with(events, config, ReplayOptions::default())
}

pub fn replay_with(
    events: &[ContextEvent],
    config: &EngineConfig,
    options: ReplayOptions,
) -> Result<ReplayReport> {
    config.validate()?;
    let streams = split_users(events)?;
    let run = || -> Result<Vec<UserReplay>> {
        streams
            .par_iter()
            .map(|(user, stream)| replay_user(user, stream, config))
            .collect()
    };
    let users = if options.jobs == 1 {
        streams
            .iter()
            .map(|(user, stream)| replay_user(user, stream, config))
            .collect::<Result<Vec<_>>>()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run)?
    };
    Ok(aggregate(users))
}

fn aggregate(users: Vec<UserReplay>) -> ReplayReport {
    let mut pooled: BTreeMap<i64, DayStats> = BTreeMap::new();
    for u in &users {
        for d in &u.days {
            let e = pooled.entry(d.day).or_insert(DayStats {
                day: d.day,
                instances: 0,
                hits: 0,
                ratio: 0.0,
                live_nodes: 0,
            });
            e.instances += d.instances;
            e.hits += d.hits;
            e.live_nodes += d.live_nodes;
        }
    }
    let mut per_day: Vec<DayStats> = pooled.into_values().collect();
    for d in &mut per_day {
        d.ratio = ratio(d.hits, d.instances);
    }
    let hits = per_day.iter().map(|d| d.hits).sum();
    let instances = per_day.iter().map(|d| d.instances).sum();
    let recs: Vec<Vec<Recommendation>> = users.iter().map(UserReplay::recommendations).collect();
    let precision_at = PRECISION_NS
        .iter()
        .map(|&n| (n, precision_at_n(&recs, n).expect("n >= 1")))
        .collect();
    let conventional_precision_at = PRECISION_NS
        .iter()
        .map(|&n| (n, conventional_precision_at_n(&recs, n).expect("n >= 1")))
        .collect();
    let micros: f64 = users.iter().map(|u| u.predict_micros_total).sum();
    ReplayReport {
        node_count_series: per_day.iter().map(|d| (d.day, d.live_nodes)).collect(),
        per_day_hit_ratio: per_day,
        overall_hit_ratio: ratio(hits, instances),
        instances,
        hits,
        precision_at,
        conventional_precision_at,
        avg_predict_micros: if instances == 0 { 0.0 } else { micros / instances as f64 },
        users,
    }
}

fn per_user_mean<F>(per_user: &[Vec<Recommendation>], n: usize, score: F) -> Result<f64>
where
    F: Fn(&[IntentId], IntentId) -> f64,
{
    if n == 0 {
        return Err(Error::Config("N must be >= 1".into()));
    }
    let user_scores: Vec<f64> = per_user
        .iter()
        .filter(|recs| !recs.is_empty())
        .map(|recs| {
            let total: f64 = recs
                .iter()
                .map(|r| score(&r.top[..r.top.len().min(n)], r.truth))
                .sum();
            total / recs.len() as f64
        })
        .collect();
    if user_scores.is_empty() {
        return Ok(0.0);
    }
    Ok(user_scores.iter().sum::<f64>() / user_scores.len() as f64)
}

/// Mean over users of the mean over instances of `|top_N ∩ {truth}| / |{truth}|`.
pub fn precision_at_n(per_user: &[Vec<Recommendation>], n: usize) -> Result<f64> {
    per_user_mean(per_user, n, |top, truth| f64::from(u8::from(top.contains(&truth))))
}

/// As [`precision_at_n`] but dividing the overlap by `N`.
pub fn conventional_precision_at_n(per_user: &[Vec<Recommendation>], n: usize) -> Result<f64> {
    per_user_mean(per_user, n, |top, truth| {
        f64::from(u8::from(top.contains(&truth))) / n as f64
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    DecayK,
    CutoffC,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decay_k" => Ok(Self::DecayK),
            "cutoff_c" => Ok(Self::CutoffC),
            other => Err(Error::Config(format!(
                "unknown sweep parameter `{other}` (expected decay_k or cutoff_c)"
            ))),
        }
    }
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::DecayK => "decay_k",
            Self::CutoffC => "cutoff_c",
        }
    }

    pub fn apply(self, base: &EngineConfig, value: f64) -> EngineConfig {
        let mut cfg = *base;
        match self {
            Self::DecayK => cfg.store.decay_k = value,
            Self::CutoffC => cfg.predictor.score_cutoff = value,
        }
        cfg
    }
}

/// One full replay per value; returns `(value, overall hit ratio)` pairs.
pub fn sweep(
    events: &[ContextEvent],
    base: &EngineConfig,
    param: SweepParam,
    values: &[f64],
    options: ReplayOptions,
) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    values
        .iter()
        .map(|&v| {
            let report = replay_with(events, &param.apply(base, v), options)?;
            Ok((v, report.overall_hit_ratio))
        })
        .collect()
}
