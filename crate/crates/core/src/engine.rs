//! A single user's engine: intent registry, node store, predictor settings
//! and the short history needed to build preceding-intent sequences.

use std::collections::VecDeque;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::embedding::{embed, epoch_minutes, EmbeddingConfig, RawContext};
use crate::error::{Error, Result};
use crate::nodestore::{self, NodeId, NodeStore, Observation, StoreConfig};
use crate::predictor::{predict, PredictionResult, PredictorConfig};
use crate::seqmetric::{build_sequence, IntentId, IntentRegistry, IntentSequence, DEFAULT_WINDOW_MINUTES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub embedding: EmbeddingConfig,
    pub store: StoreConfig,
    pub predictor: PredictorConfig,
    /// Recency bound for preceding-intent sequences.
    pub window_minutes: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            embedding: EmbeddingConfig::default(),
            store: StoreConfig::default(),
            predictor: PredictorConfig::default(),
            window_minutes: DEFAULT_WINDOW_MINUTES,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        self.embedding.validate()?;
        self.store.validate()?;
        self.predictor.validate()
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    config: EngineConfig,
    registry: IntentRegistry,
    store: NodeStore,
    history: VecDeque<(IntentId, NaiveDateTime)>,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            store: NodeStore::new(config.embedding, config.store)?,
            config,
            registry: IntentRegistry::new(),
            history: VecDeque::new(),
        })
    }

    /// Resumes from a snapshot. Embedding and store settings come from the
    /// snapshot; predictor settings and the window from the arguments.
    pub fn from_snapshot(bytes: &[u8], predictor: PredictorConfig, window_minutes: u32) -> Result<Self> {
        let (store, registry) = nodestore::restore(bytes)?;
        let config = EngineConfig {
            embedding: *store.embedding(),
            store: *store.config(),
            predictor,
            window_minutes,
        };
        config.validate()?;
        Ok(Self {
            config,
            registry,
            store,
            history: VecDeque::new(),
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn registry(&self) -> &IntentRegistry {
        &self.registry
    }

    pub fn store(&self) -> &NodeStore {
        &self.store
    }

    pub fn snapshot(&self) -> Vec<u8> {
        nodestore::snapshot(&self.store, &self.registry)
    }

    /// Intents learned within the window before `at`, most recent first.
    pub fn recent(&self, at: NaiveDateTime) -> Result<IntentSequence> {
        let (front, back) = self.history.as_slices();
        if back.is_empty() {
            build_sequence(front, at, self.config.window_minutes)
        } else {
            let joined: Vec<_> = self.history.iter().copied().collect();
            build_sequence(&joined, at, self.config.window_minutes)
        }
    }

    /// Predicts using the engine's own recent history.
    pub fn predict(&self, raw: &RawContext) -> Result<PredictionResult> {
        let recent = self.recent(raw.timestamp)?;
        self.predict_with(raw, &recent)
    }

    pub fn predict_with(&self, raw: &RawContext, recent: &IntentSequence) -> Result<PredictionResult> {
        let query = embed(raw, &self.config.embedding)?;
        predict(&self.store, &query, recent, &self.config.predictor)
    }

    /// Learns an event. Events must arrive in non-decreasing time order.
    pub fn learn(&mut self, intent: &str, raw: &RawContext) -> Result<(NodeId, Observation)> {
        if let Some((_, last)) = self.history.back() {
            if raw.timestamp < *last {
                return Err(Error::Unordered(format!(
                    "event at {} after {}",
                    raw.timestamp, last
                )));
            }
        }
        let preceding = self.recent(raw.timestamp)?;
        let position = embed(raw, &self.config.embedding)?;
        let id = self.registry.intern(intent);
        let outcome = self
            .store
            .observe(id, &position, raw, &preceding, raw.day_index())?;
        self.history.push_back((id, raw.timestamp));
        let now = epoch_minutes(&raw.timestamp);
        let window = i64::from(self.config.window_minutes);
        while self
            .history
            .front()
            .is_some_and(|(_, ts)| now - epoch_minutes(ts) > window)
        {
            self.history.pop_front();
        }
        Ok(outcome)
    }

    pub fn label(&self, id: IntentId) -> Result<&str> {
        self.registry.label(id)
    }
}
