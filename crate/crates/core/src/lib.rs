//! Next-intent prediction from time and location context.
//!
//! Each observed intent becomes a weighted node in a small embedded space
//! (cyclic time of day, cyclic time of week, scaled coordinates). Nodes
//! fuse with nearby repeats, drift toward recent observations, decay when
//! unused and are pruned below a weight threshold. Predictions rank the
//! nearest nodes by a spatial score and then by how well each node's stored
//! preceding-intent sequences match the recent history.

pub mod cli;
pub mod embedding;
pub mod engine;
pub mod error;
pub mod evaluation;
pub mod event;
pub mod nodestore;
pub mod predictor;
pub mod seqmetric;
pub mod synthgen;

pub use embedding::{embed, euclidean_distance, ContextVector, EmbeddingConfig, RawContext};
pub use engine::{Engine, EngineConfig};
pub use error::{Error, Result};
pub use event::ContextEvent;
pub use nodestore::{IntentNode, NodeId, NodeStore, Observation, StoreConfig};
pub use predictor::{predict, PredictionResult, PredictorConfig, RankedIntent};
pub use seqmetric::{jaro, jaro_winkler, levenshtein, IntentId, IntentRegistry, IntentSequence};
