//! Versioned little-endian binary snapshot of a [`NodeStore`] and the intent
//! registry that names its intent ids.
//!
//! ```text
//! magic            4 bytes  "WIME"
//! version          u16      1
//! geo_scale        f64
//! time_weight      f64
//! week_weight      f64
//! dims             u32
//! decay_k          f64
//! prune_threshold  f64
//! fusion_radius    f64
//! neighbor_count   u32
//! seq_capacity     u32
//! decay_period     u8       0 = daily, 1 = weekly
//! drift            u8       0 / 1
//! rebuild_fraction f64
//! has_current_day  u8       0 / 1
//! current_day      i64      (0 when absent)
//! next_id          u64
//! label_count      u32
//!   label_len u32, label bytes (UTF-8)          x label_count
//! node_count       u32
//!   id u64, intent u32, position f64 x dims,
//!   weight f64, last_touch_day i64,
//!   raw minutes_of_day f64, minutes_of_week f64, lat f64, lon f64,
//!   seq_count u32,
//!     window_minutes u32, len u32, intent u32 x len   x seq_count
//!                                                     x node_count
//! ```

use std::collections::VecDeque;

use super::{DecayPeriod, IntentNode, NodeStore, RawCentroid, StoreConfig};
use crate::embedding::{ContextVector, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::seqmetric::{IntentId, IntentRegistry, IntentSequence};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"WIME";
pub const SNAPSHOT_VERSION: u16 = 1;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn len(&mut self, v: usize) {
        self.u32(u32::try_from(v).expect("collection too large for snapshot"));
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn i64(&mut self, v: i64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        if self.buf.len() < N {
            return Err(Error::Truncated);
        }
        let (head, rest) = self.buf.split_at(N);
        self.buf = rest;
        Ok(head.try_into().expect("split at N"))
    }
    fn bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Truncated);
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take()?))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }
    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
    fn flag(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(Error::Corrupt(format!("bad flag byte {v}"))),
        }
    }
    /// Element count, bounded by what the remaining bytes could hold.
    fn count(&mut self, min_elem_size: usize) -> Result<usize> {
        let n = self.u32()? as usize;
        if n.saturating_mul(min_elem_size) > self.buf.len() {
            return Err(Error::Truncated);
        }
        Ok(n)
    }
}

/// Serializes `store` together with `registry`.
pub fn snapshot(store: &NodeStore, registry: &IntentRegistry) -> Vec<u8> {
    let mut w = Writer(Vec::with_capacity(64 + store.len() * 160));
    w.0.extend_from_slice(SNAPSHOT_MAGIC);
    w.u16(SNAPSHOT_VERSION);

    let e = store.embedding();
    w.f64(e.geo_scale);
    w.f64(e.time_weight);
    w.f64(e.week_weight);
    w.len(e.dims);

    let c = store.config();
    w.f64(c.decay_k);
    w.f64(c.prune_threshold);
    w.f64(c.fusion_radius);
    w.len(c.neighbor_count);
    w.len(c.sequence_capacity);
    w.u8(match c.decay_period {
        DecayPeriod::Daily => 0,
        DecayPeriod::Weekly => 1,
    });
    w.u8(u8::from(c.drift));
    w.f64(c.rebuild_fraction);

    w.u8(u8::from(store.current_day().is_some()));
    w.i64(store.current_day().unwrap_or(0));
    w.u64(store.next_id());

    w.len(registry.len());
    for label in registry.labels() {
        w.len(label.len());
        w.0.extend_from_slice(label.as_bytes());
    }

    w.len(store.len());
    for node in store.nodes() {
        w.u64(node.id);
        w.u32(node.intent.0);
        for c in node.position.coords() {
            w.f64(*c);
        }
        w.f64(node.weight);
        w.i64(node.last_touch_day);
        w.f64(node.raw.minutes_of_day);
        w.f64(node.raw.minutes_of_week);
        w.f64(node.raw.latitude);
        w.f64(node.raw.longitude);
        w.len(node.sequences.len());
        for seq in &node.sequences {
            w.u32(seq.window_minutes);
            w.len(seq.items.len());
            for id in &seq.items {
                w.u32(id.0);
            }
        }
    }
    w.0
}

/// Decodes a snapshot and rebuilds the spatial index.
pub fn restore(bytes: &[u8]) -> Result<(NodeStore, IntentRegistry)> {
    if bytes.len() < SNAPSHOT_MAGIC.len() {
        return Err(Error::Truncated);
    }
    if &bytes[..4] != SNAPSHOT_MAGIC {
        return Err(Error::BadMagic);
    }
    let mut r = Reader { buf: &bytes[4..] };
    let version = r.u16()?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }

    let embedding = EmbeddingConfig {
        geo_scale: r.f64()?,
        time_weight: r.f64()?,
        week_weight: r.f64()?,
        dims: r.u32()? as usize,
    };
    let config = StoreConfig {
        decay_k: r.f64()?,
        prune_threshold: r.f64()?,
        fusion_radius: r.f64()?,
        neighbor_count: r.u32()? as usize,
        sequence_capacity: r.u32()? as usize,
        decay_period: match r.u8()? {
            0 => DecayPeriod::Daily,
            1 => DecayPeriod::Weekly,
            v => return Err(Error::Corrupt(format!("bad decay period {v}"))),
        },
        drift: r.flag()?,
        rebuild_fraction: r.f64()?,
    };
    let has_day = r.flag()?;
    let day = r.i64()?;
    let current_day = has_day.then_some(day);
    let next_id = r.u64()?;

    let label_count = r.count(4)?;
    let mut labels = Vec::with_capacity(label_count);
    for _ in 0..label_count {
        let n = r.count(1)?;
        let raw = r.bytes(n)?;
        let label = std::str::from_utf8(raw)
            .map_err(|_| Error::Corrupt("label is not UTF-8".into()))?;
        labels.push(label.to_owned());
    }
    let registry = IntentRegistry::from_labels(labels)?;

    let dims = embedding.dims;
    let node_size = 8 + 4 + 8 * dims + 8 + 8 + 32 + 4;
    let node_count = r.count(node_size)?;
    let mut nodes = Vec::with_capacity(node_count);
    for _ in 0..node_count {
        let id = r.u64()?;
        let intent = IntentId(r.u32()?);
        if !registry.is_empty() && intent.0 as usize >= registry.len() {
            return Err(Error::UnknownIntent(intent.0));
        }
        let position = ContextVector(
            (0..dims).map(|_| r.f64()).collect::<Result<Vec<_>>>()?,
        );
        let weight = r.f64()?;
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::Corrupt(format!("node {id} has weight {weight}")));
        }
        let last_touch_day = r.i64()?;
        let raw = RawCentroid {
            minutes_of_day: r.f64()?,
            minutes_of_week: r.f64()?,
            latitude: r.f64()?,
            longitude: r.f64()?,
        };
        let seq_count = r.count(8)?;
        let mut sequences = VecDeque::with_capacity(seq_count);
        for _ in 0..seq_count {
            let window = r.u32()?;
            let len = r.count(4)?;
            let items = (0..len)
                .map(|_| r.u32().map(IntentId))
                .collect::<Result<Vec<_>>>()?;
            sequences.push_back(IntentSequence::new(items, window));
        }
        nodes.push(IntentNode {
            id,
            intent,
            position,
            weight,
            last_touch_day,
            sequences,
            raw,
        });
    }
    if !r.buf.is_empty() {
        return Err(Error::Corrupt(format!("{} trailing bytes", r.buf.len())));
    }
    let store = NodeStore::from_parts(embedding, config, nodes, current_day, next_id)?;
    Ok((store, registry))
}
