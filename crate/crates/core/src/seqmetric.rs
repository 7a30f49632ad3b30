//! Intent identifiers, recency-bounded intent sequences and the string
//! metrics used to compare them.
//!
//! Sequences are stored most-recent-first, so the Jaro-Winkler prefix bonus
//! rewards agreement on the intents that happened just before the anchor.

use std::collections::HashMap;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::embedding::epoch_minutes;
use crate::error::{out_of_range, Error, Result};

/// Default recency bound for preceding-intent sequences.
pub const DEFAULT_WINDOW_MINUTES: u32 = 90;
pub const DEFAULT_WINKLER_P: f64 = 0.1;
pub const DEFAULT_PREFIX_CAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntentId(pub u32);

/// Bijective mapping between intent labels and dense ids, in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntentRegistry {
    labels: Vec<String>,
    ids: HashMap<String, IntentId>,
}

impl IntentRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `label`, allocating the next one on first sight.
    pub fn intern(&mut self, label: &str) -> IntentId {
        if let Some(id) = self.ids.get(label) {
            return *id;
        }
        let id = IntentId(self.labels.len() as u32);
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<IntentId> {
        self.ids.get(label).copied()
    }

    pub fn label(&self, id: IntentId) -> Result<&str> {
        self.labels
            .get(id.0 as usize)
            .map(String::as_str)
            .ok_or(Error::UnknownIntent(id.0))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labels in id order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Rebuilds a registry from labels listed in id order.
    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut reg = Self::new();
        for label in labels {
            let label = label.into();
            if reg.ids.contains_key(&label) {
                return Err(Error::Corrupt(format!("duplicate intent label `{label}`")));
            }
            reg.intern(&label);
        }
        Ok(reg)
    }
}

/// Intents preceding an anchor instant, most recent first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntentSequence {
    pub items: Vec<IntentId>,
    pub window_minutes: u32,
}

impl IntentSequence {
    pub fn new(items: Vec<IntentId>, window_minutes: u32) -> Self {
        Self {
            items,
            window_minutes,
        }
    }

    pub fn empty(window_minutes: u32) -> Self {
        Self::new(Vec::new(), window_minutes)
    }

    pub fn as_slice(&self) -> &[IntentId] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Collects the intents of `history` that happened within `window_minutes`
/// of `anchor`. `history` must be sorted ascending and end at or before
/// `anchor`.
pub fn build_sequence(
    history: &[(IntentId, NaiveDateTime)],
    anchor: NaiveDateTime,
    window_minutes: u32,
) -> Result<IntentSequence> {
    if let Some(pair) = history.windows(2).find(|w| w[1].1 < w[0].1) {
        return Err(Error::Unordered(format!(
            "history entry at {} follows {}",
            pair[1].1, pair[0].1
        )));
    }
    if let Some((_, last)) = history.last() {
        if *last > anchor {
            return Err(Error::Unordered(format!(
                "history entry at {last} is after anchor {anchor}"
            )));
        }
    }
    let anchor_min = epoch_minutes(&anchor);
    let items = history
        .iter()
        .rev()
        .take_while(|(_, ts)| anchor_min - epoch_minutes(ts) <= i64::from(window_minutes))
        .map(|(id, _)| *id)
        .collect();
    Ok(IntentSequence::new(items, window_minutes))
}

/// Edit distance with unit insert, delete and substitute costs.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let substitute = prev[j] + usize::from(x != y);
            cur[j + 1] = substitute.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Jaro similarity; 0 when nothing matches, including when either side is empty.
pub fn jaro<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut a_matched = vec![false; a.len()];
    let mut b_matched = vec![false; b.len()];
    let mut matches = 0usize;
    for (i, x) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_matched[j] && *x == b[j] {
                a_matched[i] = true;
                b_matched[j] = true;
                matches += 1;
                break;
            }
        }
    }
    if matches == 0 {
        return 0.0;
    }
    let a_order = a.iter().zip(&a_matched).filter(|(_, m)| **m).map(|(x, _)| x);
    let b_order = b.iter().zip(&b_matched).filter(|(_, m)| **m).map(|(y, _)| y);
    let out_of_order = a_order.zip(b_order).filter(|(x, y)| x != y).count();
    let m = matches as f64;
    // Integer halving, as in Winkler's reference implementation.
    let t = (out_of_order / 2) as f64;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

/// Length of the common prefix, capped at `cap`.
pub fn common_prefix<T: PartialEq>(a: &[T], b: &[T], cap: usize) -> usize {
    a.iter().zip(b).take(cap).take_while(|(x, y)| x == y).count()
}

/// Jaro-Winkler parameters: prefix scale `p` and the prefix length cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winkler {
    p: f64,
    prefix_cap: usize,
}

impl Default for Winkler {
    fn default() -> Self {
        Self {
            p: DEFAULT_WINKLER_P,
            prefix_cap: DEFAULT_PREFIX_CAP,
        }
    }
}

impl Winkler {
    /// `p * prefix_cap` must not exceed 1, otherwise the result can leave [0, 1].
    pub fn new(p: f64, prefix_cap: usize) -> Result<Self> {
        if !(0.0..=0.25).contains(&p) || p * prefix_cap as f64 > 1.0 {
            return Err(out_of_range("winkler prefix scale", p));
        }
        Ok(Self { p, prefix_cap })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn prefix_cap(&self) -> usize {
        self.prefix_cap
    }

    pub fn similarity<T: PartialEq>(&self, a: &[T], b: &[T]) -> f64 {
        let sim = jaro(a, b);
        let l = common_prefix(a, b, self.prefix_cap) as f64;
        sim + l * self.p * (1.0 - sim)
    }
}

/// Jaro-Winkler with prefix cap 4.
pub fn jaro_winkler<T: PartialEq>(a: &[T], b: &[T], p: f64) -> Result<f64> {
    Ok(Winkler::new(p, DEFAULT_PREFIX_CAP)?.similarity(a, b))
}
