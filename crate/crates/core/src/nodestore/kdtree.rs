//! Arena-backed k-d tree over `u64` keys.
//!
//! Points are inserted by plain descent. Removal marks the slot dead; dead
//! slots still route searches but never appear in results. [`KdTree::rebuild`]
//! drops the dead slots and rebuilds a median-balanced tree.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::embedding::squared_distance;

#[derive(Debug, Clone)]
struct Slot {
    point: Vec<f64>,
    key: u64,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
    alive: bool,
}

/// Counters collected during one search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Slots whose point was compared against the query.
    pub visited: usize,
}

#[derive(Debug, Clone)]
pub struct KdTree {
    dims: usize,
    slots: Vec<Slot>,
    root: Option<usize>,
    live: HashMap<u64, usize>,
    depth: usize,
}

struct Candidate<T> {
    dist2: f64,
    tie: T,
    key: u64,
}

impl<T: Ord> Candidate<T> {
    fn rank(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then_with(|| self.tie.cmp(&other.tie))
            .then_with(|| self.key.cmp(&other.key))
    }
}

impl<T: Ord> PartialEq for Candidate<T> {
    fn eq(&self, other: &Self) -> bool {
        self.rank(other) == Ordering::Equal
    }
}

impl<T: Ord> Eq for Candidate<T> {}

impl<T: Ord> PartialOrd for Candidate<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Ord> Ord for Candidate<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank(other)
    }
}

impl KdTree {
    pub fn new(dims: usize) -> Self {
        assert!(dims > 0, "k-d tree needs at least one dimension");
        Self {
            dims,
            slots: Vec::new(),
            root: None,
            live: HashMap::new(),
            depth: 0,
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Live entries.
    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    /// Dead slots still occupying the arena.
    pub fn tombstones(&self) -> usize {
        self.slots.len() - self.live.len()
    }

    pub fn contains(&self, key: u64) -> bool {
        self.live.contains_key(&key)
    }

    pub fn point(&self, key: u64) -> Option<&[f64]> {
        self.live.get(&key).map(|&i| self.slots[i].point.as_slice())
    }

    /// Inserts `point` under `key`, replacing any live entry with that key.
    pub fn insert(&mut self, key: u64, point: &[f64]) {
        assert_eq!(point.len(), self.dims, "point dimensionality");
        self.remove(key);
        let idx = self.slots.len();
        let mut depth = 1;
        let axis = match self.root {
            None => {
                self.root = Some(idx);
                0
            }
            Some(mut cur) => loop {
                depth += 1;
                let slot = &self.slots[cur];
                let go_left = point[slot.axis] < slot.point[slot.axis];
                let next = if go_left { slot.left } else { slot.right };
                match next {
                    Some(n) => cur = n,
                    None => {
                        let axis = (slot.axis + 1) % self.dims;
                        let slot = &mut self.slots[cur];
                        if go_left {
                            slot.left = Some(idx);
                        } else {
                            slot.right = Some(idx);
                        }
                        break axis;
                    }
                }
            },
        };
        self.slots.push(Slot {
            point: point.to_vec(),
            key,
            axis,
            left: None,
            right: None,
            alive: true,
        });
        self.live.insert(key, idx);
        self.depth = self.depth.max(depth);
        if self.depth > self.depth_limit() {
            self.rebuild();
        }
    }

    fn depth_limit(&self) -> usize {
        let n = self.slots.len().max(1);
        3 * (usize::BITS - n.leading_zeros()) as usize + 10
    }

    /// Marks `key` dead. Returns whether a live entry was removed.
    pub fn remove(&mut self, key: u64) -> bool {
        match self.live.remove(&key) {
            Some(idx) => {
                self.slots[idx].alive = false;
                true
            }
            None => false,
        }
    }

    /// Drops dead slots and rebuilds a balanced tree from the live ones.
    pub fn rebuild(&mut self) {
        let mut entries: Vec<(u64, Vec<f64>)> = self
            .slots
            .drain(..)
            .filter(|s| s.alive)
            .map(|s| (s.key, s.point))
            .collect();
        // Deterministic layout regardless of arena history.
        entries.sort_by_key(|(key, _)| *key);
        self.live.clear();
        self.root = None;
        self.depth = 0;
        let mut order: Vec<usize> = (0..entries.len()).collect();
        let mut slots: Vec<Option<Slot>> = Vec::with_capacity(entries.len());
        slots.resize_with(entries.len(), || None);
        let mut next = 0usize;
        self.root = self.build(&entries, &mut order[..], 0, 1, &mut slots, &mut next);
        self.slots = slots.into_iter().map(|s| s.expect("every slot placed")).collect();
        for (i, s) in self.slots.iter().enumerate() {
            self.live.insert(s.key, i);
        }
    }

    fn build(
        &mut self,
        entries: &[(u64, Vec<f64>)],
        order: &mut [usize],
        axis: usize,
        depth: usize,
        out: &mut Vec<Option<Slot>>,
        next: &mut usize,
    ) -> Option<usize> {
        if order.is_empty() {
            return None;
        }
        self.depth = self.depth.max(depth);
        order.sort_by(|&a, &b| {
            entries[a].1[axis]
                .total_cmp(&entries[b].1[axis])
                .then(entries[a].0.cmp(&entries[b].0))
        });
        let mut mid = order.len() / 2;
        // Equal coordinates must all sit on the right, matching insert().
        while mid > 0 && entries[order[mid - 1]].1[axis] == entries[order[mid]].1[axis] {
            mid -= 1;
        }
        let idx = *next;
        *next += 1;
        let child_axis = (axis + 1) % self.dims;
        let (left, rest) = order.split_at_mut(mid);
        let pivot = rest[0];
        let left = self.build(entries, left, child_axis, depth + 1, out, next);
        let right = self.build(entries, &mut rest[1..], child_axis, depth + 1, out, next);
        let (key, point) = &entries[pivot];
        out[idx] = Some(Slot {
            point: point.clone(),
            key: *key,
            axis,
            left,
            right,
            alive: true,
        });
        Some(idx)
    }

    /// The `n` live entries closest to `query`, ordered by distance, then by
    /// `tie(key)`, then by key. Returns `(key, distance)` pairs.
    pub fn nearest<T, F>(&self, query: &[f64], n: usize, tie: F) -> (Vec<(u64, f64)>, SearchStats)
    where
        T: Ord,
        F: Fn(u64) -> T,
    {
        assert_eq!(query.len(), self.dims, "query dimensionality");
        let mut stats = SearchStats::default();
        if n == 0 {
            return (Vec::new(), stats);
        }
        let mut best: BinaryHeap<Candidate<T>> = BinaryHeap::with_capacity(n + 1);
        let mut stack: Vec<(usize, f64)> = Vec::new();
        if let Some(root) = self.root {
            stack.push((root, 0.0));
        }
        while let Some((idx, bound)) = stack.pop() {
            if best.len() == n && bound > best.peek().map_or(f64::INFINITY, |c| c.dist2) {
                continue;
            }
            let slot = &self.slots[idx];
            stats.visited += 1;
            if slot.alive {
                let cand = Candidate {
                    dist2: squared_distance(query, &slot.point),
                    tie: tie(slot.key),
                    key: slot.key,
                };
                if best.len() < n {
                    best.push(cand);
                } else if best.peek().is_some_and(|worst| cand < *worst) {
                    best.pop();
                    best.push(cand);
                }
            }
            let diff = query[slot.axis] - slot.point[slot.axis];
            let (near, far) = if diff < 0.0 {
                (slot.left, slot.right)
            } else {
                (slot.right, slot.left)
            };
            if let Some(f) = far {
                stack.push((f, bound.max(diff * diff)));
            }
            if let Some(c) = near {
                stack.push((c, bound));
            }
        }
        let out = best
            .into_sorted_vec()
            .into_iter()
            .map(|c| (c.key, c.dist2.sqrt()))
            .collect();
        (out, stats)
    }

    /// All live entries within `radius` of `query` (inclusive), unordered.
    pub fn within(&self, query: &[f64], radius: f64) -> Vec<(u64, f64)> {
        assert_eq!(query.len(), self.dims, "query dimensionality");
        let r2 = radius * radius;
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.root.into_iter().collect();
        while let Some(idx) = stack.pop() {
            let slot = &self.slots[idx];
            if slot.alive {
                let d2 = squared_distance(query, &slot.point);
                if d2 <= r2 {
                    out.push((slot.key, d2.sqrt()));
                }
            }
            let diff = query[slot.axis] - slot.point[slot.axis];
            let (near, far) = if diff < 0.0 {
                (slot.left, slot.right)
            } else {
                (slot.right, slot.left)
            };
            if let Some(c) = near {
                stack.push(c);
            }
            if let (Some(f), true) = (far, diff * diff <= r2) {
                stack.push(f);
            }
        }
        out
    }
}
