//! Context embedding: maps a timestamp and a coordinate pair into the
//! vector space that intent nodes live in.
//!
//! Layout of a [`ContextVector`] produced by [`embed`]:
//!
//! | index | meaning |
//! |-------|---------|
//! | 0, 1  | `sin`, `cos` of the time-of-day angle, scaled by `time_weight` |
//! | 2, 3  | `sin`, `cos` of the time-of-week angle, scaled by `time_weight * week_weight` |
//! | 4, 5  | latitude and longitude in degrees, scaled by `geo_scale` |
//!
//! Both time pairs are cyclic, so 23:59 sits next to 00:00 and Saturday
//! night sits next to Sunday morning.

use std::f64::consts::TAU;
use std::fmt;

use chrono::{Datelike, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};

pub const MINUTES_PER_DAY: u32 = 1440;
pub const MINUTES_PER_WEEK: u32 = 10_080;

/// Number of coordinates produced by [`embed`].
pub const EMBEDDED_DIMS: usize = 6;

pub const DAY_SIN: usize = 0;
pub const DAY_COS: usize = 1;
pub const WEEK_SIN: usize = 2;
pub const WEEK_COS: usize = 3;
pub const LAT: usize = 4;
pub const LON: usize = 5;

/// Local-clock timestamp plus position of a single user action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawContext {
    pub timestamp: NaiveDateTime,
    pub latitude: f64,
    pub longitude: f64,
}

impl RawContext {
    pub fn new(timestamp: NaiveDateTime, latitude: f64, longitude: f64) -> Result<Self> {
        let raw = Self {
            timestamp,
            latitude,
            longitude,
        };
        raw.validate()?;
        Ok(raw)
    }

    pub fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.latitude) {
            return Err(out_of_range("latitude", self.latitude));
        }
        if !(-180.0..=180.0).contains(&self.longitude) {
            return Err(out_of_range("longitude", self.longitude));
        }
        Ok(())
    }

    pub fn minute_of_day(&self) -> u32 {
        minute_of_day(&self.timestamp)
    }

    pub fn minute_of_week(&self) -> u32 {
        minute_of_week(&self.timestamp)
    }

    pub fn day_index(&self) -> i64 {
        day_index(&self.timestamp)
    }
}

pub fn minute_of_day(ts: &NaiveDateTime) -> u32 {
    ts.hour() * 60 + ts.minute()
}

/// Minutes past Sunday 00:00 of the week containing `ts`.
pub fn minute_of_week(ts: &NaiveDateTime) -> u32 {
    ts.weekday().num_days_from_sunday() * MINUTES_PER_DAY + minute_of_day(ts)
}

/// Whole local days since 1970-01-01, the clock used for weight decay.
pub fn day_index(ts: &NaiveDateTime) -> i64 {
    ts.and_utc().timestamp().div_euclid(86_400)
}

/// Whole local minutes since 1970-01-01 00:00.
pub fn epoch_minutes(ts: &NaiveDateTime) -> i64 {
    ts.and_utc().timestamp().div_euclid(60)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    /// Multiplier applied to raw degrees of latitude and longitude.
    pub geo_scale: f64,
    /// Multiplier on all four time coordinates.
    pub time_weight: f64,
    /// Extra multiplier on the time-of-week pair only.
    pub week_weight: f64,
    pub dims: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            geo_scale: 10.0,
            time_weight: 1.0,
            week_weight: 0.1,
            dims: EMBEDDED_DIMS,
        }
    }
}

impl EmbeddingConfig {
    /// Unit weights on every component: the plain cyclic encoding.
    pub fn unit() -> Self {
        Self {
            geo_scale: 1.0,
            time_weight: 1.0,
            week_weight: 1.0,
            dims: EMBEDDED_DIMS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.geo_scale) {
            return Err(Error::Config(format!("geo_scale must be > 0, got {}", self.geo_scale)));
        }
        if !positive(self.time_weight) {
            return Err(Error::Config(format!(
                "time_weight must be > 0, got {}",
                self.time_weight
            )));
        }
        if !positive(self.week_weight) {
            return Err(Error::Config(format!(
                "week_weight must be > 0, got {}",
                self.week_weight
            )));
        }
        if self.dims != EMBEDDED_DIMS {
            return Err(Error::Config(format!(
                "dims must be {EMBEDDED_DIMS} for the time+geo layout, got {}",
                self.dims
            )));
        }
        Ok(())
    }

    /// Radius of the circle the time-of-day pair lies on.
    pub fn day_radius(&self) -> f64 {
        self.time_weight
    }

    /// Radius of the circle the time-of-week pair lies on.
    pub fn week_radius(&self) -> f64 {
        self.time_weight * self.week_weight
    }
}

/// A point in the embedding space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextVector(pub Vec<f64>);

impl ContextVector {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl fmt::Display for ContextVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c:.4}")?;
        }
        f.write_str("]")
    }
}

fn cyclic(fraction: f64) -> (f64, f64) {
    let angle = TAU * fraction;
    (angle.sin(), angle.cos())
}

pub fn embed_time_of_day(minutes_past_midnight: u32) -> Result<(f64, f64)> {
    if minutes_past_midnight >= MINUTES_PER_DAY {
        return Err(out_of_range("minute of day", minutes_past_midnight));
    }
    Ok(cyclic(f64::from(minutes_past_midnight) / f64::from(MINUTES_PER_DAY)))
}

pub fn embed_time_of_week(minutes_past_sunday_midnight: u32) -> Result<(f64, f64)> {
    if minutes_past_sunday_midnight >= MINUTES_PER_WEEK {
        return Err(out_of_range("minute of week", minutes_past_sunday_midnight));
    }
    Ok(cyclic(
        f64::from(minutes_past_sunday_midnight) / f64::from(MINUTES_PER_WEEK),
    ))
}

pub fn embed(raw: &RawContext, cfg: &EmbeddingConfig) -> Result<ContextVector> {
    raw.validate()?;
    cfg.validate()?;
    let (day_sin, day_cos) = embed_time_of_day(raw.minute_of_day())?;
    let (week_sin, week_cos) = embed_time_of_week(raw.minute_of_week())?;
    let tw = cfg.day_radius();
    let ww = cfg.week_radius();
    Ok(ContextVector(vec![
        tw * day_sin,
        tw * day_cos,
        ww * week_sin,
        ww * week_cos,
        cfg.geo_scale * raw.latitude,
        cfg.geo_scale * raw.longitude,
    ]))
}

pub fn euclidean_distance(a: &ContextVector, b: &ContextVector) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dims(),
            got: b.dims(),
        });
    }
    Ok(squared_distance(a.coords(), b.coords()).sqrt())
}

/// Squared L2 distance; callers guarantee equal lengths.
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Pulls a (sin, cos) pair back onto the circle of the given radius.
/// Returns `None` when the pair is too close to the origin to carry an angle.
pub fn reproject_pair(sin: f64, cos: f64, radius: f64) -> Option<(f64, f64)> {
    let norm = sin.hypot(cos);
    if norm < 1e-12 {
        return None;
    }
    Some((radius * sin / norm, radius * cos / norm))
}

/// Fraction of a full turn in `[0, 1)` encoded by a (sin, cos) pair.
pub fn pair_to_fraction(sin: f64, cos: f64) -> f64 {
    let turn = sin.atan2(cos) / TAU;
    if turn < 0.0 {
        turn + 1.0
    } else {
        turn
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn at(y: i32, m: u32, d: u32, hh: u32, mm: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(y, m, d)
            .unwrap()
            .and_hms_opt(hh, mm, 0)
            .unwrap()
    }

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12
    }

    #[test]
    fn time_of_day_cardinal_points() {
        assert!(close(embed_time_of_day(0).unwrap(), (0.0, 1.0)));
        assert!(close(embed_time_of_day(720).unwrap(), (0.0, -1.0)));
        assert!(close(embed_time_of_day(360).unwrap(), (1.0, 0.0)));
        assert!(embed_time_of_day(1440).is_err());
    }

    #[test]
    fn time_of_week_cardinal_points() {
        assert!(close(embed_time_of_week(0).unwrap(), (0.0, 1.0)));
        assert!(close(embed_time_of_week(5040).unwrap(), (0.0, -1.0)));
        assert!(close(embed_time_of_week(2520).unwrap(), (1.0, 0.0)));
        assert!(embed_time_of_week(10_080).is_err());
    }

    #[test]
    fn monday_morning_row() {
        // 2024-01-01 is a Monday.
        let raw = RawContext::new(at(2024, 1, 1, 8, 14), 12.970, 77.692).unwrap();
        assert_eq!(raw.minute_of_day(), 494);
        assert_eq!(raw.minute_of_week(), 1440 + 494);
        let v = embed(&raw, &EmbeddingConfig::unit()).unwrap();
        let day = embed_time_of_day(494).unwrap();
        let week = embed_time_of_week(1934).unwrap();
        assert_eq!((v.0[0], v.0[1]), day);
        assert_eq!((v.0[2], v.0[3]), week);
        assert_eq!(v.0[4], 12.970);
        assert_eq!(v.0[5], 77.692);
    }

    #[test]
    fn sunday_midnight_origin() {
        // 2024-01-07 is a Sunday.
        let raw = RawContext::new(at(2024, 1, 7, 0, 0), 0.0, 0.0).unwrap();
        let v = embed(&raw, &EmbeddingConfig::unit()).unwrap();
        let expected = [0.0, 1.0, 0.0, 1.0, 0.0, 0.0];
        for (a, b) in v.0.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn geo_scale_only_touches_geo_coords() {
        let raw = RawContext::new(at(2024, 3, 5, 17, 42), -33.9, 151.2).unwrap();
        let one = embed(&raw, &EmbeddingConfig::unit()).unwrap();
        let two = embed(
            &raw,
            &EmbeddingConfig {
                geo_scale: 2.0,
                ..EmbeddingConfig::unit()
            },
        )
        .unwrap();
        assert_eq!(&one.0[..4], &two.0[..4]);
        assert_eq!(two.0[LAT], 2.0 * one.0[LAT]);
        assert_eq!(two.0[LON], 2.0 * one.0[LON]);
    }

    #[test]
    fn rejects_bad_coordinates() {
        assert!(RawContext::new(at(2024, 1, 1, 0, 0), 91.0, 0.0).is_err());
        assert!(RawContext::new(at(2024, 1, 1, 0, 0), 0.0, -180.5).is_err());
    }

    #[test]
    fn rejects_bad_config() {
        let raw = RawContext::new(at(2024, 1, 1, 0, 0), 0.0, 0.0).unwrap();
        let cfg = EmbeddingConfig {
            geo_scale: 0.0,
            ..Default::default()
        };
        assert!(matches!(embed(&raw, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn distance_examples() {
        let a = ContextVector(vec![0.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(euclidean_distance(&a, &a).unwrap(), 0.0);
        let b = ContextVector(vec![0.0, 0.0, 0.0, 0.0, 3.0, 0.0]);
        let c = ContextVector(vec![0.0, 0.0, 0.0, 0.0, 0.0, 4.0]);
        assert_eq!(euclidean_distance(&b, &c).unwrap(), 5.0);
        let short = ContextVector(vec![0.0; 5]);
        assert!(matches!(
            euclidean_distance(&a, &short),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn midnight_wraps_around() {
        let v = |m| {
            let (s, c) = embed_time_of_day(m).unwrap();
            ContextVector(vec![s, c])
        };
        let near = euclidean_distance(&v(1439), &v(0)).unwrap();
        let hour = euclidean_distance(&v(1380), &v(0)).unwrap();
        assert!(near < hour);
    }

    #[test]
    fn reprojection_and_angle_recovery() {
        let (s, c) = embed_time_of_day(570).unwrap();
        let (s2, c2) = reproject_pair(0.3 * s, 0.3 * c, 2.0).unwrap();
        assert!((s2.hypot(c2) - 2.0).abs() < 1e-12);
        let minutes = pair_to_fraction(s2, c2) * 1440.0;
        assert!((minutes - 570.0).abs() < 1e-9);
        assert!(reproject_pair(0.0, 0.0, 1.0).is_none());
    }

    #[test]
    fn day_index_is_floor_of_local_days() {
        assert_eq!(day_index(&at(1970, 1, 1, 23, 59)), 0);
        assert_eq!(day_index(&at(1970, 1, 2, 0, 0)), 1);
        assert_eq!(day_index(&at(1969, 12, 31, 12, 0)), -1);
    }
}
