//! Seeded synthetic event streams for one user: a routine of recurring
//! slots with Gaussian time jitter, optional branching alternatives, one-off
//! noise, and gradual or sudden drifts.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with `RoutineSpec::seed`;
//! jitter uses `rand_distr::Normal`, resampled until it falls within three
//! standard deviations. Draw order is fixed: per day, branch arms first, then
//! per slot an occurrence draw and a jitter draw, then noise.

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::embedding::MINUTES_PER_DAY;
use crate::error::{Error, Result};
use crate::event::ContextEvent;

pub type Location = (f64, f64);

/// Named places used by the canned scenarios.
pub mod places {
    use super::Location;

    pub const HOME: Location = (12.970, 77.692);
    pub const OFFICE: Location = (13.010, 77.740);
    pub const COMMUTE: Location = (12.990, 77.650);
    pub const NEW_HOME: Location = (12.910, 77.600);
}

/// Days of the week a slot recurs on, indexed from Sunday.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Weekdays(pub [bool; 7]);

impl Weekdays {
    pub const EVERY_DAY: Weekdays = Weekdays([true; 7]);
    pub const WORKDAYS: Weekdays = Weekdays([false, true, true, true, true, true, false]);

    pub fn only(day_from_sunday: usize) -> Self {
        let mut days = [false; 7];
        days[day_from_sunday % 7] = true;
        Weekdays(days)
    }

    pub fn contains(&self, day_from_sunday: u32) -> bool {
        self.0[day_from_sunday as usize % 7]
    }
}

/// One of several mutually exclusive alternatives drawn once per day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchArm {
    pub group: u32,
    pub arm: u32,
    /// Number of equiprobable arms in the group.
    pub arms: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    pub intent: String,
    /// Mean minute of the day the slot happens at.
    pub time_of_day: u32,
    pub days: Weekdays,
    pub time_jitter_sd: f64,
    pub location: Location,
    pub occurrence_prob: f64,
    pub branch: Option<BranchArm>,
}

impl Slot {
    pub fn daily(intent: &str, hh: u32, mm: u32, location: Location) -> Self {
        Self {
            intent: intent.to_owned(),
            time_of_day: hh * 60 + mm,
            days: Weekdays::EVERY_DAY,
            time_jitter_sd: 0.0,
            location,
            occurrence_prob: 1.0,
            branch: None,
        }
    }

    pub fn prob(mut self, p: f64) -> Self {
        self.occurrence_prob = p;
        self
    }

    pub fn on(mut self, days: Weekdays) -> Self {
        self.days = days;
        self
    }

    pub fn arm(mut self, group: u32, arm: u32, arms: u32) -> Self {
        self.branch = Some(BranchArm { group, arm, arms });
        self
    }
}

/// Random one-off events sprinkled over each day.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    /// Mean events per day; the fractional part is a Bernoulli draw.
    pub events_per_day: f64,
    pub intents: Vec<String>,
    /// Earliest and latest minute of day for noise events.
    pub minutes: (u32, u32),
    pub lat_range: (f64, f64),
    pub lon_range: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutineSpec {
    pub user_id: String,
    pub slots: Vec<Slot>,
    pub duration_days: u32,
    pub seed: u64,
    pub start: NaiveDate,
    pub noise: Option<NoiseSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DriftSpec {
    /// From `start_day` on, the slot moves later by `shift_minutes_per_day`
    /// for every elapsed day (earlier when negative).
    Gradual {
        target_slot: usize,
        start_day: u32,
        shift_minutes_per_day: f64,
    },
    /// From `shift_day` on, the slot takes a new time and/or location.
    Sudden {
        target_slot: usize,
        shift_day: u32,
        new_time_of_day: Option<u32>,
        new_location: Option<Location>,
    },
}

impl DriftSpec {
    fn target(&self) -> usize {
        match self {
            DriftSpec::Gradual { target_slot, .. } | DriftSpec::Sudden { target_slot, .. } => {
                *target_slot
            }
        }
    }
}

/// First Monday of 2024; canned scenarios start here.
pub fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2024, 1, 1).expect("valid date")
}

impl RoutineSpec {
    pub fn new(user_id: &str, slots: Vec<Slot>, duration_days: u32, seed: u64) -> Self {
        Self {
            user_id: user_id.to_owned(),
            slots,
            duration_days,
            seed,
            start: default_start(),
            noise: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_duration(mut self, days: u32) -> Self {
        self.duration_days = days;
        self
    }

    /// Sets the same jitter on every slot.
    pub fn with_jitter(mut self, sd_minutes: f64) -> Self {
        for s in &mut self.slots {
            s.time_jitter_sd = sd_minutes;
        }
        self
    }

    pub fn with_noise(mut self, noise: NoiseSpec) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn with_user(mut self, user_id: &str) -> Self {
        self.user_id = user_id.to_owned();
        self
    }

    pub fn validate(&self, drifts: &[DriftSpec]) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.user_id.is_empty() {
            return bad("user id must not be empty".into());
        }
        for (i, s) in self.slots.iter().enumerate() {
            if s.intent.is_empty() {
                return bad(format!("slot {i}: empty intent"));
            }
            if s.time_of_day >= MINUTES_PER_DAY {
                return bad(format!("slot {i}: time of day {} out of range", s.time_of_day));
            }
            if !(0.0..=1.0).contains(&s.occurrence_prob) {
                return bad(format!("slot {i}: probability {} out of range", s.occurrence_prob));
            }
            if !(s.time_jitter_sd >= 0.0 && s.time_jitter_sd.is_finite()) {
                return bad(format!("slot {i}: bad jitter {}", s.time_jitter_sd));
            }
            if !valid_location(s.location) {
                return bad(format!("slot {i}: bad location {:?}", s.location));
            }
            if let Some(b) = s.branch {
                if b.arms == 0 || b.arm >= b.arms {
                    return bad(format!("slot {i}: arm {} of {}", b.arm, b.arms));
                }
            }
        }
        if let Some(n) = &self.noise {
            if !(n.events_per_day >= 0.0 && n.events_per_day.is_finite()) {
                return bad(format!("noise rate {}", n.events_per_day));
            }
            if n.events_per_day > 0.0 && n.intents.is_empty() {
                return bad("noise needs at least one intent".into());
            }
            if n.minutes.0 > n.minutes.1 || n.minutes.1 >= MINUTES_PER_DAY {
                return bad(format!("noise minutes {:?}", n.minutes));
            }
            if !valid_location((n.lat_range.0, n.lon_range.0))
                || !valid_location((n.lat_range.1, n.lon_range.1))
                || n.lat_range.0 > n.lat_range.1
                || n.lon_range.0 > n.lon_range.1
            {
                return bad("noise bounding box".into());
            }
        }
        for d in drifts {
            let target = d.target();
            let Some(slot) = self.slots.get(target) else {
                return bad(format!("drift targets missing slot {target}"));
            };
            match d {
                DriftSpec::Gradual {
                    start_day,
                    shift_minutes_per_day,
                    ..
                } => {
                    let days = f64::from(self.duration_days.saturating_sub(*start_day));
                    let end = f64::from(slot.time_of_day) + shift_minutes_per_day * days;
                    // Stay on the slot's own day so the weekly pattern holds.
                    if !(0.0..f64::from(MINUTES_PER_DAY)).contains(&end) {
                        return bad(format!(
                            "gradual drift moves slot {target} off its day (ends at minute {end:.0})"
                        ));
                    }
                }
                DriftSpec::Sudden {
                    new_time_of_day,
                    new_location,
                    ..
                } => {
                    if new_time_of_day.is_some_and(|t| t >= MINUTES_PER_DAY) {
                        return bad(format!("sudden drift time for slot {target}"));
                    }
                    if new_location.is_some_and(|l| !valid_location(l)) {
                        return bad(format!("sudden drift location for slot {target}"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn valid_location((lat, lon): Location) -> bool {
    (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)
}

fn truncated_normal(rng: &mut ChaCha8Rng, sd: f64) -> f64 {
    if sd == 0.0 {
        return 0.0;
    }
    let normal = Normal::new(0.0, sd).expect("sd validated");
    loop {
        let x = normal.sample(rng);
        if x.abs() <= 3.0 * sd {
            return x;
        }
    }
}

/// Effective time and location of a slot on `day` after drifts.
fn drifted(slot: &Slot, index: usize, day: u32, drifts: &[DriftSpec]) -> (f64, Location) {
    let mut minute = f64::from(slot.time_of_day);
    let mut location = slot.location;
    for d in drifts.iter().filter(|d| d.target() == index) {
        match d {
            DriftSpec::Gradual {
                start_day,
                shift_minutes_per_day,
                ..
            } => {
                if day > *start_day {
                    minute += shift_minutes_per_day * f64::from(day - start_day);
                }
            }
            DriftSpec::Sudden {
                shift_day,
                new_time_of_day,
                new_location,
                ..
            } => {
                if day >= *shift_day {
                    if let Some(t) = new_time_of_day {
                        minute = f64::from(*t);
                    }
                    if let Some(l) = new_location {
                        location = *l;
                    }
                }
            }
        }
    }
    (minute, location)
}

/// Expands a routine into a strictly time-ordered event stream.
pub fn generate(spec: &RoutineSpec, drifts: &[DriftSpec]) -> Result<Vec<ContextEvent>> {
    spec.validate(drifts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut groups: Vec<(u32, u32)> = spec
        .slots
        .iter()
        .filter_map(|s| s.branch.map(|b| (b.group, b.arms)))
        .collect();
    groups.sort_unstable();
    groups.dedup_by_key(|g| g.0);

    let mut events = Vec::new();
    for day in 0..spec.duration_days {
        let date = spec.start + Duration::days(i64::from(day));
        let midnight = date.and_hms_opt(0, 0, 0).expect("midnight exists");
        let weekday = date.weekday().num_days_from_sunday();
        let chosen: Vec<(u32, u32)> = groups
            .iter()
            .map(|&(g, arms)| (g, rng.random_range(0..arms)))
            .collect();

        for (i, slot) in spec.slots.iter().enumerate() {
            let occurs = rng.random_bool(slot.occurrence_prob);
            let jitter = truncated_normal(&mut rng, slot.time_jitter_sd);
            if !occurs || !slot.days.contains(weekday) {
                continue;
            }
            if let Some(b) = slot.branch {
                if !chosen.iter().any(|&(g, arm)| g == b.group && arm == b.arm) {
                    continue;
                }
            }
            let (minute, (lat, lon)) = drifted(slot, i, day, drifts);
            let at = midnight + Duration::minutes((minute + jitter).round() as i64);
            events.push(ContextEvent {
                user_id: spec.user_id.clone(),
                intent: slot.intent.clone(),
                timestamp: at,
                latitude: lat,
                longitude: lon,
            });
        }

        if let Some(noise) = &spec.noise {
            let whole = noise.events_per_day.floor();
            let extra = rng.random_bool(noise.events_per_day - whole);
            let count = whole as usize + usize::from(extra);
            for _ in 0..count {
                let intent = &noise.intents[rng.random_range(0..noise.intents.len())];
                let minute = rng.random_range(noise.minutes.0..=noise.minutes.1);
                let lat = rng.random_range(noise.lat_range.0..=noise.lat_range.1);
                let lon = rng.random_range(noise.lon_range.0..=noise.lon_range.1);
                events.push(ContextEvent {
                    user_id: spec.user_id.clone(),
                    intent: intent.clone(),
                    timestamp: midnight + Duration::minutes(i64::from(minute)),
                    latitude: lat,
                    longitude: lon,
                });
            }
        }
    }
    events.sort_by_key(|e| e.timestamp);
    let mut last: Option<NaiveDateTime> = None;
    for e in &mut events {
        if let Some(prev) = last {
            if e.timestamp <= prev {
                e.timestamp = prev + Duration::minutes(1);
            }
        }
        last = Some(e.timestamp);
    }
    Ok(events)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Fixed daily routine, no jitter.
    Steady,
    /// Isolated slots that all drift later by a few minutes per day.
    GradualDrift,
    /// Steady routine that moves home and shifts the morning at day 29.
    SuddenShift,
    /// The same context is followed by different intents depending on the
    /// branch taken earlier in the morning.
    BranchingSequence,
    /// `GradualDrift` plus random one-off events.
    OneOffNoise,
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "steady" => Self::Steady,
            "gradual_drift" => Self::GradualDrift,
            "sudden_shift" => Self::SuddenShift,
            "branching_sequence" => Self::BranchingSequence,
            "one_off_noise" => Self::OneOffNoise,
            other => return Err(Error::UnknownScenario(other.to_owned())),
        })
    }
}

/// First day index (0-based) of the new regime in [`Scenario::SuddenShift`].
pub const SUDDEN_SHIFT_DAY: u32 = 28;
/// Gradual drift starts moving slots after this day index.
pub const GRADUAL_DRIFT_START: u32 = 4;

/// Rare intents used for one-off noise.
pub fn one_off_intents() -> Vec<String> {
    [
        "Book Ticket", "Order Food", "Pay Bill", "Find Parking", "Check Weather",
        "Play Game", "Shop Online", "Read Book", "Watch Video", "Set Alarm",
        "Navigate", "Take Photo", "Translate", "Check Stocks", "Track Package",
    ]
    .iter()
    .map(|s| (*s).to_owned())
    .collect()
}

pub fn default_noise() -> NoiseSpec {
    NoiseSpec {
        events_per_day: 1.5,
        intents: one_off_intents(),
        minutes: (7 * 60, 23 * 60),
        lat_range: (12.90, 13.05),
        lon_range: (77.58, 77.76),
    }
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Steady,
        Scenario::GradualDrift,
        Scenario::SuddenShift,
        Scenario::BranchingSequence,
        Scenario::OneOffNoise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Steady => "steady",
            Self::GradualDrift => "gradual_drift",
            Self::SuddenShift => "sudden_shift",
            Self::BranchingSequence => "branching_sequence",
            Self::OneOffNoise => "one_off_noise",
        }
    }

    pub fn spec(self) -> (RoutineSpec, Vec<DriftSpec>) {
        use places::*;
        match self {
            Self::Steady => (RoutineSpec::new("u0", steady_slots(), 28, 42), Vec::new()),
            Self::GradualDrift => drifting_routine(),
            Self::OneOffNoise => {
                let (spec, drifts) = drifting_routine();
                (spec.with_noise(default_noise()), drifts)
            }
            Self::SuddenShift => {
                let slots = steady_slots();
                let mut drifts = Vec::new();
                for (i, s) in slots.iter().enumerate() {
                    let moved_home = (s.location == HOME).then_some(NEW_HOME);
                    let later = (s.time_of_day < 12 * 60).then_some(s.time_of_day + 75);
                    if moved_home.is_some() || later.is_some() {
                        drifts.push(DriftSpec::Sudden {
                            target_slot: i,
                            shift_day: SUDDEN_SHIFT_DAY,
                            new_time_of_day: later,
                            new_location: moved_home,
                        });
                    }
                }
                let spec = RoutineSpec::new("u0", slots, 56, 42).with_jitter(10.0);
                (spec, drifts)
            }
            Self::BranchingSequence => {
                let slots = vec![
                    Slot::daily("Check Mail", 7, 0, HOME),
                    Slot::daily("Read News", 7, 20, HOME).arm(0, 0, 2),
                    Slot::daily("Attend Calls", 7, 20, HOME).arm(0, 1, 2),
                    Slot::daily("Commutes to Office", 7, 45, HOME),
                    Slot::daily("Listen Music", 8, 10, COMMUTE).arm(0, 0, 2),
                    Slot::daily("Read News", 8, 10, COMMUTE).arm(0, 1, 2),
                    Slot::daily("Check Mail", 9, 30, OFFICE),
                    Slot::daily("Call Contact", 13, 0, OFFICE),
                    Slot::daily("Social Connect", 19, 0, HOME),
                ];
                (RoutineSpec::new("u0", slots, 42, 42).with_jitter(5.0), Vec::new())
            }
        }
    }
}

fn steady_slots() -> Vec<Slot> {
    use places::*;
    vec![
        Slot::daily("Check Mail", 7, 0, HOME),
        Slot::daily("Read News", 7, 40, HOME),
        Slot::daily("Commutes to Office", 8, 30, HOME),
        Slot::daily("Call Contact", 12, 30, OFFICE),
        Slot::daily("Listen Music", 18, 30, COMMUTE),
        Slot::daily("Social Connect", 21, 0, HOME),
    ]
}

fn drifting_routine() -> (RoutineSpec, Vec<DriftSpec>) {
    use places::*;
    let slots = vec![
        Slot::daily("Check Mail", 7, 0, HOME),
        Slot::daily("Read News", 8, 40, HOME),
        Slot::daily("Call Contact", 10, 20, OFFICE),
        Slot::daily("Social Connect", 12, 0, OFFICE),
        Slot::daily("Attend Calls", 13, 40, OFFICE),
        Slot::daily("Listen Music", 15, 20, OFFICE),
        Slot::daily("Play Music", 21, 30, HOME).prob(0.5),
    ];
    let drifts = (0..6)
        .map(|i| DriftSpec::Gradual {
            target_slot: i,
            start_day: GRADUAL_DRIFT_START,
            shift_minutes_per_day: 5.0,
        })
        .collect();
    (RoutineSpec::new("u0", slots, 28, 42).with_jitter(10.0), drifts)
}

/// Looks up a canned scenario by name.
pub fn scenario(name: &str) -> Result<(RoutineSpec, Vec<DriftSpec>)> {
    Ok(name.parse::<Scenario>()?.spec())
}
