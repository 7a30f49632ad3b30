use chrono::NaiveDateTime;

use crate::embedding::RawContext;
use crate::error::Result;

/// One intent-labelled user action with its local time and position.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextEvent {
    pub user_id: String,
    pub intent: String,
    pub timestamp: NaiveDateTime,
    pub latitude: f64,
    pub longitude: f64,
}

impl ContextEvent {
    pub fn raw(&self) -> Result<RawContext> {
        RawContext::new(self.timestamp, self.latitude, self.longitude)
    }
}
