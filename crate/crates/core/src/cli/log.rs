//! Event-log CSV: UTF-8, header `user_id,intent,timestamp,lat,lon`.
//!
//! Timestamps are local ISO-8601 date-times, `YYYY-MM-DDTHH:MM` with optional
//! `:SS`. Extra columns are ignored with a warning; missing ones are an error.
//! Rows may interleave users but each user's rows must be time-ordered.

use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDateTime;

use crate::error::{Error, Result};
use crate::event::ContextEvent;

pub const COLUMNS: [&str; 5] = ["user_id", "intent", "timestamp", "lat", "lon"];
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M";

pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
        .or_else(|_| NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT))
        .ok()
}

pub fn format_timestamp(t: &NaiveDateTime) -> String {
    if t.and_utc().timestamp() % 60 == 0 {
        t.format(TIMESTAMP_FORMAT).to_string()
    } else {
        t.format("%Y-%m-%dT%H:%M:%S").to_string()
    }
}

/// Parses a log; `name` is used in error messages. Returns the events and
/// any warnings about ignored columns.
pub fn parse_log<R: Read>(reader: R, name: &str) -> Result<(Vec<ContextEvent>, Vec<String>)> {
    let perr = |line: u64, message: String| Error::Parse {
        path: name.to_owned(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(perr(1, e.to_string())),
    };
    let mut warnings = Vec::new();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Ok((Vec::new(), warnings));
    }
    let mut idx = [0usize; 5];
    for (slot, col) in idx.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == col)
            .ok_or_else(|| perr(1, format!("missing required column `{col}`")))?;
    }
    for h in headers.iter().filter(|h| !COLUMNS.contains(h)) {
        warnings.push(format!("{name}: ignoring unknown column `{h}`"));
    }

    let mut events = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            perr(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<&str> {
            let v = row.get(idx[i]).unwrap_or("");
            if v.is_empty() {
                Err(perr(line, format!("empty `{}`", COLUMNS[i])))
            } else {
                Ok(v)
            }
        };
        let number = |i: usize| -> Result<f64> {
            let v = field(i)?;
            v.parse::<f64>()
                .map_err(|_| perr(line, format!("`{}` is not a number: {v:?}", COLUMNS[i])))
        };
        let ts = field(2)?;
        let timestamp =
            parse_timestamp(ts).ok_or_else(|| perr(line, format!("bad timestamp {ts:?}")))?;
        let event = ContextEvent {
            user_id: field(0)?.to_owned(),
            intent: field(1)?.to_owned(),
            timestamp,
            latitude: number(3)?,
            longitude: number(4)?,
        };
        event.raw().map_err(|e| perr(line, e.to_string()))?;
        events.push(event);
    }
    Ok((events, warnings))
}

pub fn read_log(path: &Path) -> Result<(Vec<ContextEvent>, Vec<String>)> {
    let file = std::fs::File::open(path)?;
    parse_log(std::io::BufReader::new(file), &path.display().to_string())
}

pub fn write_log<W: Write>(writer: W, events: &[ContextEvent]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(COLUMNS).map_err(csv_err)?;
    for e in events {
        w.write_record([
            e.user_id.as_str(),
            e.intent.as_str(),
            &format_timestamp(&e.timestamp),
            &e.latitude.to_string(),
            &e.longitude.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "user_id,intent,timestamp,lat,lon\nu1,Read News,2024-01-01T08:14,12.97,77.69\nu1,Check Mail,2024-01-01T08:20:30,12.5,-3\n";
        let (events, warnings) = parse_log(text.as_bytes(), "t").unwrap();
        assert!(warnings.is_empty());
        assert_eq!(events.len(), 2);
        let mut out = Vec::new();
        write_log(&mut out, &events).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn extra_and_reordered_columns() {
        let text = "lat,lon,note,user_id,timestamp,intent\n1,2,x,u,2024-01-01T00:00,A\n";
        let (events, warnings) = parse_log(text.as_bytes(), "t").unwrap();
        assert_eq!(warnings.len(), 1);
        assert_eq!(events[0].intent, "A");
        assert_eq!(events[0].longitude, 2.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let missing = "user_id,intent,timestamp,lat\n";
        assert!(matches!(parse_log(missing.as_bytes(), "t"), Err(Error::Parse { line: 1, .. })));
        let bad = "user_id,intent,timestamp,lat,lon\nu,A,2024-01-01T00:00,1,2\nu,A,yesterday,1,2\n";
        assert!(matches!(parse_log(bad.as_bytes(), "t"), Err(Error::Parse { line: 3, .. })));
        let range = "user_id,intent,timestamp,lat,lon\nu,A,2024-01-01T00:00,91,2\n";
        assert!(matches!(parse_log(range.as_bytes(), "t"), Err(Error::Parse { line: 2, .. })));
        let short = "user_id,intent,timestamp,lat,lon\nu,A,2024-01-01T00:00,1\n";
        assert!(matches!(parse_log(short.as_bytes(), "t"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn empty_input() {
        assert!(parse_log("".as_bytes(), "t").unwrap().0.is_empty());
        assert!(parse_log("user_id,intent,timestamp,lat,lon\n".as_bytes(), "t").unwrap().0.is_empty());
    }
}
