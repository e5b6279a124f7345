//! Capture instants in the sensor's `yyyymmddHHMMSS.xxxxxx` text format.
//!
//! Timestamps are naive local time. Only differences between two presses are
//! ever consumed, so the epoch is fixed at 1970-01-01 00:00:00 without a zone.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDate, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TEXT_LEN: usize = 21;
const MICROS_PER_SECOND: i64 = 1_000_000;
const MICROS_PER_DAY: i64 = 86_400 * MICROS_PER_SECOND;

/// Microseconds since 1970-01-01 00:00:00 (naive local time).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CaptureInstant(i64);

impl CaptureInstant {
    pub const EPOCH: CaptureInstant = CaptureInstant(0);

    /// Latest instant representable in a four-digit year.
    pub const MAX: CaptureInstant = CaptureInstant(253_402_300_799_999_999);

    pub fn from_micros(micros: i64) -> Result<Self> {
        if !(0..=Self::MAX.0).contains(&micros) {
            return Err(Error::domain(format!(
                "capture instant {micros} us is outside 1970..=9999"
            )));
        }
        Ok(CaptureInstant(micros))
    }

    pub fn micros_since_epoch(self) -> i64 {
        self.0
    }

    /// Signed difference `self - earlier` in microseconds.
    pub fn micros_since(self, earlier: CaptureInstant) -> i64 {
        self.0 - earlier.0
    }

    pub fn checked_add_micros(self, delta: i64) -> Result<Self> {
        Self::from_micros(self.0.saturating_add(delta))
    }
}

impl std::ops::Sub for CaptureInstant {
    type Output = i64;

    fn sub(self, rhs: Self) -> i64 {
        self.0 - rhs.0
    }
}

fn field_err(text: &str, field: &'static str, reason: impl Into<String>) -> Error {
    Error::Timestamp {
        text: text.to_string(),
        field,
        reason: reason.into(),
    }
}

fn digits(text: &str, range: std::ops::Range<usize>, field: &'static str) -> Result<u32> {
    let slice = &text.as_bytes()[range];
    let mut value = 0u32;
    for &b in slice {
        if !b.is_ascii_digit() {
            return Err(field_err(text, field, format!("non-digit character {:?}", b as char)));
        }
        value = value * 10 + u32::from(b - b'0');
    }
    Ok(value)
}

/// Parses `yyyymmddHHMMSS.xxxxxx` (exactly six fractional digits).
pub fn parse_timestamp(text: &str) -> Result<CaptureInstant> {
    if !text.is_ascii() || text.len() != TEXT_LEN {
        return Err(field_err(
            text,
            "length",
            format!("expected {TEXT_LEN} ASCII characters, got {}", text.chars().count()),
        ));
    }
    if text.as_bytes()[14] != b'.' {
        return Err(field_err(text, "separator", "expected '.' after the seconds field"));
    }
    let year = digits(text, 0..4, "year")?;
    let month = digits(text, 4..6, "month")?;
    let day = digits(text, 6..8, "day")?;
    let hour = digits(text, 8..10, "hour")?;
    let minute = digits(text, 10..12, "minute")?;
    let second = digits(text, 12..14, "second")?;
    let micros = digits(text, 15..21, "microseconds")?;

    if year < 1970 {
        return Err(field_err(text, "year", format!("{year} precedes 1970")));
    }
    if !(1..=12).contains(&month) {
        return Err(field_err(text, "month", format!("{month} not in 1..=12")));
    }
    let date = NaiveDate::from_ymd_opt(year as i32, month, day)
        .ok_or_else(|| field_err(text, "day", format!("{day} does not exist in {year:04}-{month:02}")))?;
    if hour > 23 {
        return Err(field_err(text, "hour", format!("{hour} not in 0..=23")));
    }
    if minute > 59 {
        return Err(field_err(text, "minute", format!("{minute} not in 0..=59")));
    }
    if second > 59 {
        return Err(field_err(text, "second", format!("{second} not in 0..=59")));
    }

    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).expect("epoch date");
    let days = (date - epoch).num_days();
    let seconds = i64::from(hour * 3600 + minute * 60 + second);
    Ok(CaptureInstant(
        days * MICROS_PER_DAY + seconds * MICROS_PER_SECOND + i64::from(micros),
    ))
}

impl fmt::Display for CaptureInstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dt = DateTime::from_timestamp_micros(self.0)
            .ok_or(fmt::Error)?
            .naive_utc();
        write!(
            f,
            "{:04}{:02}{:02}{:02}{:02}{:02}.{:06}",
            dt.year(),
            dt.month(),
            dt.day(),
            dt.hour(),
            dt.minute(),
            dt.second(),
            self.0.rem_euclid(MICROS_PER_SECOND)
        )
    }
}

impl FromStr for CaptureInstant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_timestamp(s)
    }
}
