//! The agent's calendar and its local planner.
//!
//! File format, one entry per line, whitespace separated:
//!
//! ```text
//! # date       start  end    kind      label
//! 1996-11-04   08:00  13:00  busy      Projektsitzung
//! 1996-11-05   10:00  11:00  reserved  n1
//! ```
//!
//! `kind` is `busy` or `reserved`; for reserved entries the label is the
//! negotiation id. Everything after the kind is the label.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::gsi::params::SessionParams;
use crate::time::{format_clock, parse_clock, Date, Interval, Moment, Weekday, MINUTES_PER_DAY};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub date: Date,
    pub start: u16,
    pub end: u16,
    /// Free text for busy entries, the negotiation id for reservations.
    pub label: String,
}

impl Entry {
    pub fn bounds(&self) -> (Moment, Moment) {
        (self.date.at(self.start), self.date.at(self.end))
    }

    pub fn interval(&self) -> Interval {
        Interval::on_day(self.date, self.start, self.end)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalendarError {
    #[error("calendar line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("interval {0} is not free")]
    ReserveConflict(String),
    #[error("interval {0} is not reserved under {1}")]
    FixWithoutReservation(String, String),
    #[error("interval {0} must lie within one day")]
    NotWithinDay(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Calendar {
    pub busy: Vec<Entry>,
    pub reserved: Vec<Entry>,
    pub workday_start: u16,
    pub workday_end: u16,
    pub weekend_days: BTreeSet<Weekday>,
    pub holidays: BTreeSet<Date>,
    pub min_gap: u32,
}

/// Splits a complete interval into a date and clock bounds if it lies
/// within one day.
fn day_bounds(iv: &Interval) -> Result<(Date, u16, u16), CalendarError> {
    let err = || CalendarError::NotWithinDay(iv.to_string());
    let (a, b) = iv.bounds().ok_or_else(err)?;
    let date = a.date();
    let start = a.minute_of_day();
    let end = b.0 - date.at(0).0;
    if b <= a || end > MINUTES_PER_DAY {
        return Err(err());
    }
    Ok((date, start, end as u16))
}

impl Calendar {
    pub fn new(params: &SessionParams) -> Calendar {
        Calendar {
            busy: Vec::new(),
            reserved: Vec::new(),
            workday_start: params.workday_start,
            workday_end: params.workday_end,
            weekend_days: params.weekend_days.clone(),
            holidays: params.holidays.clone(),
            min_gap: params.min_gap,
        }
    }

    pub fn parse(text: &str, params: &SessionParams) -> Result<Calendar, CalendarError> {
        let mut cal = Calendar::new(params);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| CalendarError::Parse { line: i + 1, message };
            let mut rest = line;
            let mut cols = Vec::new();
            for _ in 0..4 {
                let t = rest.trim_start();
                let end = t.find(char::is_whitespace).unwrap_or(t.len());
                if end > 0 {
                    cols.push(&t[..end]);
                }
                rest = &t[end..];
            }
            let label = rest.trim().to_string();
            let [date, start, end, kind] = cols[..] else {
                return Err(err("expected: date start end kind [label]".into()));
            };
            let date: Date = date.parse().map_err(|e: String| err(e))?;
            let start = parse_clock(start).ok_or_else(|| err(format!("bad clock '{start}'")))?;
            let end = parse_clock(end).ok_or_else(|| err(format!("bad clock '{end}'")))?;
            if start >= end {
                return Err(err("start must precede end".into()));
            }
            let entry = Entry { date, start, end, label };
            match kind {
                "busy" => cal.busy.push(entry),
                "reserved" if !entry.label.is_empty() => cal.reserved.push(entry),
                "reserved" => return Err(err("reserved entry needs a negotiation id".into())),
                other => return Err(err(format!("unknown kind '{other}'"))),
            }
        }
        Ok(cal)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (kind, list) in [("busy", &self.busy), ("reserved", &self.reserved)] {
            for e in list {
                let _ = writeln!(out, "{} {} {} {} {}", e.date, format_clock(e.start), format_clock(e.end), kind, e.label);
            }
        }
        out
    }

    pub fn is_working_day(&self, date: Date) -> bool {
        !self.weekend_days.contains(&date.weekday()) && !self.holidays.contains(&date)
    }

    /// Padded blocked spans, optionally ignoring one negotiation's own
    /// reservations.
    fn blocked(&self, except: Option<&str>) -> Vec<(i64, i64)> {
        let gap = i64::from(self.min_gap);
        self.busy
            .iter()
            .chain(self.reserved.iter().filter(|r| Some(r.label.as_str()) != except))
            .map(|e| {
                let (a, b) = e.bounds();
                (a.0 - gap, b.0 + gap)
            })
            .collect()
    }

    /// Maximal free sub-intervals of `range` within workday windows, each
    /// at least `duration` long, ascending.
    pub fn free_slots(&self, range: &Interval, duration: u32) -> Vec<Interval> {
        self.free_slots_for(range, duration, None)
    }

    /// As [`free_slots`](Self::free_slots), treating the reservations of
    /// negotiation `nid` as free.
    pub fn free_slots_for(&self, range: &Interval, duration: u32, nid: Option<&str>) -> Vec<Interval> {
        let Some((lo, hi)) = range.bounds() else { return Vec::new() };
        if duration == 0 || hi <= lo {
            return Vec::new();
        }
        let mut blocked = self.blocked(nid);
        blocked.sort_unstable();
        let mut out = Vec::new();
        let mut day = lo.date();
        while day.at(0) < hi {
            if self.is_working_day(day) {
                let ws = lo.0.max(day.at(self.workday_start).0);
                let we = hi.0.min(day.at(self.workday_end).0);
                let mut cursor = ws;
                for &(a, b) in &blocked {
                    if b <= cursor || a >= we {
                        continue;
                    }
                    if a > cursor && a - cursor >= i64::from(duration) {
                        out.push(Interval::from_moments(Moment(cursor), Moment(a)));
                    }
                    cursor = cursor.max(b);
                }
                if we > cursor && we - cursor >= i64::from(duration) {
                    out.push(Interval::from_moments(Moment(cursor), Moment(we)));
                }
            }
            day = day.add_days(1);
        }
        out
    }

    /// Earliest `duration`-long free slot in `range`.
    pub fn first_available(&self, range: &Interval, duration: u32) -> Option<Interval> {
        self.first_available_for(range, duration, None)
    }

    pub fn first_available_for(&self, range: &Interval, duration: u32, nid: Option<&str>) -> Option<Interval> {
        let slot = self.free_slots_for(range, duration, nid).into_iter().next()?;
        let (a, _) = slot.bounds()?;
        Some(Interval::from_moments(a, a.plus(duration.into())))
    }

    /// Whether `iv` fits entirely into free time, ignoring `nid`'s own
    /// reservations.
    pub fn is_free_for(&self, iv: &Interval, nid: Option<&str>) -> bool {
        let Some(minutes) = iv.minutes().filter(|m| *m > 0) else { return false };
        self.free_slots_for(iv, minutes as u32, nid).len() == 1
    }

    /// Blocks `iv` for negotiation `nid`. Other reservations of the same
    /// negotiation do not conflict.
    pub fn reserve(&mut self, iv: &Interval, nid: &str) -> Result<(), CalendarError> {
        let (date, start, end) = day_bounds(iv)?;
        if !self.is_free_for(iv, Some(nid)) {
            return Err(CalendarError::ReserveConflict(iv.to_string()));
        }
        self.reserved.push(Entry { date, start, end, label: nid.to_string() });
        Ok(())
    }

    /// Drops every reservation of `nid`.
    pub fn release(&mut self, nid: &str) {
        self.reserved.retain(|r| r.label != nid);
    }

    /// Turns the reservation covering `iv` into a busy entry and drops the
    /// negotiation's other reservations.
    pub fn fix(&mut self, iv: &Interval, nid: &str) -> Result<(), CalendarError> {
        let (date, start, end) = day_bounds(iv)?;
        let covered = self
            .reserved
            .iter()
            .any(|r| r.label == nid && r.date == date && r.start <= start && end <= r.end);
        if !covered {
            return Err(CalendarError::FixWithoutReservation(iv.to_string(), nid.to_string()));
        }
        self.release(nid);
        self.busy.push(Entry { date, start, end, label: nid.to_string() });
        Ok(())
    }

    pub fn reservations(&self, nid: &str) -> Vec<Interval> {
        self.reserved.iter().filter(|r| r.label == nid).map(Entry::interval).collect()
    }
}
