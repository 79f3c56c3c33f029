//! Calendar arithmetic and the possibly-underspecified time records that
//! flow between extraction, semantics, generation and the agents.
//!
//! Dates use the proleptic Gregorian calendar. Absolute instants are kept as
//! [`Moment`]s, a count of minutes since 1970-01-01 00:00, so that interval
//! reasoning never has to care about month or year boundaries.

use std::cmp::Ordering;
use std::fmt;

pub const MINUTES_PER_DAY: i64 = 24 * 60;

/// ISO weekday number, Monday = 1 through Sunday = 7.
pub type Weekday = u8;

pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(year) => 29,
        2 => 28,
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    pub year: i32,
    pub month: u8,
    pub day: u8,
}

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Option<Date> {
        if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return None;
        }
        Some(Date { year, month, day })
    }

    /// Days since 1970-01-01 (negative before).
    pub fn day_number(self) -> i64 {
        // Era-based civil-to-days conversion over 400-year cycles.
        let y = i64::from(self.year) - i64::from(self.month <= 2);
        let era = y.div_euclid(400);
        let yoe = y - era * 400;
        let m = i64::from(self.month);
        let mp = (m + 9) % 12;
        let doy = (153 * mp + 2) / 5 + i64::from(self.day) - 1;
        let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        era * 146_097 + doe - 719_468
    }

    pub fn from_day_number(days: i64) -> Date {
        let z = days + 719_468;
        let era = z.div_euclid(146_097);
        let doe = z - era * 146_097;
        let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
        let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        let mp = (5 * doy + 2) / 153;
        let day = (doy - (153 * mp + 2) / 5 + 1) as u8;
        let month = if mp < 10 { mp + 3 } else { mp - 9 } as u8;
        let year = (yoe + era * 400 + i64::from(month <= 2)) as i32;
        Date { year, month, day }
    }

    pub fn weekday(self) -> Weekday {
        // 1970-01-01 was a Thursday (4).
        ((self.day_number() + 3).rem_euclid(7) + 1) as Weekday
    }

    pub fn add_days(self, days: i64) -> Date {
        Date::from_day_number(self.day_number() + days)
    }

    /// Monday of the ISO week containing this date.
    pub fn week_start(self) -> Date {
        self.add_days(-(i64::from(self.weekday()) - 1))
    }

    pub fn at(self, minute_of_day: u16) -> Moment {
        Moment(self.day_number() * MINUTES_PER_DAY + i64::from(minute_of_day))
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

impl std::str::FromStr for Date {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.trim().splitn(3, '-');
        let mut next = |what: &str| {
            parts
                .next()
                .and_then(|p| p.parse::<i32>().ok())
                .ok_or_else(|| format!("bad {what} in date '{s}'"))
        };
        let (y, m, d) = (next("year")?, next("month")?, next("day")?);
        Date::new(y, m as u8, d as u8).ok_or_else(|| format!("invalid date '{s}'"))
    }
}

/// Minutes since 1970-01-01 00:00.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Moment(pub i64);

impl Moment {
    pub fn date(self) -> Date {
        Date::from_day_number(self.0.div_euclid(MINUTES_PER_DAY))
    }

    pub fn minute_of_day(self) -> u16 {
        self.0.rem_euclid(MINUTES_PER_DAY) as u16
    }

    pub fn plus(self, minutes: i64) -> Moment {
        Moment(self.0 + minutes)
    }

    pub fn to_point(self) -> TimePoint {
        let d = self.date();
        let m = self.minute_of_day();
        TimePoint {
            year: Some(d.year),
            month: Some(d.month),
            day: Some(d.day),
            weekday: None,
            hour: Some((m / 60) as u8),
            minute: Some((m % 60) as u8),
        }
    }
}

impl fmt::Display for Moment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.minute_of_day();
        write!(f, "{}T{:02}:{:02}", self.date(), m / 60, m % 60)
    }
}

impl std::str::FromStr for Moment {
    type Err = String;

    /// Accepts `YYYY-MM-DDTHH:MM`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (d, t) = s
            .trim()
            .split_once('T')
            .ok_or_else(|| format!("expected YYYY-MM-DDTHH:MM, got '{s}'"))?;
        let date: Date = d.parse()?;
        let minute = parse_clock(t).ok_or_else(|| format!("bad clock time in '{s}'"))?;
        Ok(date.at(minute))
    }
}

/// Parses `HH:MM` into minutes of the day.
pub fn parse_clock(s: &str) -> Option<u16> {
    let (h, m) = s.trim().split_once(':')?;
    let h: u16 = h.parse().ok()?;
    let m: u16 = m.parse().ok()?;
    (h <= 24 && m < 60 && h * 60 + m <= 24 * 60).then_some(h * 60 + m)
}

pub fn format_clock(minute_of_day: u16) -> String {
    format!("{:02}:{:02}", minute_of_day / 60, minute_of_day % 60)
}

/// A calendar time with any subset of its fields known.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct TimePoint {
    pub year: Option<i32>,
    pub month: Option<u8>,
    pub day: Option<u8>,
    pub weekday: Option<Weekday>,
    pub hour: Option<u8>,
    pub minute: Option<u8>,
}

impl TimePoint {
    pub fn on_date(date: Date) -> TimePoint {
        TimePoint {
            year: Some(date.year),
            month: Some(date.month),
            day: Some(date.day),
            ..TimePoint::default()
        }
    }

    pub fn clock(hour: u8, minute: u8) -> TimePoint {
        TimePoint {
            hour: Some(hour),
            minute: Some(minute),
            ..TimePoint::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.specified_fields() == 0
    }

    pub fn specified_fields(&self) -> u32 {
        [
            self.year.is_some(),
            self.month.is_some(),
            self.day.is_some(),
            self.weekday.is_some(),
            self.hour.is_some(),
            self.minute.is_some(),
        ]
        .iter()
        .filter(|b| **b)
        .count() as u32
    }

    pub fn has_date_fields(&self) -> bool {
        self.year.is_some() || self.month.is_some() || self.day.is_some() || self.weekday.is_some()
    }

    pub fn has_clock(&self) -> bool {
        self.hour.is_some()
    }

    /// The calendar date, when year, month and day are all present and valid.
    pub fn date(&self) -> Option<Date> {
        Date::new(self.year?, self.month?, self.day?)
    }

    pub fn minute_of_day(&self) -> Option<u16> {
        let h = u16::from(self.hour?);
        Some(h * 60 + u16::from(self.minute.unwrap_or(0)))
    }

    /// Fully specified down to the minute.
    pub fn is_complete(&self) -> bool {
        self.date().is_some() && self.hour.is_some() && self.minute.is_some()
    }

    pub fn moment(&self) -> Option<Moment> {
        if !self.is_complete() {
            return None;
        }
        Some(self.date()?.at(self.minute_of_day()?))
    }

    pub fn with_date(mut self, date: Date) -> TimePoint {
        self.year = Some(date.year);
        self.month = Some(date.month);
        self.day = Some(date.day);
        self
    }

    pub fn with_clock(mut self, minute_of_day: u16) -> TimePoint {
        self.hour = Some((minute_of_day / 60) as u8);
        self.minute = Some((minute_of_day % 60) as u8);
        self
    }

    /// Fields of `self` win; missing ones are taken from `other`.
    pub fn or(self, other: TimePoint) -> TimePoint {
        TimePoint {
            year: self.year.or(other.year),
            month: self.month.or(other.month),
            day: self.day.or(other.day),
            weekday: self.weekday.or(other.weekday),
            hour: self.hour.or(other.hour),
            minute: self.minute.or(other.minute),
        }
    }

    /// Unifies two points; `None` when a field is present in both with different values.
    pub fn unify(self, other: TimePoint) -> Option<TimePoint> {
        fn field<T: PartialEq + Copy>(a: Option<T>, b: Option<T>) -> Result<Option<T>, ()> {
            match (a, b) {
                (Some(x), Some(y)) if x != y => Err(()),
                (x, y) => Ok(x.or(y)),
            }
        }
        Some(TimePoint {
            year: field(self.year, other.year).ok()?,
            month: field(self.month, other.month).ok()?,
            day: field(self.day, other.day).ok()?,
            weekday: field(self.weekday, other.weekday).ok()?,
            hour: field(self.hour, other.hour).ok()?,
            minute: field(self.minute, other.minute).ok()?,
        })
    }

    /// True when every field present in `self` is present with the same value in `other`.
    pub fn subsumes(&self, other: &TimePoint) -> bool {
        fn ok<T: PartialEq>(a: &Option<T>, b: &Option<T>) -> bool {
            a.as_ref().is_none_or(|x| b.as_ref() == Some(x))
        }
        ok(&self.year, &other.year)
            && ok(&self.month, &other.month)
            && ok(&self.day, &other.day)
            && ok(&self.weekday, &other.weekday)
            && ok(&self.hour, &other.hour)
            && ok(&self.minute, &other.minute)
    }

    pub fn date_part(&self) -> TimePoint {
        TimePoint {
            hour: None,
            minute: None,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Interval {
    pub left: TimePoint,
    pub right: TimePoint,
}

impl Interval {
    pub fn new(left: TimePoint, right: TimePoint) -> Interval {
        Interval { left, right }
    }

    pub fn from_moments(start: Moment, end: Moment) -> Interval {
        Interval {
            left: start.to_point(),
            right: end.to_point(),
        }
    }

    pub fn on_day(date: Date, start: u16, end: u16) -> Interval {
        Interval::from_moments(date.at(start), date.at(end))
    }

    pub fn is_complete(&self) -> bool {
        self.left.is_complete() && self.right.is_complete()
    }

    pub fn bounds(&self) -> Option<(Moment, Moment)> {
        Some((self.left.moment()?, self.right.moment()?))
    }

    pub fn minutes(&self) -> Option<i64> {
        let (a, b) = self.bounds()?;
        Some(b.0 - a.0)
    }

    /// Set inclusion of the minute grids; both intervals must be complete.
    pub fn contains(&self, other: &Interval) -> Option<bool> {
        let (a, b) = self.bounds()?;
        let (c, d) = other.bounds()?;
        Some(a <= c && d <= b)
    }

    pub fn overlaps(&self, other: &Interval) -> Option<bool> {
        let (a, b) = self.bounds()?;
        let (c, d) = other.bounds()?;
        Some(a < d && c < b)
    }

    pub fn specified_fields(&self) -> u32 {
        self.left.specified_fields() + self.right.specified_fields()
    }

    pub fn start_date(&self) -> Option<Date> {
        self.left.date()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bounds() {
            Some((a, b)) => write!(f, "{a}/{b}"),
            None => write!(f, "{:?}/{:?}", self.left, self.right),
        }
    }
}

/// Orders complete intervals by start, then end.
pub fn cmp_intervals(a: &Interval, b: &Interval) -> Ordering {
    a.bounds().cmp(&b.bounds())
}

pub fn weekday_name_en(w: Weekday) -> &'static str {
    match w {
        1 => "Monday",
        2 => "Tuesday",
        3 => "Wednesday",
        4 => "Thursday",
        5 => "Friday",
        6 => "Saturday",
        _ => "Sunday",
    }
}
