//! Calendar consistency of extracted time points.

use std::fmt;

use crate::time::{days_in_month, TimePoint, Weekday};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InconsistencyKind {
    WeekdayDateMismatch { stated: Weekday, actual: Weekday },
    InvalidDate,
    EmptyExtraction,
    IllFormedAfterMerge,
}

impl InconsistencyKind {
    pub fn code(&self) -> &'static str {
        match self {
            InconsistencyKind::WeekdayDateMismatch { .. } => "weekday-date-mismatch",
            InconsistencyKind::InvalidDate => "invalid-date",
            InconsistencyKind::EmptyExtraction => "empty-extraction",
            InconsistencyKind::IllFormedAfterMerge => "ill-formed-after-merge",
        }
    }

    /// Higher values are reported first when several deficiencies compete.
    pub fn severity(&self) -> u8 {
        match self {
            InconsistencyKind::WeekdayDateMismatch { .. } => 3,
            InconsistencyKind::InvalidDate => 2,
            InconsistencyKind::IllFormedAfterMerge => 1,
            InconsistencyKind::EmptyExtraction => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Inconsistency {
    pub kind: InconsistencyKind,
    /// The offending time specification, as understood.
    pub point: TimePoint,
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            InconsistencyKind::WeekdayDateMismatch { stated, actual } => {
                write!(f, "weekday {stated} stated but the date falls on weekday {actual}")
            }
            k => f.write_str(k.code()),
        }
    }
}

/// Checks that present fields denote a real calendar time and that a stated
/// weekday agrees with a complete date. Partial points pass as long as what
/// is there could still be completed consistently.
pub fn check_consistency(p: &TimePoint) -> Result<(), Inconsistency> {
    let fail = |kind| Err(Inconsistency { kind, point: *p });
    if p.month.is_some_and(|m| !(1..=12).contains(&m))
        || p.weekday.is_some_and(|w| !(1..=7).contains(&w))
        || p.hour.is_some_and(|h| h > 24)
        || p.minute.is_some_and(|m| m > 59)
        || (p.hour == Some(24) && p.minute.is_some_and(|m| m > 0))
    {
        return fail(InconsistencyKind::InvalidDate);
    }
    if let Some(d) = p.day {
        // without a year, February may still have 29 days
        let max = match (p.year, p.month) {
            (Some(y), Some(m)) => days_in_month(y, m),
            (None, Some(m)) => days_in_month(2000, m),
            _ => 31,
        };
        if d == 0 || d > max {
            return fail(InconsistencyKind::InvalidDate);
        }
    }
    if let (Some(stated), Some(date)) = (p.weekday, p.date()) {
        let actual = date.weekday();
        if stated != actual {
            return fail(InconsistencyKind::WeekdayDateMismatch { stated, actual });
        }
    }
    Ok(())
}
