//! Interface-level (IL) expressions: the agent-facing semantic unit.

use std::fmt;
use std::str::FromStr;

use crate::time::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coop {
    Propose,
    Refine,
    Modify,
    Accept,
    Reject,
    Fix,
    Cancel,
    RequestClarification,
    ProvideSlots,
}

impl Coop {
    pub const ALL: [Coop; 9] = [
        Coop::Propose,
        Coop::Refine,
        Coop::Modify,
        Coop::Accept,
        Coop::Reject,
        Coop::Fix,
        Coop::Cancel,
        Coop::RequestClarification,
        Coop::ProvideSlots,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Coop::Propose => "propose",
            Coop::Refine => "refine",
            Coop::Modify => "modify",
            Coop::Accept => "accept",
            Coop::Reject => "reject",
            Coop::Fix => "fix",
            Coop::Cancel => "cancel",
            Coop::RequestClarification => "request-clarification",
            Coop::ProvideSlots => "provide-slots",
        }
    }

    /// Primitives that put a (new) date on the table.
    pub fn is_proposal(self) -> bool {
        matches!(self, Coop::Propose | Coop::Refine | Coop::Modify)
    }

    /// Primitives that must carry temporal content.
    pub fn is_temporal(self) -> bool {
        !matches!(self, Coop::RequestClarification | Coop::Cancel)
    }
}

impl fmt::Display for Coop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Coop {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Coop::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown cooperation primitive '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IlExpression {
    pub coop: Coop,
    pub range: Option<Interval>,
    pub appt: Option<Interval>,
    /// Minutes.
    pub duration: Option<u32>,
    /// Individual free intervals when `coop` is `ProvideSlots`; `range` is their hull.
    pub slots: Vec<Interval>,
}

impl IlExpression {
    pub fn new(coop: Coop) -> Self {
        IlExpression {
            coop,
            range: None,
            appt: None,
            duration: None,
            slots: Vec::new(),
        }
    }

    pub fn with_range(mut self, range: Interval) -> Self {
        self.range = Some(range);
        self
    }

    pub fn with_appt(mut self, appt: Interval) -> Self {
        self.appt = Some(appt);
        self
    }

    pub fn with_duration(mut self, minutes: u32) -> Self {
        self.duration = Some(minutes);
        self
    }

    pub fn with_slots(mut self, slots: Vec<Interval>) -> Self {
        self.range = hull(&slots);
        self.slots = slots;
        self
    }

    /// The interval the expression is about: the appointment if present, else the range.
    pub fn focus(&self) -> Option<&Interval> {
        self.appt.as_ref().or(self.range.as_ref())
    }

    pub fn has_temporal_content(&self) -> bool {
        self.range.is_some() || self.appt.is_some() || self.duration.is_some()
    }

    /// Client-ready: every present interval complete to the minute, bounds
    /// ordered, and temporal primitives carry temporal content.
    pub fn is_fully_specified(&self) -> bool {
        if self.coop.is_temporal() && !self.has_temporal_content() {
            return false;
        }
        let ok = |iv: &Interval| iv.bounds().is_some_and(|(a, b)| a <= b);
        self.range.as_ref().is_none_or(ok)
            && self.appt.as_ref().is_none_or(ok)
            && self.slots.iter().all(ok)
            && self.duration_consistent()
    }

    /// DURATION may co-occur with a complete APPT; when it does they must agree.
    pub fn duration_consistent(&self) -> bool {
        match (self.duration, self.appt.as_ref().and_then(Interval::minutes)) {
            (Some(d), Some(m)) => i64::from(d) == m,
            _ => true,
        }
    }

    /// Weighted count of specified atomic temporal fields. APPT fields count
    /// double since an appointment is stronger than a range.
    pub fn informativeness(&self) -> u32 {
        let range = self.range.map_or(0, |r| r.specified_fields());
        let appt = self.appt.map_or(0, |a| a.specified_fields());
        range + 2 * appt + u32::from(self.duration.is_some())
    }
}

pub fn hull(slots: &[Interval]) -> Option<Interval> {
    let bounds: Vec<_> = slots.iter().filter_map(Interval::bounds).collect();
    let start = bounds.iter().map(|b| b.0).min()?;
    let end = bounds.iter().map(|b| b.1).max()?;
    Some(Interval::from_moments(start, end))
}

impl fmt::Display for IlExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coop)?;
        if let Some(r) = &self.range {
            write!(f, " RANGE {r}")?;
        }
        if let Some(a) = &self.appt {
            write!(f, " APPT {a}")?;
        }
        if let Some(d) = self.duration {
            write!(f, " DURATION {d}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Date;

    fn nov(day: u8) -> Date {
        Date::new(1996, 11, day).unwrap()
    }

    #[test]
    fn appt_outranks_date_only_range() {
        let appt = IlExpression::new(Coop::Refine).with_appt(Interval::on_day(nov(5), 600, 660));
        let date_only = IlExpression::new(Coop::Propose).with_range(Interval::new(
            crate::time::TimePoint::on_date(nov(5)),
            crate::time::TimePoint::on_date(nov(5)),
        ));
        assert!(appt.informativeness() > date_only.informativeness());
    }

    #[test]
    fn coop_names_round_trip() {
        for c in Coop::ALL {
            assert_eq!(c.as_str().parse::<Coop>().unwrap(), c);
        }
    }

    #[test]
    fn duration_must_agree_with_appt() {
        let il = IlExpression::new(Coop::Accept)
            .with_appt(Interval::on_day(nov(5), 600, 660))
            .with_duration(30);
        assert!(!il.is_fully_specified());
        assert!(il.with_duration(60).is_fully_specified());
    }

    #[test]
    fn vague_proposal_not_client_ready() {
        assert!(!IlExpression::new(Coop::Propose).is_fully_specified());
        assert!(IlExpression::new(Coop::Cancel).is_fully_specified());
    }
}
