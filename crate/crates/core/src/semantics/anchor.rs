//! Anchoring: turns a resolved partial description into IL expressions with
//! complete time points.

use crate::gsi::params::SessionParams;
use crate::time::{Interval, TimePoint};

use super::anaphora::{Resolved, Stage};
use super::consistency::{Inconsistency, InconsistencyKind};
use super::gather::Action;
use super::il::{Coop, IlExpression};
use super::infer::complete_endpoint;

fn placeholder_coop(action: Action) -> Coop {
    match action {
        Action::Definite(c) => c,
        _ => Coop::Propose,
    }
}

/// Produces one candidate per alternative reading. Date-only expressions
/// cover the working day; clock times become appointments of the stated or
/// default duration. Coops of proposals are settled later by inference.
pub fn anchor(r: &Resolved, params: &SessionParams) -> Result<Vec<IlExpression>, Inconsistency> {
    let p = &r.partial;
    let coop = placeholder_coop(p.action);
    let fail = |kind| Err(Inconsistency { kind, point: p.point });

    if let Some(inh) = &r.inherited {
        let mut il = inh.clone();
        il.coop = coop;
        il.duration = p.duration.or(il.duration);
        return Ok(vec![il]);
    }
    if !coop.is_temporal() && !p.has_temporal_content() {
        return Ok(vec![IlExpression::new(coop)]);
    }
    if r.stage == Stage::Unresolved {
        return fail(InconsistencyKind::EmptyExtraction);
    }
    let Some(date) = p.point.date() else {
        let kind = if p.point.day.is_some() { InconsistencyKind::InvalidDate } else { InconsistencyKind::EmptyExtraction };
        return fail(kind);
    };

    if !p.ranges.is_empty() {
        let mut intervals = Vec::new();
        for (from, to) in &p.ranges {
            let (Some(a), Some(b)) = (from.minute_of_day(), to.minute_of_day()) else {
                return fail(InconsistencyKind::InvalidDate);
            };
            if a >= b {
                return fail(InconsistencyKind::InvalidDate);
            }
            intervals.push(Interval::on_day(date, a, b));
        }
        return Ok(match coop {
            Coop::ProvideSlots => vec![IlExpression::new(coop).with_slots(intervals)],
            Coop::Accept | Coop::Fix if intervals.len() == 1 => {
                let iv = intervals[0];
                vec![IlExpression::new(coop).with_appt(iv).with_duration(iv.minutes().unwrap_or(0) as u32)]
            }
            _ => intervals
                .into_iter()
                .map(|iv| IlExpression {
                    duration: p.duration,
                    ..IlExpression::new(coop).with_range(iv)
                })
                .collect(),
        });
    }

    if let Some(start) = p.point.minute_of_day() {
        let minutes = p.duration.unwrap_or(params.default_duration);
        let appt = complete_endpoint(date.at(start), minutes);
        return Ok(vec![IlExpression::new(coop).with_appt(appt).with_duration(minutes)]);
    }

    let day = Interval::new(
        TimePoint::on_date(date).with_clock(params.workday_start),
        TimePoint::on_date(date).with_clock(params.workday_end),
    );
    Ok(vec![IlExpression {
        duration: p.duration,
        ..IlExpression::new(coop).with_range(day)
    }])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::gather::Partial;
    use crate::time::Date;

    fn nov(day: u8) -> Date {
        Date::new(1996, 11, day).unwrap()
    }

    fn resolved(p: Partial) -> Resolved {
        Resolved { partial: p, inherited: None, stage: Stage::Explicit }
    }

    #[test]
    fn date_only_covers_the_working_day() {
        let mut p = Partial::new(Action::Proposal, 0);
        p.point = TimePoint::on_date(nov(4));
        let ils = anchor(&resolved(p), &SessionParams::default()).unwrap();
        assert_eq!(ils[0].range, Some(Interval::on_day(nov(4), 480, 1080)));
        assert_eq!(ils[0].appt, None);
    }

    #[test]
    fn clock_time_gets_default_duration() {
        let mut p = Partial::new(Action::Proposal, 0);
        p.point = TimePoint { hour: Some(10), ..TimePoint::on_date(nov(5)) };
        let ils = anchor(&resolved(p), &SessionParams::default()).unwrap();
        assert_eq!(ils[0].appt, Some(Interval::on_day(nov(5), 600, 660)));
        assert_eq!(ils[0].duration, Some(60));
        assert!(ils[0].is_fully_specified());
    }

    #[test]
    fn slot_ranges_and_their_hull() {
        let mut p = Partial::new(Action::Definite(Coop::ProvideSlots), 0);
        p.point = TimePoint::on_date(nov(5));
        p.ranges = vec![(TimePoint::clock(8, 0), TimePoint::clock(12, 0)), (TimePoint::clock(16, 0), TimePoint::clock(18, 0))];
        let il = &anchor(&resolved(p), &SessionParams::default()).unwrap()[0];
        assert_eq!(il.slots.len(), 2);
        assert_eq!(il.range, Some(Interval::on_day(nov(5), 480, 1080)));
    }

    #[test]
    fn undated_clock_is_deficient() {
        let mut p = Partial::new(Action::Proposal, 0);
        p.point = TimePoint { day: Some(31), month: Some(4), year: Some(1996), ..TimePoint::default() };
        assert_eq!(anchor(&resolved(p), &SessionParams::default()).unwrap_err().kind, InconsistencyKind::InvalidDate);
    }
}
