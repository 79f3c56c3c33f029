//! Resolution of temporal anaphora and deixis. Antecedents are searched in
//! the ILs of the text analysed so far (most recent first), then in the
//! discourse memory, and only then is the send time of the message used.

use crate::extraction::Reference;
use crate::gsi::params::SessionParams;
use crate::time::{Date, Interval, Moment, TimePoint};

use super::gather::{Action, Partial};
use super::il::{Coop, IlExpression};
use super::memory::DiscourseMemory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Nothing to resolve.
    Explicit,
    Text,
    Discourse,
    Deictic,
    Unresolved,
}

#[derive(Debug, Clone, Copy)]
pub struct Context<'a> {
    pub send_time: Moment,
    /// ILs of earlier sentences of the same message, in text order.
    pub text: &'a [IlExpression],
    pub discourse: &'a DiscourseMemory,
}

impl<'a> Context<'a> {
    /// Most recent antecedent satisfying `f`, with the stage that supplied it.
    pub fn antecedent<T>(&self, f: impl Fn(&IlExpression) -> Option<T>) -> Option<(T, Stage)> {
        if let Some(t) = self.text.iter().rev().find_map(&f) {
            return Some((t, Stage::Text));
        }
        self.discourse.recent().find_map(|r| f(&r.il)).map(|t| (t, Stage::Discourse))
    }

    pub fn antecedent_date(&self) -> Option<(Date, Stage)> {
        self.antecedent(|il| il.focus().and_then(Interval::start_date))
    }

    pub fn send_date(&self) -> Date {
        self.send_time.date()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolved {
    pub partial: Partial,
    /// Temporal fields taken over wholesale (previous proposal, weeks).
    pub inherited: Option<IlExpression>,
    pub stage: Stage,
}

/// First date strictly after `base` falling on `weekday`.
pub fn next_weekday_after(base: Date, weekday: u8) -> Date {
    let ahead = (i64::from(weekday) - i64::from(base.weekday())).rem_euclid(7);
    base.add_days(if ahead == 0 { 7 } else { ahead })
}

fn temporal_copy(il: &IlExpression) -> IlExpression {
    IlExpression {
        coop: il.coop,
        range: il.range,
        appt: il.appt,
        duration: il.duration,
        slots: Vec::new(),
    }
}

pub fn resolve_anaphora(partial: &Partial, ctx: &Context, params: &SessionParams) -> Resolved {
    let mut p = partial.clone();
    let done = |p: Partial, stage| Resolved { partial: p, inherited: None, stage };
    let send = ctx.send_date();

    match partial.reference {
        Some(Reference::PreviousProposal) => {
            let found = ctx.antecedent(|il| (il.coop.is_proposal() && il.focus().is_some()).then(|| temporal_copy(il)));
            return match found {
                Some((il, stage)) => Resolved { partial: p, inherited: Some(il), stage },
                None => done(p, Stage::Unresolved),
            };
        }
        Some(r @ (Reference::ThisWeek | Reference::NextWeek)) => {
            let monday = send.week_start().add_days(if r == Reference::NextWeek { 7 } else { 0 });
            let week = Interval::from_moments(monday.at(params.workday_start), monday.add_days(6).at(params.workday_end));
            let mut il = IlExpression::new(Coop::Propose).with_range(week);
            il.duration = partial.duration;
            return Resolved { partial: p, inherited: Some(il), stage: Stage::Deictic };
        }
        Some(r @ (Reference::Today | Reference::Tomorrow | Reference::DayAfterTomorrow)) => {
            let offset = match r {
                Reference::Today => 0,
                Reference::Tomorrow => 1,
                _ => 2,
            };
            let date = send.add_days(offset);
            p.point = p.point.or(TimePoint::on_date(date));
            return done(p, Stage::Deictic);
        }
        _ => {}
    }

    let pt = partial.point;
    if let (Some(day), Some(month)) = (pt.day, pt.month) {
        if pt.year.is_some() {
            return done(p, Stage::Explicit);
        }
        if let Some((d, stage)) = ctx.antecedent_date() {
            p.point.year = Some(d.year);
            return done(p, stage);
        }
        let mut year = send.year;
        if Date::new(year, month, day).is_some_and(|d| d < send) {
            year += 1;
        }
        p.point.year = Some(year);
        return done(p, Stage::Deictic);
    }

    if let Some(w) = pt.weekday {
        let next = partial.reference == Some(Reference::Next);
        let (date, stage) = match ctx.antecedent_date() {
            Some((a, stage)) if next => (next_weekday_after(a, w), stage),
            Some((a, stage)) => {
                let d = a.week_start().add_days(i64::from(w) - 1);
                (if d < send { d.add_days(7) } else { d }, stage)
            }
            None => (next_weekday_after(send, w), Stage::Deictic),
        };
        p.point = pt.with_date(date);
        return done(p, stage);
    }

    if pt.has_clock() || !partial.ranges.is_empty() {
        if let Some((d, stage)) = ctx.antecedent_date() {
            p.point = pt.with_date(d);
            return done(p, stage);
        }
        let start = pt.minute_of_day().or_else(|| partial.ranges[0].0.minute_of_day()).unwrap_or(0);
        let date = if start > ctx.send_time.minute_of_day() { send } else { send.add_days(1) };
        p.point = pt.with_date(date);
        return done(p, Stage::Deictic);
    }

    // bare acceptances, rejections and fixings refer to what is on the table
    if pt.is_empty()
        && matches!(partial.action, Action::Definite(Coop::Accept | Coop::Reject | Coop::Fix))
    {
        if let Some((il, stage)) = ctx.antecedent(|il| il.focus().is_some().then(|| temporal_copy(il))) {
            return Resolved { partial: p, inherited: Some(il), stage };
        }
        return done(p, Stage::Unresolved);
    }
    let stage = if pt.is_empty() && partial.duration.is_none() { Stage::Unresolved } else { Stage::Explicit };
    done(p, stage)
}
