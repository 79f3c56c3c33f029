//! Calendar-holding negotiation agents.
//!
//! An agent reacts to cooperation primitives (as IL expressions) with
//! generation goals addressed to its partners. Replies go through
//! [`Agent::on_receive`]; agent-initiated meetings start with
//! [`Agent::initiate`] and proceed in rounds: the initiator waits for every
//! partner's answer before fixing, re-proposing or giving up.

pub mod calendar;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::generation::{GenGoal, GoalKind};
use crate::gsi::params::SessionParams;
use crate::semantics::compat::{CompatTable, Verdict};
use crate::semantics::{Coop, IlExpression};
use crate::time::{Interval, Moment};

pub use calendar::{Calendar, CalendarError, Entry};

/// Strategy file keys (TOML): `counter-proposals`, `free-slot-offering`,
/// `max-slots-listed`, `counter-window-days`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct StrategyConfig {
    /// Answer an unsatisfiable proposal with an alternative instead of a
    /// plain rejection.
    pub counter_proposals: bool,
    /// Answer date-only proposals with the free slots of that range.
    pub free_slot_offering: bool,
    /// Longer slot lists are cut and marked as a selection.
    pub max_slots_listed: usize,
    /// How many days after the proposed date a counter-proposal may lie.
    pub counter_window_days: u32,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig { counter_proposals: false, free_slot_offering: true, max_slots_listed: 4, counter_window_days: 7 }
    }
}

impl StrategyConfig {
    pub fn from_toml(text: &str) -> Result<StrategyConfig, String> {
        let s: StrategyConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        if s.max_slots_listed == 0 {
            return Err("max-slots-listed must be at least 1".into());
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Initiator,
    Participant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Proposing,
    Awaiting,
    Agreed,
    Fixed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Negotiation {
    pub id: String,
    pub role: Role,
    pub partners: Vec<String>,
    pub range: Option<Interval>,
    pub duration: u32,
    pub phase: Phase,
    /// The proposal currently on the table.
    pub pending: Option<IlExpression>,
    /// Last primitive exchanged with each partner, in either direction.
    pub last: BTreeMap<String, Coop>,
    /// Initiator only: answers to the pending proposal in this round.
    answers: BTreeMap<String, Answer>,
    /// Initiator only: start of the latest proposal; later proposals start
    /// at least one duration after it.
    cursor: Option<Moment>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Answer {
    Accept,
    Reject,
    Counter(Vec<Interval>),
}

impl Negotiation {
    fn new(id: &str, role: Role, partners: Vec<String>, duration: u32) -> Negotiation {
        Negotiation {
            id: id.to_string(),
            role,
            partners,
            range: None,
            duration,
            phase: Phase::Proposing,
            pending: None,
            last: BTreeMap::new(),
            answers: BTreeMap::new(),
            cursor: None,
        }
    }
}

/// A goal for one recipient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outgoing {
    pub to: String,
    pub goal: GenGoal,
}

/// What the control regime asks of the server after an analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Commit,
    RequestNext,
    RequestRepair,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AgentError {
    #[error("negotiation {nid}: {coop} from {from} is not admissible here")]
    ProtocolViolation { nid: String, from: String, coop: Coop },
    #[error("negotiation {0}: no free slot in the interval")]
    NoSlot(String),
    #[error("negotiation {0}: range must be complete and non-empty")]
    BadRange(String),
    #[error(transparent)]
    Calendar(#[from] CalendarError),
}

#[derive(Debug, Clone)]
pub struct Agent {
    pub name: String,
    pub calendar: Calendar,
    pub strategy: StrategyConfig,
    pub params: SessionParams,
    negotiations: BTreeMap<String, Negotiation>,
    compat: Arc<CompatTable>,
}

fn goal(kind: GoalKind, il: IlExpression) -> GenGoal {
    GenGoal::new(kind, il)
}

fn appt_il(coop: Coop, appt: Interval, duration: u32) -> IlExpression {
    IlExpression::new(coop).with_appt(appt).with_duration(duration)
}

impl Agent {
    pub fn new(name: &str, calendar: Calendar, strategy: StrategyConfig, params: SessionParams) -> Agent {
        Agent {
            name: name.to_string(),
            calendar,
            strategy,
            params,
            negotiations: BTreeMap::new(),
            compat: Arc::new(CompatTable::builtin()),
        }
    }

    pub fn negotiation(&self, nid: &str) -> Option<&Negotiation> {
        self.negotiations.get(nid)
    }

    pub fn negotiations(&self) -> impl Iterator<Item = &Negotiation> {
        self.negotiations.values()
    }

    /// The open negotiation that has `partner` on the other side, if any.
    pub fn live_negotiation_with(&self, partner: &str) -> Option<&str> {
        self.negotiations
            .values()
            .filter(|n| !matches!(n.phase, Phase::Fixed | Phase::Failed))
            .find(|n| n.partners.iter().any(|p| p == partner))
            .map(|n| n.id.as_str())
    }

    /// Whether `il` from `from` fits the current state of negotiation `nid`.
    pub fn admissible(&self, nid: &str, from: &str, il: &IlExpression) -> bool {
        if !il.is_fully_specified() {
            return false;
        }
        let Some(n) = self.negotiations.get(nid) else {
            return self.compat.verdict(None, il.coop) != Verdict::Deny && il.coop.is_proposal();
        };
        if matches!(n.phase, Phase::Fixed | Phase::Failed) && il.coop != Coop::Cancel {
            // a closed negotiation is only reopened by a fresh proposal
            return il.coop == Coop::Propose;
        }
        let last = n.last.get(from).copied();
        if self.compat.verdict(last, il.coop) == Verdict::Deny {
            return false;
        }
        match (n.role, il.coop) {
            (Role::Participant, Coop::Fix) => n.phase == Phase::Agreed,
            (Role::Initiator, Coop::Accept | Coop::Reject | Coop::Propose | Coop::Refine | Coop::Modify | Coop::ProvideSlots) => {
                n.phase == Phase::Awaiting && n.partners.iter().any(|p| p == from) && !n.answers.contains_key(from)
            }
            (Role::Initiator, Coop::Fix) => false,
            _ => true,
        }
    }

    /// The control regime: commit what fits, backtrack on a misfit, ask
    /// for a repair once the alternatives are exhausted (`None`).
    pub fn control_step(&self, nid: &str, from: &str, il: Option<&IlExpression>) -> Control {
        match il {
            None => Control::RequestRepair,
            Some(il) if self.admissible(nid, from, il) => Control::Commit,
            Some(_) => Control::RequestNext,
        }
    }

    fn sent(&mut self, nid: &str, out: &[Outgoing]) {
        if let Some(n) = self.negotiations.get_mut(nid) {
            for o in out {
                n.last.insert(o.to.clone(), o.goal.il.coop);
            }
        }
    }

    /// Reacts to `il` sent by `from` in negotiation `nid`.
    pub fn on_receive(&mut self, nid: &str, from: &str, il: &IlExpression) -> Result<Vec<Outgoing>, AgentError> {
        if !self.admissible(nid, from, il) {
            return Err(AgentError::ProtocolViolation { nid: nid.into(), from: from.into(), coop: il.coop });
        }
        let reopen = self.negotiations.get(nid).is_some_and(|n| matches!(n.phase, Phase::Fixed | Phase::Failed));
        if reopen || !self.negotiations.contains_key(nid) {
            let n = Negotiation::new(nid, Role::Participant, vec![from.to_string()], self.params.default_duration);
            self.negotiations.insert(nid.to_string(), n);
        }
        let n = self.negotiations.get_mut(nid).expect("negotiation exists");
        n.last.insert(from.to_string(), il.coop);
        let out = match n.role {
            Role::Participant => self.participant(nid, from, il)?,
            Role::Initiator => self.initiator(nid, from, il)?,
        };
        self.sent(nid, &out);
        Ok(out)
    }

    fn participant(&mut self, nid: &str, from: &str, il: &IlExpression) -> Result<Vec<Outgoing>, AgentError> {
        let reply = |g: GenGoal| vec![Outgoing { to: from.to_string(), goal: g }];
        let cal = &mut self.calendar;
        let n = self.negotiations.get_mut(nid).expect("negotiation exists");
        match il.coop {
            Coop::Propose | Coop::Refine | Coop::Modify => {
                // a new proposal supersedes earlier offers
                cal.release(nid);
                n.pending = Some(il.clone());
                n.range = il.focus().copied();
                n.phase = Phase::Awaiting;
                if let Some(appt) = il.appt {
                    let duration = il.duration.or(appt.minutes().map(|m| m as u32)).unwrap_or(self.params.default_duration);
                    n.duration = duration;
                    if cal.is_free_for(&appt, Some(nid)) {
                        cal.reserve(&appt, nid)?;
                        n.phase = Phase::Agreed;
                        return Ok(reply(goal(GoalKind::Accept, appt_il(Coop::Accept, appt, duration))));
                    }
                    return Ok(reply(self.decline(nid, il)));
                }
                let range = il.range.expect("fully specified proposal");
                let duration = il.duration.unwrap_or(self.params.default_duration);
                n.duration = duration;
                if self.strategy.free_slot_offering {
                    let slots = cal.free_slots_for(&range, duration, Some(nid));
                    if !slots.is_empty() {
                        let more = slots.len() > self.strategy.max_slots_listed;
                        let listed: Vec<Interval> = slots.into_iter().take(self.strategy.max_slots_listed).collect();
                        for s in &listed {
                            cal.reserve(s, nid)?;
                        }
                        let mut g = goal(GoalKind::ProvideSlots, IlExpression::new(Coop::ProvideSlots).with_slots(listed));
                        g.selection = more;
                        return Ok(reply(g));
                    }
                } else if let Some(slot) = cal.first_available_for(&range, duration, Some(nid)) {
                    cal.reserve(&slot, nid)?;
                    return Ok(reply(goal(GoalKind::Propose, appt_il(Coop::Modify, slot, duration))));
                }
                Ok(reply(self.decline(nid, il)))
            }
            Coop::ProvideSlots => {
                // take the earliest offered time that suits us
                let duration = n.duration;
                let pick = il.slots.iter().find_map(|s| cal.first_available_for(s, duration, Some(nid)));
                cal.release(nid);
                match pick {
                    Some(slot) => {
                        cal.reserve(&slot, nid)?;
                        n.phase = Phase::Agreed;
                        n.pending = Some(appt_il(Coop::Accept, slot, duration));
                        Ok(reply(goal(GoalKind::Accept, appt_il(Coop::Accept, slot, duration))))
                    }
                    None => {
                        n.phase = Phase::Awaiting;
                        let focus = crate::semantics::il::hull(&il.slots).expect("non-empty slots");
                        Ok(reply(goal(GoalKind::Reject, IlExpression::new(Coop::Reject).with_range(focus))))
                    }
                }
            }
            Coop::Accept => {
                // our counter-proposal or offer was taken
                let appt = il.appt.or_else(|| n.pending.as_ref().and_then(|p| p.appt));
                if let Some(appt) = appt {
                    cal.release(nid);
                    cal.reserve(&appt, nid)?;
                    n.pending = Some(appt_il(Coop::Accept, appt, n.duration));
                    n.phase = Phase::Agreed;
                }
                Ok(Vec::new())
            }
            Coop::Reject => {
                cal.release(nid);
                n.phase = Phase::Awaiting;
                Ok(Vec::new())
            }
            Coop::Fix => {
                let appt = il.appt.or_else(|| n.pending.as_ref().and_then(|p| p.appt)).ok_or_else(|| {
                    AgentError::ProtocolViolation { nid: nid.into(), from: from.into(), coop: Coop::Fix }
                })?;
                if cal.fix(&appt, nid).is_err() {
                    cal.release(nid);
                    cal.reserve(&appt, nid)?;
                    cal.fix(&appt, nid)?;
                }
                n.phase = Phase::Fixed;
                n.pending = Some(il.clone());
                Ok(Vec::new())
            }
            Coop::Cancel => {
                cal.release(nid);
                n.phase = Phase::Failed;
                n.pending = None;
                Ok(Vec::new())
            }
            Coop::RequestClarification => Ok(Vec::new()),
        }
    }

    /// Plain rejection, or an alternative slot when counter-proposals are on.
    fn decline(&mut self, nid: &str, il: &IlExpression) -> GenGoal {
        let focus = *il.focus().expect("proposal has a focus");
        let duration = self.negotiations[nid].duration;
        if self.strategy.counter_proposals {
            if let Some((a, _)) = focus.bounds() {
                let day = a.date();
                let window = Interval::from_moments(day.at(0), day.add_days(i64::from(self.strategy.counter_window_days) + 1).at(0));
                if let Some(slot) = self.calendar.first_available_for(&window, duration, Some(nid)) {
                    if self.calendar.reserve(&slot, nid).is_ok() {
                        return goal(GoalKind::Propose, appt_il(Coop::Modify, slot, duration));
                    }
                }
            }
        }
        let rejected = match il.appt {
            Some(appt) => IlExpression::new(Coop::Reject).with_appt(appt).with_duration(duration),
            None => IlExpression::new(Coop::Reject).with_range(focus),
        };
        goal(GoalKind::Reject, rejected)
    }

    /// Starts a meeting negotiation: proposes the first free slot of
    /// `range` to every partner.
    pub fn initiate(&mut self, nid: &str, partners: &[String], range: &Interval, duration: u32) -> Result<Vec<Outgoing>, AgentError> {
        if !range.is_complete() || range.minutes().unwrap_or(0) <= 0 || duration == 0 || partners.is_empty() {
            return Err(AgentError::BadRange(nid.into()));
        }
        let mut n = Negotiation::new(nid, Role::Initiator, partners.to_vec(), duration);
        n.range = Some(*range);
        self.calendar.release(nid);
        let Some(slot) = self.calendar.first_available_for(range, duration, Some(nid)) else {
            n.phase = Phase::Failed;
            self.negotiations.insert(nid.to_string(), n);
            return Err(AgentError::NoSlot(nid.into()));
        };
        self.calendar.reserve(&slot, nid)?;
        n.cursor = slot.bounds().map(|b| b.0);
        n.pending = Some(appt_il(Coop::Propose, slot, duration));
        n.phase = Phase::Awaiting;
        let out: Vec<Outgoing> = partners
            .iter()
            .map(|p| Outgoing { to: p.clone(), goal: goal(GoalKind::Propose, appt_il(Coop::Propose, slot, duration)) })
            .collect();
        self.negotiations.insert(nid.to_string(), n);
        self.sent(nid, &out);
        Ok(out)
    }

    fn initiator(&mut self, nid: &str, from: &str, il: &IlExpression) -> Result<Vec<Outgoing>, AgentError> {
        let n = self.negotiations.get_mut(nid).expect("negotiation exists");
        match il.coop {
            Coop::Accept => {
                n.answers.insert(from.to_string(), Answer::Accept);
            }
            Coop::Reject => {
                n.answers.insert(from.to_string(), Answer::Reject);
            }
            Coop::Propose | Coop::Refine | Coop::Modify | Coop::ProvideSlots => {
                let offered = if il.coop == Coop::ProvideSlots { il.slots.clone() } else { il.focus().into_iter().copied().collect() };
                n.answers.insert(from.to_string(), Answer::Counter(offered));
            }
            Coop::Cancel => {
                // a partner dropping out ends the meeting for everyone
                n.answers.insert(from.to_string(), Answer::Reject);
                return Ok(self.give_up(nid));
            }
            _ => return Ok(Vec::new()),
        }
        let n = &self.negotiations[nid];
        if n.partners.iter().all(|p| n.answers.contains_key(p)) {
            return self.close_round(nid);
        }
        Ok(Vec::new())
    }

    /// Every partner has answered the pending proposal.
    fn close_round(&mut self, nid: &str) -> Result<Vec<Outgoing>, AgentError> {
        let n = self.negotiations.get_mut(nid).expect("negotiation exists");
        let pending = n.pending.clone().expect("initiator has a proposal");
        let appt = pending.appt.expect("initiator proposals are appointments");
        let duration = n.duration;
        if n.answers.values().all(|a| *a == Answer::Accept) {
            self.calendar.fix(&appt, nid)?;
            let n = self.negotiations.get_mut(nid).expect("negotiation exists");
            n.phase = Phase::Fixed;
            n.answers.clear();
            let fix = appt_il(Coop::Fix, appt, duration);
            return Ok(n
                .partners
                .iter()
                .map(|p| Outgoing { to: p.clone(), goal: goal(GoalKind::FixConfirm, fix.clone()) })
                .collect());
        }

        let range = n.range.expect("initiator has a range");
        let (_, hi) = range.bounds().expect("complete range");
        let earliest = n.cursor.map_or(range.bounds().expect("complete range").0, |c| c.plus(duration.into()));
        let rest = (earliest < hi).then(|| Interval::from_moments(earliest, hi));
        self.calendar.release(nid);
        // counter-offers first, then our own next free slot
        let mut counters: Vec<(Moment, Interval, String)> = Vec::new();
        if let Some(rest) = &rest {
            for (p, a) in &n.answers {
                if let Answer::Counter(offered) = a {
                    for o in offered {
                        let Some(window) = intersect(o, rest) else { continue };
                        if let Some(slot) = self.calendar.first_available_for(&window, duration, Some(nid)) {
                            counters.push((slot.bounds().expect("complete").0, slot, p.clone()));
                        }
                    }
                }
            }
        }
        counters.sort_by(|a, b| (a.0, &a.2).cmp(&(b.0, &b.2)));
        let next = counters
            .first()
            .map(|(_, s, _)| *s)
            .or_else(|| rest.and_then(|r| self.calendar.first_available_for(&r, duration, Some(nid))));
        let Some(slot) = next else {
            return Ok(self.give_up(nid));
        };
        self.calendar.reserve(&slot, nid)?;
        let n = self.negotiations.get_mut(nid).expect("negotiation exists");
        n.cursor = slot.bounds().map(|b| b.0);
        n.pending = Some(appt_il(Coop::Modify, slot, duration));
        // partners whose counter-offer is taken have agreed already
        let agreed: BTreeSet<String> = counters.iter().filter(|(_, s, _)| *s == slot).map(|(_, _, p)| p.clone()).collect();
        n.answers = agreed.iter().map(|p| (p.clone(), Answer::Accept)).collect();
        let mut out: Vec<Outgoing> = n
            .partners
            .iter()
            .map(|p| {
                let g = if agreed.contains(p) {
                    goal(GoalKind::Accept, appt_il(Coop::Accept, slot, duration))
                } else {
                    goal(GoalKind::Propose, appt_il(Coop::Modify, slot, duration))
                };
                Outgoing { to: p.clone(), goal: g }
            })
            .collect();
        // every partner offered this slot: nothing left to wait for
        if n.partners.iter().all(|p| agreed.contains(p)) {
            out.extend(self.close_round(nid)?);
        }
        Ok(out)
    }

    /// No common slot: release everything and cancel towards every partner
    /// that has not just rejected.
    fn give_up(&mut self, nid: &str) -> Vec<Outgoing> {
        self.calendar.release(nid);
        let n = self.negotiations.get_mut(nid).expect("negotiation exists");
        n.phase = Phase::Failed;
        n.pending = None;
        let targets: Vec<String> = n
            .partners
            .iter()
            .filter(|p| !matches!(n.last.get(*p), Some(Coop::Reject | Coop::Cancel)))
            .cloned()
            .collect();
        n.answers.clear();
        targets
            .into_iter()
            .map(|p| Outgoing { to: p, goal: goal(GoalKind::Cancel, IlExpression::new(Coop::Cancel)) })
            .collect()
    }
}

fn intersect(a: &Interval, b: &Interval) -> Option<Interval> {
    let (a0, a1) = a.bounds()?;
    let (b0, b1) = b.bounds()?;
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    (lo < hi).then(|| Interval::from_moments(lo, hi))
}
