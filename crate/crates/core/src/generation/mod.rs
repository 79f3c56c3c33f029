//! Template-based realization of communicative goals.

pub mod template;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gsi::params::{Language, SessionParams};
use crate::semantics::consistency::{Inconsistency, InconsistencyKind};
use crate::semantics::il::IlExpression;
use crate::time::{Date, Interval, TimePoint};

pub use template::{TemplateError, TemplateSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoalKind {
    Propose,
    Accept,
    Reject,
    FixConfirm,
    ProvideSlots,
    ClarificationRequest,
    Cancel,
}

impl GoalKind {
    pub const ALL: [GoalKind; 7] = [
        GoalKind::Propose,
        GoalKind::Accept,
        GoalKind::Reject,
        GoalKind::FixConfirm,
        GoalKind::ProvideSlots,
        GoalKind::ClarificationRequest,
        GoalKind::Cancel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GoalKind::Propose => "propose",
            GoalKind::Accept => "accept",
            GoalKind::Reject => "reject",
            GoalKind::FixConfirm => "fix-confirm",
            GoalKind::ProvideSlots => "provide-slots",
            GoalKind::ClarificationRequest => "clarification-request",
            GoalKind::Cancel => "cancel",
        }
    }
}

impl fmt::Display for GoalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GoalKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GoalKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown goal kind '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenGoal {
    pub kind: GoalKind,
    pub il: IlExpression,
    pub slots: Vec<Interval>,
    pub inconsistency: Option<Inconsistency>,
    pub misspellings: Vec<String>,
    /// The slot list is only a selection of the free times.
    pub selection: bool,
    /// Day the message is written, for deictic descriptions.
    pub reference: Option<Date>,
}

impl GenGoal {
    pub fn new(kind: GoalKind, il: IlExpression) -> GenGoal {
        let slots = il.slots.clone();
        GenGoal {
            kind,
            il,
            slots,
            inconsistency: None,
            misspellings: Vec::new(),
            selection: false,
            reference: None,
        }
    }

    pub fn clarification(inconsistency: Inconsistency, misspellings: Vec<String>) -> GenGoal {
        GenGoal {
            inconsistency: Some(inconsistency),
            misspellings,
            ..GenGoal::new(GoalKind::ClarificationRequest, IlExpression::new(crate::semantics::Coop::RequestClarification))
        }
    }

    pub fn with_reference(mut self, date: Date) -> GenGoal {
        self.reference = Some(date);
        self
    }

    pub fn check(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::IllFormed(m.to_string()));
        match self.kind {
            GoalKind::ProvideSlots if self.slots.is_empty() => bad("provide-slots needs at least one interval"),
            GoalKind::ProvideSlots if !self.slots.iter().all(Interval::is_complete) => bad("incomplete slot"),
            GoalKind::ClarificationRequest if self.inconsistency.is_none() => bad("clarification needs an issue"),
            GoalKind::Propose | GoalKind::Accept | GoalKind::Reject | GoalKind::FixConfirm
                if !self.il.focus().is_some_and(Interval::is_complete) =>
            {
                bad("goal needs a complete interval")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("no {kind} template applies for language {language}")]
    NoTemplate { kind: GoalKind, language: Language },
    #[error("ill-formed goal: {0}")]
    IllFormed(String),
}

/// Groups slots by day: days ascending, clock ranges ascending within a day.
pub fn aggregate(slots: &[Interval]) -> Vec<(Date, Vec<(u16, u16)>)> {
    let mut groups: BTreeMap<Date, Vec<(u16, u16)>> = BTreeMap::new();
    for s in slots {
        let Some((a, b)) = s.bounds() else { continue };
        let day = a.date();
        let end = (b.0 - day.at(0).0).clamp(0, 24 * 60) as u16;
        groups.entry(day).or_default().push((a.minute_of_day(), end));
    }
    groups
        .into_iter()
        .map(|(d, mut rs)| {
            rs.sort_unstable();
            rs.dedup();
            (d, rs)
        })
        .collect()
}

/// Realizes goals with one template set per language.
#[derive(Debug, Clone)]
pub struct Generator {
    sets: BTreeMap<&'static str, TemplateSet>,
}

impl Default for Generator {
    fn default() -> Self {
        Generator::builtin()
    }
}

impl Generator {
    pub fn builtin() -> Generator {
        let mut sets = BTreeMap::new();
        for (lang, text) in [
            (Language::De, include_str!("../../data/de/templates.txt")),
            (Language::En, include_str!("../../data/en/templates.txt")),
        ] {
            sets.insert(lang.as_str(), TemplateSet::parse(text).expect("shipped templates are valid"));
        }
        Generator { sets }
    }

    pub fn with_set(mut self, language: Language, set: TemplateSet) -> Generator {
        self.sets.insert(language.as_str(), set);
        self
    }

    pub fn set(&self, language: Language) -> Option<&TemplateSet> {
        self.sets.get(language.as_str())
    }

    pub fn realize(&self, goal: &GenGoal, params: &SessionParams) -> Result<String, GenError> {
        let no_template = || GenError::NoTemplate { kind: goal.kind, language: params.language };
        let set = self.set(params.language).ok_or_else(no_template)?;
        realize_with(set, goal, params).ok_or_else(no_template)
    }
}

struct Formatter<'a> {
    set: &'a TemplateSet,
}

impl Formatter<'_> {
    fn word_list(&self, name: &str, index: usize) -> String {
        self.set.directive(name).split_whitespace().nth(index).unwrap_or_default().to_string()
    }

    fn date(&self, year: Option<i32>, month: u8, day: u8) -> String {
        let mut v = BTreeMap::new();
        v.insert("d", day.to_string());
        v.insert("m", month.to_string());
        v.insert("mon", self.word_list("months", usize::from(month.saturating_sub(1))));
        let directive = match year {
            Some(y) => {
                v.insert("y", y.to_string());
                "date"
            }
            None => "date-noyear",
        };
        template::fill(self.set.directive(directive), &v)
    }

    fn day(&self, d: Date) -> String {
        self.date(Some(d.year), d.month, d.day)
    }

    fn clock(&self, minute_of_day: u16) -> String {
        let (h, m) = (minute_of_day / 60, minute_of_day % 60);
        let mut v = BTreeMap::new();
        v.insert("h", h.to_string());
        v.insert("hh", format!("{h:02}"));
        v.insert("mm", format!("{m:02}"));
        template::fill(self.set.directive(if m == 0 { "clock" } else { "clock-minutes" }), &v)
    }

    fn ranges(&self, ranges: &[(u16, u16)]) -> String {
        let parts: Vec<String> = ranges
            .iter()
            .map(|&(a, b)| {
                let mut v = BTreeMap::new();
                v.insert("from", self.clock(a));
                v.insert("to", self.clock(b));
                template::fill(self.set.directive("range"), &v)
            })
            .collect();
        parts.join(self.set.directive("range-join"))
    }

    fn slots(&self, slots: &[Interval]) -> String {
        let parts: Vec<String> = aggregate(slots)
            .iter()
            .map(|(d, rs)| {
                let mut v = BTreeMap::new();
                v.insert("date", self.day(*d));
                v.insert("ranges", self.ranges(rs));
                template::fill(self.set.directive("group"), &v)
            })
            .collect();
        parts.join(self.set.directive("group-join"))
    }

    /// The time specification as understood, for clarification requests.
    fn understood(&self, p: &TimePoint) -> String {
        let date = match (p.day, p.month) {
            (Some(d), Some(m)) => self.date(p.year, m, d),
            _ => String::new(),
        };
        match p.weekday {
            Some(w) if !date.is_empty() => {
                let mut v = BTreeMap::new();
                v.insert("weekday", self.word_list("weekdays", usize::from(w.saturating_sub(1))));
                v.insert("date", date);
                template::fill(self.set.directive("understood-weekday"), &v)
            }
            Some(w) => self.word_list("weekdays", usize::from(w.saturating_sub(1))),
            None => date,
        }
    }
}

fn realize_with(set: &TemplateSet, goal: &GenGoal, params: &SessionParams) -> Option<String> {
    let fmt = Formatter { set };
    let mut facts: BTreeMap<&str, String> = BTreeMap::new();
    let mut values: BTreeMap<&str, String> = BTreeMap::new();
    let yes_no = |b: bool| if b { "yes" } else { "no" }.to_string();

    facts.insert("owner", params.owner_reference.as_str().into());
    facts.insert("formality", params.formality.as_str().into());
    facts.insert("time", params.time_style.as_str().into());
    facts.insert("coop", goal.il.coop.as_str().into());
    facts.insert("more", yes_no(goal.selection));
    facts.insert("clock", yes_no(goal.il.appt.is_some()));
    values.insert("server", params.server_name.clone());
    values.insert("owner", params.owner_name.clone());

    let focus = if goal.kind == GoalKind::ProvideSlots { goal.slots.first() } else { goal.il.focus() };
    if let Some((a, b)) = focus.and_then(Interval::bounds) {
        let date = a.date();
        let minutes = b.0 - a.0;
        let default = i64::from(params.default_duration) == minutes;
        facts.insert("dur", if default { "default" } else { "other" }.into());
        let whole_day = a == date.at(params.workday_start) && b == date.at(params.workday_end);
        facts.insert("span", if whole_day { "day" } else { "part" }.into());
        let tomorrow = goal.reference.is_some_and(|r| r.add_days(1) == date);
        facts.insert("day", if tomorrow { "tomorrow" } else { "other" }.into());
        values.insert("date", fmt.day(date));
        values.insert("time", fmt.clock(a.minute_of_day()));
        let end_of_day = (b.0 - date.at(0).0).clamp(0, 24 * 60) as u16;
        values.insert("end", fmt.clock(end_of_day));
        values.insert("from", fmt.clock(a.minute_of_day()));
        values.insert("to", fmt.clock(end_of_day));
    }

    if goal.kind == GoalKind::ProvideSlots {
        facts.insert("slots", if goal.slots.len() == 1 { "1" } else { "many" }.into());
        facts.insert("dates", aggregate(&goal.slots).len().to_string());
        values.insert("slots", fmt.slots(&goal.slots));
    }
    if let Some(inc) = &goal.inconsistency {
        let issue = match inc.kind {
            InconsistencyKind::WeekdayDateMismatch { .. } => "mismatch",
            InconsistencyKind::InvalidDate => "invalid",
            InconsistencyKind::IllFormedAfterMerge => "merge",
            InconsistencyKind::EmptyExtraction => "vague",
        };
        facts.insert("issue", issue.into());
        values.insert("understood", fmt.understood(&inc.point));
    }

    let body = &set.select(goal.kind.as_str(), &facts)?.body;
    let mut text = template::fill(body, &values);
    if goal.kind == GoalKind::ClarificationRequest && !goal.misspellings.is_empty() {
        values.insert("misspellings", goal.misspellings.join(set.directive("list-join")));
        if let Some(t) = set.select("misspellings", &facts) {
            text.push(' ');
            text.push_str(&template::fill(&t.body, &values));
        }
    }
    Some(text)
}
