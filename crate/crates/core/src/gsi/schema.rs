//! Feature-structure encodings of the domain records exchanged over the
//! wire.
//!
//! ```text
//! TimePoint     [DAY: 5 HOUR: 10 MINUTE: 0 MONTH: 11 WEEKDAY: 2 YEAR: 1996]   absent fields omitted
//! Interval      [LEFT: <TimePoint> RIGHT: <TimePoint>]
//! IL            [APPT: <Interval> COOP: refine DURATION: 60 RANGE: <Interval> SLOTS: (<Interval> ...)]
//! Inconsistency [ACTUAL: 6 KIND: weekday-date-mismatch POINT: <TimePoint> STATED: 1]
//! GenGoal       [IL: <IL> ISSUE: <Inconsistency> KIND: accept MISSPELLINGS: ("..") REFERENCE: "1996-10-28" SELECTION: yes SLOTS: (..)]
//! ```

use thiserror::Error;

use super::fs::FeatureStructure as Fs;
use crate::generation::{GenGoal, GoalKind};
use crate::semantics::consistency::{Inconsistency, InconsistencyKind};
use crate::semantics::il::{Coop, IlExpression};
use crate::time::{Interval, TimePoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("missing feature {0}")]
    Missing(&'static str),
    #[error("bad value for {feature}: {detail}")]
    Bad { feature: &'static str, detail: String },
}

fn bad(feature: &'static str, detail: impl Into<String>) -> SchemaError {
    SchemaError::Bad { feature, detail: detail.into() }
}

fn int_in<T: TryFrom<i64>>(fs: &Fs, feature: &'static str) -> Result<Option<T>, SchemaError> {
    match fs.get(feature) {
        None => Ok(None),
        Some(v) => {
            let i = v.as_int().ok_or_else(|| bad(feature, "expected an integer"))?;
            T::try_from(i).map(Some).map_err(|_| bad(feature, format!("{i} out of range")))
        }
    }
}

fn require_map(fs: &Fs, what: &'static str) -> Result<(), SchemaError> {
    fs.as_map().map(|_| ()).ok_or_else(|| bad(what, "expected a map"))
}

fn symbol<'a>(fs: &'a Fs, feature: &'static str) -> Result<&'a str, SchemaError> {
    let v = fs.get(feature).ok_or(SchemaError::Missing(feature))?;
    v.as_symbol().or_else(|| v.as_text()).ok_or_else(|| bad(feature, "expected a symbol"))
}

pub fn point_to_fs(p: &TimePoint) -> Fs {
    let fields = [
        ("YEAR", p.year.map(i64::from)),
        ("MONTH", p.month.map(i64::from)),
        ("DAY", p.day.map(i64::from)),
        ("WEEKDAY", p.weekday.map(i64::from)),
        ("HOUR", p.hour.map(i64::from)),
        ("MINUTE", p.minute.map(i64::from)),
    ];
    Fs::map(fields.into_iter().filter_map(|(k, v)| v.map(|v| (k, Fs::int(v)))))
}

pub fn point_from_fs(fs: &Fs) -> Result<TimePoint, SchemaError> {
    require_map(fs, "time point")?;
    Ok(TimePoint {
        year: int_in(fs, "YEAR")?,
        month: int_in(fs, "MONTH")?,
        day: int_in(fs, "DAY")?,
        weekday: int_in(fs, "WEEKDAY")?,
        hour: int_in(fs, "HOUR")?,
        minute: int_in(fs, "MINUTE")?,
    })
}

pub fn interval_to_fs(iv: &Interval) -> Fs {
    Fs::map([("LEFT", point_to_fs(&iv.left)), ("RIGHT", point_to_fs(&iv.right))])
}

pub fn interval_from_fs(fs: &Fs) -> Result<Interval, SchemaError> {
    require_map(fs, "interval")?;
    let left = point_from_fs(fs.get("LEFT").ok_or(SchemaError::Missing("LEFT"))?)?;
    let right = point_from_fs(fs.get("RIGHT").ok_or(SchemaError::Missing("RIGHT"))?)?;
    Ok(Interval::new(left, right))
}

fn intervals_from_fs(fs: Option<&Fs>, feature: &'static str) -> Result<Vec<Interval>, SchemaError> {
    match fs {
        None => Ok(Vec::new()),
        Some(v) => v
            .as_list()
            .ok_or_else(|| bad(feature, "expected a list"))?
            .iter()
            .map(interval_from_fs)
            .collect(),
    }
}

fn intervals_to_fs(ivs: &[Interval]) -> Fs {
    Fs::List(ivs.iter().map(interval_to_fs).collect())
}

pub fn il_to_fs(il: &IlExpression) -> Fs {
    let mut entries = vec![("COOP", Fs::sym(il.coop.as_str()))];
    if let Some(r) = &il.range {
        entries.push(("RANGE", interval_to_fs(r)));
    }
    if let Some(a) = &il.appt {
        entries.push(("APPT", interval_to_fs(a)));
    }
    if let Some(d) = il.duration {
        entries.push(("DURATION", Fs::int(d.into())));
    }
    if !il.slots.is_empty() {
        entries.push(("SLOTS", intervals_to_fs(&il.slots)));
    }
    Fs::map(entries)
}

pub fn il_from_fs(fs: &Fs) -> Result<IlExpression, SchemaError> {
    require_map(fs, "IL")?;
    let coop: Coop = symbol(fs, "COOP")?.parse().map_err(|e: String| bad("COOP", e))?;
    Ok(IlExpression {
        coop,
        range: fs.get("RANGE").map(interval_from_fs).transpose()?,
        appt: fs.get("APPT").map(interval_from_fs).transpose()?,
        duration: int_in(fs, "DURATION")?,
        slots: intervals_from_fs(fs.get("SLOTS"), "SLOTS")?,
    })
}

pub fn inconsistency_to_fs(inc: &Inconsistency) -> Fs {
    let mut entries = vec![("KIND", Fs::sym(inc.kind.code())), ("POINT", point_to_fs(&inc.point))];
    if let InconsistencyKind::WeekdayDateMismatch { stated, actual } = inc.kind {
        entries.push(("STATED", Fs::int(stated.into())));
        entries.push(("ACTUAL", Fs::int(actual.into())));
    }
    Fs::map(entries)
}

pub fn inconsistency_from_fs(fs: &Fs) -> Result<Inconsistency, SchemaError> {
    require_map(fs, "inconsistency")?;
    let kind = match symbol(fs, "KIND")? {
        "weekday-date-mismatch" => InconsistencyKind::WeekdayDateMismatch {
            stated: int_in(fs, "STATED")?.ok_or(SchemaError::Missing("STATED"))?,
            actual: int_in(fs, "ACTUAL")?.ok_or(SchemaError::Missing("ACTUAL"))?,
        },
        "invalid-date" => InconsistencyKind::InvalidDate,
        "empty-extraction" => InconsistencyKind::EmptyExtraction,
        "ill-formed-after-merge" => InconsistencyKind::IllFormedAfterMerge,
        other => return Err(bad("KIND", format!("unknown inconsistency '{other}'"))),
    };
    let point = fs.get("POINT").map(point_from_fs).transpose()?.unwrap_or_default();
    Ok(Inconsistency { kind, point })
}

fn texts_to_fs(items: &[String]) -> Fs {
    Fs::List(items.iter().map(Fs::text).collect())
}

fn texts_from_fs(fs: Option<&Fs>, feature: &'static str) -> Result<Vec<String>, SchemaError> {
    let Some(v) = fs else { return Ok(Vec::new()) };
    v.as_list()
        .ok_or_else(|| bad(feature, "expected a list"))?
        .iter()
        .map(|x| x.as_text().or_else(|| x.as_symbol()).map(str::to_string).ok_or_else(|| bad(feature, "expected text")))
        .collect()
}

pub fn goal_to_fs(g: &GenGoal) -> Fs {
    let mut entries = vec![("KIND", Fs::sym(g.kind.as_str())), ("IL", il_to_fs(&g.il))];
    if !g.slots.is_empty() {
        entries.push(("SLOTS", intervals_to_fs(&g.slots)));
    }
    if let Some(inc) = &g.inconsistency {
        entries.push(("ISSUE", inconsistency_to_fs(inc)));
    }
    if !g.misspellings.is_empty() {
        entries.push(("MISSPELLINGS", texts_to_fs(&g.misspellings)));
    }
    if g.selection {
        entries.push(("SELECTION", Fs::sym("yes")));
    }
    if let Some(d) = g.reference {
        entries.push(("REFERENCE", Fs::text(d.to_string())));
    }
    Fs::map(entries)
}

pub fn goal_from_fs(fs: &Fs) -> Result<GenGoal, SchemaError> {
    require_map(fs, "goal")?;
    let kind: GoalKind = symbol(fs, "KIND")?.parse().map_err(|e: String| bad("KIND", e))?;
    let il = match fs.get("IL") {
        Some(v) => il_from_fs(v)?,
        None if kind == GoalKind::ClarificationRequest => IlExpression::new(Coop::RequestClarification),
        None => return Err(SchemaError::Missing("IL")),
    };
    let mut goal = GenGoal::new(kind, il);
    if fs.get("SLOTS").is_some() {
        goal.slots = intervals_from_fs(fs.get("SLOTS"), "SLOTS")?;
    }
    goal.inconsistency = fs.get("ISSUE").map(inconsistency_from_fs).transpose()?;
    goal.misspellings = texts_from_fs(fs.get("MISSPELLINGS"), "MISSPELLINGS")?;
    goal.selection = match fs.get("SELECTION") {
        None => false,
        Some(v) => match v.as_symbol() {
            Some("yes") => true,
            Some("no") => false,
            _ => return Err(bad("SELECTION", "expected yes or no")),
        },
    };
    goal.reference = match fs.get("REFERENCE") {
        None => None,
        Some(v) => Some(
            v.as_text()
                .ok_or_else(|| bad("REFERENCE", "expected a date"))?
                .parse()
                .map_err(|e: String| bad("REFERENCE", e))?,
        ),
    };
    Ok(goal)
}
