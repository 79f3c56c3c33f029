//! Per-session parameters supplied by a client when it opens a dialogue.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use super::fs::FeatureStructure;
use crate::time::{format_clock, parse_clock, Date, Weekday};

const DEFAULTS_TOML: &str = include_str!("../../data/session-defaults.toml");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("workday start {start} must precede workday end {end}")]
    Workday { start: String, end: String },
    #[error("default duration must be positive")]
    Duration,
    #[error("bad parameter {name}: {detail}")]
    Bad { name: String, detail: String },
}

macro_rules! keyword_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!("unknown {} '{}'", stringify!($name), other)),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

keyword_enum!(Formality { Formal => "formal", Informal => "informal" });
keyword_enum!(OwnerReference { Pronoun => "pronoun", FullName => "full-name" });
keyword_enum!(TimeStyle { DeicticPreferred => "deictic-preferred", AnaphoricPreferred => "anaphoric-preferred" });
keyword_enum!(Language { De => "de", En => "en" });

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionParams {
    pub owner_name: String,
    /// Minutes of the day.
    pub workday_start: u16,
    pub workday_end: u16,
    pub weekend_days: BTreeSet<Weekday>,
    pub holidays: BTreeSet<Date>,
    pub min_gap: u32,
    pub formality: Formality,
    pub owner_reference: OwnerReference,
    pub time_style: TimeStyle,
    pub default_duration: u32,
    pub language: Language,
    pub server_name: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct RawParams {
    owner_name: Option<String>,
    workday_start: Option<String>,
    workday_end: Option<String>,
    weekend_days: Option<Vec<u8>>,
    holidays: Option<Vec<String>>,
    min_gap: Option<u32>,
    formality: Option<String>,
    owner_reference: Option<String>,
    time_style: Option<String>,
    default_duration: Option<u32>,
    language: Option<String>,
    server_name: Option<String>,
}

fn bad(name: &str, detail: impl Into<String>) -> ParamError {
    ParamError::Bad {
        name: name.to_string(),
        detail: detail.into(),
    }
}

fn keyword<T: FromStr<Err = String>>(name: &str, v: &str) -> Result<T, ParamError> {
    v.parse().map_err(|e: String| bad(name, e))
}

fn clock(name: &str, v: &str) -> Result<u16, ParamError> {
    parse_clock(v).ok_or_else(|| bad(name, format!("expected HH:MM, got '{v}'")))
}

impl Default for SessionParams {
    fn default() -> Self {
        let raw: RawParams = toml::from_str(DEFAULTS_TOML).expect("shipped session defaults parse");
        let base = SessionParams {
            owner_name: String::new(),
            workday_start: 0,
            workday_end: 1,
            weekend_days: BTreeSet::new(),
            holidays: BTreeSet::new(),
            min_gap: 0,
            formality: Formality::Formal,
            owner_reference: OwnerReference::Pronoun,
            time_style: TimeStyle::DeicticPreferred,
            default_duration: 60,
            language: Language::De,
            server_name: String::new(),
        };
        base.overlay(raw).expect("shipped session defaults are valid")
    }
}

impl SessionParams {
    /// Reads a TOML parameter file; absent keys keep their defaults.
    pub fn from_toml(text: &str) -> Result<Self, ParamError> {
        let raw: RawParams = toml::from_str(text).map_err(|e| bad("toml", e.to_string()))?;
        SessionParams::default().overlay(raw)
    }

    fn overlay(mut self, raw: RawParams) -> Result<Self, ParamError> {
        if let Some(v) = raw.owner_name {
            self.owner_name = v;
        }
        if let Some(v) = raw.workday_start {
            self.workday_start = clock("workday-start", &v)?;
        }
        if let Some(v) = raw.workday_end {
            self.workday_end = clock("workday-end", &v)?;
        }
        if let Some(v) = raw.weekend_days {
            self.weekend_days = v.into_iter().collect();
        }
        if let Some(v) = raw.holidays {
            self.holidays = v
                .iter()
                .map(|d| d.parse().map_err(|e: String| bad("holidays", e)))
                .collect::<Result<_, _>>()?;
        }
        if let Some(v) = raw.min_gap {
            self.min_gap = v;
        }
        if let Some(v) = raw.formality {
            self.formality = keyword("formality", &v)?;
        }
        if let Some(v) = raw.owner_reference {
            self.owner_reference = keyword("owner-reference", &v)?;
        }
        if let Some(v) = raw.time_style {
            self.time_style = keyword("time-style", &v)?;
        }
        if let Some(v) = raw.default_duration {
            self.default_duration = v;
        }
        if let Some(v) = raw.language {
            self.language = keyword("language", &v)?;
        }
        if let Some(v) = raw.server_name {
            self.server_name = v;
        }
        self.validate()?;
        Ok(self)
    }

    /// Applies a single `key=value` setting, as used by scenario files.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ParamError> {
        match key {
            "owner-name" => self.owner_name = value.to_string(),
            "workday" => {
                let (a, b) = value
                    .split_once('-')
                    .ok_or_else(|| bad(key, "expected HH:MM-HH:MM"))?;
                self.workday_start = clock(key, a)?;
                self.workday_end = clock(key, b)?;
            }
            "workday-start" => self.workday_start = clock(key, value)?,
            "workday-end" => self.workday_end = clock(key, value)?,
            "weekend-days" => {
                self.weekend_days = value
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.trim().parse::<u8>().map_err(|e| bad(key, e.to_string())))
                    .collect::<Result<_, _>>()?
            }
            "holidays" => {
                self.holidays = value
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().map_err(|e: String| bad(key, e)))
                    .collect::<Result<_, _>>()?
            }
            "min-gap" => self.min_gap = value.parse().map_err(|_| bad(key, value))?,
            "formality" => self.formality = keyword(key, value)?,
            "owner-reference" => self.owner_reference = keyword(key, value)?,
            "time-style" => self.time_style = keyword(key, value)?,
            "default-duration" => self.default_duration = value.parse().map_err(|_| bad(key, value))?,
            "language" => self.language = keyword(key, value)?,
            "server-name" => self.server_name = value.to_string(),
            _ => return Err(bad(key, "unknown parameter")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.workday_start >= self.workday_end || self.workday_end > 24 * 60 {
            return Err(ParamError::Workday {
                start: format_clock(self.workday_start),
                end: format_clock(self.workday_end),
            });
        }
        if self.default_duration == 0 {
            return Err(ParamError::Duration);
        }
        if let Some(d) = self.weekend_days.iter().find(|d| !(1..=7).contains(*d)) {
            return Err(bad("weekend-days", format!("weekday {d} out of range")));
        }
        Ok(())
    }

    pub fn is_working_day(&self, date: Date) -> bool {
        !self.weekend_days.contains(&date.weekday()) && !self.holidays.contains(&date)
    }

    pub fn to_fs(&self) -> FeatureStructure {
        FeatureStructure::map([
            ("OWNER-NAME", FeatureStructure::text(&self.owner_name)),
            ("WORKDAY-START", FeatureStructure::int(self.workday_start.into())),
            ("WORKDAY-END", FeatureStructure::int(self.workday_end.into())),
            (
                "WEEKEND-DAYS",
                FeatureStructure::List(
                    self.weekend_days
                        .iter()
                        .map(|d| FeatureStructure::int((*d).into()))
                        .collect(),
                ),
            ),
            (
                "HOLIDAYS",
                FeatureStructure::List(
                    self.holidays
                        .iter()
                        .map(|d| FeatureStructure::text(d.to_string()))
                        .collect(),
                ),
            ),
            ("MIN-GAP", FeatureStructure::int(self.min_gap.into())),
            ("FORMALITY", FeatureStructure::sym(self.formality.as_str())),
            ("OWNER-REFERENCE", FeatureStructure::sym(self.owner_reference.as_str())),
            ("TIME-STYLE", FeatureStructure::sym(self.time_style.as_str())),
            ("DEFAULT-DURATION", FeatureStructure::int(self.default_duration.into())),
            ("LANGUAGE", FeatureStructure::sym(self.language.as_str())),
            ("SERVER-NAME", FeatureStructure::text(&self.server_name)),
        ])
    }

    /// Missing features fall back to defaults; present ones must be well-typed.
    pub fn from_fs(fs: &FeatureStructure) -> Result<Self, ParamError> {
        let map = fs.as_map().ok_or_else(|| bad("params", "expected a map"))?;
        let mut p = SessionParams::default();
        for (k, v) in map {
            let int = |v: &FeatureStructure| {
                v.as_int()
                    .filter(|i| *i >= 0 && *i <= i64::from(u32::MAX))
                    .ok_or_else(|| bad(k, "expected a non-negative integer"))
            };
            let word = |v: &FeatureStructure| {
                v.as_symbol()
                    .or_else(|| v.as_text())
                    .map(str::to_string)
                    .ok_or_else(|| bad(k, "expected a symbol"))
            };
            match k.as_str() {
                "OWNER-NAME" => p.owner_name = word(v)?,
                "WORKDAY-START" => p.workday_start = int(v)?.min(24 * 60) as u16,
                "WORKDAY-END" => p.workday_end = int(v)?.min(24 * 60) as u16,
                "WEEKEND-DAYS" => {
                    let l = v.as_list().ok_or_else(|| bad(k, "expected a list"))?;
                    p.weekend_days = l.iter().map(|d| int(d).map(|d| d.min(255) as u8)).collect::<Result<_, _>>()?;
                }
                "HOLIDAYS" => {
                    let l = v.as_list().ok_or_else(|| bad(k, "expected a list"))?;
                    p.holidays = l
                        .iter()
                        .map(|d| word(d)?.parse().map_err(|e: String| bad(k, e)))
                        .collect::<Result<_, _>>()?;
                }
                "MIN-GAP" => p.min_gap = int(v)? as u32,
                "FORMALITY" => p.formality = keyword(k, &word(v)?)?,
                "OWNER-REFERENCE" => p.owner_reference = keyword(k, &word(v)?)?,
                "TIME-STYLE" => p.time_style = keyword(k, &word(v)?)?,
                "DEFAULT-DURATION" => p.default_duration = int(v)? as u32,
                "LANGUAGE" => p.language = keyword(k, &word(v)?)?,
                "SERVER-NAME" => p.server_name = word(v)?,
                _ => return Err(bad(k, "unknown parameter")),
            }
        }
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_defaults() {
        let p = SessionParams::default();
        assert_eq!(p.workday_start, 8 * 60);
        assert_eq!(p.workday_end, 18 * 60);
        assert_eq!(p.default_duration, 60);
        assert!(p.weekend_days.contains(&6) && p.weekend_days.contains(&7));
    }

    #[test]
    fn inverted_workday_rejected() {
        let err = SessionParams::from_toml("workday-start = \"18:00\"\nworkday-end = \"08:00\"").unwrap_err();
        assert!(matches!(err, ParamError::Workday { .. }));
        let mut p = SessionParams::default();
        p.set("workday", "10:00-10:00").unwrap();
        assert!(p.validate().is_err());
    }

    #[test]
    fn fs_round_trip() {
        let mut p = SessionParams::default();
        p.set("holidays", "1996-12-25,1996-12-26").unwrap();
        p.set("owner-reference", "full-name").unwrap();
        p.owner_name = "Anna Achter".into();
        assert_eq!(SessionParams::from_fs(&p.to_fs()).unwrap(), p);
    }

    #[test]
    fn zero_duration_rejected() {
        assert_eq!(SessionParams::from_toml("default-duration = 0"), Err(ParamError::Duration));
    }
}
