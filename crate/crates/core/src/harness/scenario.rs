//! Scenario files.
//!
//! ```text
//! # comments and blank lines are ignored
//! language de
//! human H
//! agent A calendar=a.cal owner-name="Anna Weber" counter-proposals=on
//! send 1996-10-28T09:00 H A,B Ich würde Sie gern am Montag treffen.
//! initiate 1996-10-28T09:00 A B,C 1996-11-04T08:00 1996-11-08T18:00 60
//! ```
//!
//! Agent settings are `key=value` pairs: `calendar` and `strategy` name
//! files relative to the scenario file; the strategy keys
//! (`counter-proposals`, `free-slot-offering`, `max-slots-listed`,
//! `counter-window-days`) override the strategy file; everything else is a
//! session parameter. `send` takes the rest of the line as message text.
//! `initiate` starts an agent-driven negotiation with the given partners,
//! range and duration in minutes.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::agent::{Calendar, StrategyConfig};
use crate::gsi::params::{Language, SessionParams};
use crate::time::{Interval, Moment};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("{file}:{line}: {message}")]
    Line { file: String, line: usize, message: String },
    #[error("{file}: {message}")]
    File { file: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentSpec {
    pub name: String,
    pub params: SessionParams,
    pub calendar: Calendar,
    pub strategy: StrategyConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Send { time: Moment, from: String, to: Vec<String>, text: String },
    Initiate { time: Moment, agent: String, partners: Vec<String>, range: Interval, duration: u32 },
}

impl Event {
    pub fn time(&self) -> Moment {
        match self {
            Event::Send { time, .. } | Event::Initiate { time, .. } => *time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub language: Language,
    pub humans: BTreeSet<String>,
    pub agents: Vec<AgentSpec>,
    pub events: Vec<Event>,
}

impl Scenario {
    pub fn empty() -> Scenario {
        Scenario { language: Language::De, humans: BTreeSet::new(), agents: Vec::new(), events: Vec::new() }
    }

    pub fn agent(&self, name: &str) -> Option<&AgentSpec> {
        self.agents.iter().find(|a| a.name == name)
    }

    pub fn is_participant(&self, name: &str) -> bool {
        self.humans.contains(name) || self.agent(name).is_some()
    }

    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let file = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|e| ScenarioError::File { file: file.clone(), message: e.to_string() })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Scenario::parse_with(&text, &file, |rel| {
            let p: PathBuf = base.join(rel);
            fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))
        })
    }

    /// Parses scenario text; `read` resolves referenced files.
    pub fn parse_with(text: &str, file: &str, read: impl Fn(&str) -> Result<String, String>) -> Result<Scenario, ScenarioError> {
        let mut sc = Scenario::empty();
        let mut last_send: Vec<(String, Moment)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ScenarioError::Line { file: file.to_string(), line: i + 1, message };
            let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match cmd {
                "language" => sc.language = rest.parse().map_err(err)?,
                "human" => {
                    if rest.is_empty() || sc.is_participant(rest) {
                        return Err(err(format!("bad or duplicate participant '{rest}'")));
                    }
                    sc.humans.insert(rest.to_string());
                }
                "agent" => {
                    let spec = parse_agent(rest, sc.language, &read).map_err(err)?;
                    if sc.is_participant(&spec.name) {
                        return Err(err(format!("duplicate participant '{}'", spec.name)));
                    }
                    sc.agents.push(spec);
                }
                "send" => {
                    let mut parts = rest.splitn(4, char::is_whitespace);
                    let time: Moment = parts.next().unwrap_or("").parse().map_err(err)?;
                    let from = parts.next().ok_or_else(|| err("missing sender".into()))?.to_string();
                    let to = names(parts.next().ok_or_else(|| err("missing recipients".into()))?);
                    let text = parts.next().unwrap_or("").trim().to_string();
                    for n in std::iter::once(&from).chain(&to) {
                        if !sc.is_participant(n) {
                            return Err(err(format!("unknown participant '{n}'")));
                        }
                    }
                    if !sc.humans.contains(&from) {
                        return Err(err(format!("'{from}' is not a human; agents only react")));
                    }
                    if let Some((_, t)) = last_send.iter().find(|(n, _)| *n == from) {
                        if time < *t {
                            return Err(err(format!("send times of {from} must not decrease")));
                        }
                    }
                    last_send.retain(|(n, _)| *n != from);
                    last_send.push((from.clone(), time));
                    sc.events.push(Event::Send { time, from, to, text });
                }
                "initiate" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    let [time, agent, partners, lo, hi, duration] = parts[..] else {
                        return Err(err("expected: initiate TIME AGENT PARTNERS FROM TO MINUTES".into()));
                    };
                    let time: Moment = time.parse().map_err(err)?;
                    if sc.agent(agent).is_none() {
                        return Err(err(format!("unknown agent '{agent}'")));
                    }
                    let partners = names(partners);
                    if let Some(p) = partners.iter().find(|p| !sc.is_participant(p) || *p == agent) {
                        return Err(err(format!("bad partner '{p}'")));
                    }
                    let lo: Moment = lo.parse().map_err(err)?;
                    let hi: Moment = hi.parse().map_err(err)?;
                    let duration: u32 = duration.parse().map_err(|_| err(format!("bad duration '{duration}'")))?;
                    if hi <= lo || duration == 0 {
                        return Err(err("empty range or duration".into()));
                    }
                    sc.events.push(Event::Initiate {
                        time,
                        agent: agent.to_string(),
                        partners,
                        range: Interval::from_moments(lo, hi),
                        duration,
                    });
                }
                other => return Err(err(format!("unknown command '{other}'"))),
            }
        }
        Ok(sc)
    }
}

fn names(list: &str) -> Vec<String> {
    list.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect()
}

/// Splits `key=value` settings; values may be double-quoted.
fn settings(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        let (key, after) = rest.split_once('=').ok_or_else(|| format!("expected key=value in '{rest}'"))?;
        if key.contains(char::is_whitespace) || key.is_empty() {
            return Err(format!("bad setting name '{key}'"));
        }
        let (value, next) = if let Some(q) = after.strip_prefix('"') {
            let end = q.find('"').ok_or("unterminated quote")?;
            (&q[..end], &q[end + 1..])
        } else {
            after.split_once(char::is_whitespace).unwrap_or((after, ""))
        };
        out.push((key.to_string(), value.to_string()));
        rest = next.trim_start();
    }
    Ok(out)
}

fn on_off(key: &str, v: &str) -> Result<bool, String> {
    match v {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        _ => Err(format!("{key}: expected on or off, got '{v}'")),
    }
}

fn parse_agent(rest: &str, language: Language, read: &impl Fn(&str) -> Result<String, String>) -> Result<AgentSpec, String> {
    let (name, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    if name.is_empty() || name.contains('=') {
        return Err("agent needs a name".into());
    }
    let mut params = SessionParams { language, ..SessionParams::default() };
    let mut strategy = StrategyConfig::default();
    let mut calendar_text = String::new();
    for (k, v) in settings(rest)? {
        match k.as_str() {
            "calendar" => calendar_text = read(&v)?,
            "strategy" => strategy = StrategyConfig::from_toml(&read(&v)?)?,
            "counter-proposals" => strategy.counter_proposals = on_off(&k, &v)?,
            "free-slot-offering" => strategy.free_slot_offering = on_off(&k, &v)?,
            "max-slots-listed" => {
                strategy.max_slots_listed = v.parse().ok().filter(|n| *n >= 1).ok_or_else(|| format!("bad {k} '{v}'"))?
            }
            "counter-window-days" => strategy.counter_window_days = v.parse().map_err(|_| format!("bad {k} '{v}'"))?,
            _ => params.set(&k, &v).map_err(|e| e.to_string())?,
        }
    }
    params.validate().map_err(|e| e.to_string())?;
    let calendar = Calendar::parse(&calendar_text, &params).map_err(|e| e.to_string())?;
    Ok(AgentSpec { name: name.to_string(), params, calendar, strategy })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        Scenario::parse_with(text, "t", |f| match f {
            "a.cal" => Ok("1996-11-04 08:00 13:00 busy x\n".into()),
            _ => Err(format!("{f}: not found")),
        })
    }

    #[test]
    fn empty_scenario() {
        assert_eq!(parse("# nothing\n\n").unwrap(), Scenario::empty());
    }

    #[test]
    fn full_example() {
        let sc = parse(
            "language de\nhuman H\nagent A calendar=a.cal owner-name=\"Anna Weber\" owner-reference=full-name max-slots-listed=2\nagent B\n\
             send 1996-10-28T09:00 H A,B Können wir uns treffen?\ninitiate 1996-10-28T10:00 A B 1996-11-04T08:00 1996-11-05T18:00 30\n",
        )
        .unwrap();
        let a = sc.agent("A").unwrap();
        assert_eq!(a.params.owner_name, "Anna Weber");
        assert_eq!(a.strategy.max_slots_listed, 2);
        assert_eq!(a.calendar.busy.len(), 1);
        assert_eq!(sc.events.len(), 2);
        let Event::Send { to, text, .. } = &sc.events[0] else { panic!() };
        assert_eq!(to, &vec!["A".to_string(), "B".to_string()]);
        assert_eq!(text, "Können wir uns treffen?");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let line = |t: &str| match parse(t) {
            Err(ScenarioError::Line { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line("human H\nsend 1996-10-28T09:00 H X hallo"), 2);
        assert_eq!(line("human H\n\nagent A calendar=missing.cal"), 3);
        assert_eq!(line("bogus"), 1);
        assert_eq!(line("human H\nagent A\nsend 1996-10-28T09:00 H A a\nsend 1996-10-27T09:00 H A b"), 4);
        assert_eq!(line("agent A\nagent B\ninitiate 1996-10-28T09:00 A B 1996-11-04T08:00 1996-11-04T08:00 60"), 3);
    }
}
