//! Request and response envelopes.
//!
//! ```text
//! request   [OP: analyze PAYLOAD: <map> SESSION: "s1"]
//! response  [OP: analyze PAYLOAD: <map> SESSION: "s1" STATUS: ok]
//!           [CODE: "bad-payload" DETAIL: ".." OP: .. SESSION: .. STATUS: error]
//! ```
//!
//! | op            | request payload          | ok / exhausted / clarification-needed payload |
//! |---------------|--------------------------|-----------------------------------------------|
//! | open-session  | SessionParams            | `[]` (the new id is in SESSION)               |
//! | analyze       | `[TEXT: ".." TIME: ".."]`  | `[IL: ..]` or `[GOAL: .. INTENT: propose TEXT: ".."]` |
//! | next-solution | `[]`                     | `[IL: ..]`, or exhausted with `[]`            |
//! | commit        | `[IL: .. TIME: ".."]`      | `[]`                                          |
//! | repair        | `[TIME: ".."]`             | `[GOAL: .. TEXT: ".."]`                        |
//! | generate      | `[GOAL: .. TIME: ".."]`    | `[TEXT: ".."]`                                 |
//! | close-session | `[]`                     | `[]`                                          |
//!
//! TIME is the message send time `YYYY-MM-DDTHH:MM` and may be omitted.

use std::fmt;
use std::str::FromStr;

use super::fs::FeatureStructure as Fs;
use super::schema::{goal_from_fs, goal_to_fs, il_from_fs, il_to_fs, SchemaError};
use crate::coconuts::{Request, Response};
use crate::time::Moment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    OpenSession,
    Analyze,
    NextSolution,
    Commit,
    Repair,
    Generate,
    CloseSession,
}

impl Op {
    pub const ALL: [Op; 7] = [
        Op::OpenSession,
        Op::Analyze,
        Op::NextSolution,
        Op::Commit,
        Op::Repair,
        Op::Generate,
        Op::CloseSession,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Op::OpenSession => "open-session",
            Op::Analyze => "analyze",
            Op::NextSolution => "next-solution",
            Op::Commit => "commit",
            Op::Repair => "repair",
            Op::Generate => "generate",
            Op::CloseSession => "close-session",
        }
    }
}

impl FromStr for Op {
    type Err = String;
    fn from_str(s: &str) -> Result<Op, String> {
        Op::ALL.into_iter().find(|o| o.as_str() == s).ok_or_else(|| format!("unknown op '{s}'"))
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Ok,
    Exhausted,
    ClarificationNeeded,
    Error { code: String, detail: String },
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Exhausted => "exhausted",
            Status::ClarificationNeeded => "clarification-needed",
            Status::Error { .. } => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub session: String,
    pub op: Op,
    pub payload: Fs,
    /// Present on responses only.
    pub status: Option<Status>,
}

fn bad(feature: &'static str, detail: impl Into<String>) -> SchemaError {
    SchemaError::Bad { feature, detail: detail.into() }
}

fn text_of<'a>(fs: &'a Fs, feature: &'static str) -> Result<Option<&'a str>, SchemaError> {
    match fs.get(feature) {
        None => Ok(None),
        Some(v) => v.as_text().or_else(|| v.as_symbol()).map(Some).ok_or_else(|| bad(feature, "expected text")),
    }
}

fn time_of(fs: &Fs) -> Result<Option<Moment>, SchemaError> {
    text_of(fs, "TIME")?.map(|t| t.parse().map_err(|e: String| bad("TIME", e))).transpose()
}

fn with_time(mut entries: Vec<(&'static str, Fs)>, time: Option<Moment>) -> Fs {
    if let Some(t) = time {
        entries.push(("TIME", Fs::text(t.to_string())));
    }
    Fs::map(entries)
}

impl Envelope {
    pub fn request(session: impl Into<String>, op: Op, payload: Fs) -> Envelope {
        Envelope { session: session.into(), op, payload, status: None }
    }

    pub fn response(session: impl Into<String>, op: Op, status: Status, payload: Fs) -> Envelope {
        Envelope { session: session.into(), op, payload, status: Some(status) }
    }

    pub fn error(session: impl Into<String>, op: Op, code: &str, detail: impl Into<String>) -> Envelope {
        let status = Status::Error { code: code.to_string(), detail: detail.into() };
        Envelope::response(session, op, status, Fs::empty_map())
    }

    pub fn to_fs(&self) -> Fs {
        let mut e = vec![
            ("SESSION", Fs::text(&self.session)),
            ("OP", Fs::sym(self.op.as_str())),
            ("PAYLOAD", self.payload.clone()),
        ];
        if let Some(s) = &self.status {
            e.push(("STATUS", Fs::sym(s.as_str())));
            if let Status::Error { code, detail } = s {
                e.push(("CODE", Fs::text(code)));
                e.push(("DETAIL", Fs::text(detail)));
            }
        }
        Fs::map(e)
    }

    pub fn from_fs(fs: &Fs) -> Result<Envelope, SchemaError> {
        if fs.as_map().is_none() {
            return Err(bad("envelope", "expected a map"));
        }
        let session = text_of(fs, "SESSION")?.unwrap_or("").to_string();
        let op = text_of(fs, "OP")?.ok_or(SchemaError::Missing("OP"))?;
        let op: Op = op.parse().map_err(|e: String| bad("OP", e))?;
        let payload = fs.get("PAYLOAD").cloned().unwrap_or_else(Fs::empty_map);
        let status = match text_of(fs, "STATUS")? {
            None => None,
            Some("ok") => Some(Status::Ok),
            Some("exhausted") => Some(Status::Exhausted),
            Some("clarification-needed") => Some(Status::ClarificationNeeded),
            Some("error") => Some(Status::Error {
                code: text_of(fs, "CODE")?.unwrap_or("").to_string(),
                detail: text_of(fs, "DETAIL")?.unwrap_or("").to_string(),
            }),
            Some(other) => return Err(bad("STATUS", format!("unknown status '{other}'"))),
        };
        Ok(Envelope { session, op, payload, status })
    }

    pub fn encode(&self) -> String {
        self.to_fs().encode()
    }

    pub fn decode(text: &str) -> Result<Envelope, String> {
        let fs = Fs::decode(text).map_err(|e| e.to_string())?;
        Envelope::from_fs(&fs).map_err(|e| e.to_string())
    }
}

/// Builds the request envelope for a kernel request.
pub fn request_envelope(session: &str, request: &Request) -> Envelope {
    let (op, payload) = match request {
        Request::Analyze { text, time } => (Op::Analyze, with_time(vec![("TEXT", Fs::text(text))], *time)),
        Request::NextSolution => (Op::NextSolution, Fs::empty_map()),
        Request::Commit { il, time } => (Op::Commit, with_time(vec![("IL", il_to_fs(il))], *time)),
        Request::Repair { time } => (Op::Repair, with_time(Vec::new(), *time)),
        Request::Generate { goal, time } => (Op::Generate, with_time(vec![("GOAL", goal_to_fs(goal))], *time)),
    };
    Envelope::request(session, op, payload)
}

/// The kernel request carried by a session-scoped envelope.
pub fn request_of(env: &Envelope) -> Result<Request, SchemaError> {
    let p = &env.payload;
    if p.as_map().is_none() {
        return Err(bad("PAYLOAD", "expected a map"));
    }
    Ok(match env.op {
        Op::Analyze => Request::Analyze {
            text: text_of(p, "TEXT")?.ok_or(SchemaError::Missing("TEXT"))?.to_string(),
            time: time_of(p)?,
        },
        Op::NextSolution => Request::NextSolution,
        Op::Commit => Request::Commit {
            il: il_from_fs(p.get("IL").ok_or(SchemaError::Missing("IL"))?)?,
            time: time_of(p)?,
        },
        Op::Repair => Request::Repair { time: time_of(p)? },
        Op::Generate => Request::Generate {
            goal: goal_from_fs(p.get("GOAL").ok_or(SchemaError::Missing("GOAL"))?)?,
            time: time_of(p)?,
        },
        Op::OpenSession | Op::CloseSession => return Err(bad("OP", "not a dialogue request")),
    })
}

pub fn response_envelope(session: &str, op: Op, response: &Response) -> Envelope {
    let (status, payload) = match response {
        Response::Solution(il) => (Status::Ok, Fs::map([("IL", il_to_fs(il))])),
        Response::Exhausted => (Status::Exhausted, Fs::empty_map()),
        Response::Clarification { goal, text, intent } => {
            let mut e = vec![("GOAL", goal_to_fs(goal)), ("TEXT", Fs::text(text))];
            if let Some(c) = intent {
                e.push(("INTENT", Fs::sym(c.as_str())));
            }
            (Status::ClarificationNeeded, Fs::map(e))
        }
        Response::Text(t) => (Status::Ok, Fs::map([("TEXT", Fs::text(t))])),
        Response::Done => (Status::Ok, Fs::empty_map()),
        Response::Error { code, detail } => {
            return Envelope::error(session, op, code, detail.clone());
        }
    };
    Envelope::response(session, op, status, payload)
}

/// Inverse of [`response_envelope`].
pub fn response_of(env: &Envelope) -> Result<Response, SchemaError> {
    let p = &env.payload;
    Ok(match env.status.as_ref().ok_or(SchemaError::Missing("STATUS"))? {
        Status::Error { code, detail } => Response::Error { code: code.clone(), detail: detail.clone() },
        Status::Exhausted => Response::Exhausted,
        Status::ClarificationNeeded => Response::Clarification {
            goal: goal_from_fs(p.get("GOAL").ok_or(SchemaError::Missing("GOAL"))?)?,
            text: text_of(p, "TEXT")?.unwrap_or("").to_string(),
            intent: text_of(p, "INTENT")?
                .map(|c| c.parse().map_err(|e: String| bad("INTENT", e)))
                .transpose()?,
        },
        Status::Ok => {
            if let Some(il) = p.get("IL") {
                Response::Solution(il_from_fs(il)?)
            } else if let Some(t) = text_of(p, "TEXT")? {
                Response::Text(t.to_string())
            } else {
                Response::Done
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generation::{GenGoal, GoalKind};
    use crate::semantics::{Coop, IlExpression};
    use crate::time::{Date, Interval};

    fn il() -> IlExpression {
        let d = Date::new(1996, 11, 5).unwrap();
        IlExpression::new(Coop::Refine).with_appt(Interval::on_day(d, 600, 660)).with_duration(60)
    }

    #[test]
    fn requests_round_trip() {
        let t = Some("1996-10-29T14:00".parse().unwrap());
        let reqs = vec![
            Request::Analyze { text: "Wie wäre es um 10?".into(), time: t },
            Request::Analyze { text: "x".into(), time: None },
            Request::NextSolution,
            Request::Commit { il: il(), time: t },
            Request::Repair { time: t },
            Request::Generate { goal: GenGoal::new(GoalKind::Accept, il()), time: None },
        ];
        for r in reqs {
            let env = request_envelope("s3", &r);
            let back = Envelope::decode(&env.encode()).unwrap();
            assert_eq!(back, env);
            assert_eq!(request_of(&back).unwrap(), r);
        }
    }

    #[test]
    fn responses_round_trip() {
        let resps = vec![
            Response::Solution(il()),
            Response::Exhausted,
            Response::Text("Ich sage zu.".into()),
            Response::Done,
            Response::Error { code: "bad-payload".into(), detail: "no".into() },
        ];
        for r in resps {
            let env = response_envelope("s1", Op::Analyze, &r);
            let back = Envelope::decode(&env.encode()).unwrap();
            assert_eq!(response_of(&back).unwrap(), r);
        }
    }

    #[test]
    fn malformed_envelopes() {
        assert!(Envelope::decode("[OP: fly]").is_err());
        assert!(Envelope::decode("[SESSION: \"s1\"]").is_err());
        assert!(Envelope::decode("(1 2)").is_err());
        let env = Envelope::decode("[OP: analyze PAYLOAD: []]").unwrap();
        assert_eq!(request_of(&env), Err(SchemaError::Missing("TEXT")));
    }

    #[test]
    fn canonical_text() {
        let env = Envelope::request("s1", Op::NextSolution, Fs::empty_map());
        assert_eq!(env.encode(), "[OP: next-solution PAYLOAD: [] SESSION: \"s1\"]");
    }
}
