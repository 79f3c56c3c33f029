//! Transcripts: one tab-separated record per delivered message.
//!
//! ```text
//! time<TAB>from<TAB>to<TAB>act<TAB>content<TAB>text
//! ```
//!
//! `act` is the cooperation primitive the message was understood as (for
//! human messages) or generated from (for agent messages), `clarify` when
//! the server could not interpret a human message, and `error` for
//! failures. `content` is the IL in wire syntax; for `clarify` records it
//! is `[INTENT: .. ISSUE: ..]`. Tabs, newlines and backslashes in fields
//! are escaped as `\t`, `\n` and `\\`.

use std::fmt;

use crate::time::Moment;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub time: Moment,
    pub from: String,
    pub to: String,
    pub act: String,
    pub content: String,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    records: Vec<Record>,
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n")
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

impl Transcript {
    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Transcript, String> {
        let mut t = Transcript::default();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [time, from, to, act, content, txt] = cols[..] else {
                return Err(format!("line {}: expected 6 columns, found {}", i + 1, cols.len()));
            };
            t.push(Record {
                time: time.parse().map_err(|e| format!("line {}: {e}", i + 1))?,
                from: unescape(from),
                to: unescape(to),
                act: unescape(act),
                content: unescape(content),
                text: unescape(txt),
            });
        }
        Ok(t)
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.time,
                escape(&r.from),
                escape(&r.to),
                escape(&r.act),
                escape(&r.content),
                escape(&r.text)
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_round_trip_with_escapes() {
        let mut t = Transcript::default();
        t.push(Record {
            time: "1996-10-28T09:00".parse().unwrap(),
            from: "H".into(),
            to: "A".into(),
            act: "propose".into(),
            content: "[COOP: propose]".into(),
            text: "a\tb\nc\\d".into(),
        });
        let text = t.to_tsv();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(Transcript::parse(&text).unwrap(), t);
        assert!(Transcript::parse("x\ty").is_err());
    }
}
