//! The action compatibility table: which cooperation primitive may follow
//! which in a dialogue.

use std::collections::HashMap;

use thiserror::Error;

use super::il::Coop;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Deny,
    Allow,
    Expect,
}

#[derive(Debug, Error)]
#[error("compatibility table line {line}: {message}")]
pub struct CompatError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct CompatTable {
    entries: HashMap<(Option<Coop>, Coop), Verdict>,
}

impl CompatTable {
    /// Parses `last<TAB>candidate<TAB>verdict` lines; `-` as last action
    /// stands for the empty dialogue.
    pub fn parse(text: &str) -> Result<CompatTable, CompatError> {
        let mut entries = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| CompatError { line: i + 1, message };
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 3 {
                return Err(err(format!("expected 3 columns, found {}", cols.len())));
            }
            let last = match cols[0] {
                "-" => None,
                s => Some(s.parse::<Coop>().map_err(err)?),
            };
            let cand = cols[1].parse::<Coop>().map_err(err)?;
            let verdict = match cols[2] {
                "expect" => Verdict::Expect,
                "allow" => Verdict::Allow,
                "deny" => Verdict::Deny,
                v => return Err(err(format!("unknown verdict '{v}'"))),
            };
            if entries.insert((last, cand), verdict).is_some() {
                return Err(err(format!("duplicate entry for {} {}", cols[0], cols[1])));
            }
        }
        Ok(CompatTable { entries })
    }

    pub fn builtin() -> CompatTable {
        CompatTable::parse(include_str!("../../data/compat.tsv")).expect("shipped table is valid")
    }

    /// Unlisted pairs are allowed.
    pub fn verdict(&self, last: Option<Coop>, candidate: Coop) -> Verdict {
        self.entries.get(&(last, candidate)).copied().unwrap_or(Verdict::Allow)
    }

    pub fn admits(&self, last: Option<Coop>, candidate: Coop) -> bool {
        self.verdict(last, candidate) != Verdict::Deny
    }

    /// Keeps the admissible items, in order.
    pub fn filter<T>(&self, last: Option<Coop>, items: Vec<T>, coop: impl Fn(&T) -> Coop) -> Vec<T> {
        items.into_iter().filter(|x| self.admits(last, coop(x))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_fix_or_cancel_after_reject() {
        let t = CompatTable::builtin();
        assert!(!t.admits(Some(Coop::Reject), Coop::Fix));
        assert!(!t.admits(Some(Coop::Reject), Coop::Cancel));
        assert_eq!(t.verdict(Some(Coop::Reject), Coop::Modify), Verdict::Expect);
    }

    #[test]
    fn dialogue_opens_with_a_proposal() {
        let t = CompatTable::builtin();
        assert_eq!(t.verdict(None, Coop::Propose), Verdict::Expect);
        assert!(!t.admits(None, Coop::Accept));
    }

    #[test]
    fn unlisted_pairs_are_allowed() {
        let t = CompatTable::parse("propose\treject\tdeny\n").unwrap();
        assert_eq!(t.verdict(Some(Coop::Accept), Coop::Reject), Verdict::Allow);
        assert!(!t.admits(Some(Coop::Propose), Coop::Reject));
    }

    #[test]
    fn bad_lines_are_reported() {
        assert_eq!(CompatTable::parse("# x\npropose reject maybe").unwrap_err().line, 2);
        assert!(CompatTable::parse("propose\tfoo\tallow").is_err());
    }
}
