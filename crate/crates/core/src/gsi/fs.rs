//! Feature structures and their canonical bracketed text form.
//!
//! ```text
//! value  := atom | list | map
//! atom   := symbol | integer | "text"
//! list   := '(' value* ')'
//! map    := '[' (FEATURE ':' value)* ']'
//! ```
//!
//! Canonical output separates items with single spaces and prints map
//! features in byte order, so equal structures always encode identically.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Symbol(String),
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureStructure {
    Atom(Atom),
    List(Vec<FeatureStructure>),
    Map(BTreeMap<String, FeatureStructure>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FsError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("duplicate feature '{feature}' at byte {position}")]
    DuplicateFeature { feature: String, position: usize },
}

pub fn is_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

pub fn is_feature_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl FeatureStructure {
    pub fn sym(s: impl Into<String>) -> Self {
        FeatureStructure::Atom(Atom::Symbol(s.into()))
    }

    pub fn int(i: i64) -> Self {
        FeatureStructure::Atom(Atom::Int(i))
    }

    pub fn text(s: impl Into<String>) -> Self {
        FeatureStructure::Atom(Atom::Text(s.into()))
    }

    pub fn empty_map() -> Self {
        FeatureStructure::Map(BTreeMap::new())
    }

    pub fn map<I, K>(entries: I) -> Self
    where
        I: IntoIterator<Item = (K, FeatureStructure)>,
        K: Into<String>,
    {
        FeatureStructure::Map(entries.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn get(&self, feature: &str) -> Option<&FeatureStructure> {
        match self {
            FeatureStructure::Map(m) => m.get(feature),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            FeatureStructure::Atom(Atom::Symbol(s)) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            FeatureStructure::Atom(Atom::Int(i)) => Some(*i),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            FeatureStructure::Atom(Atom::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[FeatureStructure]> {
        match self {
            FeatureStructure::List(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&BTreeMap<String, FeatureStructure>> {
        match self {
            FeatureStructure::Map(m) => Some(m),
            _ => None,
        }
    }

    pub fn encode(&self) -> String {
        let mut out = String::new();
        self.write_to(&mut out);
        out
    }

    fn write_to(&self, out: &mut String) {
        match self {
            FeatureStructure::Atom(Atom::Symbol(s)) => out.push_str(s),
            FeatureStructure::Atom(Atom::Int(i)) => out.push_str(&i.to_string()),
            FeatureStructure::Atom(Atom::Text(s)) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        '\r' => out.push_str("\\r"),
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            FeatureStructure::List(items) => {
                out.push('(');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    item.write_to(out);
                }
                out.push(')');
            }
            FeatureStructure::Map(m) => {
                out.push('[');
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    out.push_str(k);
                    out.push_str(": ");
                    v.write_to(out);
                }
                out.push(']');
            }
        }
    }

    pub fn decode(text: &str) -> Result<FeatureStructure, FsError> {
        let mut p = Parser { src: text, pos: 0 };
        p.skip_ws();
        let v = p.value()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

pub fn encode(fs: &FeatureStructure) -> String {
    fs.encode()
}

pub fn decode(text: &str) -> Result<FeatureStructure, FsError> {
    FeatureStructure::decode(text)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> FsError {
        FsError::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn word(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
        {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn value(&mut self) -> Result<FeatureStructure, FsError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some('[') => self.map(),
            Some('(') => self.list(),
            Some('"') => self.text(),
            Some(c) if c == '-' || c.is_ascii_digit() => {
                let start = self.pos;
                let w = self.word();
                w.parse::<i64>()
                    .map(FeatureStructure::int)
                    .map_err(|_| FsError::Syntax {
                        position: start,
                        message: format!("bad integer '{w}'"),
                    })
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                let w = self.word();
                if self.peek() == Some(':') {
                    return Err(FsError::Syntax {
                        position: start,
                        message: format!("feature '{w}' outside a map"),
                    });
                }
                Ok(FeatureStructure::sym(w))
            }
            Some(c) => Err(self.err(&format!("unexpected character '{c}'"))),
        }
    }

    fn text(&mut self) -> Result<FeatureStructure, FsError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err("unterminated string")),
                Some('"') => return Ok(FeatureStructure::text(s)),
                Some('\\') => match self.bump() {
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('r') => s.push('\r'),
                    _ => return Err(self.err("bad escape")),
                },
                Some(c) => s.push(c),
            }
        }
    }

    fn list(&mut self) -> Result<FeatureStructure, FsError> {
        self.bump();
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Err(self.err("unclosed list")),
                Some(')') => {
                    self.bump();
                    return Ok(FeatureStructure::List(items));
                }
                Some(_) => items.push(self.value()?),
            }
        }
    }

    fn map(&mut self) -> Result<FeatureStructure, FsError> {
        self.bump();
        let mut m = BTreeMap::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Err(self.err("unclosed map")),
                Some(']') => {
                    self.bump();
                    return Ok(FeatureStructure::Map(m));
                }
                Some(_) => {
                    let start = self.pos;
                    let name = self.word();
                    if !is_feature_name(name) {
                        return Err(self.err("expected feature name"));
                    }
                    if self.bump() != Some(':') {
                        return Err(FsError::Syntax {
                            position: start,
                            message: format!("expected ':' after feature '{name}'"),
                        });
                    }
                    self.skip_ws();
                    let v = self.value()?;
                    if m.insert(name.to_string(), v).is_some() {
                        return Err(FsError::DuplicateFeature {
                            feature: name.to_string(),
                            position: start,
                        });
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn atoms_and_empty_forms() {
        assert_eq!(FeatureStructure::int(10).encode(), "10");
        assert_eq!(FeatureStructure::empty_map().encode(), "[]");
        assert_eq!(FeatureStructure::List(vec![]).encode(), "()");
        assert_eq!(decode("[]").unwrap(), FeatureStructure::empty_map());
    }

    #[test]
    fn features_print_sorted() {
        let fs = FeatureStructure::map([
            ("DURATION", FeatureStructure::int(60)),
            ("COOP", FeatureStructure::sym("propose")),
        ]);
        assert_eq!(fs.encode(), "[COOP: propose DURATION: 60]");
        assert_eq!(decode("[DURATION: 60   COOP:propose]").unwrap(), fs);
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(decode("[COOP"), Err(FsError::Syntax { .. })));
        assert!(matches!(decode("[COOP: propose"), Err(FsError::Syntax { .. })));
        assert!(matches!(decode("(1 2"), Err(FsError::Syntax { .. })));
        assert!(matches!(decode("\"abc"), Err(FsError::Syntax { .. })));
        assert!(matches!(decode("1 2"), Err(FsError::Syntax { .. })));
        assert!(matches!(decode(""), Err(FsError::Syntax { .. })));
        assert!(matches!(decode("COOP: x"), Err(FsError::Syntax { .. })));
    }

    #[test]
    fn duplicate_feature_is_reported() {
        let err = decode("[A: 1 B: 2 A: 3]").unwrap_err();
        assert_eq!(
            err,
            FsError::DuplicateFeature {
                feature: "A".into(),
                position: 11
            }
        );
    }

    #[test]
    fn text_escapes() {
        let fs = FeatureStructure::text("a \"b\"\n\\ paßt");
        assert_eq!(decode(&fs.encode()).unwrap(), fs);
    }

    fn arb_fs() -> impl Strategy<Value = FeatureStructure> {
        let leaf = prop_oneof![
            "[a-z_][a-z0-9_.-]{0,8}".prop_map(FeatureStructure::sym),
            any::<i64>().prop_map(FeatureStructure::int),
            ".{0,12}".prop_map(FeatureStructure::text),
        ];
        leaf.prop_recursive(4, 48, 6, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..5).prop_map(FeatureStructure::List),
                prop::collection::btree_map("[A-Z][A-Z0-9-]{0,6}", inner, 0..5)
                    .prop_map(FeatureStructure::Map),
            ]
        })
    }

    proptest! {
        #[test]
        fn round_trip(fs in arb_fs()) {
            let text = fs.encode();
            prop_assert_eq!(decode(&text).unwrap(), fs.clone());
            // canonical: re-encoding is a fixed point
            prop_assert_eq!(decode(&text).unwrap().encode(), text);
        }

        #[test]
        fn decode_never_panics(s in ".{0,40}") {
            let _ = decode(&s);
        }
    }
}
