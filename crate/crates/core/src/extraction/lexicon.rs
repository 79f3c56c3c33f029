use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use super::token::{Token, TokenKind};
use super::GrammarError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pos {
    Verb,
    Noun,
    Prep,
    Det,
    Adv,
    Pron,
    Adj,
    Conj,
    Misc,
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "verb" => Pos::Verb,
            "noun" => Pos::Noun,
            "prep" => Pos::Prep,
            "det" => Pos::Det,
            "adv" => Pos::Adv,
            "pron" => Pos::Pron,
            "adj" => Pos::Adj,
            "conj" => Pos::Conj,
            "misc" => Pos::Misc,
            other => return Err(format!("unknown part of speech '{other}'")),
        })
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pos::Verb => "verb",
            Pos::Noun => "noun",
            Pos::Prep => "prep",
            Pos::Det => "det",
            Pos::Adv => "adv",
            Pos::Pron => "pron",
            Pos::Adj => "adj",
            Pos::Conj => "conj",
            Pos::Misc => "misc",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
    pub features: BTreeMap<String, String>,
    pub frame: Option<String>,
}

impl LexEntry {
    pub fn feature(&self, key: &str) -> Option<&str> {
        self.features.get(key).map(String::as_str)
    }

    pub fn feature_num(&self, key: &str) -> Option<i64> {
        self.feature(key)?.parse().ok()
    }
}

/// Surface-form lexicon; lookup is case-insensitive.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, Vec<LexEntry>>,
}

impl Lexicon {
    pub fn parse(text: &str) -> Result<Lexicon, GrammarError> {
        let mut lex = Lexicon::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let err = |msg: String| GrammarError::Lexicon { line: line_no, message: msg };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(err(format!("expected 5 tab-separated columns, found {}", cols.len())));
            }
            let pos: Pos = cols[2].parse().map_err(err)?;
            let mut features = BTreeMap::new();
            if cols[3] != "-" {
                for pair in cols[3].split(';') {
                    let (k, v) = pair.split_once('=').unwrap_or((pair, "1"));
                    features.insert(k.trim().to_string(), v.trim().to_string());
                }
            }
            let frame = (cols[4] != "-").then(|| cols[4].to_string());
            if pos == Pos::Verb && frame.is_none() {
                return Err(err(format!("verb '{}' needs a frame", cols[0])));
            }
            for key in ["weekday", "month"] {
                if let Some(v) = features.get(key) {
                    let max = if key == "weekday" { 7 } else { 12 };
                    if !matches!(v.parse::<u8>(), Ok(n) if (1..=max).contains(&n)) {
                        return Err(err(format!("{key} feature out of range: {v}")));
                    }
                }
            }
            let entry = LexEntry {
                surface: cols[0].to_string(),
                lemma: cols[1].to_string(),
                pos,
                features,
                frame,
            };
            lex.entries.entry(cols[0].to_lowercase()).or_default().push(entry);
        }
        Ok(lex)
    }

    pub fn lookup_word(&self, word: &str) -> &[LexEntry] {
        self.entries
            .get(&word.to_lowercase())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Entries for a word token; non-word tokens have none.
    pub fn lookup(&self, token: &Token) -> &[LexEntry] {
        if token.kind != TokenKind::Word {
            return &[];
        }
        self.lookup_word(&token.surface)
    }

    /// Word tokens with no entry are misspelling candidates.
    pub fn is_unknown(&self, token: &Token) -> bool {
        token.kind == TokenKind::Word && self.lookup_word(&token.surface).is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
