//! Declarative constituent automata.
//!
//! Each rule line has the form
//!
//! ```text
//! CATEGORY := element element ... => binding binding ...
//! ```
//!
//! An element is one or more alternatives joined by `|`, optionally followed
//! by `?` (may be skipped) and `@name` (captures the matched token).
//! Alternatives:
//!
//! | form         | matches                                             |
//! |--------------|-----------------------------------------------------|
//! | `NUM`        | number token                                        |
//! | `DATE`       | date-pattern token (`2. 11. 96`)                    |
//! | `CLOCK`      | clock-pattern token (`10:30`)                       |
//! | `ORD`        | ordinal token (`4.` before a word)                  |
//! | `WORD`       | any word token                                      |
//! | `PUNCT:c`    | the punctuation character `c`                       |
//! | `pos:P`      | a word with a lexicon entry of part of speech `P`   |
//! | `has:f`      | a word with an entry carrying feature `f`           |
//! | `has:f=v`    | ... with value `v`                                  |
//! | `lemma`      | a word with an entry of that lemma (case-insensitive)|
//!
//! Bindings fill the constituent's fields from captured tokens:
//! `at=@x`, `from=@x`, `to=@x` merge the token's time value into the point or
//! bound; `year=@x` and `day=@x` set those fields from a number; `meridiem=@x`
//! shifts every hour below 12 by twelve when the word is marked `pm`; `dur=@n*@u` multiplies a count by a unit's
//! minutes; `ref=@x` takes a word's `deixis` feature (or `ref=<literal>`);
//! `topic=@x` records the surface string.
//!
//! Rules are tried at every token position left to right; the longest match
//! wins and ties go to the rule listed first.

use std::collections::BTreeMap;

use super::lexicon::{Lexicon, Pos};
use super::token::{clock_fields, date_fields, expand_year, Token, TokenKind};
use super::{Category, Constituent, GrammarError, Reference};
use crate::time::TimePoint;

#[derive(Debug, Clone, PartialEq)]
enum Test {
    Kind(TokenKind),
    AnyWord,
    Punct(char),
    Pos(Pos),
    Has(String, Option<String>),
    Lemma(String),
}

#[derive(Debug, Clone, PartialEq)]
struct Element {
    alts: Vec<Test>,
    optional: bool,
    capture: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Binding {
    At(String),
    From(String),
    To(String),
    Year(String),
    Day(String),
    Meridiem(String),
    Duration { count: String, unit: String },
    Ref(String),
    RefLiteral(Reference),
    Topic(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub category: Category,
    elements: Vec<Element>,
    bindings: Vec<Binding>,
    pub line: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Automata {
    rules: Vec<Rule>,
}

fn parse_test(s: &str) -> Result<Test, String> {
    Ok(match s {
        "NUM" => Test::Kind(TokenKind::Number),
        "DATE" => Test::Kind(TokenKind::DatePattern),
        "CLOCK" => Test::Kind(TokenKind::ClockPattern),
        "ORD" => Test::Kind(TokenKind::Ordinal),
        "WORD" => Test::AnyWord,
        _ => {
            if let Some(c) = s.strip_prefix("PUNCT:") {
                let mut chars = c.chars();
                match (chars.next(), chars.next()) {
                    (Some(ch), None) => Test::Punct(ch),
                    _ => return Err(format!("PUNCT needs exactly one character: '{s}'")),
                }
            } else if let Some(p) = s.strip_prefix("pos:") {
                Test::Pos(p.parse()?)
            } else if let Some(f) = s.strip_prefix("has:") {
                match f.split_once('=') {
                    Some((k, v)) => Test::Has(k.to_string(), Some(v.to_string())),
                    None => Test::Has(f.to_string(), None),
                }
            } else if !s.is_empty() && s.chars().all(|c| c.is_alphabetic() || matches!(c, '-' | '\'' | '.')) {
                Test::Lemma(s.to_lowercase())
            } else {
                return Err(format!("bad element '{s}'"));
            }
        }
    })
}

fn parse_element(s: &str) -> Result<Element, String> {
    let (body, capture) = match s.split_once('@') {
        Some((b, c)) if !c.is_empty() => (b, Some(c.to_string())),
        Some(_) => return Err(format!("empty capture name in '{s}'")),
        None => (s, None),
    };
    let (body, optional) = match body.strip_suffix('?') {
        Some(b) => (b, true),
        None => (body, false),
    };
    let alts = body.split('|').map(parse_test).collect::<Result<Vec<_>, _>>()?;
    Ok(Element { alts, optional, capture })
}

fn capture_name(v: &str) -> Result<String, String> {
    v.strip_prefix('@')
        .filter(|c| !c.is_empty())
        .map(str::to_string)
        .ok_or_else(|| format!("expected @capture, got '{v}'"))
}

fn parse_binding(s: &str) -> Result<Binding, String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("bad binding '{s}'"))?;
    Ok(match k {
        "at" => Binding::At(capture_name(v)?),
        "from" => Binding::From(capture_name(v)?),
        "to" => Binding::To(capture_name(v)?),
        "year" => Binding::Year(capture_name(v)?),
        "day" => Binding::Day(capture_name(v)?),
        "meridiem" => Binding::Meridiem(capture_name(v)?),
        "topic" => Binding::Topic(capture_name(v)?),
        "dur" => {
            let (n, u) = v.split_once('*').ok_or_else(|| format!("dur needs @count*@unit: '{s}'"))?;
            Binding::Duration {
                count: capture_name(n)?,
                unit: capture_name(u)?,
            }
        }
        "ref" if v.starts_with('@') => Binding::Ref(capture_name(v)?),
        "ref" => Binding::RefLiteral(v.parse()?),
        other => return Err(format!("unknown binding '{other}'")),
    })
}

impl Rule {
    fn parse(line: &str, line_no: usize) -> Result<Rule, String> {
        let (head, rest) = line.split_once(":=").ok_or("missing ':='")?;
        let category: Category = head.trim().parse()?;
        let (pattern, bindings) = rest.split_once("=>").ok_or("missing '=>'")?;
        let elements = pattern
            .split_whitespace()
            .map(parse_element)
            .collect::<Result<Vec<_>, _>>()?;
        if elements.is_empty() || elements.iter().all(|e| e.optional) {
            return Err("pattern must have at least one required element".into());
        }
        let bindings = bindings
            .split_whitespace()
            .map(parse_binding)
            .collect::<Result<Vec<_>, _>>()?;
        let captures: Vec<&str> = elements.iter().filter_map(|e| e.capture.as_deref()).collect();
        for b in &bindings {
            let used: Vec<&str> = match b {
                Binding::At(c)
                | Binding::From(c)
                | Binding::To(c)
                | Binding::Year(c)
                | Binding::Day(c)
                | Binding::Meridiem(c)
                | Binding::Ref(c)
                | Binding::Topic(c) => vec![c],
                Binding::Duration { count, unit } => vec![count, unit],
                Binding::RefLiteral(_) => vec![],
            };
            for c in used {
                if !captures.contains(&c) {
                    return Err(format!("binding uses unknown capture @{c}"));
                }
            }
        }
        let has = |f: fn(&Binding) -> bool| bindings.iter().any(f);
        let ok = match category.shape() {
            Shape::Point => has(|b| matches!(b, Binding::At(_))),
            Shape::Bounds => has(|b| matches!(b, Binding::From(_))) && has(|b| matches!(b, Binding::To(_))),
            Shape::Day => has(|b| matches!(b, Binding::At(_) | Binding::Ref(_) | Binding::RefLiteral(_))),
            Shape::Relative => has(|b| matches!(b, Binding::Ref(_) | Binding::RefLiteral(_) | Binding::Duration { .. })),
            Shape::Free => true,
        };
        if !ok {
            return Err(format!("bindings do not fit the shape of {category}"));
        }
        Ok(Rule {
            category,
            elements,
            bindings,
            line: line_no,
        })
    }
}

/// Field shape a category's constituents must have.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// A time point (`*-date`, `*-time`).
    Point,
    /// Two bounds (`*-dur`).
    Bounds,
    /// A weekday or a deictic day.
    Day,
    /// A deictic reference or a duration.
    Relative,
    Free,
}

impl Category {
    pub fn shape(self) -> Shape {
        use Category::*;
        match self {
            PpTempDate | NpTempDate | PpTempTime | NpTempTime => Shape::Point,
            PpTempDur => Shape::Bounds,
            PpTempDay | NpTempDay => Shape::Day,
            PpTemp | NpTemp => Shape::Relative,
            NpOther | PpOther => Shape::Free,
        }
    }
}

fn test_matches(test: &Test, tok: &Token, lex: &Lexicon) -> bool {
    match test {
        Test::Kind(k) => tok.kind == *k,
        Test::AnyWord => tok.kind == TokenKind::Word,
        Test::Punct(c) => tok.is_punct(*c),
        Test::Pos(p) => lex.lookup(tok).iter().any(|e| e.pos == *p),
        Test::Has(f, v) => lex
            .lookup(tok)
            .iter()
            .any(|e| e.feature(f).is_some_and(|x| v.as_ref().is_none_or(|v| v == x))),
        Test::Lemma(l) => lex.lookup(tok).iter().any(|e| e.lemma.to_lowercase() == *l),
    }
}

type Captures = BTreeMap<String, usize>;

fn match_from(
    elements: &[Element],
    tokens: &[Token],
    at: usize,
    lex: &Lexicon,
    caps: &mut Captures,
    out: &mut Vec<(usize, Captures)>,
) {
    let Some((el, rest)) = elements.split_first() else {
        out.push((at, caps.clone()));
        return;
    };
    if let Some(tok) = tokens.get(at) {
        if el.alts.iter().any(|t| test_matches(t, tok, lex)) {
            if let Some(c) = &el.capture {
                caps.insert(c.clone(), at);
            }
            match_from(rest, tokens, at + 1, lex, caps, out);
            if let Some(c) = &el.capture {
                caps.remove(c);
            }
        }
    }
    if el.optional {
        match_from(rest, tokens, at, lex, caps, out);
    }
}

/// Time value carried by a single token.
fn token_time(tok: &Token, lex: &Lexicon) -> Option<TimePoint> {
    match tok.kind {
        TokenKind::DatePattern => {
            let d = date_fields(&tok.surface)?;
            Some(TimePoint {
                day: Some(d.day),
                month: Some(d.month),
                year: d.year,
                ..TimePoint::default()
            })
        }
        TokenKind::Ordinal => {
            let day: u8 = tok.surface.trim_end_matches('.').parse().ok()?;
            (1..=31).contains(&day).then(|| TimePoint { day: Some(day), ..TimePoint::default() })
        }
        TokenKind::ClockPattern => {
            let (h, m) = clock_fields(&tok.surface)?;
            (h < 24 || (h == 24 && m == 0)).then(|| TimePoint::clock(h, m))
        }
        TokenKind::Number => {
            let h: u8 = tok.surface.parse().ok()?;
            (h <= 24).then(|| TimePoint { hour: Some(h), ..TimePoint::default() })
        }
        TokenKind::Word => {
            let entries = lex.lookup(tok);
            let feature = |k: &str| entries.iter().find_map(|e| e.feature_num(k));
            if let Some(w) = feature("weekday") {
                Some(TimePoint { weekday: Some(w as u8), ..TimePoint::default() })
            } else if let Some(m) = feature("month") {
                Some(TimePoint { month: Some(m as u8), ..TimePoint::default() })
            } else {
                let h = feature("num")?;
                (0..=24).contains(&h).then(|| TimePoint { hour: Some(h as u8), ..TimePoint::default() })
            }
        }
        TokenKind::Punct => None,
    }
}

fn token_count(tok: &Token, lex: &Lexicon) -> Option<u32> {
    match tok.kind {
        TokenKind::Number => tok.surface.parse().ok(),
        TokenKind::Word => lex.lookup(tok).iter().find_map(|e| e.feature_num("num")).map(|n| n as u32),
        _ => None,
    }
}

fn merge(slot: &mut Option<TimePoint>, value: TimePoint) -> Option<()> {
    let merged = slot.unwrap_or_default().unify(value)?;
    *slot = Some(merged);
    Some(())
}

impl Rule {
    fn build(&self, tokens: &[Token], start: usize, end: usize, caps: &Captures, lex: &Lexicon) -> Option<Constituent> {
        let tok = |c: &String| &tokens[caps[c]];
        let mut point = None;
        let mut from = None;
        let mut to = None;
        let mut reference = None;
        let mut duration = None;
        let mut topic = None;
        let mut pm = false;
        for b in &self.bindings {
            // optional captures that did not take part in the match are skipped
            match b {
                Binding::At(c)
                | Binding::From(c)
                | Binding::To(c)
                | Binding::Year(c)
                | Binding::Day(c)
                | Binding::Meridiem(c)
                | Binding::Ref(c)
                | Binding::Topic(c)
                    if !caps.contains_key(c) =>
                {
                    continue
                }
                Binding::Duration { count, unit } if !caps.contains_key(count) || !caps.contains_key(unit) => continue,
                _ => {}
            }
            match b {
                Binding::At(c) => merge(&mut point, token_time(tok(c), lex)?)?,
                Binding::From(c) => merge(&mut from, token_time(tok(c), lex)?)?,
                Binding::To(c) => merge(&mut to, token_time(tok(c), lex)?)?,
                Binding::Year(c) => {
                    let y: i32 = tok(c).surface.parse().ok()?;
                    merge(&mut point, TimePoint { year: Some(expand_year(y)), ..TimePoint::default() })?
                }
                Binding::Day(c) => {
                    let d: u8 = tok(c).surface.parse().ok().filter(|d| (1..=31).contains(d))?;
                    merge(&mut point, TimePoint { day: Some(d), ..TimePoint::default() })?
                }
                Binding::Meridiem(c) => {
                    pm |= lex.lookup(tok(c)).iter().any(|e| e.feature("meridiem") == Some("pm"));
                }
                Binding::Duration { count, unit } => {
                    let n = token_count(tok(count), lex)?;
                    let per = lex.lookup(tok(unit)).iter().find_map(|e| e.feature_num("unit"))?;
                    duration = Some(n.checked_mul(per as u32)?);
                }
                Binding::Ref(c) => {
                    let d = lex.lookup(tok(c)).iter().find_map(|e| e.feature("deixis"))?;
                    reference = Some(d.parse().ok()?);
                }
                Binding::RefLiteral(r) => reference = Some(*r),
                Binding::Topic(c) => topic = Some(tok(c).surface.clone()),
            }
        }
        if pm {
            for p in [&mut point, &mut from, &mut to].into_iter().flatten() {
                if let Some(h) = p.hour.filter(|h| *h < 12) {
                    p.hour = Some(h + 12);
                }
            }
        }
        let c = Constituent {
            category: self.category,
            point: point.unwrap_or_default(),
            from,
            to,
            reference,
            duration,
            topic,
            tokens: (start, end),
            span: (tokens[start].span.0, tokens[end - 1].span.1),
        };
        c.shape_ok().then_some(c)
    }
}

impl Automata {
    pub fn parse(text: &str) -> Result<Automata, GrammarError> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            rules.push(Rule::parse(line, i + 1).map_err(|message| GrammarError::Automata { line: i + 1, message })?);
        }
        Ok(Automata { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Best constituent starting at token `at`.
    fn longest_at(&self, tokens: &[Token], at: usize, lex: &Lexicon) -> Option<Constituent> {
        let mut best: Option<Constituent> = None;
        for rule in &self.rules {
            let mut matches = Vec::new();
            match_from(&rule.elements, tokens, at, lex, &mut Captures::new(), &mut matches);
            matches.sort_by_key(|m| std::cmp::Reverse(m.0));
            for (end, caps) in matches {
                if end == at || best.as_ref().is_some_and(|b| b.tokens.1 >= end) {
                    break;
                }
                if let Some(c) = rule.build(tokens, at, end, &caps, lex) {
                    best = Some(c);
                    break;
                }
            }
        }
        best
    }

    /// Left-to-right longest-match application over one sentence.
    pub fn parse_constituents(&self, tokens: &[Token], lex: &Lexicon) -> Vec<Constituent> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            match self.longest_at(tokens, i, lex) {
                Some(c) => {
                    i = c.tokens.1;
                    out.push(c);
                }
                None => i += 1,
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::token::tokenize;

    fn grammar() -> (Lexicon, Automata) {
        (
            Lexicon::parse(include_str!("../../data/de/lexicon.tsv")).unwrap(),
            Automata::parse(include_str!("../../data/de/automata.rules")).unwrap(),
        )
    }

    fn parse(text: &str) -> Vec<Constituent> {
        let (lex, aut) = grammar();
        aut.parse_constituents(&tokenize(text), &lex)
    }

    #[test]
    fn weekday_with_date() {
        let cs = parse("am Montag, dem 2. 11. 96");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].category, Category::PpTempDate);
        let p = cs[0].point;
        assert_eq!((p.weekday, p.day, p.month, p.year), (Some(1), Some(2), Some(11), Some(1996)));
    }

    #[test]
    fn clock_range() {
        let cs = parse("zwischen 10 und 12 Uhr");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].category, Category::PpTempDur);
        assert_eq!(cs[0].from.unwrap().hour, Some(10));
        assert_eq!(cs[0].to.unwrap().hour, Some(12));
    }

    #[test]
    fn clock_time() {
        let cs = parse("um 10");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].category, Category::PpTempTime);
        assert_eq!(cs[0].point.hour, Some(10));
        assert_eq!(cs[0].point.minute, None);
    }

    #[test]
    fn verbless_day_and_time() {
        let cs = parse("Montag, 14 h.");
        let cats: Vec<_> = cs.iter().map(|c| c.category).collect();
        assert_eq!(cats, vec![Category::NpTempDay, Category::NpTempTime]);
        assert_eq!(cs[1].point.hour, Some(14));
    }

    #[test]
    fn figure_two_categories() {
        let cases = [
            ("in dieser Woche", Category::PpTemp),
            ("am 4. 11.", Category::PpTempDate),
            ("am Montag", Category::PpTempDay),
            ("von 8 bis 12", Category::PpTempDur),
            ("um 10", Category::PpTempTime),
            ("zwei Stunden", Category::NpTemp),
            ("den 4. 11.", Category::NpTempDate),
            ("Montag", Category::NpTempDay),
            ("14 h", Category::NpTempTime),
        ];
        for (text, cat) in cases {
            let cs = parse(text);
            assert_eq!(cs.len(), 1, "{text}: {cs:?}");
            assert_eq!(cs[0].category, cat, "{text}");
        }
    }

    #[test]
    fn hour_out_of_range_is_not_a_time() {
        assert!(parse("um 1996").is_empty());
    }

    #[test]
    fn rule_errors_carry_line_numbers() {
        let err = Automata::parse("# x\nPP_temp-time := um NUM@t => at=@u\n").unwrap_err();
        assert!(matches!(err, GrammarError::Automata { line: 2, .. }));
        let err = Automata::parse("PP_temp-dur := zwischen NUM@a => from=@a\n").unwrap_err();
        assert!(matches!(err, GrammarError::Automata { line: 1, .. }));
        let err = Automata::parse("XX := um => \n").unwrap_err();
        assert!(matches!(err, GrammarError::Automata { line: 1, .. }));
    }
}
