use std::sync::OnceLock;

use regex::Regex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Number,
    DatePattern,
    ClockPattern,
    Ordinal,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
    /// Character offsets `[start, end)` into the input.
    pub span: (usize, usize),
}

impl Token {
    pub fn is_punct(&self, c: char) -> bool {
        self.kind == TokenKind::Punct && self.surface.starts_with(c) && self.surface.chars().count() == 1
    }

    pub fn lower(&self) -> String {
        self.surface.to_lowercase()
    }
}

/// Parsed fields of a date-pattern token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateFields {
    pub day: u8,
    pub month: u8,
    pub year: Option<i32>,
}

struct Patterns {
    date: Regex,
    clock: Regex,
    ordinal: Regex,
    number: Regex,
    word: Regex,
    clock_unit: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        date: Regex::new(r"^(0?[1-9]|[12][0-9]|3[01])\.\s?(0?[1-9]|1[0-2])\.(?:\s?([0-9]{4}|[0-9]{2})\b)?").unwrap(),
        clock: Regex::new(r"^([01]?[0-9]|2[0-4])[:.]([0-5][0-9])\b").unwrap(),
        ordinal: Regex::new(r"^([0-9]{1,2})\.\s+\p{L}").unwrap(),
        number: Regex::new(r"^[0-9]+").unwrap(),
        word: Regex::new(r"^[\p{L}\p{M}]+(?:[-'][\p{L}\p{M}]+)*").unwrap(),
        clock_unit: Regex::new(r"^\s*(?i:uhr|h)\b").unwrap(),
    })
}

/// Two-digit years map to 19xx from 70 upwards, otherwise to 20xx.
pub fn expand_year(y: i32) -> i32 {
    match y {
        0..=69 => 2000 + y,
        70..=99 => 1900 + y,
        _ => y,
    }
}

pub fn date_fields(surface: &str) -> Option<DateFields> {
    let c = patterns().date.captures(surface)?;
    Some(DateFields {
        day: c[1].parse().ok()?,
        month: c[2].parse().ok()?,
        year: c.get(3).and_then(|y| y.as_str().parse().ok()).map(expand_year),
    })
}

pub fn clock_fields(surface: &str) -> Option<(u8, u8)> {
    let c = patterns().clock.captures(surface)?;
    Some((c[1].parse().ok()?, c[2].parse().ok()?))
}

/// Splits text into tokens. Whitespace is dropped; every other character
/// ends up in exactly one token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let p = patterns();
    // byte offset -> char offset
    let char_at: Vec<usize> = {
        let mut v = vec![0; text.len() + 1];
        let mut ci = 0;
        for (bi, ch) in text.char_indices() {
            for b in bi..bi + ch.len_utf8() {
                v[b] = ci;
            }
            ci += 1;
        }
        v[text.len()] = ci;
        v
    };
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let rest = &text[pos..];
        let ch = rest.chars().next().unwrap();
        if ch.is_whitespace() {
            pos += ch.len_utf8();
            continue;
        }
        let (len, kind) = if ch.is_ascii_digit() {
            if let Some(m) = p.date.captures(rest) {
                let mut len = m.get(0).unwrap().end();
                // "am 4. 11. 13 Uhr": the trailing number is a clock time, not a year
                if let Some(y) = m.get(3) {
                    if p.clock_unit.is_match(&rest[y.end()..]) {
                        len = m.get(2).unwrap().end() + 1;
                    }
                }
                (len, TokenKind::DatePattern)
            } else if let Some(m) = p.clock.find(rest) {
                (m.end(), TokenKind::ClockPattern)
            } else if let Some(m) = p.ordinal.captures(rest) {
                (m.get(1).unwrap().end() + 1, TokenKind::Ordinal)
            } else {
                (p.number.find(rest).unwrap().end(), TokenKind::Number)
            }
        } else if let Some(m) = p.word.find(rest) {
            (m.end(), TokenKind::Word)
        } else {
            (ch.len_utf8(), TokenKind::Punct)
        };
        let surface = rest[..len].trim_end().to_string();
        let end = pos + surface.len();
        tokens.push(Token {
            surface,
            kind,
            span: (char_at[pos], char_at[end]),
        });
        pos += len;
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn date_pattern_is_one_token() {
        let t = tokenize("am 2. 11. 96");
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].surface, "am");
        assert_eq!(t[1].surface, "2. 11. 96");
        assert_eq!(t[1].kind, TokenKind::DatePattern);
        assert_eq!(
            date_fields(&t[1].surface),
            Some(DateFields { day: 2, month: 11, year: Some(1996) })
        );
    }

    #[test]
    fn clock_range_tokens() {
        use TokenKind::*;
        assert_eq!(kinds("zwischen 13 und 18 Uhr"), vec![Word, Number, Word, Number, Word]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \n\t ").is_empty());
    }

    #[test]
    fn date_without_year_at_sentence_end() {
        let t = tokenize("Ich meinte natürlich Montag den 4. 11.");
        let last = t.last().unwrap();
        assert_eq!(last.kind, TokenKind::DatePattern);
        assert_eq!(last.surface, "4. 11.");
        assert_eq!(date_fields("4. 11.").unwrap().year, None);
    }

    #[test]
    fn date_then_full_stop() {
        let t = tokenize("den 2. 11. 1996. Könnten");
        assert_eq!(t[1].surface, "2. 11. 1996");
        assert!(t[2].is_punct('.'));
    }

    #[test]
    fn number_after_date_before_uhr_is_not_a_year() {
        let t = tokenize("am 4. 11. 13 Uhr");
        assert_eq!(t[1].surface, "4. 11.");
        assert_eq!(t[2].kind, TokenKind::Number);
    }

    #[test]
    fn clock_and_ordinal() {
        use TokenKind::*;
        assert_eq!(kinds("um 10:30 Uhr"), vec![Word, ClockPattern, Word]);
        assert_eq!(kinds("am 4. November"), vec![Word, Ordinal, Word]);
        assert_eq!(kinds("14 h."), vec![Number, Word, Punct]);
    }

    #[test]
    fn spans_are_char_offsets() {
        let t = tokenize("paßt um 10");
        assert_eq!(t[0].span, (0, 4));
        assert_eq!(t[1].span, (5, 7));
        assert_eq!(t[2].span, (8, 10));
    }

    proptest! {
        #[test]
        fn covers_all_non_whitespace(text in "\\PC{0,60}") {
            let tokens = tokenize(&text);
            let chars: Vec<char> = text.chars().collect();
            let mut prev_end = 0;
            let mut covered = vec![false; chars.len()];
            for t in &tokens {
                prop_assert!(t.span.0 >= prev_end);
                prop_assert!(t.span.0 < t.span.1);
                prop_assert!(t.span.1 <= chars.len());
                let s: String = chars[t.span.0..t.span.1].iter().collect();
                prop_assert_eq!(&s, &t.surface);
                for c in &mut covered[t.span.0..t.span.1] { *c = true; }
                prev_end = t.span.1;
            }
            for (i, c) in chars.iter().enumerate() {
                prop_assert!(covered[i] || c.is_whitespace());
            }
        }
    }
}
