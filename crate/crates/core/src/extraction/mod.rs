//! Shallow message extraction: tokenizer, lexicon, constituent automata and
//! verb-frame combination, producing predicate-argument structures with
//! temporal semantics for each sentence of a message.

pub mod automata;
pub mod combine;
pub mod lexicon;
pub mod token;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

pub use automata::Automata;
pub use combine::{combine, PredArg, DUMMY};
pub use lexicon::{LexEntry, Lexicon, Pos};
pub use token::{tokenize, Token, TokenKind};

use crate::gsi::params::Language;
use crate::time::TimePoint;

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("automata line {line}: {message}")]
    Automata { line: usize, message: String },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Constituent categories of temporal PPs and NPs, plus catch-alls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    PpTemp,
    PpTempDate,
    PpTempDay,
    PpTempDur,
    PpTempTime,
    NpTemp,
    NpTempDate,
    NpTempDay,
    NpTempTime,
    NpOther,
    PpOther,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        use Category::*;
        match self {
            PpTemp => "PP_temp",
            PpTempDate => "PP_temp-date",
            PpTempDay => "PP_temp-day",
            PpTempDur => "PP_temp-dur",
            PpTempTime => "PP_temp-time",
            NpTemp => "NP_temp",
            NpTempDate => "NP_temp-date",
            NpTempDay => "NP_temp-day",
            NpTempTime => "NP_temp-time",
            NpOther => "NP_other",
            PpOther => "PP_other",
        }
    }

    pub fn is_temporal(self) -> bool {
        !matches!(self, Category::NpOther | Category::PpOther)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use Category::*;
        [PpTemp, PpTempDate, PpTempDay, PpTempDur, PpTempTime, NpTemp, NpTempDate, NpTempDay, NpTempTime, NpOther, PpOther]
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown category '{s}'"))
    }
}

/// Context-dependent temporal references.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reference {
    Today,
    Tomorrow,
    DayAfterTomorrow,
    ThisWeek,
    NextWeek,
    /// The next occurrence (strictly later) of the accompanying weekday.
    Next,
    PreviousProposal,
}

impl FromStr for Reference {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "today" => Reference::Today,
            "tomorrow" => Reference::Tomorrow,
            "day-after-tomorrow" => Reference::DayAfterTomorrow,
            "this-week" => Reference::ThisWeek,
            "next-week" => Reference::NextWeek,
            "next" => Reference::Next,
            "previous-proposal" => Reference::PreviousProposal,
            other => return Err(format!("unknown reference '{other}'")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constituent {
    pub category: Category,
    /// Point value for `*-date`, `*-day` and `*-time` categories.
    pub point: TimePoint,
    /// Bounds for `*-dur`.
    pub from: Option<TimePoint>,
    pub to: Option<TimePoint>,
    pub reference: Option<Reference>,
    /// Minutes.
    pub duration: Option<u32>,
    pub topic: Option<String>,
    /// Token index range within the sentence.
    pub tokens: (usize, usize),
    /// Character span within the message.
    pub span: (usize, usize),
}

impl Constituent {
    /// Category/field agreement.
    pub fn shape_ok(&self) -> bool {
        use automata::Shape;
        let no_bounds = self.from.is_none() && self.to.is_none();
        match self.category.shape() {
            Shape::Point => {
                no_bounds
                    && match self.category {
                        Category::PpTempTime | Category::NpTempTime => {
                            self.point.hour.is_some() && !self.point.has_date_fields()
                        }
                        _ => self.point.day.is_some() && self.point.month.is_some() && !self.point.has_clock(),
                    }
            }
            Shape::Bounds => {
                let clock_only = |p: &Option<TimePoint>| p.is_some_and(|p| p.hour.is_some() && !p.has_date_fields());
                clock_only(&self.from) && clock_only(&self.to) && self.point.is_empty()
            }
            Shape::Day => {
                no_bounds
                    && !self.point.has_clock()
                    && (self.point.weekday.is_some() || self.reference.is_some())
                    && self.point.day.is_none()
            }
            Shape::Relative => no_bounds && (self.reference.is_some() || self.duration.is_some()),
            Shape::Free => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub text: String,
    pub tokens: Vec<Token>,
    pub constituents: Vec<Constituent>,
    pub predargs: Vec<PredArg>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SmesResult {
    pub sentences: Vec<Sentence>,
    pub misspellings: Vec<String>,
}

impl SmesResult {
    pub fn predargs(&self) -> impl Iterator<Item = &PredArg> {
        self.sentences.iter().flat_map(|s| s.predargs.iter())
    }
}

/// A language's lexicon and automata.
#[derive(Debug, Clone)]
pub struct Grammar {
    pub lexicon: Lexicon,
    pub automata: Automata,
}

impl Grammar {
    pub fn parse(lexicon: &str, automata: &str) -> Result<Grammar, GrammarError> {
        Ok(Grammar {
            lexicon: Lexicon::parse(lexicon)?,
            automata: Automata::parse(automata)?,
        })
    }

    /// The grammar shipped for `language`.
    pub fn builtin(language: Language) -> Grammar {
        let (lex, aut) = match language {
            Language::De => (include_str!("../../data/de/lexicon.tsv"), include_str!("../../data/de/automata.rules")),
            Language::En => (include_str!("../../data/en/lexicon.tsv"), include_str!("../../data/en/automata.rules")),
        };
        Grammar::parse(lex, aut).expect("shipped grammar is valid")
    }

    /// Loads `lexicon.tsv` and `automata.rules` from a directory.
    pub fn load(dir: &Path) -> Result<Grammar, GrammarError> {
        let read = |name: &str| {
            let p = dir.join(name);
            std::fs::read_to_string(&p).map_err(|source| GrammarError::Io {
                path: p.display().to_string(),
                source,
            })
        };
        Grammar::parse(&read("lexicon.tsv")?, &read("automata.rules")?)
    }

    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        tokenize(text)
    }

    pub fn lex_lookup(&self, token: &Token) -> &[LexEntry] {
        self.lexicon.lookup(token)
    }

    pub fn parse_constituents(&self, tokens: &[Token]) -> Vec<Constituent> {
        self.automata.parse_constituents(tokens, &self.lexicon)
    }

    pub fn combine(&self, constituents: &[Constituent], tokens: &[Token]) -> Vec<PredArg> {
        combine(constituents, tokens, &self.lexicon)
    }

    fn starts_new_sentence(&self, next: Option<&Token>) -> bool {
        match next {
            None => true,
            Some(t) => {
                t.kind == TokenKind::Word
                    && t.surface.chars().next().is_some_and(char::is_uppercase)
                    && !self.lexicon.lookup(t).iter().any(|e| e.feature("month").is_some())
            }
        }
    }

    /// Joins adjacent word and period tokens whose concatenation is a listed
    /// abbreviation ("Nov.", "p.m.").
    fn join_abbreviations(&self, mut tokens: Vec<Token>) -> Vec<Token> {
        let mut i = 0;
        while i < tokens.len() {
            if tokens[i].kind == TokenKind::Word {
                for j in (i + 1..tokens.len().min(i + 4)).rev() {
                    let adjacent = tokens[i..=j].windows(2).all(|w| w[0].span.1 == w[1].span.0);
                    let parts_ok = tokens[i..=j].iter().all(|t| t.kind == TokenKind::Word || t.is_punct('.'));
                    if !adjacent || !parts_ok || !tokens[j].is_punct('.') {
                        continue;
                    }
                    let surface: String = tokens[i..=j].iter().map(|t| t.surface.as_str()).collect();
                    if !self.lexicon.lookup_word(&surface).is_empty() {
                        let span = (tokens[i].span.0, tokens[j].span.1);
                        tokens.splice(i..=j, [Token { surface, kind: TokenKind::Word, span }]);
                        break;
                    }
                }
            }
            i += 1;
        }
        tokens
    }

    /// Sentence boundaries fall after `.`, `!` and `?`. An ordinal directly
    /// followed by a capitalized non-month word is read as a number ending a
    /// sentence ("um 10. Dann ...").
    fn split_sentences(&self, text: &str) -> Vec<(String, Vec<Token>)> {
        let mut tokens = self.join_abbreviations(tokenize(text));
        let mut i = 0;
        while i < tokens.len() {
            if tokens[i].kind == TokenKind::Ordinal && self.starts_new_sentence(tokens.get(i + 1)) {
                let t = &mut tokens[i];
                t.surface.pop();
                t.kind = TokenKind::Number;
                t.span.1 -= 1;
                let dot = Token {
                    surface: ".".into(),
                    kind: TokenKind::Punct,
                    span: (t.span.1, t.span.1 + 1),
                };
                tokens.insert(i + 1, dot);
            }
            i += 1;
        }
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut current = Vec::new();
        for t in tokens {
            let end = t.is_punct('.') || t.is_punct('!') || t.is_punct('?');
            current.push(t);
            if end {
                out.push(std::mem::take(&mut current));
            }
        }
        if !current.is_empty() {
            out.push(current);
        }
        out.into_iter()
            .map(|toks| {
                let (a, b) = (toks[0].span.0, toks[toks.len() - 1].span.1);
                (chars[a..b].iter().collect(), toks)
            })
            .collect()
    }

    /// Runs the full pipeline over a message. Never fails.
    pub fn extract_message(&self, text: &str) -> SmesResult {
        let mut result = SmesResult::default();
        for (sentence_text, tokens) in self.split_sentences(text) {
            for t in &tokens {
                if self.lexicon.is_unknown(t) && !result.misspellings.contains(&t.surface) {
                    result.misspellings.push(t.surface.clone());
                }
            }
            let constituents = self.parse_constituents(&tokens);
            let predargs = self.combine(&constituents, &tokens);
            result.sentences.push(Sentence {
                text: sentence_text,
                tokens,
                constituents,
                predargs,
            });
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn de() -> Grammar {
        Grammar::builtin(Language::De)
    }

    #[test]
    fn turn_one_is_one_sentence_one_predarg() {
        let r = de().extract_message(
            "Ich würde Sie gern am Montag, dem 2. 11. 96 wegen der bevorstehenden Projektbegutachtung treffen.",
        );
        assert_eq!(r.sentences.len(), 1);
        assert!(r.misspellings.is_empty(), "{:?}", r.misspellings);
        let pas = &r.sentences[0].predargs;
        assert_eq!(pas.len(), 1);
        assert_eq!(pas[0].head, "treffen");
        assert_eq!(pas[0].temporal_adjuncts.len(), 1);
        let p = pas[0].temporal_adjuncts[0].point;
        assert_eq!((p.weekday, p.day, p.month, p.year), (Some(1), Some(2), Some(11), Some(1996)));
        assert!(pas[0].has_marker("volition"));
        assert_eq!(pas[0].args[0].topic.as_deref(), Some("Projektbegutachtung"));
    }

    #[test]
    fn turn_six_has_two_sentences() {
        let r = de().extract_message(
            "Der vorige Vorschlag wurde abgelehnt. Können wir uns stattdessen am Dienstag treffen?",
        );
        assert_eq!(r.sentences.len(), 2);
        assert_eq!(r.sentences[0].predargs[0].frame.as_deref(), Some("reject"));
        assert_eq!(r.sentences[0].predargs[0].temporal_adjuncts[0].reference, Some(Reference::PreviousProposal));
        let second = &r.sentences[1].predargs[0];
        assert_eq!(second.head, "treffen");
        assert!(second.question);
        assert!(second.has_marker("instead"));
        assert_eq!(second.temporal_adjuncts[0].point.weekday, Some(2));
    }

    #[test]
    fn nonsense_yields_misspellings_only() {
        let r = de().extract_message("xyzzy qwerty");
        assert!(r.predargs().next().is_none());
        assert_eq!(r.misspellings, vec!["xyzzy", "qwerty"]);
    }

    #[test]
    fn copula_question_with_clock_time() {
        let r = de().extract_message("Wie wäre es dann um 10?");
        let pa = &r.sentences[0].predargs[0];
        assert_eq!(pa.head, "sein");
        assert_eq!(pa.temporal_adjuncts[0].category, Category::PpTempTime);
        assert_eq!(pa.temporal_adjuncts[0].point.hour, Some(10));
    }

    #[test]
    fn verbless_fragment_gets_dummy_head() {
        let r = de().extract_message("Montag, 14 h.");
        let pas = &r.sentences[0].predargs;
        assert_eq!(pas.len(), 1);
        assert!(pas[0].is_dummy());
        assert_eq!(pas[0].temporal_adjuncts.len(), 2);
        assert_eq!(pas[0].temporal_adjuncts[0].point.weekday, Some(1));
        assert_eq!(pas[0].temporal_adjuncts[1].point.hour, Some(14));
    }

    #[test]
    fn separable_particle_only_clause_final() {
        let r = de().extract_message("Ich sage den 5. 11. 1996 um 10 Uhr zu.");
        assert_eq!(r.sentences[0].predargs[0].marker("particle"), Some("zu"));
        let r = de().extract_message("Zu folgenden Zeiten geht es bei mir: am 5. 11. 1996 zwischen 8 und 12 Uhr.");
        assert_eq!(r.sentences[0].predargs[0].marker("particle"), None);
    }

    #[test]
    fn ordinal_before_capital_ends_sentence() {
        let r = de().extract_message("Wie wäre es um 10. Dann bis bald.");
        assert_eq!(r.sentences.len(), 2);
        assert_eq!(r.sentences[0].predargs[0].temporal_adjuncts[0].point.hour, Some(10));
    }

    #[test]
    fn subordinator_splits_clauses() {
        let r = de().extract_message("Am Montag kann ich nicht, aber am Dienstag paßt es.");
        assert_eq!(r.sentences[0].predargs.len(), 2);
    }
}
