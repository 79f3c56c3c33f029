//! Verb-frame combination: groups a sentence's constituents into
//! predicate-argument structures, one per clause.

use std::collections::BTreeMap;

use super::lexicon::{Lexicon, Pos};
use super::token::{Token, TokenKind};
use super::Constituent;

pub const DUMMY: &str = "DUMMY";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredArg {
    /// Verb lemma, or [`DUMMY`] for verbless clauses.
    pub head: String,
    /// Verb automaton name; `None` for the dummy head.
    pub frame: Option<String>,
    pub args: Vec<Constituent>,
    pub temporal_adjuncts: Vec<Constituent>,
    /// Lexical features of the clause's remaining words (negation, volition, ...).
    pub markers: BTreeMap<String, String>,
    pub question: bool,
    /// Token index range of the clause.
    pub clause_span: (usize, usize),
}

impl PredArg {
    pub fn is_dummy(&self) -> bool {
        self.head == DUMMY
    }

    pub fn has_marker(&self, key: &str) -> bool {
        self.markers.contains_key(key)
    }

    pub fn marker(&self, key: &str) -> Option<&str> {
        self.markers.get(key).map(String::as_str)
    }
}

fn is_sentence_punct(t: &Token) -> bool {
    t.is_punct('.') || t.is_punct('!') || t.is_punct('?') || t.is_punct(';')
}

/// Splits at clause markers (sentence punctuation and subordinating words
/// outside constituents), then for each clause locates the main verb and
/// collects constituents searching outward in both directions.
pub fn combine(constituents: &[Constituent], tokens: &[Token], lex: &Lexicon) -> Vec<PredArg> {
    let inside = |i: usize| constituents.iter().any(|c| c.tokens.0 <= i && i < c.tokens.1);
    let question = tokens.iter().any(|t| t.is_punct('?'));

    let mut bounds = Vec::new();
    let mut start = 0;
    for (i, t) in tokens.iter().enumerate() {
        if inside(i) {
            continue;
        }
        let marker = lex.lookup(t).iter().any(|e| e.feature("clause").is_some());
        if is_sentence_punct(t) {
            bounds.push((start, i));
            start = i + 1;
        } else if marker {
            bounds.push((start, i));
            start = i;
        }
    }
    bounds.push((start, tokens.len()));

    let mut out = Vec::new();
    for (lo, hi) in bounds {
        let in_clause: Vec<&Constituent> = constituents
            .iter()
            .filter(|c| c.tokens.0 >= lo && c.tokens.1 <= hi)
            .collect();
        let free: Vec<usize> = (lo..hi).filter(|i| !inside(*i)).collect();
        if free.is_empty() && in_clause.is_empty() {
            continue;
        }

        // main verb: last content verb, else the first auxiliary/modal
        let verbs: Vec<(usize, &str, &str)> = free
            .iter()
            .filter_map(|&i| {
                lex.lookup(&tokens[i])
                    .iter()
                    .find(|e| e.pos == Pos::Verb)
                    .map(|e| (i, e.lemma.as_str(), e.frame.as_deref().unwrap_or("aux")))
            })
            .collect();
        let main = verbs
            .iter()
            .rev()
            .find(|v| v.2 != "aux")
            .or_else(|| verbs.first())
            .copied();

        let last_word = free.iter().rev().copied().find(|&i| tokens[i].kind != TokenKind::Punct);
        let mut markers = BTreeMap::new();
        for &i in &free {
            if Some(i) == main.map(|m| m.0) {
                continue;
            }
            for e in lex.lookup(&tokens[i]) {
                for (k, v) in &e.features {
                    // separable verb particles only count clause-finally
                    if k == "particle" && Some(i) != last_word {
                        continue;
                    }
                    markers.entry(k.clone()).or_insert_with(|| v.clone());
                }
            }
        }

        // bidirectional search: walk outward from the verb (or the clause
        // start for verbless clauses) until the clause bounds
        let pivot = main.map_or(lo, |m| m.0);
        let mut ordered: Vec<&Constituent> = Vec::new();
        let (mut l, mut r) = (pivot, pivot);
        while l > lo || r < hi {
            if r < hi {
                if let Some(c) = in_clause.iter().find(|c| c.tokens.0 == r) {
                    ordered.push(c);
                    r = c.tokens.1;
                } else {
                    r += 1;
                }
            }
            if l > lo {
                if let Some(c) = in_clause.iter().find(|c| c.tokens.1 == l) {
                    ordered.push(c);
                    l = c.tokens.0;
                } else {
                    l -= 1;
                }
            }
        }
        ordered.sort_by_key(|c| c.tokens.0);

        let (temporal, args): (Vec<Constituent>, Vec<Constituent>) =
            ordered.into_iter().cloned().partition(|c| c.category.is_temporal());
        let (head, frame) = match main {
            Some((_, lemma, frame)) => (lemma.to_string(), Some(frame.to_string())),
            None => (DUMMY.to_string(), None),
        };
        if frame.is_none() && temporal.is_empty() && args.is_empty() && markers.is_empty() {
            continue;
        }
        out.push(PredArg {
            head,
            frame,
            args,
            temporal_adjuncts: temporal,
            markers,
            question,
            clause_span: (lo, hi),
        });
    }
    out
}
