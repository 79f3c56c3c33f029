//! Ranking of alternative IL expressions within a sentence and of sentences
//! within a text, and the backtracking cursor over the result.

use std::cmp::Reverse;

use super::compat::Verdict;
use super::il::IlExpression;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub il: IlExpression,
    pub sentence: usize,
    /// Expectation level relative to the dialogue so far.
    pub verdict: Verdict,
}

/// Most informative first; ties keep their order.
pub fn rank_sentence(cands: &mut [Candidate]) {
    cands.sort_by_key(|c| Reverse(c.il.informativeness()));
}

/// Sentences are ordered by their best candidate's expectation level, then
/// by its informativeness, then by position in the text; within a sentence
/// by informativeness.
pub fn rank_text(mut cands: Vec<Candidate>) -> Vec<Candidate> {
    let key = |s: usize, cands: &[Candidate]| {
        let mine = cands.iter().filter(|c| c.sentence == s);
        let verdict = mine.clone().map(|c| c.verdict).max().unwrap_or(Verdict::Deny);
        let info = mine.map(|c| c.il.informativeness()).max().unwrap_or(0);
        (Reverse(verdict), Reverse(info), s)
    };
    let keys: Vec<_> = cands.iter().map(|c| key(c.sentence, &cands)).collect();
    let mut idx: Vec<usize> = (0..cands.len()).collect();
    idx.sort_by_key(|&i| (keys[i], Reverse(cands[i].il.informativeness())));
    let mut slots: Vec<Option<Candidate>> = cands.drain(..).map(Some).collect();
    idx.into_iter().map(|i| slots[i].take().unwrap()).collect()
}

/// A ranked analysis of a message, with a cursor marking the solution last
/// handed out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextStructure {
    pub candidates: Vec<Candidate>,
    cursor: usize,
}

impl TextStructure {
    pub fn new(candidates: Vec<Candidate>) -> Self {
        TextStructure { candidates: rank_text(candidates), cursor: 0 }
    }

    pub fn best(&self) -> Option<&IlExpression> {
        self.candidates.first().map(|c| &c.il)
    }

    pub fn current(&self) -> Option<&IlExpression> {
        self.candidates.get(self.cursor).map(|c| &c.il)
    }

    /// Advances past the current solution; `None` once all are used up.
    pub fn next_solution(&mut self) -> Option<&IlExpression> {
        if self.cursor < self.candidates.len() {
            self.cursor += 1;
        }
        self.current()
    }

    pub fn is_exhausted(&self) -> bool {
        self.cursor >= self.candidates.len()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::il::Coop;
    use crate::time::{Date, Interval};

    fn cand(coop: Coop, sentence: usize, verdict: Verdict, appt: bool) -> Candidate {
        let iv = Interval::on_day(Date::new(1996, 11, 5).unwrap(), 600, 660);
        let il = if appt { IlExpression::new(coop).with_appt(iv) } else { IlExpression::new(coop).with_range(iv) };
        Candidate { il, sentence, verdict }
    }

    #[test]
    fn expectation_beats_position() {
        let t = TextStructure::new(vec![
            cand(Coop::Reject, 0, Verdict::Allow, false),
            cand(Coop::Modify, 1, Verdict::Expect, false),
        ]);
        assert_eq!(t.best().unwrap().coop, Coop::Modify);
    }

    #[test]
    fn informativeness_then_position() {
        let t = TextStructure::new(vec![
            cand(Coop::Propose, 0, Verdict::Expect, false),
            cand(Coop::Refine, 1, Verdict::Expect, true),
            cand(Coop::Modify, 2, Verdict::Expect, true),
        ]);
        let order: Vec<Coop> = t.candidates.iter().map(|c| c.il.coop).collect();
        assert_eq!(order, vec![Coop::Refine, Coop::Modify, Coop::Propose]);
    }

    #[test]
    fn cursor_walks_to_exhaustion() {
        let mut t = TextStructure::new(vec![
            cand(Coop::Modify, 1, Verdict::Expect, false),
            cand(Coop::Reject, 0, Verdict::Allow, false),
        ]);
        assert_eq!(t.current().unwrap().coop, Coop::Modify);
        assert_eq!(t.next_solution().unwrap().coop, Coop::Reject);
        assert!(t.next_solution().is_none());
        assert!(t.is_exhausted());
        assert!(t.next_solution().is_none());
    }
}
