//! Collects the temporal information and the cooperative action expressed
//! by each clause of a sentence into partial descriptions.

use crate::extraction::{PredArg, Reference, Sentence};
use crate::time::TimePoint;

use super::il::Coop;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Definite(Coop),
    /// Propose, refine or modify; decided by inference against the context.
    Proposal,
    /// A correction of something said before.
    Repair,
    Unknown,
}

impl Action {
    pub fn bears_action(self) -> bool {
        self != Action::Unknown
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partial {
    pub action: Action,
    pub point: TimePoint,
    /// Clock-time bounds, each pair on the day given by `point`.
    pub ranges: Vec<(TimePoint, TimePoint)>,
    pub reference: Option<Reference>,
    pub duration: Option<u32>,
    pub topic: Option<String>,
    /// Index of the sentence within the message.
    pub sentence: usize,
}

impl Partial {
    pub fn new(action: Action, sentence: usize) -> Partial {
        Partial {
            action,
            point: TimePoint::default(),
            ranges: Vec::new(),
            reference: None,
            duration: None,
            topic: None,
            sentence,
        }
    }

    pub fn has_temporal_content(&self) -> bool {
        !self.point.is_empty() || !self.ranges.is_empty() || self.reference.is_some() || self.duration.is_some()
    }

    /// Adds another partial's temporal content; `None` if their points clash.
    fn absorb(&self, other: &Partial) -> Option<Partial> {
        let mut out = self.clone();
        out.point = self.point.unify(other.point)?;
        out.ranges.extend(other.ranges.iter().copied());
        out.reference = self.reference.or(other.reference);
        out.duration = self.duration.or(other.duration);
        out.topic = self.topic.clone().or_else(|| other.topic.clone());
        Some(out)
    }
}

const DUMMY_FRAME: &str = "DUMMY";

/// Maps a clause to its cooperative action. Rules are tried in order.
pub fn action_of(pa: &PredArg) -> Action {
    let frame = pa.frame.as_deref().unwrap_or(DUMMY_FRAME);
    let neg = pa.has_marker("neg");
    let particle = pa.marker("particle");
    let temporal = !pa.temporal_adjuncts.is_empty();
    let asks = pa.question || pa.has_marker("modal") || pa.has_marker("volition");
    match frame {
        "say" if particle == Some("zu") => Action::Definite(Coop::Accept),
        "say" if particle == Some("ab") => Action::Definite(Coop::Cancel),
        "accept" => Action::Definite(Coop::Accept),
        "cancel" => Action::Definite(Coop::Cancel),
        "reject" => Action::Definite(Coop::Reject),
        "mean" => Action::Repair,
        _ if pa.has_marker("repair") => Action::Repair,
        "come" | "suit" | "meet" | "be" | "aux" | "takeplace" if neg => Action::Definite(Coop::Reject),
        "takeplace" => Action::Definite(Coop::Fix),
        "suit" => Action::Definite(Coop::ProvideSlots),
        "meet" | "come" | "be" | "aux" | DUMMY_FRAME if pa.has_marker("instead") => Action::Definite(Coop::Modify),
        "meet" | "come" => Action::Proposal,
        "be" | "aux" if asks || temporal => Action::Proposal,
        DUMMY_FRAME if temporal => Action::Proposal,
        _ => Action::Unknown,
    }
}

/// Splits a clause's temporal adjuncts into partials; adjuncts whose points
/// clash ("Monday or Tuesday") start a new partial with the same action.
fn clause_partials(pa: &PredArg, sentence: usize) -> Vec<Partial> {
    let action = action_of(pa);
    let topic = pa.args.iter().find_map(|c| c.topic.clone());
    let mut out = vec![Partial::new(action, sentence)];
    for c in &pa.temporal_adjuncts {
        let mut piece = Partial::new(action, sentence);
        piece.point = c.point;
        if let (Some(a), Some(b)) = (c.from, c.to) {
            piece.ranges.push((a, b));
        }
        piece.reference = c.reference;
        piece.duration = c.duration;
        let current = out.last_mut().unwrap();
        match current.absorb(&piece) {
            Some(merged) => *current = merged,
            None => out.push(piece),
        }
    }
    for p in &mut out {
        p.topic = topic.clone();
    }
    out
}

/// Gathers one sentence. Clauses without an action lend their temporal
/// content to the preceding action-bearing clause (or the following one).
pub fn gather(sentence: &Sentence, index: usize) -> Vec<Partial> {
    let mut acting: Vec<Partial> = Vec::new();
    let mut loose: Vec<(usize, Partial)> = Vec::new();
    for pa in &sentence.predargs {
        for p in clause_partials(pa, index) {
            if p.action.bears_action() {
                acting.push(p);
            } else if p.has_temporal_content() {
                loose.push((acting.len(), p));
            }
        }
    }
    for (pos, p) in loose {
        let host = if pos > 0 { Some(pos - 1) } else if !acting.is_empty() { Some(0) } else { None };
        match host.and_then(|h| acting[h].absorb(&p).map(|m| (h, m))) {
            Some((h, merged)) => acting[h] = merged,
            None => acting.push(Partial { action: Action::Proposal, ..p }),
        }
    }
    acting
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::Grammar;
    use crate::gsi::params::Language;

    fn gather_text(text: &str) -> Vec<Partial> {
        let r = Grammar::builtin(Language::De).extract_message(text);
        r.sentences.iter().enumerate().flat_map(|(i, s)| gather(s, i)).collect()
    }

    #[test]
    fn proposal_with_inconsistent_date() {
        let ps = gather_text(
            "Ich würde Sie gern am Montag, dem 2. 11. 96 wegen der bevorstehenden Projektbegutachtung treffen.",
        );
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].action, Action::Proposal);
        assert_eq!(ps[0].point.weekday, Some(1));
        assert_eq!(ps[0].point.day, Some(2));
        assert_eq!(ps[0].topic.as_deref(), Some("Projektbegutachtung"));
    }

    #[test]
    fn reject_and_modify() {
        let ps = gather_text("Der vorige Vorschlag wurde abgelehnt. Können wir uns stattdessen am Dienstag treffen?");
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[0].action, Action::Definite(Coop::Reject));
        assert_eq!(ps[0].reference, Some(Reference::PreviousProposal));
        assert_eq!(ps[1].action, Action::Definite(Coop::Modify));
        assert_eq!((ps[1].sentence, ps[1].point.weekday), (1, Some(2)));
    }

    #[test]
    fn accept_fix_slots_and_negation() {
        let a = gather_text("Ich sage den 5. 11. 1996 um 10 Uhr zu.");
        assert_eq!(a[0].action, Action::Definite(Coop::Accept));
        assert_eq!((a[0].point.day, a[0].point.hour), (Some(5), Some(10)));
        let f = gather_text("Das Treffen wird also am 5. 11. 1996 um 10 Uhr stattfinden.");
        assert_eq!(f[0].action, Action::Definite(Coop::Fix));
        let s = gather_text("Zu folgenden Zeiten geht es bei mir: am 5. 11. 1996 zwischen 8 und 12 Uhr und zwischen 16 und 18 Uhr.");
        assert_eq!(s[0].action, Action::Definite(Coop::ProvideSlots));
        assert_eq!(s[0].ranges.len(), 2);
        let r = gather_text("Leider kann ich am 4. 11. 1996 nicht kommen.");
        assert_eq!(r[0].action, Action::Definite(Coop::Reject));
    }

    #[test]
    fn fragments_and_repairs() {
        let p = gather_text("Wie wäre es dann um 10?");
        assert_eq!(p[0].action, Action::Proposal);
        assert_eq!(p[0].point.hour, Some(10));
        let r = gather_text("Ich meinte natürlich Montag den 4. 11.");
        assert_eq!(r[0].action, Action::Repair);
        assert_eq!((r[0].point.weekday, r[0].point.day, r[0].point.year), (Some(1), Some(4), None));
    }

    #[test]
    fn alternatives_split() {
        let ps = gather_text("Können wir uns am Montag oder am Dienstag treffen?");
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[1].point.weekday, Some(2));
    }

    #[test]
    fn nothing_to_gather() {
        assert!(gather_text("xyzzy").is_empty());
        assert!(gather_text("").is_empty());
    }
}
