//! Per-dialogue semantic state and the analysis pipeline: gather, resolve,
//! check, anchor, infer, filter and rank.

use std::sync::Arc;

use crate::extraction::SmesResult;
use crate::gsi::params::SessionParams;
use crate::time::{Moment, TimePoint};

use super::anaphora::{resolve_anaphora, Context};
use super::anchor::anchor;
use super::clarify::merge_repair;
use super::compat::{CompatTable, Verdict};
use super::consistency::{check_consistency, Inconsistency, InconsistencyKind};
use super::gather::{gather, Action, Partial};
use super::il::{Coop, IlExpression};
use super::infer::infer;
use super::memory::{DiscourseMemory, Origin};
use super::rank::{Candidate, TextStructure};

/// What the server tells the sender when it could not make sense of a message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clarification {
    pub deficiency: Inconsistency,
    pub misspellings: Vec<String>,
    /// The act the unclear message seems to perform, if discernible.
    pub intent: Option<Coop>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Analysis {
    /// The best-ranked solution; alternatives are available by backtracking.
    Solution(IlExpression),
    Clarification(Clarification),
}

/// Runs one partial description through resolution, consistency checking,
/// anchoring and inference.
pub fn interpret(partial: &Partial, ctx: &Context, params: &SessionParams) -> Result<Vec<IlExpression>, Inconsistency> {
    let resolved = resolve_anaphora(partial, ctx, params);
    check_consistency(&resolved.partial.point)?;
    let ils = anchor(&resolved, params)?;
    let ils: Vec<IlExpression> = ils
        .into_iter()
        .map(|il| infer(il, partial.action, ctx))
        .filter(IlExpression::is_fully_specified)
        .collect();
    if ils.is_empty() {
        return Err(Inconsistency { kind: InconsistencyKind::EmptyExtraction, point: resolved.partial.point });
    }
    Ok(ils)
}

#[derive(Debug, Clone)]
pub struct Dialogue {
    pub params: SessionParams,
    compat: Arc<CompatTable>,
    discourse: DiscourseMemory,
    /// Partial description awaiting repair.
    pending: Option<Partial>,
    solutions: Option<TextStructure>,
}

impl Dialogue {
    pub fn new(params: SessionParams, compat: Arc<CompatTable>) -> Self {
        Dialogue {
            params,
            compat,
            discourse: DiscourseMemory::new(),
            pending: None,
            solutions: None,
        }
    }

    pub fn discourse(&self) -> &DiscourseMemory {
        &self.discourse
    }

    pub fn is_clarifying(&self) -> bool {
        self.pending.is_some()
    }

    pub fn solutions(&self) -> Option<&TextStructure> {
        self.solutions.as_ref()
    }

    fn verdict(&self, coop: Coop) -> Verdict {
        self.compat.verdict(self.discourse.last_coop(), coop)
    }

    fn clarify(&mut self, deficiency: Inconsistency, smes: &SmesResult, time: Moment) -> Analysis {
        self.discourse.push(Origin::Clarification, IlExpression::new(Coop::RequestClarification), time);
        let intent = self.pending.as_ref().and_then(|p| match p.action {
            Action::Definite(c) => Some(c),
            Action::Proposal => Some(Coop::Propose),
            Action::Repair | Action::Unknown => None,
        });
        Analysis::Clarification(Clarification {
            deficiency,
            misspellings: smes.misspellings.clone(),
            intent,
        })
    }

    fn solved(&mut self, candidates: Vec<Candidate>) -> Analysis {
        let ts = TextStructure::new(candidates);
        let best = ts.best().cloned().expect("non-empty");
        self.solutions = Some(ts);
        Analysis::Solution(best)
    }

    pub fn analyze(&mut self, smes: &SmesResult, send_time: Moment) -> Analysis {
        self.solutions = None;
        let partials: Vec<Partial> = smes.sentences.iter().enumerate().flat_map(|(i, s)| gather(s, i)).collect();

        if let Some(stored) = self.pending.take() {
            let abandons = partials
                .iter()
                .any(|p| matches!(p.action, Action::Definite(c) if !c.is_temporal()));
            if !abandons {
                return self.analyze_repair(stored, &partials, smes, send_time);
            }
        }

        let mut text: Vec<IlExpression> = Vec::new();
        let mut candidates = Vec::new();
        let mut deficiencies: Vec<(Inconsistency, Partial)> = Vec::new();
        for p in &partials {
            let ctx = Context { send_time, text: &text, discourse: &self.discourse };
            match interpret(p, &ctx, &self.params) {
                Ok(ils) => {
                    for il in &ils {
                        // slot lists spanning several days arrive as one partial per day
                        if let Some(prev) = candidates.last_mut().filter(|c: &&mut Candidate| {
                            c.sentence == p.sentence && c.il.coop == Coop::ProvideSlots && il.coop == Coop::ProvideSlots
                        }) {
                            let mut slots = std::mem::take(&mut prev.il.slots);
                            slots.extend(il.slots.iter().copied());
                            prev.il = IlExpression::new(Coop::ProvideSlots).with_slots(slots);
                            continue;
                        }
                        let verdict = self.verdict(il.coop);
                        if verdict != Verdict::Deny {
                            candidates.push(Candidate { il: il.clone(), sentence: p.sentence, verdict });
                        }
                    }
                    text.extend(ils);
                }
                Err(inc) => deficiencies.push((inc, p.clone())),
            }
        }
        if !candidates.is_empty() {
            return self.solved(candidates);
        }
        let worst = deficiencies
            .into_iter()
            .rev()
            .max_by_key(|(inc, _)| inc.kind.severity());
        match worst {
            Some((inc, p)) => {
                if inc.kind != InconsistencyKind::EmptyExtraction {
                    self.pending = Some(p);
                }
                self.clarify(inc, smes, send_time)
            }
            None => {
                let inc = Inconsistency { kind: InconsistencyKind::EmptyExtraction, point: TimePoint::default() };
                self.clarify(inc, smes, send_time)
            }
        }
    }

    fn analyze_repair(&mut self, stored: Partial, partials: &[Partial], smes: &SmesResult, time: Moment) -> Analysis {
        let Some(repair) = partials.iter().find(|p| p.has_temporal_content()) else {
            let inc = Inconsistency { kind: InconsistencyKind::IllFormedAfterMerge, point: stored.point };
            self.pending = Some(stored);
            return self.clarify(inc, smes, time);
        };
        let merged = merge_repair(&stored, repair);
        let ctx = Context { send_time: time, text: &[], discourse: &self.discourse };
        match interpret(&merged, &ctx, &self.params) {
            Ok(ils) => {
                let candidates: Vec<Candidate> = ils
                    .into_iter()
                    .map(|il| Candidate { verdict: self.verdict(il.coop), il, sentence: 0 })
                    .filter(|c| c.verdict != Verdict::Deny)
                    .collect();
                if candidates.is_empty() {
                    let inc = Inconsistency { kind: InconsistencyKind::IllFormedAfterMerge, point: merged.point };
                    return self.clarify(inc, smes, time);
                }
                self.solved(candidates)
            }
            Err(mut inc) => {
                if inc.kind == InconsistencyKind::EmptyExtraction {
                    inc.kind = InconsistencyKind::IllFormedAfterMerge;
                }
                self.pending = Some(merged);
                self.clarify(inc, smes, time)
            }
        }
    }

    /// The next-ranked alternative of the last analysis, or `None` when
    /// exhausted.
    pub fn next_solution(&mut self) -> Option<IlExpression> {
        self.solutions.as_mut()?.next_solution().cloned()
    }

    /// The client has accepted `il` as the content of the last message.
    pub fn commit(&mut self, il: IlExpression, time: Moment) {
        self.solutions = None;
        self.discourse.push(Origin::Committed, il, time);
    }

    /// The server has produced a message conveying `il`.
    pub fn record_generated(&mut self, il: IlExpression, time: Moment) {
        self.discourse.push(Origin::Generated, il, time);
    }

    /// The client found no acceptable solution; ask the sender to rephrase.
    pub fn request_repair(&mut self, time: Moment) -> Clarification {
        self.solutions = None;
        self.discourse.push(Origin::Clarification, IlExpression::new(Coop::RequestClarification), time);
        Clarification {
            deficiency: Inconsistency { kind: InconsistencyKind::EmptyExtraction, point: TimePoint::default() },
            misspellings: Vec::new(),
            intent: None,
        }
    }
}
