//! Discourse memory: the sequence of IL expressions exchanged in one
//! client-server dialogue.

use crate::time::{Interval, Moment};

use super::il::{Coop, IlExpression};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    /// Analysed from an incoming message and committed by the client.
    Committed,
    /// Realized by the server on behalf of the client.
    Generated,
    /// A clarification request sent by the server itself.
    Clarification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub origin: Origin,
    pub il: IlExpression,
    pub time: Moment,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiscourseMemory {
    records: Vec<Record>,
}

impl DiscourseMemory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, origin: Origin, il: IlExpression, time: Moment) {
        self.records.push(Record { origin, il, time });
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }

    /// Cooperation primitive of the latest record, if any.
    pub fn last_coop(&self) -> Option<Coop> {
        self.last().map(|r| r.il.coop)
    }

    /// Records, most recent first.
    pub fn recent(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().rev()
    }

    /// The most recent interval under discussion.
    pub fn last_focus(&self) -> Option<&Interval> {
        self.recent().find_map(|r| r.il.focus())
    }
}
