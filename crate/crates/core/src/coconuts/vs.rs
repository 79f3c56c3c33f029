//! Virtual systems: one isolated set of managers per dialogue.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::extraction::SmesResult;
use crate::gsi::params::SessionParams;
use crate::semantics::compat::CompatTable;
use crate::semantics::{Dialogue, IlExpression};
use crate::time::Moment;

use super::ccm::Ccm;
use super::log::Event;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VsStatus {
    Active,
    Clarifying,
    /// The negotiation reached a fixing or cancellation; the session is still bound.
    Completed,
    /// Unbound and free to serve another dialogue.
    Reusable,
}

impl fmt::Display for VsStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VsStatus::Active => "active",
            VsStatus::Clarifying => "clarifying",
            VsStatus::Completed => "completed",
            VsStatus::Reusable => "reusable",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VsError {
    #[error("virtual system {0} is still serving a dialogue")]
    InUse(usize),
}

#[derive(Debug)]
pub struct VirtualSystem {
    pub id: usize,
    pub session: Option<String>,
    pub status: VsStatus,
    /// The data manager's store: discourse memory and pending repairs.
    pub dialogue: Dialogue,
    pub extraction: Ccm<SmesResult>,
    pub semantics: Ccm<IlExpression>,
    pub generation: Ccm<String>,
    pub events: Vec<Event>,
    pub last_time: Moment,
    pub(crate) last_used: u64,
    compat: Arc<CompatTable>,
}

impl VirtualSystem {
    pub fn create(id: usize, session: &str, params: SessionParams, compat: Arc<CompatTable>, buffer_limit: usize) -> Self {
        VirtualSystem {
            id,
            session: Some(session.to_string()),
            status: VsStatus::Active,
            dialogue: Dialogue::new(params, Arc::clone(&compat)),
            extraction: Ccm::new("extraction", buffer_limit),
            semantics: Ccm::new("semantics", buffer_limit),
            generation: Ccm::new("generation", buffer_limit),
            events: Vec::new(),
            last_time: Moment(0),
            last_used: 0,
            compat,
        }
    }

    /// Binds a finished virtual system to a new dialogue with all
    /// per-dialogue state cleared.
    pub fn reuse(&mut self, session: &str, params: SessionParams) -> Result<(), VsError> {
        if !matches!(self.status, VsStatus::Completed | VsStatus::Reusable) {
            return Err(VsError::InUse(self.id));
        }
        self.session = Some(session.to_string());
        self.status = VsStatus::Active;
        self.dialogue = Dialogue::new(params, Arc::clone(&self.compat));
        self.extraction.reset();
        self.semantics.reset();
        self.generation.reset();
        self.events.clear();
        self.last_time = Moment(0);
        Ok(())
    }

    pub fn params(&self) -> &SessionParams {
        &self.dialogue.params
    }

    pub fn session_name(&self) -> &str {
        self.session.as_deref().unwrap_or("-")
    }

    pub fn log(&mut self, step: impl Into<String>, status: impl Into<String>) -> Event {
        let e = Event {
            seq: self.events.len() as u64 + 1,
            vs: self.id,
            session: self.session_name().to_string(),
            step: step.into(),
            status: status.into(),
        };
        self.events.push(e.clone());
        e
    }
}
