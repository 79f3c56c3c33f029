//! Static workflow plans: the ordered subgoals each request kind is
//! decomposed into, with the resource that carries out each one.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RequestKind {
    Analyze,
    NextSolution,
    Commit,
    Repair,
    Generate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Extract,
    Interpret,
    Backtrack,
    Record,
    RequestRepair,
    Realize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Resource {
    Extraction,
    Semantics,
    Generation,
    Data,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubgoalStatus {
    Pending,
    Done,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subgoal {
    pub step: Step,
    pub resource: Resource,
    pub status: SubgoalStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowPlan {
    pub goal: RequestKind,
    pub subgoals: Vec<Subgoal>,
}

impl WorkflowPlan {
    pub fn for_request(goal: RequestKind) -> WorkflowPlan {
        use Resource::*;
        use Step::*;
        let steps: &[(Step, Resource)] = match goal {
            // realization only runs when interpretation asks for clarification
            RequestKind::Analyze => &[(Extract, Extraction), (Interpret, Semantics), (Realize, Generation)],
            RequestKind::NextSolution => &[(Backtrack, Semantics)],
            RequestKind::Commit => &[(Record, Data)],
            RequestKind::Repair => &[(RequestRepair, Semantics), (Realize, Generation)],
            RequestKind::Generate => &[(Realize, Generation), (Record, Data)],
        };
        WorkflowPlan {
            goal,
            subgoals: steps
                .iter()
                .map(|&(step, resource)| Subgoal { step, resource, status: SubgoalStatus::Pending })
                .collect(),
        }
    }

    /// The first pending subgoal; earlier ones are all settled.
    pub fn next_pending(&self) -> Option<usize> {
        self.subgoals.iter().position(|s| s.status == SubgoalStatus::Pending)
    }

    pub fn mark(&mut self, index: usize, status: SubgoalStatus) {
        self.subgoals[index].status = status;
    }

    /// Skips everything still pending, e.g. after a failure.
    pub fn abandon(&mut self) {
        for s in &mut self.subgoals {
            if s.status == SubgoalStatus::Pending {
                s.status = SubgoalStatus::Skipped;
            }
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Step::Extract => "extract",
            Step::Interpret => "interpret",
            Step::Backtrack => "backtrack",
            Step::Record => "record",
            Step::RequestRepair => "request-repair",
            Step::Realize => "realize",
        };
        f.write_str(s)
    }
}

impl fmt::Display for SubgoalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SubgoalStatus::Pending => "pending",
            SubgoalStatus::Done => "done",
            SubgoalStatus::Skipped => "skipped",
            SubgoalStatus::Failed => "failed",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_subgoal_has_a_resource_and_order_is_kept() {
        let mut p = WorkflowPlan::for_request(RequestKind::Analyze);
        assert_eq!(p.subgoals[0].step, Step::Extract);
        assert_eq!(p.next_pending(), Some(0));
        p.mark(0, SubgoalStatus::Done);
        assert_eq!(p.next_pending(), Some(1));
        p.abandon();
        assert_eq!(p.next_pending(), None);
    }
}
