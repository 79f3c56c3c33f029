//! Interactive repair of deficient analyses.

use super::gather::{Action, Partial};

/// Merges a repair into the stored partial description: the repair's fields
/// replace conflicting ones, everything else is retained.
pub fn merge_repair(stored: &Partial, repair: &Partial) -> Partial {
    let action = match repair.action {
        Action::Definite(_) => repair.action,
        _ => stored.action,
    };
    Partial {
        action,
        point: repair.point.or(stored.point),
        ranges: if repair.ranges.is_empty() { stored.ranges.clone() } else { repair.ranges.clone() },
        reference: repair.reference.or(stored.reference),
        duration: repair.duration.or(stored.duration),
        topic: repair.topic.clone().or_else(|| stored.topic.clone()),
        sentence: stored.sentence,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::il::Coop;
    use crate::time::TimePoint;

    #[test]
    fn new_fields_win_old_ones_stay() {
        let mut stored = Partial::new(Action::Proposal, 0);
        stored.point = TimePoint { weekday: Some(1), day: Some(2), month: Some(11), year: Some(1996), ..TimePoint::default() };
        stored.topic = Some("Projektbegutachtung".into());
        let mut repair = Partial::new(Action::Repair, 0);
        repair.point = TimePoint { weekday: Some(1), day: Some(4), month: Some(11), ..TimePoint::default() };
        let m = merge_repair(&stored, &repair);
        assert_eq!(m.action, Action::Proposal);
        assert_eq!((m.point.day, m.point.year), (Some(4), Some(1996)));
        assert_eq!(m.topic.as_deref(), Some("Projektbegutachtung"));

        let mut weekday_only = Partial::new(Action::Repair, 0);
        weekday_only.point.weekday = Some(6);
        let m = merge_repair(&stored, &weekday_only);
        assert_eq!((m.point.weekday, m.point.day), (Some(6), Some(2)));

        let cancel = Partial::new(Action::Definite(Coop::Cancel), 0);
        assert_eq!(merge_repair(&stored, &cancel).action, Action::Definite(Coop::Cancel));
    }
}
