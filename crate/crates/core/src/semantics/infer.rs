//! Inference over anchored IL expressions: completing appointment endpoints
//! and deciding between proposing, refining and modifying.

use crate::time::{Interval, Moment};

use super::anaphora::Context;
use super::gather::Action;
use super::il::{Coop, IlExpression};

/// An appointment of `minutes` starting at `start`.
pub fn complete_endpoint(start: Moment, minutes: u32) -> Interval {
    Interval::from_moments(start, start.plus(i64::from(minutes)))
}

/// Proposal type of interval `i` given the interval `j` previously under
/// discussion: refine when `j` includes `i`, modify otherwise.
pub fn proposal_type(i: &Interval, j: Option<&Interval>) -> Coop {
    match j.and_then(|j| j.contains(i)) {
        None if j.is_none() => Coop::Propose,
        Some(true) => Coop::Refine,
        _ => Coop::Modify,
    }
}

/// Settles the cooperation primitive of a candidate built from a partial
/// with the given action.
pub fn infer(mut il: IlExpression, action: Action, ctx: &Context) -> IlExpression {
    if let (Some(appt), Some(d)) = (il.appt, il.duration) {
        if appt.right.is_empty() {
            if let Some(start) = appt.left.moment() {
                il.appt = Some(complete_endpoint(start, d));
            }
        }
    }
    il.coop = match action {
        Action::Definite(c) => c,
        Action::Proposal | Action::Repair | Action::Unknown => match il.focus() {
            Some(i) => {
                let j = ctx.antecedent(|a| a.focus().copied()).map(|(j, _)| j);
                proposal_type(i, j.as_ref())
            }
            None => Coop::Propose,
        },
    };
    il
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Date;

    fn nov(day: u8) -> Date {
        Date::new(1996, 11, day).unwrap()
    }

    #[test]
    fn inclusion_means_refinement() {
        let j = Interval::on_day(nov(5), 480, 1080);
        assert_eq!(proposal_type(&Interval::on_day(nov(5), 600, 660), Some(&j)), Coop::Refine);
        assert_eq!(proposal_type(&Interval::on_day(nov(5), 1020, 1140), Some(&j)), Coop::Modify);
        assert_eq!(proposal_type(&Interval::on_day(nov(6), 600, 660), Some(&j)), Coop::Modify);
        assert_eq!(proposal_type(&j, None), Coop::Propose);
    }

    #[test]
    fn endpoint_from_duration_carries_over_midnight() {
        let a = complete_endpoint(nov(30).at(23 * 60 + 30), 60);
        assert_eq!(a.right.date(), Some(Date::new(1996, 12, 1).unwrap()));
        assert_eq!(a.right.minute_of_day(), Some(30));
    }
}
