use std::sync::Arc;

use termin_core::extraction::Grammar;
use termin_core::generation::{GenGoal, Generator, GoalKind};
use termin_core::gsi::params::{Language, SessionParams};
use termin_core::semantics::compat::CompatTable;
use termin_core::semantics::consistency::InconsistencyKind;
use termin_core::semantics::{Analysis, Coop, Dialogue, IlExpression};
use termin_core::time::{Date, Interval, Moment};

fn nov(day: u8) -> Date {
    Date::new(1996, 11, day).unwrap()
}

fn at(s: &str) -> Moment {
    s.parse().unwrap()
}

struct Session {
    grammar: Grammar,
    dialogue: Dialogue,
}

impl Session {
    fn new() -> Session {
        Session {
            grammar: Grammar::builtin(Language::De),
            dialogue: Dialogue::new(SessionParams::default(), Arc::new(CompatTable::builtin())),
        }
    }

    fn analyze(&mut self, text: &str, time: &str) -> Analysis {
        let smes = self.grammar.extract_message(text);
        self.dialogue.analyze(&smes, at(time))
    }

    fn solution(&mut self, text: &str, time: &str) -> IlExpression {
        match self.analyze(text, time) {
            Analysis::Solution(il) => il,
            other => panic!("expected a solution for {text:?}, got {other:?}"),
        }
    }
}

#[test]
fn human_turns_of_the_sample_dialogue() {
    let mut s = Session::new();
    let first = s.analyze(
        "Ich würde Sie gern am Montag, dem 2. 11. 96 wegen der bevorstehenden Projektbegutachtung treffen.",
        "1996-10-28T09:00",
    );
    let Analysis::Clarification(c) = first else { panic!("{first:?}") };
    assert_eq!(c.deficiency.kind, InconsistencyKind::WeekdayDateMismatch { stated: 1, actual: 6 });
    assert!(s.dialogue.is_clarifying());

    let repaired = s.solution("Ich meinte natürlich Montag den 4. 11.", "1996-10-28T11:00");
    assert_eq!(repaired.coop, Coop::Propose);
    assert_eq!(repaired.range, Some(Interval::on_day(nov(4), 480, 1080)));
    s.dialogue.commit(repaired, at("1996-10-28T11:00"));
    let offer = IlExpression::new(Coop::ProvideSlots).with_slots(vec![Interval::on_day(nov(4), 780, 1080)]);
    s.dialogue.record_generated(offer, at("1996-10-28T11:00"));

    let modify = s.solution(
        "Der vorige Vorschlag wurde abgelehnt. Können wir uns stattdessen am Dienstag treffen?",
        "1996-10-29T09:00",
    );
    assert_eq!(modify.coop, Coop::Modify);
    assert_eq!(modify.range, Some(Interval::on_day(nov(5), 480, 1080)));
    let reject = s.dialogue.next_solution().unwrap();
    assert_eq!(reject.coop, Coop::Reject);
    assert_eq!(reject.range, Some(Interval::on_day(nov(4), 480, 1080)));
    assert!(s.dialogue.next_solution().is_none());
    s.dialogue.commit(modify, at("1996-10-29T09:00"));
    let offer = IlExpression::new(Coop::ProvideSlots)
        .with_slots(vec![Interval::on_day(nov(5), 480, 720), Interval::on_day(nov(5), 960, 1080)]);
    s.dialogue.record_generated(offer, at("1996-10-29T09:00"));

    let refine = s.solution("Wie wäre es dann um 10?", "1996-10-29T14:00");
    assert_eq!(refine.coop, Coop::Refine);
    assert_eq!(refine.appt, Some(Interval::on_day(nov(5), 600, 660)));
    assert_eq!(refine.duration, Some(60));
    s.dialogue.commit(refine.clone(), at("1996-10-29T14:00"));
    s.dialogue.record_generated(IlExpression { coop: Coop::Accept, ..refine }, at("1996-10-29T14:00"));

    let fix = s.solution("Das Treffen wird also am 5. 11. 1996 um 10 Uhr stattfinden.", "1996-10-30T09:00");
    assert_eq!(fix.coop, Coop::Fix);
    assert_eq!(fix.appt, Some(Interval::on_day(nov(5), 600, 660)));
}

#[test]
fn repair_that_is_still_inconsistent_keeps_clarifying() {
    let mut s = Session::new();
    s.analyze("Können wir uns am Montag, dem 2. 11. 96 treffen?", "1996-10-28T09:00");
    let again = s.analyze("Ich meinte Dienstag, den 4. 11.", "1996-10-28T10:00");
    let Analysis::Clarification(c) = again else { panic!("{again:?}") };
    assert!(matches!(c.deficiency.kind, InconsistencyKind::WeekdayDateMismatch { stated: 2, actual: 1 }));
    let fixed = s.solution("Montag.", "1996-10-28T11:00");
    assert_eq!(fixed.range.unwrap().start_date(), Some(nov(4)));
}

#[test]
fn machine_turns_round_trip() {
    let gen = Generator::builtin();
    let params = SessionParams::default();
    let goals = [
        GenGoal::new(
            GoalKind::ProvideSlots,
            IlExpression::new(Coop::ProvideSlots).with_slots(vec![Interval::on_day(nov(4), 780, 1080)]),
        ),
        GenGoal::new(
            GoalKind::ProvideSlots,
            IlExpression::new(Coop::ProvideSlots)
                .with_slots(vec![Interval::on_day(nov(5), 480, 720), Interval::on_day(nov(5), 960, 1080)]),
        ),
        GenGoal::new(
            GoalKind::ProvideSlots,
            IlExpression::new(Coop::ProvideSlots)
                .with_slots(vec![Interval::on_day(nov(4), 780, 1080), Interval::on_day(nov(5), 480, 720)]),
        ),
        GenGoal::new(GoalKind::Reject, IlExpression::new(Coop::Reject).with_range(Interval::on_day(nov(4), 480, 1080))),
        GenGoal::new(
            GoalKind::Accept,
            IlExpression::new(Coop::Accept).with_appt(Interval::on_day(nov(5), 600, 660)).with_duration(60),
        ),
        GenGoal::new(
            GoalKind::FixConfirm,
            IlExpression::new(Coop::Fix).with_appt(Interval::on_day(nov(5), 600, 660)).with_duration(60),
        ),
        GenGoal::new(
            GoalKind::Propose,
            IlExpression::new(Coop::Propose).with_appt(Interval::on_day(nov(5), 600, 690)).with_duration(90),
        ),
    ];
    for goal in goals {
        let text = gen.realize(&goal, &params).unwrap();
        let grammar = Grammar::builtin(Language::De);
        let mut d = Dialogue::new(params.clone(), Arc::new(CompatTable::parse("").unwrap()));
        let got = match d.analyze(&grammar.extract_message(&text), at("1996-10-28T09:00")) {
            Analysis::Solution(il) => il,
            other => panic!("{text}: {other:?}"),
        };
        assert_eq!(got.coop, goal.il.coop, "{text}");
        assert_eq!(got.focus(), goal.il.focus(), "{text}");
        assert_eq!(got.slots, goal.il.slots, "{text}");
    }
}
