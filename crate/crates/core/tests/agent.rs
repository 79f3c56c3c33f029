use proptest::prelude::*;

use termin_core::agent::{Agent, Calendar, Entry, Phase, StrategyConfig};
use termin_core::gsi::params::SessionParams;
use termin_core::semantics::{Coop, IlExpression};
use termin_core::time::{Date, Interval};

fn nov(d: u8) -> Date {
    Date::new(1996, 11, d).unwrap()
}

fn calendar(file: &str) -> Calendar {
    let path = format!("{}/scenarios/cosma-sample/{file}", env!("CARGO_MANIFEST_DIR"));
    Calendar::parse(&std::fs::read_to_string(path).unwrap(), &SessionParams::default()).unwrap()
}

#[test]
fn sample_calendars_offer_the_dialogue_slots() {
    let a = calendar("a.cal");
    let b = calendar("b.cal");
    let day = |d| Interval::on_day(nov(d), 480, 1080);
    assert_eq!(a.free_slots(&day(4), 60), vec![Interval::on_day(nov(4), 780, 1080)]);
    assert!(b.free_slots(&day(4), 60).is_empty());
    assert_eq!(
        a.free_slots(&day(5), 60),
        vec![Interval::on_day(nov(5), 480, 720), Interval::on_day(nov(5), 960, 1080)]
    );
    assert_eq!(b.free_slots(&day(5), 60), vec![Interval::on_day(nov(5), 600, 720)]);
}

#[test]
fn calendar_text_round_trips() {
    let a = calendar("a.cal");
    assert_eq!(Calendar::parse(&a.to_text(), &SessionParams::default()).unwrap(), a);
}

#[test]
fn participant_answers_the_sample_proposals() {
    let params = SessionParams::default();
    let mut a = Agent::new("A", calendar("a.cal"), StrategyConfig::default(), params.clone());
    let propose = IlExpression::new(Coop::Propose).with_range(Interval::on_day(nov(4), 480, 1080));
    let out = a.on_receive("H", "H", &propose).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].goal.il.coop, Coop::ProvideSlots);
    assert_eq!(out[0].goal.il.slots, vec![Interval::on_day(nov(4), 780, 1080)]);
    assert_eq!(a.calendar.reservations("H"), vec![Interval::on_day(nov(4), 780, 1080)]);

    // a modification moves the reservations to the new day
    let modify = IlExpression::new(Coop::Modify).with_range(Interval::on_day(nov(5), 480, 1080));
    a.on_receive("H", "H", &modify).unwrap();
    assert_eq!(a.calendar.reservations("H").len(), 2);
    assert!(a.calendar.reservations("H").iter().all(|r| r.start_date() == Some(nov(5))));

    let appt = Interval::on_day(nov(5), 600, 660);
    let refine = IlExpression::new(Coop::Refine).with_appt(appt).with_duration(60);
    let out = a.on_receive("H", "H", &refine).unwrap();
    assert_eq!(out[0].goal.il.coop, Coop::Accept);
    assert_eq!(a.negotiation("H").unwrap().phase, Phase::Agreed);

    let fix = IlExpression::new(Coop::Fix).with_appt(appt).with_duration(60);
    a.on_receive("H", "H", &fix).unwrap();
    assert!(a.calendar.reservations("H").is_empty());
    assert!(a.calendar.busy.iter().any(|e| e.interval() == appt));
}

#[test]
fn busy_participant_rejects_or_counters() {
    let params = SessionParams::default();
    let propose = IlExpression::new(Coop::Propose).with_range(Interval::on_day(nov(4), 480, 1080));
    let mut b = Agent::new("B", calendar("b.cal"), StrategyConfig::default(), params.clone());
    let out = b.on_receive("H", "H", &propose).unwrap();
    assert_eq!(out[0].goal.il.coop, Coop::Reject);
    assert_eq!(out[0].goal.il.range, Some(Interval::on_day(nov(4), 480, 1080)));

    let strategy = StrategyConfig { counter_proposals: true, ..StrategyConfig::default() };
    let mut b = Agent::new("B", calendar("b.cal"), strategy, params);
    let out = b.on_receive("H", "H", &propose).unwrap();
    assert_eq!(out[0].goal.il.coop, Coop::Modify);
    assert_eq!(out[0].goal.il.appt, Some(Interval::on_day(nov(5), 600, 660)));
}

#[test]
fn fix_before_agreement_is_inadmissible() {
    let mut a = Agent::new("A", calendar("a.cal"), StrategyConfig::default(), SessionParams::default());
    let propose = IlExpression::new(Coop::Propose).with_range(Interval::on_day(nov(4), 480, 1080));
    a.on_receive("H", "H", &propose).unwrap();
    let fix = IlExpression::new(Coop::Fix).with_appt(Interval::on_day(nov(4), 780, 840));
    assert!(!a.admissible("H", "H", &fix));
}

#[test]
fn initiator_without_partners_is_refused() {
    let mut a = Agent::new("A", calendar("a.cal"), StrategyConfig::default(), SessionParams::default());
    assert!(a.initiate("n", &[], &Interval::on_day(nov(4), 480, 1080), 60).is_err());
}

fn arb_calendar() -> impl Strategy<Value = Calendar> {
    (prop::collection::vec((0i64..5, 0u16..23 * 60, 1u16..300), 0..=5), 0u32..=30).prop_map(|(entries, gap)| {
        let params = SessionParams { min_gap: gap, ..SessionParams::default() };
        let mut cal = Calendar::new(&params);
        for (d, start, len) in entries {
            cal.busy.push(Entry { date: nov(4).add_days(d), start, end: (start + len).min(1440), label: "x".into() });
        }
        cal
    })
}

proptest! {
    #[test]
    fn free_slots_are_free_sorted_and_long_enough(cal in arb_calendar(), dur in 15u32..240) {
        let range = Interval::from_moments(nov(4).at(0), nov(9).at(0));
        let slots = cal.free_slots(&range, dur);
        let gap = i64::from(cal.min_gap);
        for w in slots.windows(2) {
            prop_assert!(w[0].bounds().unwrap().1 < w[1].bounds().unwrap().0);
        }
        for s in &slots {
            let (a, b) = s.bounds().unwrap();
            prop_assert!(b.0 - a.0 >= i64::from(dur));
            prop_assert!(a.minute_of_day() >= cal.workday_start);
            prop_assert!(b.0 - a.date().at(0).0 <= i64::from(cal.workday_end));
            for e in &cal.busy {
                let (x, y) = e.bounds();
                prop_assert!(b.0 <= x.0 - gap || a.0 >= y.0 + gap, "{s} meets {e:?}");
            }
        }
    }

    #[test]
    fn reservations_follow_the_latest_proposal(
        cal in arb_calendar(),
        steps in prop::collection::vec((0i64..5, 8u16..17, 1u16..4, any::<bool>()), 1..8),
        cancel in any::<bool>(),
    ) {
        let mut agent = Agent::new("P", cal, StrategyConfig::default(), SessionParams::default());
        let mut last = None;
        for (i, (d, h, len, appt)) in steps.into_iter().enumerate() {
            let coop = if i == 0 { Coop::Propose } else { Coop::Modify };
            let iv = Interval::on_day(nov(4).add_days(d), h * 60, ((h + len) * 60).min(18 * 60));
            let il = if appt {
                IlExpression::new(coop).with_appt(iv).with_duration(iv.minutes().unwrap() as u32)
            } else {
                IlExpression::new(coop).with_range(iv)
            };
            agent.on_receive("n", "I", &il).unwrap();
            last = Some(iv);
            // everything held lies within the latest proposal
            for r in agent.calendar.reservations("n") {
                let (a, b) = r.bounds().unwrap();
                let (x, y) = iv.bounds().unwrap();
                prop_assert!(x <= a && b <= y);
            }
        }
        prop_assert!(last.is_some());
        let cancel_il = IlExpression::new(Coop::Cancel);
        // cancelling is only admissible if our last word was not a rejection
        if cancel && agent.admissible("n", "I", &cancel_il) {
            agent.on_receive("n", "I", &cancel_il).unwrap();
            prop_assert!(agent.calendar.reservations("n").is_empty());
            prop_assert_eq!(agent.negotiation("n").unwrap().phase, Phase::Failed);
        }
    }
}
