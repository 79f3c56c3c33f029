use std::path::PathBuf;
use std::sync::Arc;

use termin_core::coconuts::{Kernel, KernelConfig};
use termin_core::gsi::params::Language;
use termin_core::gsi::server::Server;
use termin_core::harness::{self, analyze_corpus, analyze_messages, corpus_server, Outcome, Scenario, Transcript};
use termin_core::semantics::Coop;
use termin_core::time::Moment;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn golden(name: &str) -> (Transcript, String) {
    let dir = root().join("scenarios").join(name);
    let t = harness::run_scenario(&dir.join("scenario.txt")).unwrap();
    (t, std::fs::read_to_string(dir.join("transcript.golden.tsv")).unwrap())
}

#[test]
fn sample_scenario_matches_golden() {
    let (t, want) = golden("cosma-sample");
    assert_eq!(t.to_tsv(), want);
    assert_eq!(Transcript::parse(&want).unwrap(), t);
}

#[test]
fn initiator_scenario_matches_golden() {
    let (t, want) = golden("initiator");
    assert_eq!(t.to_tsv(), want);
    assert_eq!(t.records().last().unwrap().act, "fix");
}

#[test]
fn runs_are_deterministic() {
    let sc = Scenario::load(&root().join("scenarios/initiator/scenario.txt")).unwrap();
    let srv = Arc::new(Server::new(Arc::new(Kernel::new(KernelConfig::default()))));
    let a = harness::run(&sc, srv.clone()).unwrap().transcript;
    let b = harness::run(&sc, srv).unwrap().transcript;
    assert_eq!(a, b);
}

#[test]
fn empty_scenario_gives_empty_transcript() {
    let srv = Arc::new(Server::new(Arc::new(Kernel::new(KernelConfig::default()))));
    let run = harness::run(&Scenario::empty(), srv).unwrap();
    assert_eq!(run.transcript.len(), 0);
}

fn time() -> Moment {
    "1996-10-28T09:00".parse().unwrap()
}

#[test]
fn sample_corpus_has_one_row_per_message() {
    let rows = analyze_corpus(&root().join("corpus/sample"), Language::De, time()).unwrap();
    assert_eq!(rows.len(), 11);
    assert!(matches!(rows[0].outcome, Outcome::Deficiency(_)), "{:?}", rows[0]);
    let coops: Vec<Option<Coop>> = rows
        .iter()
        .map(|r| match &r.outcome {
            Outcome::Il(il) => Some(il.coop),
            _ => None,
        })
        .collect();
    assert_eq!(coops[2], Some(Coop::Propose));
    assert_eq!(coops[9], Some(Coop::Accept));
    assert_eq!(coops[10], Some(Coop::Fix));
    assert!(rows.iter().all(|r| r.to_tsv().split('\t').count() == 4));
}

#[test]
fn empty_and_garbage_messages_do_not_crash() {
    let garbage = String::from_utf8_lossy(&[0xde, 0xad, 0xbe, 0xef, 0x00, 0x01, 0x7f]).into_owned();
    let rows = analyze_messages(
        corpus_server(),
        Language::De,
        time(),
        [("empty".to_string(), ""), ("garbage".to_string(), garbage.as_str()), ("digits".to_string(), "99. 99. 9999 25:61")],
    );
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(!matches!(r.outcome, Outcome::Error(_)), "{r:?}");
    }
    assert!(matches!(rows[0].outcome, Outcome::Deficiency(_)));
}
