//! Scenario runner and corpus analysis.
//!
//! Human messages reach an agent through the server: the agent's session
//! for that human analyses the text, the agent's control regime commits,
//! backtracks or asks for a repair, and the agent's answers are realized
//! by the same session. Agents talk to each other in IL directly; their
//! messages are still realized for the transcript.

pub mod scenario;
pub mod transcript;

use std::collections::{BTreeMap, VecDeque};
use std::fs;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::agent::{Agent, Control, Outgoing};
use crate::coconuts::{Extractor, Kernel, KernelConfig, Request, Response};
use crate::extraction::Grammar;
use crate::generation::{GenGoal, Generator};
use crate::gsi::fs::FeatureStructure as Fs;
use crate::gsi::params::{Language, SessionParams};
use crate::gsi::schema::{il_to_fs, inconsistency_to_fs};
use crate::gsi::server::{Client, ClientError, InProcess, Server};
use crate::semantics::compat::CompatTable;
use crate::semantics::consistency::Inconsistency;
use crate::semantics::{Coop, IlExpression};
use crate::time::Moment;

pub use scenario::{AgentSpec, Event, Scenario, ScenarioError};
pub use transcript::{Record, Transcript};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Client(#[from] ClientError),
}

/// A goal an agent had realized, with the parameters it was realized under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Produced {
    pub agent: String,
    pub to: String,
    pub goal: GenGoal,
    pub params: SessionParams,
    pub text: String,
}

#[derive(Debug)]
pub struct Run {
    pub transcript: Transcript,
    pub produced: Vec<Produced>,
    pub agents: BTreeMap<String, Agent>,
}

#[derive(Debug, Clone)]
enum Payload {
    Text(String),
    Il { nid: String, il: IlExpression },
}

#[derive(Debug, Clone)]
struct Delivery {
    time: Moment,
    from: String,
    to: String,
    payload: Payload,
}

struct Runner<'a> {
    scenario: &'a Scenario,
    client: Client<InProcess>,
    agents: BTreeMap<String, Agent>,
    sessions: BTreeMap<(String, String), String>,
    queue: VecDeque<Delivery>,
    transcript: Transcript,
    produced: Vec<Produced>,
}

/// Loads and runs a scenario file on a fresh in-process server.
pub fn run_scenario(path: &Path) -> Result<Transcript, HarnessError> {
    let scenario = Scenario::load(path)?;
    let server = Arc::new(Server::new(Arc::new(Kernel::new(KernelConfig::default()))));
    Ok(run(&scenario, server)?.transcript)
}

/// Runs `scenario` against `server`. Delivery order is fixed by the
/// scenario, so the result is deterministic even on a shared server.
pub fn run(scenario: &Scenario, server: Arc<Server>) -> Result<Run, ClientError> {
    let agents = scenario
        .agents
        .iter()
        .map(|s| (s.name.clone(), Agent::new(&s.name, s.calendar.clone(), s.strategy.clone(), s.params.clone())))
        .collect();
    let mut r = Runner {
        scenario,
        client: Client::new(InProcess::new(server)),
        agents,
        sessions: BTreeMap::new(),
        queue: VecDeque::new(),
        transcript: Transcript::default(),
        produced: Vec::new(),
    };
    let result = r.run_events();
    let sessions: Vec<String> = r.sessions.values().cloned().collect();
    for s in sessions {
        let _ = r.client.close_session(&s);
    }
    result?;
    Ok(Run { transcript: r.transcript, produced: r.produced, agents: r.agents })
}

fn clarify_content(intent: Option<Coop>, issue: Option<&Inconsistency>) -> String {
    let mut e = Vec::new();
    if let Some(c) = intent {
        e.push(("INTENT", Fs::sym(c.as_str())));
    }
    if let Some(i) = issue {
        e.push(("ISSUE", inconsistency_to_fs(i)));
    }
    Fs::map(e).encode()
}

impl Runner<'_> {
    fn run_events(&mut self) -> Result<(), ClientError> {
        for event in &self.scenario.events {
            match event {
                Event::Send { time, from, to, text } => {
                    for t in to {
                        self.queue.push_back(Delivery {
                            time: *time,
                            from: from.clone(),
                            to: t.clone(),
                            payload: Payload::Text(text.clone()),
                        });
                    }
                }
                Event::Initiate { time, agent, partners, range, duration } => {
                    let nid = format!("{agent}#{}", self.transcript.len() + self.queue.len() + 1);
                    let a = self.agents.get_mut(agent).expect("scenario checked the agent");
                    match a.initiate(&nid, partners, range, *duration) {
                        Ok(out) => self.send_all(*time, agent, &nid, out)?,
                        Err(e) => self.note(*time, agent, agent, "error", &e.to_string()),
                    }
                }
            }
            while let Some(d) = self.queue.pop_front() {
                self.deliver(d)?;
            }
        }
        Ok(())
    }

    fn note(&mut self, time: Moment, from: &str, to: &str, act: &str, text: &str) {
        self.transcript.push(Record {
            time,
            from: from.into(),
            to: to.into(),
            act: act.into(),
            content: "[]".into(),
            text: text.into(),
        });
    }

    /// The server session an agent uses for its dialogue with `partner`.
    fn session(&mut self, agent: &str, partner: &str) -> Result<String, ClientError> {
        let key = (agent.to_string(), partner.to_string());
        if let Some(s) = self.sessions.get(&key) {
            return Ok(s.clone());
        }
        let params = self.agents[agent].params.clone();
        let s = self.client.open_session(&params)?;
        self.sessions.insert(key, s.clone());
        Ok(s)
    }

    fn deliver(&mut self, d: Delivery) -> Result<(), ClientError> {
        if !self.agents.contains_key(&d.to) {
            // humans only read; agent texts were recorded when sent
            return Ok(());
        }
        match d.payload {
            Payload::Text(text) => self.on_human_text(d.time, &d.from, &d.to, &text),
            Payload::Il { nid, il } => {
                let agent = self.agents.get_mut(&d.to).expect("agent");
                if agent.control_step(&nid, &d.from, Some(&il)) != Control::Commit {
                    let msg = format!("{} ignored inadmissible {}", d.to, il.coop);
                    self.note(d.time, &d.to, &d.from, "error", &msg);
                    return Ok(());
                }
                match agent.on_receive(&nid, &d.from, &il) {
                    Ok(out) => self.send_all(d.time, &d.to, &nid, out),
                    Err(e) => {
                        self.note(d.time, &d.to, &d.from, "error", &e.to_string());
                        Ok(())
                    }
                }
            }
        }
    }

    fn on_human_text(&mut self, time: Moment, human: &str, agent: &str, text: &str) -> Result<(), ClientError> {
        let session = self.session(agent, human)?;
        let nid = self.agents[agent].live_negotiation_with(human).unwrap_or(human).to_string();
        let mut resp = self.client.request(&session, &Request::Analyze { text: text.into(), time: Some(time) })?;
        loop {
            match resp {
                Response::Solution(il) => match self.agents[agent].control_step(&nid, human, Some(&il)) {
                    Control::Commit => {
                        self.client.request(&session, &Request::Commit { il: il.clone(), time: Some(time) })?;
                        self.transcript.push(Record {
                            time,
                            from: human.into(),
                            to: agent.into(),
                            act: il.coop.as_str().into(),
                            content: il_to_fs(&il).encode(),
                            text: text.into(),
                        });
                        let out = self.agents.get_mut(agent).expect("agent").on_receive(&nid, human, &il);
                        return match out {
                            Ok(out) => self.send_all(time, agent, &nid, out),
                            Err(e) => {
                                self.note(time, agent, human, "error", &e.to_string());
                                Ok(())
                            }
                        };
                    }
                    _ => resp = self.client.request(&session, &Request::NextSolution)?,
                },
                Response::Exhausted => {
                    debug_assert_eq!(self.agents[agent].control_step(&nid, human, None), Control::RequestRepair);
                    resp = self.client.request(&session, &Request::Repair { time: Some(time) })?;
                }
                Response::Clarification { goal, text: reply, intent } => {
                    self.transcript.push(Record {
                        time,
                        from: human.into(),
                        to: agent.into(),
                        act: "clarify".into(),
                        content: clarify_content(intent, goal.inconsistency.as_ref()),
                        text: text.into(),
                    });
                    self.transcript.push(Record {
                        time,
                        from: agent.into(),
                        to: human.into(),
                        act: goal.il.coop.as_str().into(),
                        content: il_to_fs(&goal.il).encode(),
                        text: reply,
                    });
                    return Ok(());
                }
                Response::Text(_) | Response::Done => {
                    self.note(time, human, agent, "error", "unexpected server response");
                    return Ok(());
                }
                Response::Error { code, detail } => {
                    self.note(time, human, agent, "error", &format!("{code}: {detail}"));
                    return Ok(());
                }
            }
        }
    }

    fn send_all(&mut self, time: Moment, agent: &str, nid: &str, out: Vec<Outgoing>) -> Result<(), ClientError> {
        for o in out {
            let session = self.session(agent, &o.to)?;
            let text = match self.client.request(&session, &Request::Generate { goal: o.goal.clone(), time: Some(time) })? {
                Response::Text(t) => t,
                other => {
                    self.note(time, agent, &o.to, "error", &format!("generation failed: {other:?}"));
                    continue;
                }
            };
            self.transcript.push(Record {
                time,
                from: agent.into(),
                to: o.to.clone(),
                act: o.goal.il.coop.as_str().into(),
                content: il_to_fs(&o.goal.il).encode(),
                text: text.clone(),
            });
            self.produced.push(Produced {
                agent: agent.into(),
                to: o.to.clone(),
                goal: o.goal.clone(),
                params: self.agents[agent].params.clone(),
                text,
            });
            if self.agents.contains_key(&o.to) {
                self.queue.push_back(Delivery {
                    time,
                    from: agent.into(),
                    to: o.to,
                    payload: Payload::Il { nid: nid.into(), il: o.goal.il },
                });
            }
        }
        Ok(())
    }
}

/// Outcome of analysing one message on its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Il(IlExpression),
    Deficiency(Inconsistency),
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusRow {
    pub name: String,
    pub outcome: Outcome,
    pub misspellings: Vec<String>,
}

impl CorpusRow {
    pub fn to_tsv(&self) -> String {
        let (kind, content) = match &self.outcome {
            Outcome::Il(il) => (il.coop.as_str().to_string(), il_to_fs(il).encode()),
            Outcome::Deficiency(i) => ("deficiency".to_string(), inconsistency_to_fs(i).encode()),
            Outcome::Error(e) => ("error".to_string(), e.replace(['\t', '\n'], " ")),
        };
        format!("{}\t{}\t{}\t{}", self.name, kind, content, self.misspellings.join(","))
    }
}

/// Analyses each message in a fresh session of `server`.
pub fn analyze_messages<'m>(
    server: Arc<Server>,
    language: Language,
    time: Moment,
    messages: impl IntoIterator<Item = (String, &'m str)>,
) -> Vec<CorpusRow> {
    let grammar = Grammar::builtin(language);
    let mut client = Client::new(InProcess::new(server));
    let params = SessionParams { language, ..SessionParams::default() };
    messages
        .into_iter()
        .map(|(name, text)| {
            let misspellings = grammar.extract_message(text).misspellings;
            let outcome = match client.open_session(&params) {
                Err(e) => Outcome::Error(e.to_string()),
                Ok(s) => {
                    let o = match client.request(&s, &Request::Analyze { text: text.into(), time: Some(time) }) {
                        Ok(Response::Solution(il)) => Outcome::Il(il),
                        Ok(Response::Clarification { goal, .. }) => match goal.inconsistency {
                            Some(i) => Outcome::Deficiency(i),
                            None => Outcome::Error("clarification without an issue".into()),
                        },
                        Ok(other) => Outcome::Error(format!("{other:?}")),
                        Err(e) => Outcome::Error(e.to_string()),
                    };
                    let _ = client.close_session(&s);
                    o
                }
            };
            CorpusRow { name, outcome, misspellings }
        })
        .collect()
}

/// One row per regular file of `dir`, in file-name order. Unreadable or
/// non-UTF-8 files are analysed lossily rather than skipped.
pub fn analyze_corpus(dir: &Path, language: Language, time: Moment) -> std::io::Result<Vec<CorpusRow>> {
    let mut files: Vec<_> = fs::read_dir(dir)?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let texts: Vec<(String, String)> = files
        .iter()
        .map(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let text = fs::read(p).map(|b| String::from_utf8_lossy(&b).into_owned()).unwrap_or_default();
            (name, text)
        })
        .collect();
    Ok(analyze_messages(corpus_server(), language, time, texts.iter().map(|(n, t)| (n.clone(), t.as_str()))))
}

/// A server for context-free analysis: single messages have no dialogue
/// history, so no action-compatibility filtering applies.
pub fn corpus_server() -> Arc<Server> {
    let kernel = Kernel::with_components(
        KernelConfig::default(),
        Arc::new(Extractor::builtin()),
        Arc::new(Generator::builtin()),
        Arc::new(CompatTable::parse("").expect("empty table")),
    );
    Arc::new(Server::new(Arc::new(kernel)))
}
