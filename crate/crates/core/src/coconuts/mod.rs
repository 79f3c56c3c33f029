//! The orchestration kernel: a pool of virtual systems, one per dialogue,
//! each executing static workflow plans over shared extraction and
//! generation components and its own semantic state.

pub mod ccm;
pub mod lease;
pub mod log;
pub mod vs;
pub mod workflow;

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, Mutex, MutexGuard};

use serde::Deserialize;
use thiserror::Error;

use crate::extraction::{Grammar, SmesResult};
use crate::generation::{GenError, GenGoal, Generator, GoalKind};
use crate::gsi::params::{Language, ParamError, SessionParams};
use crate::semantics::compat::CompatTable;
use crate::semantics::{Analysis, Coop, IlExpression};
use crate::time::Moment;

use lease::ComponentPool;
use log::{Event, EventLog, Sink};
use vs::{VirtualSystem, VsStatus};
use workflow::{RequestKind, Step, SubgoalStatus, WorkflowPlan};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct KernelConfig {
    pub pool_capacity: usize,
    pub buffer_limit: usize,
    pub extraction_instances: usize,
    pub generation_instances: usize,
    pub log: String,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig::from_toml(include_str!("../../data/coconuts.toml")).expect("shipped config is valid")
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("config: {0} must be positive")]
    Zero(&'static str),
}

impl KernelConfig {
    pub fn from_toml(text: &str) -> Result<KernelConfig, ConfigError> {
        let c: KernelConfig = toml::from_str(text)?;
        for (name, v) in [
            ("pool-capacity", c.pool_capacity),
            ("buffer-limit", c.buffer_limit),
            ("extraction-instances", c.extraction_instances),
            ("generation-instances", c.generation_instances),
        ] {
            if v == 0 {
                return Err(ConfigError::Zero(name));
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("virtual system pool exhausted ({0} in use)")]
    CapacityExceeded(usize),
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error(transparent)]
    Params(#[from] ParamError),
}

impl KernelError {
    pub fn code(&self) -> &'static str {
        match self {
            KernelError::CapacityExceeded(_) => "resource-exhausted",
            KernelError::UnknownSession(_) => "unknown-session",
            KernelError::Params(_) => "bad-params",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Request {
    Analyze { text: String, time: Option<Moment> },
    NextSolution,
    Commit { il: IlExpression, time: Option<Moment> },
    Repair { time: Option<Moment> },
    Generate { goal: GenGoal, time: Option<Moment> },
}

impl Request {
    pub fn kind(&self) -> RequestKind {
        match self {
            Request::Analyze { .. } => RequestKind::Analyze,
            Request::NextSolution => RequestKind::NextSolution,
            Request::Commit { .. } => RequestKind::Commit,
            Request::Repair { .. } => RequestKind::Repair,
            Request::Generate { .. } => RequestKind::Generate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Response {
    Solution(IlExpression),
    Exhausted,
    /// A text to be sent back to the author of the analysed message.
    Clarification { goal: GenGoal, text: String, intent: Option<Coop> },
    Text(String),
    Done,
    Error { code: String, detail: String },
}

impl Response {
    fn error(code: &str, detail: impl Into<String>) -> Response {
        Response::Error { code: code.to_string(), detail: detail.into() }
    }
}

/// The extraction component: one grammar per language.
#[derive(Debug)]
pub struct Extractor {
    grammars: BTreeMap<&'static str, Arc<Grammar>>,
}

impl Extractor {
    pub fn builtin() -> Extractor {
        Extractor::new([Language::De, Language::En].map(|l| (l, Arc::new(Grammar::builtin(l)))))
    }

    pub fn new(grammars: impl IntoIterator<Item = (Language, Arc<Grammar>)>) -> Extractor {
        Extractor { grammars: grammars.into_iter().map(|(l, g)| (l.as_str(), g)).collect() }
    }

    pub fn extract(&self, language: Language, text: &str) -> Option<SmesResult> {
        Some(self.grammars.get(language.as_str())?.extract_message(text))
    }
}

struct Registry {
    systems: Vec<Arc<Mutex<VirtualSystem>>>,
    sessions: HashMap<String, usize>,
    next_session: u64,
    tick: u64,
}

pub struct Kernel {
    config: KernelConfig,
    extraction: Arc<ComponentPool<Extractor>>,
    generation: Arc<ComponentPool<Generator>>,
    compat: Arc<CompatTable>,
    registry: Mutex<Registry>,
    log: EventLog,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "component failure".to_string())
}

/// Intermediate results passed between the subgoals of one plan.
#[derive(Default)]
struct Work {
    smes: Option<SmesResult>,
    clarification: Option<GenGoal>,
    intent: Option<Coop>,
    goal: Option<GenGoal>,
    response: Option<Response>,
}

impl Kernel {
    pub fn new(config: KernelConfig) -> Kernel {
        let extractor = Arc::new(Extractor::builtin());
        let generator = Arc::new(Generator::builtin());
        Kernel::with_components(config, extractor, generator, Arc::new(CompatTable::builtin()))
    }

    pub fn with_components(
        config: KernelConfig,
        extractor: Arc<Extractor>,
        generator: Arc<Generator>,
        compat: Arc<CompatTable>,
    ) -> Kernel {
        let ex = vec![extractor; config.extraction_instances.max(1)];
        let gen = vec![generator; config.generation_instances.max(1)];
        Kernel {
            log: EventLog::new(Sink::parse(&config.log)),
            extraction: ComponentPool::new("extraction", ex),
            generation: ComponentPool::new("generation", gen),
            compat,
            registry: Mutex::new(Registry { systems: Vec::new(), sessions: HashMap::new(), next_session: 0, tick: 0 }),
            config,
        }
    }

    pub fn config(&self) -> &KernelConfig {
        &self.config
    }

    pub fn open_session(&self, params: SessionParams) -> Result<String, KernelError> {
        params.validate()?;
        let mut reg = lock(&self.registry);
        reg.next_session += 1;
        reg.tick += 1;
        let session = format!("s{}", reg.next_session);
        let tick = reg.tick;
        // least recently used free system first
        let free = reg
            .systems
            .iter()
            .enumerate()
            .filter_map(|(i, s)| {
                let vs = lock(s);
                (vs.status == VsStatus::Reusable).then_some((vs.last_used, i))
            })
            .min();
        let index = match free {
            Some((_, i)) => {
                let mut vs = lock(&reg.systems[i]);
                vs.reuse(&session, params).expect("reusable system");
                vs.last_used = tick;
                let e = vs.log("reuse", "active");
                self.log.emit(&e);
                i
            }
            None if reg.systems.len() < self.config.pool_capacity => {
                let i = reg.systems.len();
                let mut vs = VirtualSystem::create(i, &session, params, Arc::clone(&self.compat), self.config.buffer_limit);
                vs.last_used = tick;
                let e = vs.log("create", "active");
                self.log.emit(&e);
                reg.systems.push(Arc::new(Mutex::new(vs)));
                i
            }
            None => return Err(KernelError::CapacityExceeded(reg.systems.len())),
        };
        reg.sessions.insert(session.clone(), index);
        Ok(session)
    }

    fn system(&self, session: &str) -> Result<Arc<Mutex<VirtualSystem>>, KernelError> {
        let reg = lock(&self.registry);
        let i = *reg.sessions.get(session).ok_or_else(|| KernelError::UnknownSession(session.to_string()))?;
        Ok(Arc::clone(&reg.systems[i]))
    }

    pub fn close_session(&self, session: &str) -> Result<(), KernelError> {
        let sys = self.system(session)?;
        let mut reg = lock(&self.registry);
        reg.sessions.remove(session);
        reg.tick += 1;
        let tick = reg.tick;
        let mut vs = lock(&sys);
        vs.status = VsStatus::Completed;
        let e = vs.log("close", "completed");
        self.log.emit(&e);
        vs.session = None;
        vs.status = VsStatus::Reusable;
        vs.last_used = tick;
        Ok(())
    }

    /// Event records of a live session's virtual system.
    pub fn events(&self, session: &str) -> Result<Vec<Event>, KernelError> {
        let sys = self.system(session)?;
        let events = lock(&sys).events.clone();
        Ok(events)
    }

    pub fn status(&self, session: &str) -> Result<VsStatus, KernelError> {
        let sys = self.system(session)?;
        let status = lock(&sys).status;
        Ok(status)
    }

    pub fn live_sessions(&self) -> usize {
        lock(&self.registry).sessions.len()
    }

    /// Runs a request's workflow plan inside the session's virtual system.
    /// Requests of one session are serialized; every request gets exactly
    /// one response.
    pub fn dispatch(&self, session: &str, request: Request) -> Response {
        let sys = match self.system(session) {
            Ok(s) => s,
            Err(e) => return Response::error(e.code(), e.to_string()),
        };
        let mut vs = lock(&sys);
        let mut plan = WorkflowPlan::for_request(request.kind());
        let mut work = Work::default();
        if let Request::Generate { goal, .. } = &request {
            work.goal = Some(goal.clone());
        }
        let time = match &request {
            Request::Analyze { time, .. } | Request::Commit { time, .. } | Request::Repair { time } | Request::Generate { time, .. } => *time,
            Request::NextSolution => None,
        };
        if let Some(t) = time {
            vs.last_time = t;
        }

        while let Some(i) = plan.next_pending() {
            let step = plan.subgoals[i].step;
            let outcome = catch_unwind(AssertUnwindSafe(|| self.run_step(&mut vs, step, &request, &mut work)));
            let status = match outcome {
                Ok(Ok(true)) => SubgoalStatus::Done,
                Ok(Ok(false)) => SubgoalStatus::Skipped,
                Ok(Err(resp)) => {
                    work.response = Some(resp);
                    SubgoalStatus::Failed
                }
                Err(panic) => {
                    work.response = Some(self.recover(&mut vs, step, &panic_message(panic.as_ref())));
                    SubgoalStatus::Failed
                }
            };
            plan.mark(i, status);
            let e = vs.log(step.to_string(), status.to_string());
            self.log.emit(&e);
            if status == SubgoalStatus::Failed {
                plan.abandon();
            }
        }
        work.response.unwrap_or(Response::Done)
    }

    /// Default action when a component fails: analysis falls back to a
    /// clarification request, everything else to a structured error.
    fn recover(&self, vs: &mut VirtualSystem, step: Step, detail: &str) -> Response {
        match step {
            Step::Extract | Step::Interpret => {
                vs.extraction.record_failure();
                let c = vs.dialogue.request_repair(vs.last_time);
                let goal = GenGoal::clarification(c.deficiency, c.misspellings);
                match self.realize(vs, &goal) {
                    Ok(text) => Response::Clarification { goal, text, intent: None },
                    Err(e) => Response::error("component-failure", format!("{detail}; {e}")),
                }
            }
            _ => {
                vs.generation.record_failure();
                Response::error("component-failure", detail)
            }
        }
    }

    fn realize(&self, vs: &mut VirtualSystem, goal: &GenGoal) -> Result<String, GenError> {
        goal.check()?;
        let generator = self.generation.acquire(vs.session_name());
        generator.realize(goal, vs.params())
    }

    /// Executes one subgoal. `Ok(false)` marks a subgoal with nothing to do.
    fn run_step(&self, vs: &mut VirtualSystem, step: Step, request: &Request, work: &mut Work) -> Result<bool, Response> {
        let now = vs.last_time;
        match (step, request) {
            (Step::Extract, Request::Analyze { text, .. }) => {
                let language = vs.params().language;
                let smes = {
                    let extractor = self.extraction.acquire(vs.session_name());
                    extractor.extract(language, text)
                }
                .ok_or_else(|| Response::error("no-grammar", format!("no grammar for {language}")))?;
                vs.extraction.load(text.as_str(), vec![smes.clone()]);
                // a single solution: the component is done
                vs.extraction.release();
                work.smes = Some(smes);
                Ok(true)
            }
            (Step::Interpret, Request::Analyze { text, .. }) => {
                let smes = work.smes.take().unwrap_or_default();
                match vs.dialogue.analyze(&smes, now) {
                    Analysis::Solution(il) => {
                        let all = vs.dialogue.solutions().map(|t| t.candidates.iter().map(|c| c.il.clone()).collect()).unwrap_or_else(|| vec![il.clone()]);
                        vs.semantics.load(text.as_str(), all);
                        vs.status = VsStatus::Active;
                        work.response = Some(Response::Solution(il));
                    }
                    Analysis::Clarification(c) => {
                        vs.semantics.load(text.as_str(), Vec::new());
                        vs.semantics.release();
                        vs.status = VsStatus::Clarifying;
                        let goal = GenGoal::clarification(c.deficiency, c.misspellings).with_reference(now.date());
                        work.clarification = Some(goal);
                        work.intent = c.intent;
                    }
                }
                Ok(true)
            }
            (Step::Realize, Request::Analyze { .. }) | (Step::Realize, Request::Repair { .. }) => {
                let Some(goal) = work.clarification.take() else { return Ok(false) };
                let text = self.realize(vs, &goal).map_err(|e| Response::error("generation", e.to_string()))?;
                vs.generation.load("clarification", vec![text.clone()]);
                work.response = Some(Response::Clarification { goal, text, intent: work.intent });
                Ok(true)
            }
            (Step::Backtrack, Request::NextSolution) => {
                let next = match vs.semantics.advance() {
                    Ok(Some(il)) => Response::Solution(il.clone()),
                    Ok(None) => {
                        vs.semantics.release();
                        Response::Exhausted
                    }
                    Err(_) => Response::Exhausted,
                };
                work.response = Some(next);
                Ok(true)
            }
            (Step::Record, Request::Commit { il, .. }) => {
                if !il.is_fully_specified() {
                    return Err(Response::error("bad-payload", "committed IL is not fully specified"));
                }
                vs.dialogue.commit(il.clone(), now);
                vs.semantics.release();
                if matches!(il.coop, Coop::Fix | Coop::Cancel) {
                    vs.status = VsStatus::Completed;
                } else if vs.status == VsStatus::Clarifying {
                    vs.status = VsStatus::Active;
                }
                work.response = Some(Response::Done);
                Ok(true)
            }
            (Step::RequestRepair, Request::Repair { .. }) => {
                let c = vs.dialogue.request_repair(now);
                vs.semantics.release();
                vs.status = VsStatus::Clarifying;
                work.clarification = Some(GenGoal::clarification(c.deficiency, c.misspellings).with_reference(now.date()));
                Ok(true)
            }
            (Step::Realize, Request::Generate { .. }) => {
                let mut goal = work.goal.clone().expect("generate carries a goal");
                if goal.reference.is_none() {
                    goal.reference = Some(now.date());
                }
                let text = self.realize(vs, &goal).map_err(|e| Response::error("generation", e.to_string()))?;
                vs.generation.load(goal.kind.as_str(), vec![text.clone()]);
                work.goal = Some(goal);
                work.response = Some(Response::Text(text));
                Ok(true)
            }
            (Step::Record, Request::Generate { .. }) => {
                let goal = work.goal.take().expect("realized goal");
                if goal.kind == GoalKind::ClarificationRequest {
                    return Ok(false);
                }
                if matches!(goal.il.coop, Coop::Fix | Coop::Cancel) {
                    vs.status = VsStatus::Completed;
                }
                vs.dialogue.record_generated(goal.il, now);
                Ok(true)
            }
            _ => Ok(false),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::consistency::InconsistencyKind;
    use crate::time::{Date, Interval};

    fn kernel(capacity: usize) -> Kernel {
        Kernel::new(KernelConfig { pool_capacity: capacity, ..KernelConfig::default() })
    }

    fn at(s: &str) -> Option<Moment> {
        Some(s.parse().unwrap())
    }

    #[test]
    fn analyze_inconsistent_turn_asks_for_clarification() {
        let k = kernel(4);
        let s = k.open_session(SessionParams::default()).unwrap();
        let r = k.dispatch(
            &s,
            Request::Analyze {
                text: "Ich würde Sie gern am Montag, dem 2. 11. 96 wegen der bevorstehenden Projektbegutachtung treffen.".into(),
                time: at("1996-10-28T09:00"),
            },
        );
        let Response::Clarification { goal, text, intent } = r else { panic!("{r:?}") };
        assert!(matches!(goal.inconsistency.unwrap().kind, InconsistencyKind::WeekdayDateMismatch { .. }));
        assert_eq!(intent, Some(Coop::Propose));
        assert!(text.starts_with("COSMA hat die folgende Zeitangabe verstanden"));
        assert_eq!(k.status(&s).unwrap(), VsStatus::Clarifying);
        let steps: Vec<String> = k.events(&s).unwrap().iter().map(|e| format!("{}:{}", e.step, e.status)).collect();
        assert_eq!(steps, vec!["create:active", "extract:done", "interpret:done", "realize:done"]);
    }

    #[test]
    fn generate_accept() {
        let k = kernel(4);
        let s = k.open_session(SessionParams::default()).unwrap();
        let d = Date::new(1996, 11, 5).unwrap();
        let il = IlExpression::new(Coop::Accept).with_appt(Interval::on_day(d, 600, 660)).with_duration(60);
        let r = k.dispatch(&s, Request::Generate { goal: GenGoal::new(GoalKind::Accept, il), time: at("1996-10-29T14:00") });
        assert_eq!(r, Response::Text("Ich sage den 5. 11. 1996 um 10 Uhr zu.".into()));
    }

    #[test]
    fn capacity_and_lru_reuse() {
        let k = kernel(2);
        let a = k.open_session(SessionParams::default()).unwrap();
        let b = k.open_session(SessionParams::default()).unwrap();
        assert_eq!(k.open_session(SessionParams::default()), Err(KernelError::CapacityExceeded(2)));
        k.dispatch(&a, Request::Analyze { text: "Können wir uns am 4. 11. 1996 treffen?".into(), time: at("1996-10-28T09:00") });
        k.close_session(&a).unwrap();
        let c = k.open_session(SessionParams::default()).unwrap();
        assert_ne!(c, a);
        // the reused system starts with an empty discourse memory
        let r = k.dispatch(&c, Request::Analyze { text: "Wie wäre es um 10?".into(), time: at("1996-10-28T09:00") });
        let Response::Solution(il) = r else { panic!("{r:?}") };
        assert_eq!(il.appt.unwrap().start_date(), Some(Date::new(1996, 10, 28).unwrap()));
        assert_eq!(k.events(&c).unwrap()[0].step, "reuse");
        assert!(k.dispatch(&a, Request::NextSolution) != Response::Exhausted);
        k.close_session(&b).unwrap();
    }

    #[test]
    fn unknown_session_and_bad_commit_are_errors() {
        let k = kernel(1);
        assert!(matches!(k.dispatch("nope", Request::NextSolution), Response::Error { .. }));
        let s = k.open_session(SessionParams::default()).unwrap();
        let r = k.dispatch(&s, Request::Commit { il: IlExpression::new(Coop::Propose), time: None });
        assert!(matches!(r, Response::Error { ref code, .. } if code == "bad-payload"));
        // still usable afterwards
        assert_eq!(k.dispatch(&s, Request::NextSolution), Response::Exhausted);
    }

    #[test]
    fn bad_params_rejected() {
        let k = kernel(1);
        let p = SessionParams { workday_start: 600, workday_end: 500, ..SessionParams::default() };
        assert!(matches!(k.open_session(p), Err(KernelError::Params(_))));
    }

    #[test]
    fn config_parsing() {
        assert_eq!(KernelConfig::default().pool_capacity, 64);
        assert!(KernelConfig::from_toml("pool-capacity = 0\nbuffer-limit = 1\nextraction-instances = 1\ngeneration-instances = 1\nlog = \"memory\"").is_err());
        assert!(KernelConfig::from_toml("bogus = 1").is_err());
    }
}
