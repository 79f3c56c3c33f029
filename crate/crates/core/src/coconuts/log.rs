//! Structured event records, one per state transition.

use std::fmt;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    /// Per virtual system sequence number.
    pub seq: u64,
    pub vs: usize,
    pub session: String,
    pub step: String,
    pub status: String,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vs={} session={} seq={} step={} status={}", self.vs, self.session, self.seq, self.step, self.status)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sink {
    Memory,
    Stderr,
    File(PathBuf),
}

impl Sink {
    pub fn parse(s: &str) -> Sink {
        match s {
            "memory" | "" => Sink::Memory,
            "stderr" => Sink::Stderr,
            path => Sink::File(PathBuf::from(path)),
        }
    }
}

/// Kernel-wide log destination. Records are also kept per virtual system.
#[derive(Debug)]
pub struct EventLog {
    sink: Sink,
    file: Mutex<Option<std::fs::File>>,
}

impl EventLog {
    pub fn new(sink: Sink) -> EventLog {
        let file = match &sink {
            Sink::File(p) => OpenOptions::new().create(true).append(true).open(p).ok(),
            _ => None,
        };
        EventLog { sink, file: Mutex::new(file) }
    }

    pub fn emit(&self, event: &Event) {
        match self.sink {
            Sink::Memory => {}
            Sink::Stderr => eprintln!("{event}"),
            Sink::File(_) => {
                if let Some(f) = self.file.lock().unwrap_or_else(|e| e.into_inner()).as_mut() {
                    let _ = writeln!(f, "{event}");
                }
            }
        }
    }
}
