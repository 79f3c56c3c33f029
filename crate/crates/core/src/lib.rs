pub mod agent;
pub mod coconuts;
pub mod extraction;
pub mod generation;
pub mod gsi;
pub mod harness;
pub mod semantics;
pub mod time;
