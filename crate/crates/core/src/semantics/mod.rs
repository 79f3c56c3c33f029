//! Semantic interpretation of extracted messages within a dialogue context.

pub mod anaphora;
pub mod anchor;
pub mod clarify;
pub mod compat;
pub mod consistency;
pub mod dialogue;
pub mod gather;
pub mod il;
pub mod infer;
pub mod memory;
pub mod rank;

pub use dialogue::{interpret, Analysis, Clarification, Dialogue};
pub use il::{Coop, IlExpression};
