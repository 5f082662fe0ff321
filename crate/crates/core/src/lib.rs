//! Exact query-complexity workbench for partial functions on symmetric
//! promises over `[M]^n`.

pub mod adversary;
pub mod budget;
pub mod error;
pub mod harness;
pub mod io;
pub mod lemma;
pub mod matching;
pub mod measures;
pub mod model;
pub mod oracle;
pub mod symmetric;

pub use error::{Error, Result};
