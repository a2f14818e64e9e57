//! Web-served interactive prover.

pub mod daemon;
pub mod disambig;
pub mod enricher;
pub mod executor;
pub mod kernel;
pub mod libstore;
pub mod script;
pub mod tactics;
