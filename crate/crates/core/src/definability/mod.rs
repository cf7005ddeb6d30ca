//! Definable elements, sets and functions of a finite choice structure.

pub mod oracle;
mod engine;

pub use engine::{
    definable_closure, stability_check, witness_formula, DefinableFamily, EngineError, OracleAgreement, RoundTrace,
    StabilityReport, WitnessError, Witnessed, DEFAULT_MAX_ROUNDS, ENGINE_MAX_CARRIER,
};
