//! Error type shared across the engine.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Network description syntax or validation error, with 1-based line number.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown node name `{0}`")]
    UnknownNode(String),

    #[error("node index {index} out of range (network has {count} nodes)")]
    NodeIndexOutOfRange { index: usize, count: usize },

    #[error("parameter index {index} out of range (parameter graph has {size} nodes)")]
    ParameterOutOfRange { index: u64, size: u64 },

    #[error(
        "node `{node}` exceeds enumeration guard ({what} = {actual}, maximum {max}); \
         raise the guard explicitly to enumerate anyway"
    )]
    EnumerationGuard {
        node: String,
        what: &'static str,
        actual: usize,
        max: usize,
    },

    #[error("node `{node}` has {ins} in-edges and {outs} out-edges; {expected}")]
    ShapeMismatch {
        node: String,
        ins: usize,
        outs: usize,
        expected: &'static str,
    },

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("time series: {0}")]
    TimeSeries(String),

    #[error("pattern references variable `{0}` absent from the network")]
    UnknownPatternVariable(String),

    #[error("phenotype spec: {0}")]
    Spec(String),

    #[error("shard coverage error: {0}")]
    ShardCoverage(String),

    #[error("fingerprint mismatch: {0}")]
    FingerprintMismatch(String),

    #[error("no witness found for parameter {0} (sampling fallback exhausted)")]
    NoWitness(u64),

    #[error("non-finite state at t = {t}; reduce the integration step")]
    NonFiniteState { t: f64 },

    #[error("no oscillation detected (amplitude below the noise floor)")]
    NoOscillation,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
