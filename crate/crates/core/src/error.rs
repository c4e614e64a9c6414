// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}", match .line { Some(l) => format!("parse error at line {l}: {msg}"), None => format!("parse error: {msg}") })]
    Parse { line: Option<usize>, msg: String },

    #[error("malformed circuit: {0}")]
    Topology(String),

    #[error("input shape error: expected {expected} bits, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("invalid domain for gate {gate}: {msg}")]
    Domain { gate: usize, msg: String },

    #[error("normalization error: {0}")]
    Normalize(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("oracle error: {0}")]
    Oracle(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
