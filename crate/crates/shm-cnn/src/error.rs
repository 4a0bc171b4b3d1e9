//! Crate-wide error type.
//!
//! Variants map onto the CLI exit-code contract: configuration and schema
//! problems exit with 2, I/O with 3, numeric divergence with 4.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: bad flag values, shape mismatches, unknown
    /// config keys, version mismatches.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or inconsistent data: schema mismatches, bad labels,
    /// unparseable files.
    #[error("data error: {0}")]
    Data(String),

    /// API misuse: empty training set, unknown state id, and similar.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Time integration blew up (state exceeded the documented bound or
    /// went non-finite).
    #[error("simulation diverged at t = {time_s:.6} s")]
    Diverged { time_s: f64 },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Exit code for the CLI contract: 2 config/schema, 3 I/O, 4 divergence.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::Data(_) | Error::Usage(_) => 2,
            Error::Io { .. } => 3,
            Error::Diverged { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
