// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid design: {0}")]
    Invalid(String),
    #[error("net {net}: route not a tree")]
    RouteCycle { net: String },
    #[error("net {net}: route is disconnected")]
    Disconnected { net: String },
    #[error("timing graph has a cycle through pin {0}")]
    TimingCycle(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
