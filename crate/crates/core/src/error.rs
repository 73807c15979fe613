// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::path::PathBuf;

use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate id `{id}`")]
    DuplicateId { id: String },

    #[error("empty id at roster position {position}")]
    EmptyId { position: usize },

    #[error("reach for `{id}` is {value}, expected a percentage in [0, 100]")]
    ReachOutOfRange { id: String, value: f64 },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("missing reach value for `{0}`")]
    MissingReach(String),

    #[error("all reach values are zero")]
    AllZeroReach,

    #[error("invalid snapshot: {}", format_violations(.0))]
    InvalidSnapshot(Vec<Violation>),

    #[error("series error: {0}")]
    Series(String),

    #[error("{op} needs at least {needed} nodes, got {got}")]
    TooFewNodes {
        op: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("empty input to {0}")]
    EmptyInput(&'static str),

    #[error("k = {k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },

    #[error("overlap {0} outside [0, 1]")]
    InvalidOverlap(f64),

    #[error("merger pair must name two distinct firms, got `{0}` twice")]
    SelfMerger(String),

    #[error("invalid threshold {0}")]
    InvalidThreshold(f64),

    #[error("HHI value {0} is negative or not finite")]
    InvalidHhi(f64),

    #[error("matrix B is singular")]
    SingularMatrix,

    #[error("group must be a non-empty proper subset of the roster")]
    InvalidGroup,

    #[error("trend needs at least 2 rows, got {0}")]
    TooFewRows(usize),

    #[error("degenerate outcome: y contains a single class")]
    DegenerateOutcome,

    #[error("complete separation: |slope| exceeded {bound}")]
    Separation { bound: f64 },

    #[error("no variance in regressor")]
    ConstantRegressor,

    #[error("{0}")]
    InvalidInput(String),

    #[error("non-finite input {0}")]
    NonFinite(f64),

    #[error("{path}:{line}{}: {message}", column.map(|c| format!(":{c}")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
