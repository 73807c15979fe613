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

//! Network centrality and market concentration measures over directed
//! interconnection networks.
//!
//! A [`NetworkSnapshot`] is a dated 0/1 adjacency matrix over an
//! [`EngineRoster`]. The [`centrality`] module ranks nodes by degree,
//! betweenness and information centrality; [`concentration`] computes
//! CR_k, HHI, the network-adjusted HHI and pairwise merger screens;
//! [`longitudinal`] summarizes dated series; [`stats`] holds the logistic and
//! least-squares fits.

pub mod centrality;
pub mod cli;
pub mod concentration;
pub mod error;
pub mod io;
pub mod longitudinal;
pub mod model;
pub mod report;
pub mod stats;

pub use error::{Error, Result};
pub use model::{
    density, density_cell_stdev, shares_from_reach, validate_snapshot, EngineRoster,
    NetworkSnapshot, RosterEntry, ShareTable, SnapshotSeries, Validation, Violation,
};
