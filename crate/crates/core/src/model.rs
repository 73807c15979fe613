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

//! Rosters, adjacency snapshots and market-share tables.
//!
//! A roster fixes the row/column order of every snapshot built over it. All
//! types are immutable once constructed.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on the sum of a share table.
pub const SHARE_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RosterEntry {
    pub id: String,
    pub name: String,
    pub setup_year: Option<i32>,
    /// Percentage of surveyed audience, in [0, 100]. Sums over a roster may
    /// exceed 100 since one user can visit several sites.
    pub reach_pct: Option<f64>,
}

impl RosterEntry {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        RosterEntry {
            id: id.into(),
            name: name.into(),
            setup_year: None,
            reach_pct: None,
        }
    }

    pub fn with_reach(mut self, reach_pct: f64) -> Self {
        self.reach_pct = Some(reach_pct);
        self
    }

    pub fn with_setup_year(mut self, year: i32) -> Self {
        self.setup_year = Some(year);
        self
    }
}

/// Ordered list of organizations. Order defines matrix index order.
#[derive(Debug, Clone)]
pub struct EngineRoster {
    entries: Vec<RosterEntry>,
    index: HashMap<String, usize>,
}

impl PartialEq for EngineRoster {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl EngineRoster {
    pub fn new(entries: Vec<RosterEntry>) -> Result<Self> {
        let mut index = HashMap::with_capacity(entries.len());
        for (position, entry) in entries.iter().enumerate() {
            if entry.id.trim().is_empty() {
                return Err(Error::EmptyId { position });
            }
            if let Some(r) = entry.reach_pct {
                if !(0.0..=100.0).contains(&r) {
                    return Err(Error::ReachOutOfRange {
                        id: entry.id.clone(),
                        value: r,
                    });
                }
            }
            if index.insert(entry.id.clone(), position).is_some() {
                return Err(Error::DuplicateId {
                    id: entry.id.clone(),
                });
            }
        }
        Ok(EngineRoster { entries, index })
    }

    /// Roster with bare ids, no names or reach.
    pub fn from_ids<I, S>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(
            ids.into_iter()
                .map(|id| {
                    let id = id.into();
                    RosterEntry::new(id.clone(), id)
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[RosterEntry] {
        &self.entries
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    pub fn id(&self, index: usize) -> &str {
        &self.entries[index].id
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Reach values in roster order; errors on the first missing one.
    pub fn reach_vector(&self) -> Result<Vec<f64>> {
        self.entries
            .iter()
            .map(|e| e.reach_pct.ok_or_else(|| Error::MissingReach(e.id.clone())))
            .collect()
    }
}

/// A single problem found in a candidate adjacency matrix. Coordinates are
/// zero-based; `Display` prints them one-based, matching row labels in files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonSquare { rows: usize, cols: Vec<usize> },
    RosterMismatch { roster: usize, matrix: usize },
    SelfLink { index: usize },
    NonBinary { row: usize, col: usize, value: u8 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonSquare { rows, cols } => {
                let mut widths = cols.clone();
                widths.dedup();
                let widths = widths
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("/");
                write!(f, "non-square: {rows} rows, {widths} columns")
            }
            Violation::RosterMismatch { roster, matrix } => {
                write!(
                    f,
                    "roster mismatch: roster has {roster} ids, matrix is {matrix}x{matrix}"
                )
            }
            Violation::SelfLink { index } => {
                write!(f, "self-link at ({},{})", index + 1, index + 1)
            }
            Violation::NonBinary { row, col, value } => {
                write!(f, "non-binary value {value} at ({},{})", row + 1, col + 1)
            }
        }
    }
}

/// Outcome of checking an adjacency matrix against a roster.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks shape, roster agreement, diagonal and cell values.
pub fn validate_snapshot(roster: &EngineRoster, adjacency: &[Vec<u8>]) -> Validation {
    let mut violations = Vec::new();
    let rows = adjacency.len();
    let cols: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    if cols.iter().any(|&c| c != rows) {
        violations.push(Violation::NonSquare { rows, cols });
    } else if rows != roster.len() {
        violations.push(Violation::RosterMismatch {
            roster: roster.len(),
            matrix: rows,
        });
    }
    for (i, row) in adjacency.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > 1 {
                violations.push(Violation::NonBinary {
                    row: i,
                    col: j,
                    value: v,
                });
            } else if i == j && v == 1 {
                violations.push(Violation::SelfLink { index: i });
            }
        }
    }
    Validation { violations }
}

/// Directed 0/1 adjacency over a roster: cell (i, j) set means i links to j.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSnapshot {
    date: NaiveDate,
    roster: Arc<EngineRoster>,
    cells: Vec<bool>,
}

impl NetworkSnapshot {
    pub fn new(date: NaiveDate, roster: Arc<EngineRoster>, adjacency: &[Vec<u8>]) -> Result<Self> {
        let validation = validate_snapshot(&roster, adjacency);
        if !validation.is_ok() {
            return Err(Error::InvalidSnapshot(validation.violations));
        }
        let cells = adjacency.iter().flatten().map(|&v| v == 1).collect();
        Ok(NetworkSnapshot {
            date,
            roster,
            cells,
        })
    }

    pub fn empty(date: NaiveDate, roster: Arc<EngineRoster>) -> Self {
        let n = roster.len();
        NetworkSnapshot {
            date,
            roster,
            cells: vec![false; n * n],
        }
    }

    /// Builds a snapshot from (source, target) index pairs.
    pub fn from_links(
        date: NaiveDate,
        roster: Arc<EngineRoster>,
        links: &[(usize, usize)],
    ) -> Result<Self> {
        let n = roster.len();
        let mut rows = vec![vec![0u8; n]; n];
        for &(i, j) in links {
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!(
                    "link ({i},{j}) outside a {n}-node roster"
                )));
            }
            rows[i][j] = 1;
        }
        Self::new(date, roster, &rows)
    }

    pub fn date(&self) -> NaiveDate {
        self.date
    }

    pub fn roster(&self) -> &Arc<EngineRoster> {
        &self.roster
    }

    pub fn len(&self) -> usize {
        self.roster.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roster.is_empty()
    }

    pub fn has_link(&self, from: usize, to: usize) -> bool {
        self.cells[from * self.len() + to]
    }

    pub fn link_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn successors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.len();
        self.cells[node * n..(node + 1) * n]
            .iter()
            .enumerate()
            .filter_map(|(j, &c)| c.then_some(j))
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.cells
            .chunks(self.len().max(1))
            .take(self.len())
            .map(|row| row.iter().map(|&c| u8::from(c)).collect())
            .collect()
    }

    /// Column sum for `id`.
    pub fn in_degree(&self, id: &str) -> Result<usize> {
        let j = self.roster.index_of(id)?;
        Ok((0..self.len()).filter(|&i| self.has_link(i, j)).count())
    }

    /// Row sum for `id`.
    pub fn out_degree(&self, id: &str) -> Result<usize> {
        let i = self.roster.index_of(id)?;
        Ok(self.successors(i).count())
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let n = self.len();
        (0..n)
            .map(|j| (0..n).filter(|&i| self.has_link(i, j)).count())
            .collect()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        (0..self.len())
            .map(|i| self.successors(i).count())
            .collect()
    }

    /// Off-diagonal complement: every absent link becomes present and vice versa.
    pub fn complement(&self) -> Self {
        let n = self.len();
        let cells = (0..n * n)
            .map(|k| k / n != k % n && !self.cells[k])
            .collect();
        NetworkSnapshot {
            date: self.date,
            roster: Arc::clone(&self.roster),
            cells,
        }
    }
}

/// Fraction of the n(n-1) possible directed links that are present.
pub fn density(snapshot: &NetworkSnapshot) -> Result<f64> {
    let n = snapshot.len();
    if n < 2 {
        return Err(Error::TooFewNodes {
            op: "density",
            needed: 2,
            got: n,
        });
    }
    Ok(snapshot.link_count() as f64 / (n * (n - 1)) as f64)
}

/// Standard deviation of the 0/1 cell variable at density `d`, sqrt(d(1-d)).
pub fn density_cell_stdev(d: f64) -> f64 {
    (d * (1.0 - d)).sqrt()
}

/// Normalized market shares, one per id, summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShareTable {
    ids: Vec<String>,
    shares: Vec<f64>,
}

impl ShareTable {
    pub fn new(ids: Vec<String>, shares: Vec<f64>) -> Result<Self> {
        if ids.len() != shares.len() {
            return Err(Error::InvalidInput(format!(
                "{} ids but {} shares",
                ids.len(),
                shares.len()
            )));
        }
        if ids.is_empty() {
            return Err(Error::EmptyInput("share table"));
        }
        let mut seen = HashMap::new();
        for id in &ids {
            if seen.insert(id.as_str(), ()).is_some() {
                return Err(Error::DuplicateId { id: id.clone() });
            }
        }
        if let Some(&bad) = shares.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(Error::InvalidInput(format!(
                "share {bad} is not a non-negative number"
            )));
        }
        let sum: f64 = shares.iter().sum();
        if (sum - 1.0).abs() > SHARE_SUM_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "shares sum to {sum}, expected 1"
            )));
        }
        Ok(ShareTable { ids, shares })
    }

    /// Normalizes non-negative weights by their total.
    pub fn from_weights(ids: Vec<String>, weights: &[f64]) -> Result<Self> {
        if let Some(&bad) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidInput(format!(
                "weight {bad} is not a non-negative number"
            )));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::AllZeroReach);
        }
        Self::new(ids, weights.iter().map(|w| w / total).collect())
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn shares(&self) -> &[f64] {
        &self.shares
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn share(&self, id: &str) -> Result<f64> {
        Ok(self.shares[self.index_of(id)?])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.ids
            .iter()
            .map(String::as_str)
            .zip(self.shares.iter().copied())
    }
}

/// s_i = reach_i / sum of reach over the roster.
pub fn shares_from_reach(roster: &EngineRoster) -> Result<ShareTable> {
    let reach = roster.reach_vector()?;
    ShareTable::from_weights(roster.ids().map(str::to_string).collect(), &reach)
}

/// Snapshots over one roster with strictly increasing dates.
#[derive(Debug, Clone)]
pub struct SnapshotSeries {
    snapshots: Vec<NetworkSnapshot>,
}

impl SnapshotSeries {
    pub fn new(snapshots: Vec<NetworkSnapshot>) -> Result<Self> {
        for pair in snapshots.windows(2) {
            if pair[0].roster() != pair[1].roster() {
                return Err(Error::Series(format!(
                    "snapshot {} uses a different roster",
                    pair[1].date()
                )));
            }
            if pair[1].date() <= pair[0].date() {
                return Err(Error::Series(format!(
                    "dates not strictly increasing: {} then {}",
                    pair[0].date(),
                    pair[1].date()
                )));
            }
        }
        Ok(SnapshotSeries { snapshots })
    }

    pub fn snapshots(&self) -> &[NetworkSnapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn roster(&self) -> Option<&Arc<EngineRoster>> {
        self.snapshots.first().map(NetworkSnapshot::roster)
    }
}
