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

//! Readers and writers for roster, snapshot and feature-table files.
//!
//! Roster and feature files are ordinary CSV with `#` comment lines.
//! Snapshot files are a dated adjacency matrix:
//!
//! ```text
//! #date,2000-08-12
//! a,b,c
//! a,0,1,0
//! b,0,0,1
//! c,0,0,0
//! ```
//!
//! Every error carries the file, the 1-based line and, where it applies, the
//! 1-based column.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::model::{
    validate_snapshot, EngineRoster, NetworkSnapshot, RosterEntry, Validation, Violation,
};
use crate::stats::{FeatureRow, FeatureTable};

pub const ROSTER_HEADER: [&str; 4] = ["id", "name", "setup_year", "reach_pct"];
pub const FEATURE_HEADER: [&str; 6] = [
    "id",
    "setup_year",
    "non_personalized",
    "personalized",
    "platform",
    "reach_pct",
];

fn parse_err(path: &Path, line: usize, column: Option<usize>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    parse_err(path, line, None, e.to_string())
}

fn check_header(path: &Path, line: usize, got: &csv::StringRecord, want: &[&str]) -> Result<()> {
    let got: Vec<&str> = got.iter().collect();
    if got != want {
        return Err(parse_err(
            path,
            line,
            None,
            format!(
                "header is `{}`, expected `{}`",
                got.join(","),
                want.join(",")
            ),
        ));
    }
    Ok(())
}

fn optional<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    column: usize,
    cell: &str,
    what: &str,
) -> Result<Option<T>> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse().map(Some).map_err(|_| {
        parse_err(
            path,
            line,
            Some(column),
            format!("malformed {what} `{cell}`"),
        )
    })
}

/// Parses roster CSV text; `path` only labels diagnostics.
pub fn parse_roster_str(text: &str, path: &Path) -> Result<EngineRoster> {
    let mut reader = csv_reader(text);
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let header_line = header.position().map(|p| p.line() as usize).unwrap_or(1);
    check_header(path, header_line, &header, &ROSTER_HEADER)?;

    let mut entries: Vec<RosterEntry> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != ROSTER_HEADER.len() {
            return Err(parse_err(
                path,
                line,
                None,
                format!(
                    "expected {} fields, found {}",
                    ROSTER_HEADER.len(),
                    record.len()
                ),
            ));
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(parse_err(path, line, Some(1), "empty id"));
        }
        if let Some(k) = entries.iter().position(|e| e.id == id) {
            return Err(parse_err(
                path,
                line,
                Some(1),
                format!(
                    "duplicate id `{id}` (first on line {}, again on line {line})",
                    lines[k]
                ),
            ));
        }
        let reach: Option<f64> = optional(path, line, 4, &record[3], "reach_pct")?;
        if let Some(r) = reach {
            if !(0.0..=100.0).contains(&r) {
                return Err(parse_err(
                    path,
                    line,
                    Some(4),
                    format!("reach_pct {r} outside [0, 100]"),
                ));
            }
        }
        entries.push(RosterEntry {
            id,
            name: record[1].to_string(),
            setup_year: optional(path, line, 3, &record[2], "setup_year")?,
            reach_pct: reach,
        });
        lines.push(line);
    }
    EngineRoster::new(entries)
}

pub fn parse_roster(path: &Path) -> Result<EngineRoster> {
    parse_roster_str(&read(path)?, path)
}

/// Adjacency text as read, before any structural checks.
#[derive(Debug, Clone, PartialEq)]
pub struct RawAdjacency {
    pub date: NaiveDate,
    pub header: Vec<String>,
    pub header_line: usize,
    /// (line number, row id, cells) in file order.
    pub rows: Vec<(usize, String, Vec<u8>)>,
}

impl RawAdjacency {
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|(_, _, cells)| cells.clone())
            .collect()
    }
}

fn fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

/// Reads the date line, header and rows. Cells must be non-negative
/// integers here; the 0/1 rule is enforced later so that `validate` can list
/// every offending cell.
pub fn read_adjacency_str(text: &str, path: &Path) -> Result<RawAdjacency> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let (date_line, first) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, None, "empty snapshot file"))?;
    let date_fields = fields(first);
    if date_fields.len() != 2 || date_fields[0] != "#date" {
        return Err(parse_err(
            path,
            date_line,
            Some(1),
            "first line must be `#date,YYYY-MM-DD`",
        ));
    }
    let date = NaiveDate::parse_from_str(date_fields[1], "%Y-%m-%d").map_err(|_| {
        parse_err(
            path,
            date_line,
            Some(2),
            format!("malformed date `{}`", date_fields[1]),
        )
    })?;

    let (header_line, header_text) = lines
        .next()
        .ok_or_else(|| parse_err(path, date_line + 1, None, "missing header row of ids"))?;
    let header: Vec<String> = fields(header_text)
        .into_iter()
        .map(str::to_string)
        .collect();
    if let Some(k) = header.iter().position(String::is_empty) {
        return Err(parse_err(
            path,
            header_line,
            Some(k + 1),
            "empty id in header",
        ));
    }

    let mut rows = Vec::new();
    for (line, text) in lines {
        let f = fields(text);
        let id = f[0].to_string();
        let cells = f[1..]
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                cell.parse::<u8>().map_err(|_| {
                    parse_err(
                        path,
                        line,
                        Some(j + 2),
                        format!("malformed cell `{cell}`, expected 0 or 1"),
                    )
                })
            })
            .collect::<Result<Vec<u8>>>()?;
        rows.push((line, id, cells));
    }
    Ok(RawAdjacency {
        date,
        header,
        header_line,
        rows,
    })
}

fn check_labels(raw: &RawAdjacency, roster: &EngineRoster, path: &Path) -> Result<()> {
    let expected: Vec<&str> = roster.ids().collect();
    if raw.header.len() != expected.len() {
        return Err(parse_err(
            path,
            raw.header_line,
            None,
            format!(
                "header has {} ids, roster has {}",
                raw.header.len(),
                expected.len()
            ),
        ));
    }
    for (k, (got, want)) in raw.header.iter().zip(&expected).enumerate() {
        if got != want {
            return Err(parse_err(
                path,
                raw.header_line,
                Some(k + 1),
                format!("header id `{got}` does not match roster id `{want}`"),
            ));
        }
    }
    if raw.rows.len() != expected.len() {
        let line = raw.rows.last().map_or(raw.header_line, |r| r.0);
        return Err(parse_err(
            path,
            line,
            None,
            format!(
                "{} matrix rows for {} roster ids",
                raw.rows.len(),
                expected.len()
            ),
        ));
    }
    for ((line, id, _), want) in raw.rows.iter().zip(&expected) {
        if id != want {
            return Err(parse_err(
                path,
                *line,
                Some(1),
                format!("row id `{id}` does not match roster id `{want}`"),
            ));
        }
    }
    Ok(())
}

fn locate(raw: &RawAdjacency, v: &Violation, path: &Path) -> Error {
    let (line, column) = match *v {
        Violation::SelfLink { index } => (raw.rows[index].0, Some(index + 2)),
        Violation::NonBinary { row, col, .. } => (raw.rows[row].0, Some(col + 2)),
        Violation::NonSquare { ref cols, .. } => {
            let bad = cols.iter().position(|&c| c != raw.rows.len()).unwrap_or(0);
            (raw.rows.get(bad).map_or(raw.header_line, |r| r.0), None)
        }
        Violation::RosterMismatch { .. } => (raw.header_line, None),
    };
    parse_err(path, line, column, v.to_string())
}

fn violation_error(raw: &RawAdjacency, validation: &Validation, path: &Path) -> Error {
    locate(raw, &validation.violations[0], path)
}

/// Every problem in a snapshot file, each located in the file; empty when the
/// file is valid. Without a roster the header row supplies the ids.
pub fn snapshot_diagnostics(
    text: &str,
    path: &Path,
    roster: Option<&Arc<EngineRoster>>,
) -> Vec<Error> {
    let raw = match read_adjacency_str(text, path) {
        Ok(raw) => raw,
        Err(e) => return vec![e],
    };
    let roster = match roster {
        Some(r) => Arc::clone(r),
        None => match EngineRoster::from_ids(raw.header.iter().cloned()) {
            Ok(r) => Arc::new(r),
            Err(e) => return vec![parse_err(path, raw.header_line, None, e.to_string())],
        },
    };
    if let Err(e) = check_labels(&raw, &roster, path) {
        return vec![e];
    }
    validate_snapshot(&roster, &raw.matrix())
        .violations
        .iter()
        .map(|v| locate(&raw, v, path))
        .collect()
}

/// Parses snapshot text against `roster`; header and row ids must list the
/// roster ids in order.
pub fn parse_snapshot_str(
    text: &str,
    path: &Path,
    roster: &Arc<EngineRoster>,
) -> Result<NetworkSnapshot> {
    let raw = read_adjacency_str(text, path)?;
    check_labels(&raw, roster, path)?;
    let matrix = raw.matrix();
    let validation = validate_snapshot(roster, &matrix);
    if !validation.is_ok() {
        return Err(violation_error(&raw, &validation, path));
    }
    NetworkSnapshot::new(raw.date, Arc::clone(roster), &matrix)
}

pub fn parse_snapshot(path: &Path, roster: &Arc<EngineRoster>) -> Result<NetworkSnapshot> {
    parse_snapshot_str(&read(path)?, path, roster)
}

/// Parses snapshot text, taking the roster from its header row.
pub fn parse_snapshot_standalone_str(text: &str, path: &Path) -> Result<NetworkSnapshot> {
    let raw = read_adjacency_str(text, path)?;
    let mut seen = std::collections::HashMap::new();
    for (k, id) in raw.header.iter().enumerate() {
        if let Some(first) = seen.insert(id.as_str(), k) {
            return Err(parse_err(
                path,
                raw.header_line,
                Some(k + 1),
                format!("duplicate id `{id}` (columns {} and {})", first + 1, k + 1),
            ));
        }
    }
    let roster = Arc::new(EngineRoster::from_ids(raw.header.iter().cloned())?);
    check_labels(&raw, &roster, path)?;
    let matrix = raw.matrix();
    let validation = validate_snapshot(&roster, &matrix);
    if !validation.is_ok() {
        return Err(violation_error(&raw, &validation, path));
    }
    NetworkSnapshot::new(raw.date, roster, &matrix)
}

pub fn parse_snapshot_standalone(path: &Path) -> Result<NetworkSnapshot> {
    parse_snapshot_standalone_str(&read(path)?, path)
}

/// Parses a feature table. Columns are `id`, `setup_year`, then one 0/1 column
/// per feature, then an optional trailing `reach_pct`.
pub fn parse_features_str(text: &str, path: &Path) -> Result<FeatureTable> {
    let mut reader = csv_reader(text);
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let header_line = header.position().map(|p| p.line() as usize).unwrap_or(1);
    let names: Vec<&str> = header.iter().collect();
    if names.len() < 3 || names[0] != "id" || names[1] != "setup_year" {
        return Err(parse_err(
            path,
            header_line,
            None,
            format!(
                "header must start with `id,setup_year`, got `{}`",
                names.join(",")
            ),
        ));
    }
    let has_reach = names.last() == Some(&"reach_pct");
    let feature_end = if has_reach {
        names.len() - 1
    } else {
        names.len()
    };
    let feature_names: Vec<String> = names[2..feature_end]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if feature_names.is_empty() {
        return Err(parse_err(path, header_line, None, "no feature columns"));
    }

    let mut rows: Vec<FeatureRow> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != names.len() {
            return Err(parse_err(
                path,
                line,
                None,
                format!("expected {} fields, found {}", names.len(), record.len()),
            ));
        }
        let id = record[0].to_string();
        if let Some(k) = rows.iter().position(|r| r.id == id) {
            return Err(parse_err(
                path,
                line,
                Some(1),
                format!(
                    "duplicate id `{id}` (first on line {}, again on line {line})",
                    lines[k]
                ),
            ));
        }
        let setup_year: i32 = record[1].parse().map_err(|_| {
            parse_err(
                path,
                line,
                Some(2),
                format!("malformed setup_year `{}`", &record[1]),
            )
        })?;
        let features = (2..feature_end)
            .map(|c| match &record[c] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(parse_err(
                    path,
                    line,
                    Some(c + 1),
                    format!("malformed flag `{other}`, expected 0 or 1"),
                )),
            })
            .collect::<Result<Vec<bool>>>()?;
        let reach_pct = if has_reach {
            optional(
                path,
                line,
                names.len(),
                &record[names.len() - 1],
                "reach_pct",
            )?
        } else {
            None
        };
        rows.push(FeatureRow {
            id,
            setup_year,
            features,
            reach_pct,
        });
        lines.push(line);
    }
    FeatureTable::new(feature_names, rows)
        .map_err(|e| parse_err(path, header_line, None, e.to_string()))
}

pub fn parse_features(path: &Path) -> Result<FeatureTable> {
    parse_features_str(&read(path)?, path)
}

pub fn roster_to_csv(roster: &EngineRoster) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(ROSTER_HEADER).expect("write to Vec");
    for e in roster.entries() {
        writer
            .write_record([
                e.id.clone(),
                e.name.clone(),
                e.setup_year.map(|y| y.to_string()).unwrap_or_default(),
                e.reach_pct.map(|r| r.to_string()).unwrap_or_default(),
            ])
            .expect("write to Vec");
    }
    String::from_utf8(writer.into_inner().expect("flush Vec")).expect("utf-8 CSV")
}

pub fn snapshot_to_csv(snapshot: &NetworkSnapshot) -> String {
    let ids: Vec<&str> = snapshot.roster().ids().collect();
    let mut out = format!(
        "#date,{}\n{}\n",
        snapshot.date().format("%Y-%m-%d"),
        ids.join(",")
    );
    for (id, row) in ids.iter().zip(snapshot.rows()) {
        out.push_str(id);
        for cell in row {
            out.push(',');
            out.push(if cell == 1 { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

/// Bundled data files, addressable by short name from the command line.
pub mod fixtures {
    pub const AUG2000_ADJACENCY: &str = include_str!("../../../data/aug2000_adjacency.csv");
    pub const JUN2000_REACH: &str = include_str!("../../../data/jun2000_reach.csv");
    pub const FEATURES_AUG2000: &str = include_str!("../../../data/features_aug2000.csv");

    /// Contents and canonical file name for a short fixture name.
    pub fn lookup(name: &str) -> Option<(&'static str, &'static str)> {
        match name {
            "aug2000" | "aug2000_adjacency" => {
                Some((AUG2000_ADJACENCY, "data/aug2000_adjacency.csv"))
            }
            "jun2000" | "jun2000_reach" => Some((JUN2000_REACH, "data/jun2000_reach.csv")),
            "features" | "features_aug2000" => {
                Some((FEATURES_AUG2000, "data/features_aug2000.csv"))
            }
            _ => None,
        }
    }
}

/// Reads `arg` as a file path, falling back to a bundled fixture name when no
/// such file exists. Returns the text and the path to report in diagnostics.
pub fn resolve_input(arg: &str) -> Result<(String, PathBuf)> {
    let path = PathBuf::from(arg);
    if path.exists() {
        return Ok((read(&path)?, path));
    }
    match fixtures::lookup(arg) {
        Some((text, name)) => Ok((text.to_string(), PathBuf::from(name))),
        None => Err(Error::Io {
            path,
            source: std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "no such file or bundled fixture",
            ),
        }),
    }
}
