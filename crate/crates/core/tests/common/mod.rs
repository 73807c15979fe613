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

#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;
use std::sync::Arc;

use chrono::NaiveDate;
use netconc::io::{parse_features, parse_roster, parse_snapshot};
use netconc::stats::FeatureTable;
use netconc::{EngineRoster, NetworkSnapshot};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn jun2000() -> Arc<EngineRoster> {
    Arc::new(parse_roster(&data_dir().join("jun2000_reach.csv")).unwrap())
}

pub fn aug2000() -> NetworkSnapshot {
    parse_snapshot(&data_dir().join("aug2000_adjacency.csv"), &jun2000()).unwrap()
}

pub fn features() -> FeatureTable {
    parse_features(&data_dir().join("features_aug2000.csv")).unwrap()
}

pub fn day(d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 8, d).unwrap()
}

pub fn ids(n: usize) -> Arc<EngineRoster> {
    Arc::new(EngineRoster::from_ids((0..n).map(|i| format!("v{i}"))).unwrap())
}

/// Snapshot from a row-major n×n mask; diagonal entries are ignored.
pub fn from_mask(n: usize, mask: &[bool]) -> NetworkSnapshot {
    let links: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && mask[i * n + j])
        .collect();
    NetworkSnapshot::from_links(day(12), ids(n), &links).unwrap()
}

/// Same graph with node `perm[i]` playing the role of node `i`.
pub fn relabel(g: &NetworkSnapshot, perm: &[usize]) -> NetworkSnapshot {
    let n = g.len();
    let mut links = Vec::new();
    for i in 0..n {
        for j in g.successors(i) {
            links.push((perm[i], perm[j]));
        }
    }
    NetworkSnapshot::from_links(g.date(), ids(n), &links).unwrap()
}

pub fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got}, want {want} (tolerance {tol})"
    );
}
