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

//! Multi-snapshot summaries: per-date centrality statistics, trend verdicts
//! and member-versus-rest degree comparisons.

use std::collections::BTreeSet;
use std::fmt;

use chrono::NaiveDate;
use serde::Serialize;

use crate::centrality::{
    betweenness, centrality_summary, indegree, information_centrality, outdegree,
};
use crate::error::{Error, Result};
use crate::model::{density, density_cell_stdev, SnapshotSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStdev {
    pub mean: f64,
    pub stdev: f64,
}

impl From<(f64, f64)> for MeanStdev {
    fn from((mean, stdev): (f64, f64)) -> Self {
        MeanStdev { mean, stdev }
    }
}

/// One date's worth of summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub date: NaiveDate,
    pub indegree: MeanStdev,
    pub outdegree: MeanStdev,
    pub betweenness: MeanStdev,
    pub information: MeanStdev,
    /// `stdev` is the Bernoulli cell deviation sqrt(d(1-d)).
    pub density: MeanStdev,
    pub sample_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesMetric {
    Indegree,
    Outdegree,
    Betweenness,
    Information,
    Density,
}

impl SeriesMetric {
    pub const ALL: [SeriesMetric; 5] = [
        SeriesMetric::Indegree,
        SeriesMetric::Outdegree,
        SeriesMetric::Betweenness,
        SeriesMetric::Information,
        SeriesMetric::Density,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SeriesMetric::Indegree => "indegree",
            SeriesMetric::Outdegree => "outdegree",
            SeriesMetric::Betweenness => "betweenness",
            SeriesMetric::Information => "information",
            SeriesMetric::Density => "density",
        }
    }

    fn pick(self, row: &SeriesRow) -> f64 {
        match self {
            SeriesMetric::Indegree => row.indegree.mean,
            SeriesMetric::Outdegree => row.outdegree.mean,
            SeriesMetric::Betweenness => row.betweenness.mean,
            SeriesMetric::Information => row.information.mean,
            SeriesMetric::Density => row.density.mean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Increasing,
    Decreasing,
    Flat,
    NonMonotonicUp,
    NonMonotonicDown,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Increasing => "increasing",
            Trend::Decreasing => "decreasing",
            Trend::Flat => "flat",
            Trend::NonMonotonicUp => "non-monotonic-up",
            Trend::NonMonotonicDown => "non-monotonic-down",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub rows: Vec<SeriesRow>,
    /// One verdict per metric; empty for a single-date series.
    pub trends: Vec<(SeriesMetric, Trend)>,
}

impl SeriesReport {
    pub fn values(&self, metric: SeriesMetric) -> Vec<f64> {
        self.rows.iter().map(|r| metric.pick(r)).collect()
    }
}

pub fn summarize_series(series: &SnapshotSeries) -> Result<SeriesReport> {
    if series.is_empty() {
        return Err(Error::EmptyInput("series summary"));
    }
    let rows = series
        .snapshots()
        .iter()
        .map(|snap| {
            let d = density(snap)?;
            Ok(SeriesRow {
                date: snap.date(),
                indegree: centrality_summary(&indegree(snap).scores)?.into(),
                outdegree: centrality_summary(&outdegree(snap).scores)?.into(),
                betweenness: centrality_summary(&betweenness(snap)?.scores)?.into(),
                information: centrality_summary(&information_centrality(snap)?.scores)?.into(),
                density: MeanStdev {
                    mean: d,
                    stdev: density_cell_stdev(d),
                },
                sample_size: snap.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = SeriesReport {
        rows,
        trends: Vec::new(),
    };
    if report.rows.len() >= 2 {
        report.trends = SeriesMetric::ALL
            .iter()
            .map(|&m| Ok((m, trend_of(&report.values(m))?)))
            .collect::<Result<_>>()?;
    }
    Ok(report)
}

/// Relative difference below which two values count as equal.
pub const TREND_TIE_TOLERANCE: f64 = 1e-12;

/// -1, 0 or 1 as `b` is below, level with or above `a`.
fn direction(a: f64, b: f64) -> i8 {
    if (b - a).abs() <= TREND_TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0) {
        0
    } else if b > a {
        1
    } else {
        -1
    }
}

/// Verdict for a sequence: direction from last versus first, monotone unless
/// some step moves strictly against that direction. Equal endpoints are flat.
/// Values within `TREND_TIE_TOLERANCE` of each other are treated as equal.
pub fn trend_of(values: &[f64]) -> Result<Trend> {
    if values.len() < 2 {
        return Err(Error::TooFewRows(values.len()));
    }
    let overall = direction(values[0], values[values.len() - 1]);
    let any_drop = values.windows(2).any(|w| direction(w[0], w[1]) < 0);
    let any_rise = values.windows(2).any(|w| direction(w[0], w[1]) > 0);
    Ok(if overall > 0 {
        if any_drop {
            Trend::NonMonotonicUp
        } else {
            Trend::Increasing
        }
    } else if overall < 0 {
        if any_rise {
            Trend::NonMonotonicDown
        } else {
            Trend::Decreasing
        }
    } else {
        Trend::Flat
    })
}

pub fn structuration_trend(report: &SeriesReport, metric: SeriesMetric) -> Result<Trend> {
    trend_of(&report.values(metric))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupDegrees {
    pub group_in: f64,
    pub group_out: f64,
    pub others_in: f64,
    pub others_out: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberDegrees {
    pub id: String,
    pub mean_in: f64,
    pub mean_out: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupComparison {
    pub members: Vec<String>,
    pub others: Vec<String>,
    pub per_snapshot: Vec<(NaiveDate, GroupDegrees)>,
    /// Averages of the per-snapshot means.
    pub overall: GroupDegrees,
    /// Each member's degrees averaged across snapshots.
    pub member_means: Vec<MemberDegrees>,
}

fn mean_of(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Mean in/out degree of `group_ids` versus the rest of the roster.
pub fn compare_groups(series: &SnapshotSeries, group_ids: &[&str]) -> Result<GroupComparison> {
    let roster = series
        .roster()
        .ok_or(Error::EmptyInput("group comparison"))?;
    let mut in_group = BTreeSet::new();
    for id in group_ids {
        in_group.insert(roster.index_of(id)?);
    }
    if in_group.is_empty() || in_group.len() == roster.len() {
        return Err(Error::InvalidGroup);
    }
    let n = roster.len();
    let members: Vec<usize> = in_group.iter().copied().collect();
    let others: Vec<usize> = (0..n).filter(|i| !in_group.contains(i)).collect();

    let mut per_snapshot = Vec::with_capacity(series.len());
    let mut member_in = vec![0.0; members.len()];
    let mut member_out = vec![0.0; members.len()];
    for snap in series.snapshots() {
        let ins = snap.in_degrees();
        let outs = snap.out_degrees();
        let avg = |idx: &[usize], d: &[usize]| mean_of(idx.iter().map(|&i| d[i] as f64));
        per_snapshot.push((
            snap.date(),
            GroupDegrees {
                group_in: avg(&members, &ins),
                group_out: avg(&members, &outs),
                others_in: avg(&others, &ins),
                others_out: avg(&others, &outs),
            },
        ));
        for (k, &i) in members.iter().enumerate() {
            member_in[k] += ins[i] as f64;
            member_out[k] += outs[i] as f64;
        }
    }
    let t = series.len() as f64;
    let overall = GroupDegrees {
        group_in: mean_of(per_snapshot.iter().map(|(_, g)| g.group_in)),
        group_out: mean_of(per_snapshot.iter().map(|(_, g)| g.group_out)),
        others_in: mean_of(per_snapshot.iter().map(|(_, g)| g.others_in)),
        others_out: mean_of(per_snapshot.iter().map(|(_, g)| g.others_out)),
    };
    let member_means = members
        .iter()
        .enumerate()
        .map(|(k, &i)| MemberDegrees {
            id: roster.id(i).to_string(),
            mean_in: member_in[k] / t,
            mean_out: member_out[k] / t,
        })
        .collect();
    Ok(GroupComparison {
        members: members.iter().map(|&i| roster.id(i).to_string()).collect(),
        others: others.iter().map(|&i| roster.id(i).to_string()).collect(),
        per_snapshot,
        overall,
        member_means,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::{EngineRoster, NetworkSnapshot};

    fn day(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2000, 8, d).unwrap()
    }

    fn roster(n: usize) -> Arc<EngineRoster> {
        Arc::new(EngineRoster::from_ids((0..n).map(|i| format!("v{i}"))).unwrap())
    }

    #[test]
    fn trend_verdicts() {
        let t = |v: &[f64]| trend_of(v).unwrap();
        assert_eq!(t(&[1.84, 2.26, 2.05, 2.11, 2.32]), Trend::NonMonotonicUp);
        assert_eq!(t(&[1.0, 2.0, 3.0]), Trend::Increasing);
        assert_eq!(t(&[2.0, 2.0, 2.0]), Trend::Flat);
        assert_eq!(t(&[3.0, 2.0, 1.0]), Trend::Decreasing);
        assert_eq!(t(&[2.32, 2.11, 2.05, 2.26, 1.84]), Trend::NonMonotonicDown);
        assert_eq!(t(&[1.0, 1.0, 2.0]), Trend::Increasing);
        assert_eq!(t(&[0.3, 0.1 + 0.2]), Trend::Flat);
        assert_eq!(t(&[1.0, 1.0 + 1e-9, 1.0 + 2e-9]), Trend::Increasing);
        assert!(matches!(trend_of(&[1.0]), Err(Error::TooFewRows(1))));
    }

    #[test]
    fn identical_snapshots_give_identical_rows() {
        let r = roster(4);
        let links = [(0, 1), (1, 2), (2, 3)];
        let a = NetworkSnapshot::from_links(day(12), r.clone(), &links).unwrap();
        let b = NetworkSnapshot::from_links(day(13), r, &links).unwrap();
        let report = summarize_series(&SnapshotSeries::new(vec![a, b]).unwrap()).unwrap();
        let (x, y) = (&report.rows[0], &report.rows[1]);
        assert_eq!(
            (x.indegree, x.betweenness, x.information),
            (y.indegree, y.betweenness, y.information)
        );
        assert!(report.trends.iter().all(|(_, t)| *t == Trend::Flat));
    }

    #[test]
    fn empty_network_row_is_zero() {
        let s = NetworkSnapshot::empty(day(12), roster(5));
        let report = summarize_series(&SnapshotSeries::new(vec![s]).unwrap()).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.indegree.mean, 0.0);
        assert_eq!(row.outdegree.mean, 0.0);
        assert_eq!(row.density.mean, 0.0);
        assert!(report.trends.is_empty());
    }

    #[test]
    fn group_must_be_proper_subset() {
        let s = NetworkSnapshot::empty(day(12), roster(3));
        let series = SnapshotSeries::new(vec![s]).unwrap();
        assert!(matches!(
            compare_groups(&series, &[]),
            Err(Error::InvalidGroup)
        ));
        assert!(matches!(
            compare_groups(&series, &["v0", "v1", "v2"]),
            Err(Error::InvalidGroup)
        ));
        assert!(matches!(
            compare_groups(&series, &["zz"]),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn isolate_group_scores_zero() {
        let s = NetworkSnapshot::from_links(day(12), roster(4), &[(0, 1), (1, 2)]).unwrap();
        let series = SnapshotSeries::new(vec![s]).unwrap();
        let g = compare_groups(&series, &["v3"]).unwrap();
        assert_eq!((g.overall.group_in, g.overall.group_out), (0.0, 0.0));
        assert!((g.overall.others_out - 2.0 / 3.0).abs() < 1e-15);
    }
}
