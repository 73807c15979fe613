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

//! Degree, betweenness and information centrality over a snapshot.
//!
//! Betweenness runs on the directed graph and is reported as a percentage of
//! the (n-1)(n-2) ordered pairs that could route through a node. Information
//! centrality follows Stephenson and Zelen on the symmetrized graph, computed
//! per connected component with isolated nodes scored 0.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::NetworkSnapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Indegree,
    Outdegree,
    BetweennessNormalized,
    Information,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Indegree,
        Metric::Outdegree,
        Metric::BetweennessNormalized,
        Metric::Information,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Indegree => "indegree",
            Metric::Outdegree => "outdegree",
            Metric::BetweennessNormalized => "betweenness",
            Metric::Information => "information",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indegree" => Ok(Metric::Indegree),
            "outdegree" => Ok(Metric::Outdegree),
            "betweenness" | "betweenness_normalized" => Ok(Metric::BetweennessNormalized),
            "information" => Ok(Metric::Information),
            other => Err(Error::InvalidInput(format!("unknown metric `{other}`"))),
        }
    }
}

/// Per-node scores for one metric plus their population mean and stdev.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityReport {
    pub metric: Metric,
    pub ids: Vec<String>,
    pub scores: Vec<f64>,
    pub mean: f64,
    pub stdev: f64,
    pub convention_notes: String,
}

impl CentralityReport {
    fn new(snapshot: &NetworkSnapshot, metric: Metric, scores: Vec<f64>, notes: &str) -> Self {
        let (mean, stdev) = centrality_summary(&scores).unwrap_or((0.0, 0.0));
        CentralityReport {
            metric,
            ids: snapshot.roster().ids().map(str::to_string).collect(),
            scores,
            mean,
            stdev,
            convention_notes: notes.to_string(),
        }
    }

    pub fn score(&self, id: &str) -> Option<f64> {
        self.ids
            .iter()
            .position(|x| x == id)
            .map(|i| self.scores[i])
    }
}

/// Computes `metric` for every node of `snapshot`.
pub fn centrality(snapshot: &NetworkSnapshot, metric: Metric) -> Result<CentralityReport> {
    match metric {
        Metric::Indegree | Metric::Outdegree => Ok(degree_report(snapshot, metric)),
        Metric::BetweennessNormalized => betweenness(snapshot),
        Metric::Information => information_centrality(snapshot),
    }
}

fn degree_report(snapshot: &NetworkSnapshot, metric: Metric) -> CentralityReport {
    let (degrees, notes) = match metric {
        Metric::Outdegree => (snapshot.out_degrees(), "row sums: links placed by the node"),
        _ => (
            snapshot.in_degrees(),
            "column sums: links pointing at the node",
        ),
    };
    let scores = degrees.into_iter().map(|d| d as f64).collect();
    CentralityReport::new(snapshot, metric, scores, notes)
}

pub fn indegree(snapshot: &NetworkSnapshot) -> CentralityReport {
    degree_report(snapshot, Metric::Indegree)
}

pub fn outdegree(snapshot: &NetworkSnapshot) -> CentralityReport {
    degree_report(snapshot, Metric::Outdegree)
}

/// Raw directed betweenness: for each node v, the sum over ordered pairs
/// (s, t) with s, t, v distinct of the fraction of shortest s->t paths that
/// pass through v. Unreachable pairs contribute nothing.
///
/// One breadth-first pass per source (Brandes). Path counts are exact
/// integers; an overflow of `u128` is reported rather than wrapped.
pub fn betweenness_raw(snapshot: &NetworkSnapshot) -> Result<Vec<f64>> {
    let n = snapshot.len();
    let adjacency: Vec<Vec<usize>> = (0..n).map(|i| snapshot.successors(i).collect()).collect();
    let mut raw = vec![0.0; n];

    let mut sigma = vec![0u128; n];
    let mut dist = vec![usize::MAX; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dependency = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for source in 0..n {
        sigma.fill(0);
        dist.fill(usize::MAX);
        dependency.fill(0.0);
        preds.iter_mut().for_each(Vec::clear);
        order.clear();

        sigma[source] = 1;
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] = sigma[w].checked_add(sigma[v]).ok_or_else(|| {
                        Error::InvalidInput("shortest-path count overflows u128".into())
                    })?;
                    preds[w].push(v);
                }
            }
        }

        for &w in order.iter().rev() {
            for &v in &preds[w] {
                dependency[v] += (sigma[v] as f64 / sigma[w] as f64) * (1.0 + dependency[w]);
            }
            if w != source {
                raw[w] += dependency[w];
            }
        }
    }
    Ok(raw)
}

/// Directed betweenness as a percentage: 100 * raw / ((n-1)(n-2)).
pub fn betweenness(snapshot: &NetworkSnapshot) -> Result<CentralityReport> {
    let n = snapshot.len();
    if n < 3 {
        return Err(Error::TooFewNodes {
            op: "betweenness",
            needed: 3,
            got: n,
        });
    }
    let scale = 100.0 / ((n - 1) * (n - 2)) as f64;
    let scores = betweenness_raw(snapshot)?
        .into_iter()
        .map(|r| r * scale)
        .collect();
    Ok(CentralityReport::new(
        snapshot,
        Metric::BetweennessNormalized,
        scores,
        "directed geodesics; percentage of (n-1)(n-2) ordered pairs",
    ))
}

/// Connected components of the symmetrized graph, each sorted by index.
pub fn symmetric_components(snapshot: &NetworkSnapshot) -> Vec<Vec<usize>> {
    let n = snapshot.len();
    let mut component = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![start];
        component[start] = id;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for (w, slot) in component.iter_mut().enumerate() {
                if *slot == usize::MAX && (snapshot.has_link(v, w) || snapshot.has_link(w, v)) {
                    *slot = id;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Stephenson-Zelen information centrality for one connected undirected
/// graph given as a symmetric 0/1 matrix.
fn information_connected(adjacency: &DMatrix<f64>) -> Result<Vec<f64>> {
    let m = adjacency.nrows();
    let mut b = DMatrix::from_element(m, m, 1.0);
    for i in 0..m {
        let degree: f64 = adjacency.row(i).sum();
        b[(i, i)] += degree;
        for j in 0..m {
            b[(i, j)] -= adjacency[(i, j)];
        }
    }
    let c = b.try_inverse().ok_or(Error::SingularMatrix)?;
    let trace = c.trace();
    let row_sum: f64 = c.row(0).sum();
    let offset = (trace - 2.0 * row_sum) / m as f64;
    Ok((0..m).map(|i| 1.0 / (c[(i, i)] + offset)).collect())
}

pub fn information_centrality(snapshot: &NetworkSnapshot) -> Result<CentralityReport> {
    let n = snapshot.len();
    if n == 0 {
        return Err(Error::EmptyInput("information centrality"));
    }
    let mut scores = vec![0.0; n];
    for members in symmetric_components(snapshot) {
        if members.len() < 2 {
            continue;
        }
        let m = members.len();
        let adjacency = DMatrix::from_fn(m, m, |a, b| {
            let (i, j) = (members[a], members[b]);
            if i != j && (snapshot.has_link(i, j) || snapshot.has_link(j, i)) {
                1.0
            } else {
                0.0
            }
        });
        for (k, score) in information_connected(&adjacency)?.into_iter().enumerate() {
            scores[members[k]] = score;
        }
    }
    Ok(CentralityReport::new(
        snapshot,
        Metric::Information,
        scores,
        "symmetrized links; B = D - A + J per connected component; isolates scored 0",
    ))
}

/// Population mean and standard deviation.
pub fn centrality_summary(scores: &[f64]) -> Result<(f64, f64)> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("centrality summary"));
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let var = scores.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedScore {
    pub id: String,
    pub score: f64,
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// The `k` highest scores in descending order, roster order breaking ties.
/// When the k-th score is shared by later nodes, the whole tie block is kept.
pub fn top_k(report: &CentralityReport, k: usize) -> Result<Vec<RankedScore>> {
    let n = report.scores.len();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| report.scores[b].total_cmp(&report.scores[a]));
    let cutoff = report.scores[order[k - 1]];
    let end = k + order[k..]
        .iter()
        .take_while(|&&i| tied(report.scores[i], cutoff))
        .count();
    Ok(order[..end]
        .iter()
        .map(|&i| RankedScore {
            id: report.ids[i].clone(),
            score: report.scores[i],
        })
        .collect())
}

/// Groups consecutive tied entries, e.g. for "Go, Lycos, Yahoo(3)".
pub fn tie_blocks(ranked: &[RankedScore]) -> Vec<Vec<&RankedScore>> {
    let mut blocks: Vec<Vec<&RankedScore>> = Vec::new();
    for entry in ranked {
        match blocks.last_mut() {
            Some(block) if tied(block[0].score, entry.score) => block.push(entry),
            _ => blocks.push(vec![entry]),
        }
    }
    blocks
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use chrono::NaiveDate;

    use super::*;
    use crate::model::EngineRoster;

    fn snap(n: usize, links: &[(usize, usize)]) -> NetworkSnapshot {
        let roster = Arc::new(EngineRoster::from_ids((0..n).map(|i| format!("v{i}"))).unwrap());
        let date = NaiveDate::from_ymd_opt(2000, 8, 12).unwrap();
        NetworkSnapshot::from_links(date, roster, links).unwrap()
    }

    #[test]
    fn middle_of_three_path_gets_half() {
        let r = betweenness(&snap(3, &[(0, 1), (1, 2)])).unwrap();
        assert_eq!(r.scores, vec![0.0, 50.0, 0.0]);
    }

    #[test]
    fn directed_path_closed_form() {
        for n in 3..12 {
            let links: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
            let raw = betweenness_raw(&snap(n, &links)).unwrap();
            for (i, r) in raw.iter().enumerate() {
                let pos = i + 1;
                assert_eq!(*r, ((pos - 1) * (n - pos)) as f64, "n={n} pos={pos}");
            }
        }
    }

    #[test]
    fn directed_cycle_is_uniform() {
        let n = 7;
        let links: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let raw = betweenness_raw(&snap(n, &links)).unwrap();
        // Each of the n(n-1) ordered pairs at distance d has d-1 interior nodes.
        let expected = (1..n).map(|d| (d - 1) as f64).sum::<f64>();
        assert!(raw.iter().all(|&r| r == expected));
    }

    #[test]
    fn split_geodesics_share_credit() {
        // 0 -> {1, 2} -> 3: two shortest paths, each middle node carries half.
        let raw = betweenness_raw(&snap(4, &[(0, 1), (0, 2), (1, 3), (2, 3)])).unwrap();
        assert_eq!(raw, vec![0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn betweenness_needs_three_nodes() {
        assert!(matches!(
            betweenness(&snap(2, &[(0, 1)])),
            Err(Error::TooFewNodes { needed: 3, .. })
        ));
    }

    #[test]
    fn information_on_five_cycle_is_uniform() {
        let r =
            information_centrality(&snap(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])).unwrap();
        assert!(r.scores.iter().all(|&s| (s - r.scores[0]).abs() < 1e-12));
        assert!(r.scores[0] > 0.0);
    }

    #[test]
    fn information_on_three_path_matches_hand_inverse() {
        // B = D - A + J for the path 0-1-2 is [[2,0,1],[0,3,0],[1,0,2]], whose
        // inverse is [[2/3,0,-1/3],[0,1/3,0],[-1/3,0,2/3]]. T = 5/3, R = 1/3,
        // offset (T - 2R)/3 = 1/3, so the scores are 1, 3/2 and 1.
        let r = information_centrality(&snap(3, &[(0, 1), (1, 2)])).unwrap();
        let expected = [1.0, 1.5, 1.0];
        for (s, e) in r.scores.iter().zip(expected) {
            assert!((s - e).abs() < 1e-12, "{s} vs {e}");
        }
    }

    #[test]
    fn information_scores_isolates_zero() {
        let r = information_centrality(&snap(4, &[(0, 1), (1, 2)])).unwrap();
        assert_eq!(r.scores[3], 0.0);
        assert!((r.scores[1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn summary_is_population() {
        assert_eq!(centrality_summary(&[5.0, 5.0, 5.0]).unwrap(), (5.0, 0.0));
        let (m, s) = centrality_summary(&[1.0, 3.0]).unwrap();
        assert_eq!((m, s), (2.0, 1.0));
        assert!(matches!(centrality_summary(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn top_k_keeps_tie_block() {
        let s = snap(5, &[(1, 0), (2, 0), (3, 1), (4, 2)]);
        let ranked = top_k(&indegree(&s), 2).unwrap();
        let ids: Vec<_> = ranked.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["v0", "v1", "v2"]);
        assert_eq!(tie_blocks(&ranked).len(), 2);
    }

    #[test]
    fn top_k_full_ordering_and_bounds() {
        let s = snap(4, &[(0, 1), (2, 1), (3, 1), (0, 2)]);
        let report = indegree(&s);
        let all = top_k(&report, 4).unwrap();
        let scores: Vec<_> = all.iter().map(|r| r.score).collect();
        assert_eq!(scores, vec![3.0, 1.0, 0.0, 0.0]);
        assert!(matches!(top_k(&report, 5), Err(Error::KOutOfRange { .. })));
        assert!(top_k(&report, 0).is_err());
    }

    #[test]
    fn metric_names_parse() {
        for m in Metric::ALL {
            assert_eq!(m.as_str().parse::<Metric>().unwrap(), m);
        }
        assert!("pagerank".parse::<Metric>().is_err());
    }
}
