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

//! Command-line surface: argument parsing, input loading and report emission.
//!
//! Exit status is 0 on success, 1 when an input file or the data in it is
//! unusable, and 2 when the invocation itself is wrong. Nothing is written to
//! stdout unless the whole report was produced.

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::centrality::{centrality, tie_blocks, top_k, Metric, RankedScore};
use crate::concentration::{
    classify_concentration, concentration_report, merger_screen, overlap_sensitivity,
    DEFAULT_MERGER_THRESHOLD, DEFAULT_OVERLAP,
};
use crate::error::Error;
use crate::io::{
    parse_features_str, parse_roster_str, parse_snapshot_standalone_str, parse_snapshot_str,
    resolve_input, snapshot_diagnostics,
};
use crate::longitudinal::{compare_groups, summarize_series, GroupComparison, SeriesReport};
use crate::model::{shares_from_reach, EngineRoster, NetworkSnapshot, ShareTable, SnapshotSeries};
use crate::report::{csv, fixed2, full, json, key_values, table};
use crate::stats::{regress_features, regress_reach, FeatureRegression, OlsFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Centrality,
    Concentration,
    MergerScreen,
    Sensitivity,
    Trend,
    Regress,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Inputs may be file paths or the bundled fixture names `aug2000`,
/// `jun2000` and `features`.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "netconc",
    version,
    about = "Centrality and concentration measures over directed interconnection networks"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,

    /// Roster CSV: id,name,setup_year,reach_pct.
    #[arg(long)]
    pub roster: Option<String>,

    /// Adjacency snapshot; repeat for a dated series.
    #[arg(long = "snapshot")]
    pub snapshots: Vec<String>,

    /// Feature table CSV for `regress`.
    #[arg(long)]
    pub features: Option<String>,

    /// indegree, outdegree, betweenness or information; all when omitted.
    #[arg(long, value_parser = parse_metric)]
    pub metric: Option<Metric>,

    #[arg(long, default_value_t = DEFAULT_OVERLAP)]
    pub overlap: f64,

    /// Ranking depth for `centrality`, k of CR_k for `concentration`.
    #[arg(long = "top-k", default_value_t = 4)]
    pub top_k: usize,

    #[arg(long, default_value_t = DEFAULT_MERGER_THRESHOLD)]
    pub threshold: f64,

    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Comma-separated ids compared against the rest in `trend`.
    #[arg(long, value_delimiter = ',')]
    pub group: Vec<String>,

    /// Comma-separated overlaps for `sensitivity`; 0.0 through 0.9 by default.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Data(Error),
    Diagnostics(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type Run<T> = std::result::Result<T, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}

pub fn run(config: &RunConfig) -> Outcome {
    let result = match config.command {
        Command::Centrality => cmd_centrality(config),
        Command::Concentration => cmd_concentration(config),
        Command::MergerScreen => cmd_merger_screen(config),
        Command::Sensitivity => cmd_sensitivity(config),
        Command::Trend => cmd_trend(config),
        Command::Regress => cmd_regress(config),
        Command::Validate => cmd_validate(config),
    };
    match result {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(Failure::Usage(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Data(e)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        Err(Failure::Diagnostics(lines)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: lines.iter().map(|l| format!("error: {l}\n")).collect(),
        },
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn require<'a>(value: &'a Option<String>, flag: &str, command: &str) -> Run<&'a str> {
    value
        .as_deref()
        .ok_or_else(|| usage(format!("`{command}` requires --{flag}")))
}

fn one_snapshot<'a>(config: &'a RunConfig, command: &str) -> Run<&'a str> {
    match config.snapshots.as_slice() {
        [one] => Ok(one),
        [] => Err(usage(format!("`{command}` requires --snapshot"))),
        _ => Err(usage(format!("`{command}` takes a single --snapshot"))),
    }
}

fn check_overlap(w: f64) -> Run<()> {
    if (0.0..=1.0).contains(&w) {
        Ok(())
    } else {
        Err(usage(format!("--overlap {w} outside [0, 1]")))
    }
}

fn load_roster(arg: &str) -> Run<Arc<EngineRoster>> {
    let (text, path) = resolve_input(arg)?;
    Ok(Arc::new(parse_roster_str(&text, &path)?))
}

fn load_snapshot(arg: &str, roster: Option<&Arc<EngineRoster>>) -> Run<NetworkSnapshot> {
    let (text, path) = resolve_input(arg)?;
    Ok(match roster {
        Some(r) => parse_snapshot_str(&text, &path, r)?,
        None => parse_snapshot_standalone_str(&text, &path)?,
    })
}

#[derive(Serialize)]
struct RankedRow {
    rank: usize,
    id: String,
    score: f64,
}

#[derive(Serialize)]
struct CentralityOut {
    metric: Metric,
    mean: f64,
    stdev: f64,
    convention_notes: String,
    top: Vec<RankedRow>,
    scores: Vec<RankedScore>,
}

/// Competition ranking: tied entries share the rank of the first of them.
fn ranked(top: &[RankedScore]) -> Vec<RankedRow> {
    let mut rows = Vec::with_capacity(top.len());
    for block in tie_blocks(top) {
        let rank = rows.len() + 1;
        rows.extend(block.into_iter().map(|r| RankedRow {
            rank,
            id: r.id.clone(),
            score: r.score,
        }));
    }
    rows
}

fn cmd_centrality(config: &RunConfig) -> Run<String> {
    let roster = config.roster.as_deref().map(load_roster).transpose()?;
    let snapshot = load_snapshot(one_snapshot(config, "centrality")?, roster.as_ref())?;
    let n = snapshot.len();
    if config.top_k == 0 || config.top_k > n {
        return Err(usage(format!("--top-k {} outside 1..={n}", config.top_k)));
    }
    let metrics = config
        .metric
        .map_or_else(|| Metric::ALL.to_vec(), |m| vec![m]);
    let mut out = Vec::with_capacity(metrics.len());
    for metric in metrics {
        let report = centrality(&snapshot, metric)?;
        let top = ranked(&top_k(&report, config.top_k)?);
        let scores = report
            .ids
            .iter()
            .zip(&report.scores)
            .map(|(id, &score)| RankedScore {
                id: id.clone(),
                score,
            })
            .collect();
        out.push(CentralityOut {
            metric,
            mean: report.mean,
            stdev: report.stdev,
            convention_notes: report.convention_notes,
            top,
            scores,
        });
    }
    let headers = ["metric", "rank", "id", "score"];
    let rows = |fmt: fn(f64) -> String| -> Vec<Vec<String>> {
        out.iter()
            .flat_map(|m| {
                m.top.iter().map(move |r| {
                    vec![
                        m.metric.to_string(),
                        r.rank.to_string(),
                        r.id.clone(),
                        fmt(r.score),
                    ]
                })
            })
            .collect()
    };
    Ok(match config.format {
        Format::Table => table(&headers, &rows(fixed2)),
        Format::Csv => csv(&headers, &rows(full)),
        Format::Json => json(&out),
    })
}

fn cmd_concentration(config: &RunConfig) -> Run<String> {
    let roster = load_roster(require(&config.roster, "roster", "concentration")?)?;
    let snapshot = match config.snapshots.as_slice() {
        [] => None,
        _ => Some(load_snapshot(
            one_snapshot(config, "concentration")?,
            Some(&roster),
        )?),
    };
    check_overlap(config.overlap)?;
    if config.top_k == 0 || config.top_k > roster.len() {
        return Err(usage(format!(
            "--top-k {} outside 1..={}",
            config.top_k,
            roster.len()
        )));
    }
    let report = concentration_report(&roster, snapshot.as_ref(), config.top_k, config.overlap)?;
    let fmt: fn(f64) -> String = if config.format == Format::Table {
        fixed2
    } else {
        full
    };
    let mut pairs = vec![
        (format!("cr{}", report.k), fmt(report.cr_k)),
        ("hhi".to_string(), fmt(report.hhi)),
        (
            "classification".to_string(),
            report.classification.to_string(),
        ),
    ];
    if let Some(n) = &report.nahhi {
        pairs.push(("overlap".to_string(), fmt(n.overlap)));
        pairs.push(("nahhi".to_string(), fmt(n.value)));
        pairs.push((
            "nahhi_classification".to_string(),
            n.classification.to_string(),
        ));
    }
    Ok(match config.format {
        Format::Table => key_values(&pairs),
        Format::Csv => {
            let rows: Vec<Vec<String>> = pairs.into_iter().map(|(k, v)| vec![k, v]).collect();
            csv(&["measure", "value"], &rows)
        }
        Format::Json => json(&report),
    })
}

/// Shares reordered largest first, roster order among equals.
fn by_descending_share(shares: &ShareTable) -> Run<ShareTable> {
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| shares.shares()[b].total_cmp(&shares.shares()[a]));
    Ok(ShareTable::new(
        order.iter().map(|&i| shares.ids()[i].clone()).collect(),
        order.iter().map(|&i| shares.shares()[i]).collect(),
    )?)
}

fn cmd_merger_screen(config: &RunConfig) -> Run<String> {
    let roster = load_roster(require(&config.roster, "roster", "merger-screen")?)?;
    if !config.threshold.is_finite() || config.threshold < 0.0 {
        return Err(usage(format!(
            "--threshold {} must be a non-negative number",
            config.threshold
        )));
    }
    let shares = by_descending_share(&shares_from_reach(&roster)?)?;
    let screen = merger_screen(&shares, config.threshold)?;
    Ok(match config.format {
        Format::Table => {
            let rows: Vec<Vec<String>> = screen
                .flagged_pairs()
                .map(|p| vec![p.firm_a.clone(), p.firm_b.clone(), fixed2(p.delta)])
                .collect();
            let mut text = table(&["firm_a", "firm_b", "delta"], &rows);
            text.push_str(&format!(
                "{} of {} pairs above {}\n",
                screen.flagged_count(),
                screen.pairs().len(),
                fixed2(screen.threshold)
            ));
            text
        }
        Format::Csv => {
            let n = screen.ids.len();
            let mut headers = vec!["firm"];
            headers.extend(screen.ids.iter().map(String::as_str));
            let rows: Vec<Vec<String>> = (0..n)
                .map(|i| {
                    let mut row = vec![screen.ids[i].clone()];
                    row.extend((0..n).map(|j| match screen.delta(i, j) {
                        Some(d) if j > i => {
                            let mark = if screen.is_flagged(i, j) { "*" } else { "" };
                            format!("{}{mark}", full(d))
                        }
                        _ => String::new(),
                    }));
                    row
                })
                .collect();
            csv(&headers, &rows)
        }
        Format::Json => json(&screen.pairs()),
    })
}

#[derive(Serialize)]
struct SensitivityRow {
    overlap: f64,
    nahhi: f64,
    classification: crate::concentration::Concentration,
}

fn cmd_sensitivity(config: &RunConfig) -> Run<String> {
    let roster = load_roster(require(&config.roster, "roster", "sensitivity")?)?;
    let snapshot = load_snapshot(one_snapshot(config, "sensitivity")?, Some(&roster))?;
    let grid: Vec<f64> = if config.grid.is_empty() {
        (0..10).map(|k| f64::from(k) / 10.0).collect()
    } else {
        config.grid.clone()
    };
    for &w in &grid {
        check_overlap(w)?;
    }
    let rows = overlap_sensitivity(&roster, &snapshot, &grid)?
        .into_iter()
        .map(|(overlap, nahhi)| {
            Ok(SensitivityRow {
                overlap,
                nahhi,
                classification: classify_concentration(nahhi)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let headers = ["overlap", "nahhi", "classification"];
    let cells = |fmt: fn(f64) -> String| -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| vec![fmt(r.overlap), fmt(r.nahhi), r.classification.to_string()])
            .collect()
    };
    Ok(match config.format {
        Format::Table => table(&headers, &cells(fixed2)),
        Format::Csv => csv(&headers, &cells(full)),
        Format::Json => json(&rows),
    })
}

#[derive(Serialize)]
struct TrendOut {
    series: SeriesReport,
    group: Option<GroupComparison>,
}

fn cmd_trend(config: &RunConfig) -> Run<String> {
    if config.snapshots.is_empty() {
        return Err(usage("`trend` requires at least one --snapshot"));
    }
    let mut roster = config.roster.as_deref().map(load_roster).transpose()?;
    let mut snapshots = Vec::with_capacity(config.snapshots.len());
    for arg in &config.snapshots {
        let snap = load_snapshot(arg, roster.as_ref())?;
        if roster.is_none() {
            roster = Some(Arc::clone(snap.roster()));
        }
        snapshots.push(snap);
    }
    let series = SnapshotSeries::new(snapshots)?;
    let report = summarize_series(&series)?;
    let group = if config.group.is_empty() {
        None
    } else {
        let ids: Vec<&str> = config.group.iter().map(String::as_str).collect();
        Some(compare_groups(&series, &ids)?)
    };

    let headers = [
        "date",
        "indegree_mean",
        "indegree_sd",
        "outdegree_mean",
        "outdegree_sd",
        "betweenness_mean",
        "betweenness_sd",
        "information_mean",
        "information_sd",
        "density",
        "density_sd",
        "n",
    ];
    let rows = |fmt: fn(f64) -> String| -> Vec<Vec<String>> {
        report
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![r.date.format("%Y-%m-%d").to_string()];
                for ms in [
                    r.indegree,
                    r.outdegree,
                    r.betweenness,
                    r.information,
                    r.density,
                ] {
                    row.push(fmt(ms.mean));
                    row.push(fmt(ms.stdev));
                }
                row.push(r.sample_size.to_string());
                row
            })
            .collect()
    };
    let group_headers = ["date", "group_in", "group_out", "others_in", "others_out"];
    let group_rows = |g: &GroupComparison, fmt: fn(f64) -> String| -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = g
            .per_snapshot
            .iter()
            .map(|(date, d)| {
                vec![
                    date.format("%Y-%m-%d").to_string(),
                    fmt(d.group_in),
                    fmt(d.group_out),
                    fmt(d.others_in),
                    fmt(d.others_out),
                ]
            })
            .collect();
        let o = &g.overall;
        rows.push(vec![
            "overall".into(),
            fmt(o.group_in),
            fmt(o.group_out),
            fmt(o.others_in),
            fmt(o.others_out),
        ]);
        rows
    };
    Ok(match config.format {
        Format::Table => {
            let mut text = table(&headers, &rows(fixed2));
            if !report.trends.is_empty() {
                text.push('\n');
                let pairs: Vec<(String, String)> = report
                    .trends
                    .iter()
                    .map(|(m, t)| (format!("trend {}", m.as_str()), t.to_string()))
                    .collect();
                text.push_str(&key_values(&pairs));
            }
            if let Some(g) = &group {
                text.push_str(&format!("\ngroup: {}\n", g.members.join(", ")));
                text.push_str(&table(&group_headers, &group_rows(g, fixed2)));
            }
            text
        }
        Format::Csv => match &group {
            Some(g) => csv(&group_headers, &group_rows(g, full)),
            None => csv(&headers, &rows(full)),
        },
        Format::Json => json(&TrendOut {
            series: report,
            group,
        }),
    })
}

#[derive(Serialize)]
struct RegressOut {
    logistic: Vec<FeatureRegression>,
    ols: Option<OlsFit>,
}

fn cmd_regress(config: &RunConfig) -> Run<String> {
    let (text, path) = resolve_input(require(&config.features, "features", "regress")?)?;
    let features = parse_features_str(&text, &path)?;
    let logistic = regress_features(&features)?;
    let ols = if features.rows().iter().any(|r| r.reach_pct.is_some()) {
        Some(regress_reach(&features)?)
    } else {
        None
    };
    let headers = [
        "model",
        "response",
        "intercept",
        "slope",
        "odds_ratio",
        "p_value",
        "r2",
    ];
    let rows = |fmt: fn(f64) -> String| -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = logistic
            .iter()
            .map(|r| {
                vec![
                    "logistic".into(),
                    r.feature.clone(),
                    fmt(r.fit.intercept),
                    fmt(r.fit.slope),
                    fmt(r.fit.odds_ratio),
                    fmt(r.fit.p_value),
                    fmt(r.fit.r2_nagelkerke),
                ]
            })
            .collect();
        if let Some(o) = &ols {
            rows.push(vec![
                "ols".into(),
                "reach_pct".into(),
                fmt(o.intercept),
                fmt(o.slope),
                String::new(),
                fmt(o.slope_p_value),
                fmt(o.r2),
            ]);
        }
        rows
    };
    Ok(match config.format {
        Format::Table => table(&headers, &rows(fixed2)),
        Format::Csv => csv(&headers, &rows(full)),
        Format::Json => json(&RegressOut { logistic, ols }),
    })
}

fn cmd_validate(config: &RunConfig) -> Run<String> {
    if config.roster.is_none() && config.snapshots.is_empty() && config.features.is_none() {
        return Err(usage(
            "`validate` requires --roster, --snapshot or --features",
        ));
    }
    let mut ok = Vec::new();
    let mut problems = Vec::new();
    let mut roster = None;
    if let Some(arg) = &config.roster {
        match resolve_input(arg)
            .and_then(|(text, path)| Ok((parse_roster_str(&text, &path)?, path)))
        {
            Ok((r, path)) => {
                ok.push(format!(
                    "ok {}: roster with {} ids",
                    path.display(),
                    r.len()
                ));
                roster = Some(Arc::new(r));
            }
            Err(e) => problems.push(e.to_string()),
        }
    }
    for arg in &config.snapshots {
        let (text, path): (String, PathBuf) = match resolve_input(arg) {
            Ok(found) => found,
            Err(e) => {
                problems.push(e.to_string());
                continue;
            }
        };
        let found = snapshot_diagnostics(&text, &path, roster.as_ref());
        if found.is_empty() {
            let snap = match &roster {
                Some(r) => parse_snapshot_str(&text, &path, r)?,
                None => parse_snapshot_standalone_str(&text, &path)?,
            };
            ok.push(format!(
                "ok {}: {} snapshot, {} nodes, {} links",
                path.display(),
                snap.date().format("%Y-%m-%d"),
                snap.len(),
                snap.link_count()
            ));
        } else {
            problems.extend(found.iter().map(ToString::to_string));
        }
    }
    if let Some(arg) = &config.features {
        match resolve_input(arg)
            .and_then(|(text, path)| Ok((parse_features_str(&text, &path)?, path)))
        {
            Ok((t, path)) => ok.push(format!(
                "ok {}: {} rows, features {}",
                path.display(),
                t.rows().len(),
                t.feature_names().join(", ")
            )),
            Err(e) => problems.push(e.to_string()),
        }
    }
    if problems.is_empty() {
        Ok(ok.iter().map(|l| format!("{l}\n")).collect())
    } else {
        Err(Failure::Diagnostics(problems))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> Outcome {
        run_args(std::iter::once("netconc").chain(args.iter().copied()))
    }

    #[test]
    fn defaults() {
        let c = RunConfig::try_parse_from(["netconc", "concentration"]).unwrap();
        assert_eq!(c.overlap, 0.3);
        assert_eq!(c.top_k, 4);
        assert_eq!(c.threshold, 100.0);
        assert_eq!(c.format, Format::Table);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["bogus"]).code, 2);
        assert_eq!(run_str(&["centrality"]).code, 2);
        assert_eq!(
            run_str(&["centrality", "--snapshot", "aug2000", "--top-k", "0"]).code,
            2
        );
        assert_eq!(
            run_str(&["concentration", "--roster", "jun2000", "--overlap", "1.5"]).code,
            2
        );
        assert_eq!(
            run_str(&[
                "centrality",
                "--snapshot",
                "aug2000",
                "--metric",
                "pagerank"
            ])
            .code,
            2
        );
    }

    #[test]
    fn data_errors_exit_one_without_stdout() {
        let out = run_str(&["centrality", "--snapshot", "/no/such/file.csv"]);
        assert_eq!(out.code, 1);
        assert!(out.stdout.is_empty());
        assert!(out.stderr.contains("/no/such/file.csv"), "{}", out.stderr);
    }

    #[test]
    fn ranks_share_ties() {
        let top = vec![
            RankedScore {
                id: "a".into(),
                score: 6.0,
            },
            RankedScore {
                id: "b".into(),
                score: 4.0,
            },
            RankedScore {
                id: "c".into(),
                score: 4.0,
            },
            RankedScore {
                id: "d".into(),
                score: 3.0,
            },
        ];
        let ranks: Vec<usize> = ranked(&top).iter().map(|r| r.rank).collect();
        assert_eq!(ranks, [1, 2, 2, 4]);
    }
}
