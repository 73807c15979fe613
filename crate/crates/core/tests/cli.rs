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

//! End-to-end runs of the `netconc` binary.

use std::fs;
use std::process::Command;

fn netconc(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_netconc"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn betweenness_top_four() {
    let (code, out, err) = netconc(&[
        "centrality",
        "--snapshot",
        "aug2000",
        "--metric",
        "betweenness",
        "--top-k",
        "4",
    ]);
    assert_eq!(code, 0, "{err}");
    let rows: Vec<Vec<&str>> = out
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], ["betweenness", "1", "DirectHit", "5.66"]);
    let ids: Vec<&str> = rows.iter().map(|r| r[2]).collect();
    assert_eq!(ids, ["DirectHit", "Yahoo", "AskJeeves", "AltaVista"]);
}

#[test]
fn concentration_report_lines() {
    let (code, out, err) = netconc(&[
        "concentration",
        "--roster",
        "jun2000",
        "--snapshot",
        "aug2000",
        "--overlap",
        "0.3",
    ]);
    assert_eq!(code, 0, "{err}");
    let value = |key: &str| -> String {
        out.lines()
            .find_map(|l| l.strip_prefix(key).filter(|rest| rest.starts_with(' ')))
            .unwrap_or_else(|| panic!("no `{key}` line in\n{out}"))
            .trim()
            .to_string()
    };
    let hhi: f64 = value("hhi").parse().unwrap();
    let nahhi: f64 = value("nahhi").parse().unwrap();
    assert!((hhi - 1183.0).abs() <= 25.0, "{hhi}");
    assert!((nahhi - 870.0).abs() <= 30.0, "{nahhi}");
    assert_eq!(value("classification"), "moderately concentrated");
    assert_eq!(value("nahhi_classification"), "unconcentrated");
}

#[test]
fn merger_csv_has_29_flagged_cells() {
    let (code, out, err) = netconc(&[
        "merger-screen",
        "--roster",
        "jun2000",
        "--threshold",
        "100",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0, "{err}");
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(reader.headers().unwrap().len(), 20);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 19);
    let mut flagged = 0;
    for (i, row) in rows.iter().enumerate() {
        for (j, cell) in row.iter().skip(1).enumerate() {
            if j <= i {
                assert!(cell.is_empty(), "cell ({i},{j}) below the diagonal: {cell}");
            } else {
                let value: f64 = cell.trim_end_matches('*').parse().unwrap();
                assert_eq!(cell.ends_with('*'), value > 100.0);
                flagged += usize::from(cell.ends_with('*'));
            }
        }
    }
    assert_eq!(flagged, 29);
}

#[test]
fn merger_json_is_flat_pair_list() {
    let (code, out, _) = netconc(&["merger-screen", "--roster", "jun2000", "--format", "json"]);
    assert_eq!(code, 0);
    let pairs: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(pairs.len(), 171);
    assert_eq!(pairs.iter().filter(|p| p["flagged"] == true).count(), 29);
    let first = &pairs[0];
    assert_eq!(
        (first["firm_a"].as_str(), first["firm_b"].as_str()),
        (Some("Yahoo"), Some("MSN"))
    );
    assert!(first["delta"].as_f64().unwrap() > 100.0);
}

#[test]
fn json_keeps_full_precision() {
    let (_, table, _) = netconc(&["concentration", "--roster", "jun2000"]);
    let (_, json, _) = netconc(&["concentration", "--roster", "jun2000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let hhi = v["hhi"].as_f64().unwrap();
    assert!(table.contains(&format!("{hhi:.2}")));
    assert_ne!(format!("{hhi:.2}").parse::<f64>().unwrap(), hhi);
}

#[test]
fn reports_are_byte_deterministic() {
    let runs: [&[&str]; 5] = [
        &["centrality", "--snapshot", "aug2000", "--format", "json"],
        &[
            "concentration",
            "--roster",
            "jun2000",
            "--snapshot",
            "aug2000",
            "--format",
            "csv",
        ],
        &[
            "sensitivity",
            "--roster",
            "jun2000",
            "--snapshot",
            "aug2000",
        ],
        &[
            "trend",
            "--snapshot",
            "aug2000",
            "--group",
            "AltaVista,Yahoo",
            "--format",
            "json",
        ],
        &["regress", "--features", "features", "--format", "csv"],
    ];
    for args in runs {
        let a = netconc(args);
        let b = netconc(args);
        assert_eq!(a.0, 0, "{args:?}: {}", a.2);
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn sensitivity_grid_stays_unconcentrated() {
    let (code, out, _) = netconc(&[
        "sensitivity",
        "--roster",
        "jun2000",
        "--snapshot",
        "aug2000",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.ends_with(",unconcentrated")));
}

#[test]
fn explicit_paths_work_like_fixture_names() {
    let by_name = netconc(&[
        "concentration",
        "--roster",
        "jun2000",
        "--snapshot",
        "aug2000",
        "--format",
        "json",
    ]);
    let by_path = netconc(&[
        "concentration",
        "--roster",
        "../../data/jun2000_reach.csv",
        "--snapshot",
        "../../data/aug2000_adjacency.csv",
        "--format",
        "json",
    ]);
    assert_eq!(by_name.1, by_path.1);
}

#[test]
fn malformed_cell_names_file_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(
        &path,
        "#date,2000-08-12\na,b,c\na,0,1,0\nb,0,0,2\nc,1,0,0\n",
    )
    .unwrap();
    let (code, out, err) = netconc(&["centrality", "--snapshot", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.is_empty(), "partial report: {out}");
    assert!(err.contains(&format!("{}:4:4", path.display())), "{err}");
}

#[test]
fn duplicate_roster_id_names_both_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("roster.csv");
    fs::write(&path, "id,name,setup_year,reach_pct\nYahoo,Yahoo,1994,47\nMSN,MSN,1995,35.8\nYahoo,Yahoo!,1994,47\n").unwrap();
    let (code, out, err) = netconc(&["concentration", "--roster", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(
        err.contains("Yahoo") && err.contains("line 2") && err.contains("line 4"),
        "{err}"
    );
}

#[test]
fn validate_lists_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap.csv");
    fs::write(
        &path,
        "#date,2000-08-12\na,b,c\na,0,1,0\nb,0,0,1\nc,1,0,1\n",
    )
    .unwrap();
    let (code, out, err) = netconc(&["validate", "--snapshot", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("self-link at (3,3)"), "{err}");

    let (code, out, _) = netconc(&["validate", "--roster", "jun2000", "--snapshot", "aug2000"]);
    assert_eq!(code, 0);
    assert!(out.contains("35 links"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(netconc(&[]).0, 2);
    assert_eq!(netconc(&["frobnicate"]).0, 2);
    assert_eq!(netconc(&["centrality"]).0, 2);
    assert_eq!(
        netconc(&["centrality", "--snapshot", "aug2000", "--format", "xml"]).0,
        2
    );
    assert_eq!(
        netconc(&["merger-screen", "--roster", "jun2000", "--threshold", "-1"]).0,
        2
    );
    assert_eq!(
        netconc(&[
            "sensitivity",
            "--roster",
            "jun2000",
            "--snapshot",
            "aug2000",
            "--grid",
            "0.5,1.2"
        ])
        .0,
        2
    );
    assert_eq!(
        netconc(&["trend", "--snapshot", "aug2000", "--group", "Nobody"]).0,
        1
    );
    assert_eq!(netconc(&["centrality", "--snapshot", "missing.csv"]).0, 1);
    assert_eq!(netconc(&["--help"]).0, 0);
}
