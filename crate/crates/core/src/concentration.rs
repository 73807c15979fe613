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

//! Concentration indices and merger screening.
//!
//! HHI values use shares expressed in percent, so a monopoly scores 10000.
//! The network-adjusted HHI recomputes shares from "possible" reach: a
//! firm's own reach plus the reach of every firm linking to it, discounted
//! by the assumed audience overlap.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{shares_from_reach, EngineRoster, NetworkSnapshot, ShareTable};

pub const UNCONCENTRATED_BELOW: f64 = 1000.0;
pub const HIGHLY_CONCENTRATED_ABOVE: f64 = 1800.0;
pub const DEFAULT_OVERLAP: f64 = 0.3;
pub const DEFAULT_MERGER_THRESHOLD: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Concentration {
    Unconcentrated,
    ModeratelyConcentrated,
    HighlyConcentrated,
}

impl fmt::Display for Concentration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Concentration::Unconcentrated => "unconcentrated",
            Concentration::ModeratelyConcentrated => "moderately concentrated",
            Concentration::HighlyConcentrated => "highly concentrated",
        })
    }
}

/// Guideline bands: below 1000, 1000 through 1800 inclusive, above 1800.
pub fn classify_concentration(hhi_value: f64) -> Result<Concentration> {
    if !hhi_value.is_finite() || hhi_value < 0.0 {
        return Err(Error::InvalidHhi(hhi_value));
    }
    Ok(if hhi_value < UNCONCENTRATED_BELOW {
        Concentration::Unconcentrated
    } else if hhi_value <= HIGHLY_CONCENTRATED_ABOVE {
        Concentration::ModeratelyConcentrated
    } else {
        Concentration::HighlyConcentrated
    })
}

/// Combined share of the `k` largest firms.
pub fn cr_k(shares: &ShareTable, k: usize) -> Result<f64> {
    let n = shares.len();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut sorted = shares.shares().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted[..k].iter().sum())
}

pub fn hhi(shares: &ShareTable) -> f64 {
    shares.shares().iter().map(|s| (100.0 * s).powi(2)).sum()
}

fn check_overlap(overlap: f64) -> Result<()> {
    if (0.0..=1.0).contains(&overlap) {
        Ok(())
    } else {
        Err(Error::InvalidOverlap(overlap))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PossibleReach {
    pub ids: Vec<String>,
    pub overlap: f64,
    pub reach: Vec<f64>,
    pub possible: Vec<f64>,
}

impl PossibleReach {
    /// Q_i: possible reach normalized over the roster.
    pub fn shares(&self) -> Result<ShareTable> {
        ShareTable::from_weights(self.ids.clone(), &self.possible)
    }
}

/// pr_i = reach_i + (1 - overlap) * sum of reach_j over firms j linking to i.
pub fn possible_reach(
    roster: &EngineRoster,
    snapshot: &NetworkSnapshot,
    overlap: f64,
) -> Result<PossibleReach> {
    check_overlap(overlap)?;
    if !snapshot.roster().ids().eq(roster.ids()) {
        return Err(Error::InvalidInput(
            "snapshot is indexed by a different roster".into(),
        ));
    }
    let reach = roster.reach_vector()?;
    let carry = 1.0 - overlap;
    let n = reach.len();
    let possible = (0..n)
        .map(|i| {
            let inflow: f64 = (0..n)
                .filter(|&j| snapshot.has_link(j, i))
                .map(|j| reach[j])
                .sum();
            reach[i] + carry * inflow
        })
        .collect();
    Ok(PossibleReach {
        ids: roster.ids().map(str::to_string).collect(),
        overlap,
        reach,
        possible,
    })
}

/// Network-adjusted HHI: sum of (100 Q_i)^2 over possible-reach shares.
pub fn nahhi(roster: &EngineRoster, snapshot: &NetworkSnapshot, overlap: f64) -> Result<f64> {
    Ok(hhi(&possible_reach(roster, snapshot, overlap)?.shares()?))
}

/// NAHHI at each overlap in `grid`, in input order.
pub fn overlap_sensitivity(
    roster: &EngineRoster,
    snapshot: &NetworkSnapshot,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&w| nahhi(roster, snapshot, w).map(|v| (w, v)))
        .collect()
}

/// HHI increase from merging firms `a` and `b`: 2 (100 s_a)(100 s_b).
pub fn merger_delta(shares: &ShareTable, a: &str, b: &str) -> Result<f64> {
    if a == b {
        return Err(Error::SelfMerger(a.to_string()));
    }
    let sa = shares.share(a)?;
    let sb = shares.share(b)?;
    Ok(2.0 * (100.0 * sa) * (100.0 * sb))
}

/// Share table after `a` absorbs `b`; the merged firm keeps `a`'s position
/// and is named "a+b".
pub fn merged_shares(shares: &ShareTable, a: &str, b: &str) -> Result<ShareTable> {
    if a == b {
        return Err(Error::SelfMerger(a.to_string()));
    }
    let ia = shares.index_of(a)?;
    let ib = shares.index_of(b)?;
    let mut ids = Vec::with_capacity(shares.len() - 1);
    let mut values = Vec::with_capacity(shares.len() - 1);
    for (i, (id, s)) in shares.iter().enumerate() {
        if i == ib {
            continue;
        }
        if i == ia {
            ids.push(format!("{a}+{b}"));
            values.push(s + shares.shares()[ib]);
        } else {
            ids.push(id.to_string());
            values.push(s);
        }
    }
    ShareTable::new(ids, values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergerPair {
    pub firm_a: String,
    pub firm_b: String,
    pub delta: f64,
    pub flagged: bool,
}

/// Pairwise merger deltas over the upper triangle (a before b in firm order).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergerScreenMatrix {
    pub ids: Vec<String>,
    pub threshold: f64,
    pairs: Vec<MergerPair>,
}

impl MergerScreenMatrix {
    fn pair_index(&self, i: usize, j: usize) -> usize {
        let n = self.ids.len();
        // Row-major offset of (i, j), i < j, in the strict upper triangle.
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn pairs(&self) -> &[MergerPair] {
        &self.pairs
    }

    /// Symmetric lookup; `None` on the diagonal or out of range.
    pub fn delta(&self, i: usize, j: usize) -> Option<f64> {
        let n = self.ids.len();
        if i == j || i >= n || j >= n {
            return None;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        Some(self.pairs[self.pair_index(lo, hi)].delta)
    }

    pub fn is_flagged(&self, i: usize, j: usize) -> bool {
        self.delta(i, j).is_some_and(|d| d > self.threshold)
    }

    pub fn flagged_pairs(&self) -> impl Iterator<Item = &MergerPair> {
        self.pairs.iter().filter(|p| p.flagged)
    }

    pub fn flagged_count(&self) -> usize {
        self.flagged_pairs().count()
    }
}

/// Every pairwise merger delta; a pair is flagged when its delta exceeds
/// `threshold` strictly.
pub fn merger_screen(shares: &ShareTable, threshold: f64) -> Result<MergerScreenMatrix> {
    if !threshold.is_finite() || threshold < 0.0 {
        return Err(Error::InvalidThreshold(threshold));
    }
    let ids = shares.ids().to_vec();
    let s = shares.shares();
    let n = ids.len();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let delta = 2.0 * (100.0 * s[i]) * (100.0 * s[j]);
            pairs.push(MergerPair {
                firm_a: ids[i].clone(),
                firm_b: ids[j].clone(),
                delta,
                flagged: delta > threshold,
            });
        }
    }
    Ok(MergerScreenMatrix {
        ids,
        threshold,
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NahhiValue {
    pub overlap: f64,
    pub value: f64,
    pub classification: Concentration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub k: usize,
    pub cr_k: f64,
    pub hhi: f64,
    pub classification: Concentration,
    pub nahhi: Option<NahhiValue>,
}

/// CR_k, HHI and, when a snapshot is supplied, NAHHI at `overlap`.
pub fn concentration_report(
    roster: &EngineRoster,
    snapshot: Option<&NetworkSnapshot>,
    k: usize,
    overlap: f64,
) -> Result<ConcentrationReport> {
    let shares = shares_from_reach(roster)?;
    let hhi_value = hhi(&shares);
    let nahhi = match snapshot {
        Some(s) => {
            let value = nahhi(roster, s, overlap)?;
            Some(NahhiValue {
                overlap,
                value,
                classification: classify_concentration(value)?,
            })
        }
        None => None,
    };
    Ok(ConcentrationReport {
        k,
        cr_k: cr_k(&shares, k)?,
        hhi: hhi_value,
        classification: classify_concentration(hhi_value)?,
        nahhi,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use chrono::NaiveDate;

    use super::*;
    use crate::model::RosterEntry;

    fn table(shares: &[f64]) -> ShareTable {
        let ids = (0..shares.len()).map(|i| format!("f{i}")).collect();
        ShareTable::new(ids, shares.to_vec()).unwrap()
    }

    fn two_firms() -> (Arc<EngineRoster>, NetworkSnapshot) {
        let roster = Arc::new(
            EngineRoster::new(vec![
                RosterEntry::new("a", "A").with_reach(40.0),
                RosterEntry::new("b", "B").with_reach(10.0),
            ])
            .unwrap(),
        );
        let date = NaiveDate::from_ymd_opt(2000, 8, 12).unwrap();
        let snap = NetworkSnapshot::from_links(date, roster.clone(), &[(1, 0)]).unwrap();
        (roster, snap)
    }

    #[test]
    fn hhi_extremes() {
        assert_eq!(hhi(&table(&[1.0])), 10000.0);
        let equal = table(&[1.0 / 19.0; 19]);
        assert!((hhi(&equal) - 10000.0 / 19.0).abs() < 1e-9);
    }

    #[test]
    fn cr_k_cases() {
        let equal = table(&[0.2; 5]);
        assert!((cr_k(&equal, 2).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(cr_k(&table(&[0.0, 1.0, 0.0]), 1).unwrap(), 1.0);
        assert!(matches!(cr_k(&equal, 6), Err(Error::KOutOfRange { .. })));
        assert!(cr_k(&equal, 0).is_err());
    }

    #[test]
    fn classification_bands() {
        use Concentration::*;
        assert_eq!(
            classify_concentration(1163.0).unwrap(),
            ModeratelyConcentrated
        );
        assert_eq!(classify_concentration(870.0).unwrap(), Unconcentrated);
        assert_eq!(
            classify_concentration(1800.0).unwrap(),
            ModeratelyConcentrated
        );
        assert_eq!(
            classify_concentration(1000.0).unwrap(),
            ModeratelyConcentrated
        );
        assert_eq!(classify_concentration(999.99).unwrap(), Unconcentrated);
        assert_eq!(classify_concentration(1800.01).unwrap(), HighlyConcentrated);
        assert!(classify_concentration(-1.0).is_err());
        assert!(classify_concentration(f64::NAN).is_err());
    }

    #[test]
    fn possible_reach_hand_example() {
        let (roster, snap) = two_firms();
        let pr = possible_reach(&roster, &snap, 0.3).unwrap();
        assert!((pr.possible[0] - 47.0).abs() < 1e-12);
        assert_eq!(pr.possible[1], 10.0);
    }

    #[test]
    fn nahhi_degenerates_to_hhi() {
        let (roster, snap) = two_firms();
        let base = hhi(&shares_from_reach(&roster).unwrap());
        assert_eq!(nahhi(&roster, &snap, 1.0).unwrap(), base);
        let empty = NetworkSnapshot::empty(snap.date(), roster.clone());
        for w in [0.0, 0.3, 0.9] {
            assert_eq!(nahhi(&roster, &empty, w).unwrap(), base);
        }
    }

    #[test]
    fn overlap_is_validated() {
        let (roster, snap) = two_firms();
        assert!(matches!(
            possible_reach(&roster, &snap, 1.5),
            Err(Error::InvalidOverlap(_))
        ));
        assert!(possible_reach(&roster, &snap, f64::NAN).is_err());
    }

    #[test]
    fn sensitivity_preserves_order() {
        let (roster, snap) = two_firms();
        assert!(overlap_sensitivity(&roster, &snap, &[]).unwrap().is_empty());
        let out = overlap_sensitivity(&roster, &snap, &[0.9, 0.1, 1.0]).unwrap();
        let grid: Vec<_> = out.iter().map(|p| p.0).collect();
        assert_eq!(grid, vec![0.9, 0.1, 1.0]);
        assert_eq!(out[2].1, hhi(&shares_from_reach(&roster).unwrap()));
    }

    #[test]
    fn merger_delta_cases() {
        let duo = table(&[0.5, 0.5]);
        assert!((merger_delta(&duo, "f0", "f1").unwrap() - 5000.0).abs() < 1e-9);
        let zero = table(&[0.0, 1.0]);
        assert_eq!(merger_delta(&zero, "f0", "f1").unwrap(), 0.0);
        assert!(matches!(
            merger_delta(&duo, "f0", "f0"),
            Err(Error::SelfMerger(_))
        ));
        assert!(matches!(
            merger_delta(&duo, "f0", "zz"),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn three_equal_firms_all_flagged() {
        let third = table(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        let m = merger_screen(&third, 100.0).unwrap();
        assert_eq!(m.flagged_count(), 3);
        let expected = 2.0 * (100.0f64 / 3.0).powi(2);
        assert!(m.pairs().iter().all(|p| (p.delta - expected).abs() < 1e-9));
        assert_eq!(merger_screen(&third, 10001.0).unwrap().flagged_count(), 0);
        assert!(merger_screen(&third, -1.0).is_err());
    }

    #[test]
    fn screen_lookup_is_symmetric() {
        let t = table(&[0.4, 0.3, 0.2, 0.1]);
        let m = merger_screen(&t, 100.0).unwrap();
        for i in 0..4 {
            assert_eq!(m.delta(i, i), None);
            for j in 0..4 {
                assert_eq!(m.delta(i, j), m.delta(j, i));
                if i != j {
                    let d = merger_delta(&t, &format!("f{i}"), &format!("f{j}")).unwrap();
                    assert_eq!(m.delta(i, j), Some(d));
                }
            }
        }
    }

    #[test]
    fn threshold_is_strict() {
        let t = table(&[0.5, 0.5]);
        let m = merger_screen(&t, 5000.0).unwrap();
        assert_eq!(m.flagged_count(), 0);
    }
}
