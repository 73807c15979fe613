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

//! Regression kernel: logistic fits of binary product features on setup
//! year, and a least-squares line of audience reach on setup year.

mod logistic;
mod ols;
pub mod special;

use std::collections::HashSet;

use serde::Serialize;

pub use logistic::{
    logistic_fit, logistic_fit_with, predict_probability, LogisticFit, LogisticOptions,
};
pub use ols::{ols_fit, OlsFit};
pub use special::{chi_square_sf, t_sf};

use crate::error::{Error, Result};

pub const MIN_SETUP_YEAR: i32 = 1990;
pub const MAX_SETUP_YEAR: i32 = 2005;
/// Year subtracted from setup years before logistic fitting.
pub const YEAR_ORIGIN: i32 = 1994;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureRow {
    pub id: String,
    pub setup_year: i32,
    pub features: Vec<bool>,
    pub reach_pct: Option<f64>,
}

/// Per-organization setup year, binary feature flags and optional reach.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureTable {
    feature_names: Vec<String>,
    rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn new(feature_names: Vec<String>, rows: Vec<FeatureRow>) -> Result<Self> {
        let mut seen = HashSet::new();
        for row in &rows {
            if !seen.insert(row.id.as_str()) {
                return Err(Error::DuplicateId { id: row.id.clone() });
            }
            if !(MIN_SETUP_YEAR..=MAX_SETUP_YEAR).contains(&row.setup_year) {
                return Err(Error::InvalidInput(format!(
                    "setup year {} for `{}` outside {MIN_SETUP_YEAR}..={MAX_SETUP_YEAR}",
                    row.setup_year, row.id
                )));
            }
            if row.features.len() != feature_names.len() {
                return Err(Error::InvalidInput(format!(
                    "`{}` has {} feature flags, expected {}",
                    row.id,
                    row.features.len(),
                    feature_names.len()
                )));
            }
        }
        Ok(FeatureTable {
            feature_names,
            rows,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[FeatureRow] {
        &self.rows
    }

    pub fn setup_years(&self) -> Vec<f64> {
        self.rows.iter().map(|r| f64::from(r.setup_year)).collect()
    }

    pub fn feature(&self, name: &str) -> Result<Vec<u8>> {
        let k = self
            .feature_names
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown feature `{name}`")))?;
        Ok(self.rows.iter().map(|r| u8::from(r.features[k])).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureRegression {
    pub feature: String,
    pub fit: LogisticFit,
}

/// One logistic fit per feature, regressor = setup year - `YEAR_ORIGIN`.
pub fn regress_features(table: &FeatureTable) -> Result<Vec<FeatureRegression>> {
    let x: Vec<f64> = table
        .setup_years()
        .iter()
        .map(|y| y - f64::from(YEAR_ORIGIN))
        .collect();
    table
        .feature_names()
        .iter()
        .map(|name| {
            Ok(FeatureRegression {
                feature: name.clone(),
                fit: logistic_fit(&x, &table.feature(name)?)?,
            })
        })
        .collect()
}

/// Reach on calendar setup year over rows that carry a reach value.
pub fn regress_reach(table: &FeatureTable) -> Result<OlsFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = table
        .rows()
        .iter()
        .filter_map(|r| r.reach_pct.map(|reach| (f64::from(r.setup_year), reach)))
        .unzip();
    ols_fit(&x, &y)
}
