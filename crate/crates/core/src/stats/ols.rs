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

//! Simple least-squares line with a t test on the slope.

use serde::Serialize;

use super::special::t_sf;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_std_error: f64,
    pub t_statistic: f64,
    /// Two-sided, t distribution with n - 2 degrees of freedom.
    pub slope_p_value: f64,
    pub r2: f64,
    pub n: usize,
}

pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<OlsFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} regressor values but {} outcomes",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("OLS needs n >= 3, got {n}")));
    }
    if let Some(&bad) = x.iter().chain(y).find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(Error::ConstantRegressor);
    }
    let nf = n as f64;
    let xbar = x.iter().sum::<f64>() / nf;
    let ybar = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - xbar, yi - ybar);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    let df = nf - 2.0;
    let slope_std_error = (sse / df / sxx).sqrt();
    let (t_statistic, slope_p_value) = if slope_std_error > 0.0 {
        let t = slope / slope_std_error;
        (t, (2.0 * t_sf(t.abs(), df)?).min(1.0))
    } else if slope == 0.0 {
        (0.0, 1.0)
    } else {
        (slope.signum() * f64::INFINITY, 0.0)
    };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(OlsFit {
        intercept,
        slope,
        slope_std_error,
        t_statistic,
        slope_p_value,
        r2: r2.clamp(0.0, 1.0),
        n,
    })
}
