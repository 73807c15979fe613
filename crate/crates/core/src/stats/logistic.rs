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

//! Single-predictor logistic regression fitted by iteratively reweighted
//! least squares (Newton-Raphson on the log-likelihood).

use serde::Serialize;

use super::special::chi_square_sf;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticOptions {
    pub max_iterations: usize,
    /// Stop once the largest coefficient change falls below this.
    pub tolerance: f64,
    /// |slope| above this with the likelihood still improving is reported as
    /// complete separation.
    pub separation_bound: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        LogisticOptions {
            max_iterations: 50,
            tolerance: 1e-10,
            separation_bound: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticFit {
    pub intercept: f64,
    pub slope: f64,
    pub odds_ratio: f64,
    /// Likelihood-ratio test against the intercept-only model, chi-square(1).
    pub p_value: f64,
    /// Nagelkerke's maximum-rescaled R².
    pub r2_nagelkerke: f64,
    pub log_likelihood: f64,
    pub null_log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl LogisticFit {
    pub fn linear_predictor(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^eta) without overflow.
fn softplus(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

fn log_likelihood(x: &[f64], y: &[f64], intercept: f64, slope: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let eta = intercept + slope * xi;
            yi * eta - softplus(eta)
        })
        .sum()
}

pub fn predict_probability(fit: &LogisticFit, x: f64) -> f64 {
    sigmoid(fit.linear_predictor(x))
}

pub fn logistic_fit(x: &[f64], y: &[u8]) -> Result<LogisticFit> {
    logistic_fit_with(x, y, LogisticOptions::default())
}

pub fn logistic_fit_with(x: &[f64], y: &[u8], opts: LogisticOptions) -> Result<LogisticFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} regressor values but {} outcomes",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "logistic fit needs n >= 3, got {n}"
        )));
    }
    if let Some(&bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    if let Some(&bad) = y.iter().find(|&&v| v > 1) {
        return Err(Error::InvalidInput(format!("outcome {bad} is not 0 or 1")));
    }
    let ones = y.iter().filter(|&&v| v == 1).count();
    if ones == 0 || ones == n {
        return Err(Error::DegenerateOutcome);
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(Error::ConstantRegressor);
    }
    // With one predictor the MLE exists iff the two classes overlap strictly
    // in x; touching or disjoint ranges are (quasi-)complete separation.
    let range = |class: u8| {
        x.iter()
            .zip(y)
            .filter(|&(_, &v)| v == class)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&xi, _)| {
                (lo.min(xi), hi.max(xi))
            })
    };
    let ((lo0, hi0), (lo1, hi1)) = (range(0), range(1));
    if hi0 <= lo1 || hi1 <= lo0 {
        return Err(Error::Separation {
            bound: opts.separation_bound,
        });
    }
    let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
    let ybar = ones as f64 / n as f64;

    let null_intercept = (ybar / (1.0 - ybar)).ln();
    let mut intercept = null_intercept;
    let mut slope = 0.0;
    let mut ll = log_likelihood(x, &yf, intercept, slope);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        // Gradient and Fisher information for (intercept, slope).
        let (mut g0, mut g1, mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&xi, &yi) in x.iter().zip(&yf) {
            let p = sigmoid(intercept + slope * xi);
            let w = p * (1.0 - p);
            let r = yi - p;
            g0 += r;
            g1 += r * xi;
            h00 += w;
            h01 += w * xi;
            h11 += w * xi * xi;
        }
        let det = h00 * h11 - h01 * h01;
        if !(det.is_finite() && det > 0.0) {
            return Err(Error::Separation {
                bound: opts.separation_bound,
            });
        }
        let step0 = (h11 * g0 - h01 * g1) / det;
        let step1 = (h00 * g1 - h01 * g0) / det;
        intercept += step0;
        slope += step1;
        let next_ll = log_likelihood(x, &yf, intercept, slope);
        if slope.abs() > opts.separation_bound && next_ll >= ll {
            return Err(Error::Separation {
                bound: opts.separation_bound,
            });
        }
        ll = next_ll;
        if step0.abs().max(step1.abs()) < opts.tolerance {
            converged = true;
            break;
        }
    }

    let nf = n as f64;
    let null_ll = nf * (ybar * ybar.ln() + (1.0 - ybar) * (1.0 - ybar).ln());
    // Deviance difference summed per observation from the log-odds offset
    // against the null fit, so a near-null model does not lose the statistic
    // to cancellation between two large log-likelihoods.
    let lr = 2.0
        * x.iter()
            .zip(&yf)
            .map(|(&xi, &yi)| {
                let delta = intercept - null_intercept + slope * xi;
                yi * delta - (ybar * delta.exp_m1()).ln_1p()
            })
            .sum::<f64>();
    let lr = lr.max(0.0);
    let cox_snell = -(-lr / nf).exp_m1();
    let max_r2 = 1.0 - (2.0 * null_ll / nf).exp();
    Ok(LogisticFit {
        intercept,
        slope,
        odds_ratio: slope.exp(),
        p_value: chi_square_sf(lr, 1.0)?,
        r2_nagelkerke: (cox_snell / max_r2).clamp(0.0, 1.0),
        log_likelihood: ll,
        null_log_likelihood: null_ll,
        converged,
        iterations,
    })
}
