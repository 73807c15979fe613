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

//! Reference computations that share no code with the library.

pub fn log_likelihood(x: &[f64], y: &[u8], b0: f64, b1: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let eta = b0 + b1 * xi;
            // log(1 + e^eta) without overflow
            let softplus = eta.max(0.0) + (-eta.abs()).exp().ln_1p();
            f64::from(yi) * eta - softplus
        })
        .sum()
}

/// Grid maximizer of the log-likelihood: a 0.1 grid over [-10, 10]^2, then
/// 0.01 and 0.001 grids around the running best.
pub fn grid_oracle(x: &[f64], y: &[u8]) -> (f64, f64) {
    let mut best = (0.0, 0.0);
    let mut radius: f64 = 10.0;
    for step in [0.1, 0.01, 0.001] {
        let steps = (radius / step).round() as i64;
        let center = best;
        let mut best_ll = f64::NEG_INFINITY;
        for i in -steps..=steps {
            for j in -steps..=steps {
                let b0 = center.0 + i as f64 * step;
                let b1 = center.1 + j as f64 * step;
                let ll = log_likelihood(x, y, b0, b1);
                if ll > best_ll {
                    best_ll = ll;
                    best = (b0, b1);
                }
            }
        }
        radius = step * 2.0;
    }
    best
}

/// Exact normal-equation solution for integer data, rounded once.
pub fn exact_ols(x: &[i64], y: &[i64]) -> (f64, f64) {
    let n = x.len() as i128;
    let sx: i128 = x.iter().map(|&v| v as i128).sum();
    let sy: i128 = y.iter().map(|&v| v as i128).sum();
    let sxx: i128 = x.iter().map(|&v| (v as i128).pow(2)).sum();
    let sxy: i128 = x.iter().zip(y).map(|(&a, &b)| a as i128 * b as i128).sum();
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) as f64 / det as f64;
    let intercept = (sxx * sy - sx * sxy) as f64 / det as f64;
    (intercept, slope)
}
