//! Randomized dependence coefficient.
//!
//! Each axis is mapped to its copula (mid-ranks / n), augmented with a
//! constant, and projected onto `k` random directions with Gaussian weights
//! scaled by `s / 2`; sine and cosine of the projections form the feature
//! sets. The score is the largest canonical correlation between the two
//! feature sets. The same projection weights are used for both axes.
//!
//! Canonical correlations are the singular values of `Ux' Uy`, where `Ux`,
//! `Uy` are orthonormal bases of the centered feature matrices. Directions
//! with singular value below `1e-7` times the largest are dropped, which
//! handles the near-collinear features produced by small projection scales.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_same_len, invalid, Result};
use crate::seed;
use crate::stats::mid_ranks;

const RANK_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdcParams {
    pub k: usize,
    pub s: f64,
    pub seed: u64,
}

impl Default for RdcParams {
    fn default() -> Self {
        RdcParams {
            k: 20,
            s: 1.0 / 6.0,
            seed: 0,
        }
    }
}

fn features(copula: &[f64], weights: &[(f64, f64)]) -> DMatrix<f64> {
    let n = copula.len();
    let k = weights.len();
    let mut m = DMatrix::zeros(n, 2 * k);
    for (c, &(w, b)) in weights.iter().enumerate() {
        for (r, &u) in copula.iter().enumerate() {
            let p = w * u + b;
            m[(r, c)] = p.sin();
            m[(r, k + c)] = p.cos();
        }
    }
    for mut col in m.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    m
}

/// Orthonormal basis of the column space, dropping numerically null directions.
fn orthonormal_basis(m: DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| max > 0.0 && s > RANK_TOL * max)
        .map(|(i, _)| i)
        .collect();
    u.select_columns(&keep)
}

/// Largest canonical correlation between the columns of `a` and `b`.
pub fn max_canonical_correlation(a: DMatrix<f64>, b: DMatrix<f64>) -> f64 {
    let ua = orthonormal_basis(a);
    let ub = orthonormal_basis(b);
    if ua.ncols() == 0 || ub.ncols() == 0 {
        return 0.0;
    }
    let c = ua.transpose() * ub;
    let sv = c.singular_values();
    sv.iter().copied().fold(0.0, f64::max).clamp(0.0, 1.0)
}

pub fn rdc(x: &[f64], y: &[f64], params: &RdcParams) -> Result<f64> {
    check_same_len(x, y)?;
    let n = x.len();
    if params.k == 0 {
        return Err(invalid("rdc.k must be at least 1"));
    }
    if n < params.k.max(2) {
        return Err(invalid(format!(
            "RDC needs at least k = {} points",
            params.k
        )));
    }
    if !(params.s > 0.0 && params.s.is_finite()) {
        return Err(invalid(format!("rdc.s must be positive, got {}", params.s)));
    }
    let mut rng = seed::rng(params.seed);
    let scale = params.s / 2.0;
    let weights: Vec<(f64, f64)> = (0..params.k)
        .map(|_| {
            let w: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            (scale * w, scale * b)
        })
        .collect();
    let nf = n as f64;
    let cx: Vec<f64> = mid_ranks(x).into_iter().map(|r| r / nf).collect();
    let cy: Vec<f64> = mid_ranks(y).into_iter().map(|r| r / nf).collect();
    Ok(max_canonical_correlation(
        features(&cx, &weights),
        features(&cy, &weights),
    ))
}
