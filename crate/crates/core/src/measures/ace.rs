//! Maximal correlation by alternating conditional expectations, with a
//! binned-mean smoother of `ceil(sqrt(n))` equal-count bins.

use serde::{Deserialize, Serialize};

use crate::error::{check_same_len, invalid, Error, Result};
use crate::stats::argsort;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AceParams {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for AceParams {
    fn default() -> Self {
        AceParams {
            max_iter: 100,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AceFit {
    /// Absolute correlation between the final transforms.
    pub correlation: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Correlation after each iteration.
    pub trace: Vec<f64>,
}

/// Conditional-mean smoother: equal-count bins along the sorted variable,
/// with tied values always sharing a bin.
struct BinSmoother {
    bin_of: Vec<usize>,
    counts: Vec<f64>,
}

impl BinSmoother {
    fn new(v: &[f64]) -> Self {
        let n = v.len();
        let bins = (n as f64).sqrt().ceil() as usize;
        let order = argsort(v);
        let mut bin_of = vec![0; n];
        let mut start = 0;
        for (pos, &i) in order.iter().enumerate() {
            if pos == 0 || v[i] != v[order[pos - 1]] {
                start = pos;
            }
            bin_of[i] = start * bins / n;
        }
        let mut counts = vec![0.0; bins];
        for &b in &bin_of {
            counts[b] += 1.0;
        }
        BinSmoother { bin_of, counts }
    }

    fn smooth(&self, target: &[f64]) -> Vec<f64> {
        let mut sums = vec![0.0; self.counts.len()];
        for (&b, &t) in self.bin_of.iter().zip(target) {
            sums[b] += t;
        }
        for (s, &c) in sums.iter_mut().zip(&self.counts) {
            if c > 0.0 {
                *s /= c;
            }
        }
        self.bin_of.iter().map(|&b| sums[b]).collect()
    }
}

/// Centers and scales to unit (population) variance; `None` if constant.
fn standardize(v: &mut [f64]) -> Option<()> {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / n;
    if !(var > 1e-300) {
        return None;
    }
    let sd = var.sqrt();
    v.iter_mut().for_each(|a| *a = (*a - m) / sd);
    Some(())
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa > 0.0 && sbb > 0.0 {
        sab / (saa * sbb).sqrt()
    } else {
        0.0
    }
}

pub fn ace_fit(x: &[f64], y: &[f64], params: &AceParams) -> Result<AceFit> {
    check_same_len(x, y)?;
    if x.len() < 20 {
        return Err(invalid("ACE needs at least twenty points"));
    }
    if params.max_iter == 0 {
        return Err(invalid("ace.max_iter must be at least 1"));
    }
    let sx = BinSmoother::new(x);
    let sy = BinSmoother::new(y);
    let mut theta = y.to_vec();
    standardize(&mut theta).ok_or_else(|| Error::DegenerateInput("constant y".into()))?;

    let mut trace = Vec::new();
    let mut converged = false;
    let mut last = f64::NEG_INFINITY;
    for _ in 0..params.max_iter {
        let phi = sx.smooth(&theta);
        let rho = correlation(&theta, &phi);
        trace.push(rho);
        let mut next = sy.smooth(&phi);
        if standardize(&mut next).is_none() {
            // E[theta | x] is constant: no dependence the smoother can see.
            converged = true;
            break;
        }
        theta = next;
        if (rho - last).abs() < params.tol {
            converged = true;
            break;
        }
        last = rho;
    }
    Ok(AceFit {
        correlation: trace.last().copied().unwrap_or(0.0).abs().min(1.0),
        iterations: trace.len(),
        converged,
        trace,
    })
}

pub fn ace(x: &[f64], y: &[f64], params: &AceParams) -> Result<f64> {
    Ok(ace_fit(x, y, params)?.correlation)
}
