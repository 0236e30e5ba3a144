//! Hilbert-Schmidt independence criterion with Gaussian kernels.
//!
//! Bandwidth per axis is the median of the nonzero pairwise distances.
//! The statistic is the biased estimate `tr(K H L H) / n^2`.

use crate::error::{check_same_len, invalid, Error, Result};

/// Median of the nonzero `|v_i - v_j|`, `i < j`.
pub fn median_bandwidth(v: &[f64]) -> Result<f64> {
    let n = v.len();
    let mut d = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let dist = (v[i] - v[j]).abs();
            if dist > 0.0 {
                d.push(dist);
            }
        }
    }
    if d.is_empty() {
        return Err(Error::DegenerateInput(
            "median pairwise distance is zero".into(),
        ));
    }
    let len = d.len();
    let mid = len / 2;
    let (lo, m, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *m;
    let median = if len % 2 == 1 {
        upper
    } else {
        let lower = lo.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    };
    if !(median > 0.0) {
        return Err(Error::DegenerateInput(
            "median pairwise distance is zero".into(),
        ));
    }
    Ok(median)
}

/// Dense Gaussian Gram matrix `exp(-(v_i - v_j)^2 / (2 sigma^2))`.
pub fn gaussian_gram(v: &[f64], sigma: f64) -> Vec<Vec<f64>> {
    let g = -0.5 / (sigma * sigma);
    v.iter()
        .map(|a| v.iter().map(|b| (g * (a - b) * (a - b)).exp()).collect())
        .collect()
}

/// `H K H` with `H = I - 11'/n`.
pub fn center_gram(k: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = k.len();
    let rows: Vec<f64> = k.iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
    let grand = rows.iter().sum::<f64>() / n as f64;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| k[i][j] - rows[i] - rows[j] + grand)
                .collect()
        })
        .collect()
}

pub fn hsic(x: &[f64], y: &[f64]) -> Result<f64> {
    check_same_len(x, y)?;
    let n = x.len();
    if n < 4 {
        return Err(invalid("HSIC needs at least four points"));
    }
    let gx = -0.5 / median_bandwidth(x)?.powi(2);
    let gy = -0.5 / median_bandwidth(y)?.powi(2);

    // tr(KHLH) = sum(K.L) - 2/n sum_i k_i l_i + sum(K) sum(L) / n^2,
    // with k_i, l_i the row sums.
    let mut kl = 0.0;
    let mut cross = 0.0;
    let mut ksum = 0.0;
    let mut lsum = 0.0;
    for i in 0..n {
        let (mut ki, mut li, mut kli) = (0.0, 0.0, 0.0);
        for j in 0..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            let k = (gx * dx * dx).exp();
            let l = (gy * dy * dy).exp();
            ki += k;
            li += l;
            kli += k * l;
        }
        kl += kli;
        cross += ki * li;
        ksum += ki;
        lsum += li;
    }
    let nf = n as f64;
    let trace = kl - 2.0 / nf * cross + ksum * lsum / (nf * nf);
    Ok((trace / (nf * nf)).max(0.0))
}
