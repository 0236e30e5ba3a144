//! Distance correlation (biased V-statistic form).

use crate::error::{check_same_len, invalid, Result};

fn row_means(v: &[f64]) -> (Vec<f64>, f64) {
    let n = v.len();
    let rows: Vec<f64> = v
        .iter()
        .map(|a| v.iter().map(|b| (a - b).abs()).sum::<f64>() / n as f64)
        .collect();
    let grand = rows.iter().sum::<f64>() / n as f64;
    (rows, grand)
}

/// Squared distance covariance and the two squared distance variances,
/// computed in `O(n^2)` time without materializing the distance matrices.
pub fn distance_moments(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len();
    let (rx, gx) = row_means(x);
    let (ry, gy) = row_means(y);
    let (mut cov, mut vx, mut vy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (mut c, mut a2, mut b2) = (0.0, 0.0, 0.0);
        for j in 0..n {
            let a = (x[i] - x[j]).abs() - rx[i] - rx[j] + gx;
            let b = (y[i] - y[j]).abs() - ry[i] - ry[j] + gy;
            c += a * b;
            a2 += a * a;
            b2 += b * b;
        }
        cov += c;
        vx += a2;
        vy += b2;
    }
    let nn = (n * n) as f64;
    (cov / nn, vx / nn, vy / nn)
}

/// Sample distance correlation in `[0, 1]`.
///
/// A constant input has zero distance variance; the score is then 0
/// rather than an error.
pub fn distance_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    check_same_len(x, y)?;
    if x.len() < 2 {
        return Err(invalid("distance correlation needs at least two points"));
    }
    let (cov, vx, vy) = distance_moments(x, y);
    let denom = (vx * vy).sqrt();
    if !(denom > 0.0) {
        return Ok(0.0);
    }
    Ok((cov / denom).max(0.0).sqrt().min(1.0))
}
