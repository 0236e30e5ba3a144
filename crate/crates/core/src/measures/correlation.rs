//! Pearson, Spearman and Kendall correlation.

use crate::error::{check_same_len, invalid, Error, Result};
use crate::stats::{argsort, mean, mid_ranks};

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    check_same_len(x, y)?;
    if x.len() < 2 {
        return Err(invalid("correlation needs at least two points"));
    }
    Ok(())
}

/// Sample product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Err(Error::DegenerateInput("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson correlation of mid-ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&mid_ranks(x), &mid_ranks(y))
}

/// Number of tied pairs within runs of equal values of an already sorted key.
fn tied_pairs<F: Fn(usize) -> f64>(n: usize, key: F) -> i64 {
    let mut total = 0i64;
    let mut run = 1i64;
    for i in 1..n {
        if key(i) == key(i - 1) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Merge sort counting strict inversions.
fn sort_counting_swaps(v: &mut [f64], buf: &mut [f64]) -> i64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (l, r) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        sort_counting_swaps(l, bl) + sort_counting_swaps(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as i64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + (mid - i)].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + (n - j)].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Integer components of Kendall's tau-b: `(concordant - discordant,
/// pairs - x ties, pairs - y ties)`.
pub(crate) fn kendall_counts(x: &[f64], y: &[f64]) -> (i64, i64, i64) {
    let n = x.len();
    let mut order = argsort(y);
    // Stable sort by x after sorting by y gives (x, y) lexicographic order.
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();

    let pairs = (n as i64) * (n as i64 - 1) / 2;
    let x_ties = tied_pairs(n, |i| xs[i]);
    let mut joint_ties = 0i64;
    let mut run = 1i64;
    for i in 1..n {
        if xs[i] == xs[i - 1] && ys[i] == ys[i - 1] {
            run += 1;
        } else {
            joint_ties += run * (run - 1) / 2;
            run = 1;
        }
    }
    joint_ties += run * (run - 1) / 2;

    let mut buf = vec![0.0; n];
    let swaps = sort_counting_swaps(&mut ys, &mut buf);
    let y_ties = tied_pairs(n, |i| ys[i]);

    let numerator = pairs - x_ties - y_ties + joint_ties - 2 * swaps;
    (numerator, pairs - x_ties, pairs - y_ties)
}

/// Kendall's tau-b in `O(n log n)` via inversion counting.
pub fn kendall(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let (num, px, py) = kendall_counts(x, y);
    tau_b(num, px, py)
}

pub(crate) fn tau_b(num: i64, px: i64, py: i64) -> Result<f64> {
    if px == 0 || py == 0 {
        return Err(Error::DegenerateInput(
            "all pairs are tied on one axis".into(),
        ));
    }
    Ok((num as f64 / ((px as f64).sqrt() * (py as f64).sqrt())).clamp(-1.0, 1.0))
}
