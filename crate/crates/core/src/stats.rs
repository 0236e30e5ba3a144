//! Small numeric helpers shared by the generators and the measures.

use std::cmp::Ordering;

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Unbiased sample variance (divisor `n - 1`).
pub fn variance(v: &[f64]) -> f64 {
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(v);
    v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1) as f64
}

pub fn std_dev(v: &[f64]) -> f64 {
    variance(v).sqrt()
}

/// Unbiased sample covariance.
pub fn covariance(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let mx = mean(x);
    let my = mean(y);
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - mx) * (b - my))
        .sum::<f64>()
        / (n - 1) as f64
}

pub fn sum_squares(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

pub(crate) fn total_cmp(a: &f64, b: &f64) -> Ordering {
    a.total_cmp(b)
}

/// Indices that sort `v` ascending; equal values keep index order.
pub fn argsort(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| total_cmp(&v[a], &v[b]));
    idx
}

/// Average ranks (1-based), ties share the mean of their positions.
pub fn mid_ranks(v: &[f64]) -> Vec<f64> {
    let order = argsort(v);
    let n = v.len();
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let r = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Ordinal ranks `0..n`; ties are broken by index, which acts as a
/// deterministic infinitesimal jitter keyed on position.
pub fn ordinal_ranks(v: &[f64]) -> Vec<usize> {
    let order = argsort(v);
    let mut ranks = vec![0; v.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r;
    }
    ranks
}

/// Empirical quantile by order statistic `ceil(p * n)` (1-based), clamped to `[1, n]`.
pub fn upper_order_statistic(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let k = ((p * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    sorted[k - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variance_uses_n_minus_one() {
        assert_eq!(variance(&[1.0, 2.0, 3.0, 4.0]), 5.0 / 3.0);
        assert_eq!(variance(&[7.0]), 0.0);
    }

    #[test]
    fn mid_ranks_average_ties() {
        assert_eq!(
            mid_ranks(&[10.0, 20.0, 20.0, 5.0]),
            vec![2.0, 3.5, 3.5, 1.0]
        );
    }

    #[test]
    fn ordinal_ranks_break_ties_by_index() {
        assert_eq!(ordinal_ranks(&[1.0, 0.0, 1.0, 1.0]), vec![1, 0, 2, 3]);
    }
}
