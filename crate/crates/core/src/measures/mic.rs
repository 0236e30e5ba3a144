//! Maximal information coefficient.
//!
//! For every grid shape `(cols, rows)` with `cols * rows <= n^alpha`, one
//! axis is equipartitioned and the partition of the other axis is chosen by
//! dynamic programming over clumps (runs of consecutive points that fall in
//! the same row). When there are more clumps than `clumps * max_cols`, they
//! are first merged into that many superclumps of roughly equal mass. Both
//! orientations are tried, so the score is symmetric in `x` and `y`.
//!
//! The computation runs on ordinal ranks; ties are broken by index.

use serde::{Deserialize, Serialize};

use crate::error::{check_same_len, invalid, Result};
use crate::stats::ordinal_ranks;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicParams {
    pub alpha: f64,
    /// Superclump budget per column.
    pub clumps: usize,
}

impl Default for MicParams {
    fn default() -> Self {
        MicParams {
            alpha: 0.6,
            clumps: 15,
        }
    }
}

/// Grid cell budget `max(floor(n^alpha), 4)`.
pub fn grid_budget(n: usize, alpha: f64) -> usize {
    ((n as f64).powf(alpha).floor() as usize).max(4)
}

/// Row index `floor(rank * rows / n)` of each point.
pub fn equipartition(ranks: &[usize], rows: usize) -> Vec<usize> {
    let n = ranks.len();
    ranks.iter().map(|&r| r * rows / n).collect()
}

fn entropy_of_counts(counts: &[usize], total: usize) -> f64 {
    let t = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / t;
            -p * p.ln()
        })
        .sum()
}

/// Group `order` (points sorted along the free axis) into clumps, then cap
/// the number of groups at `limit`. Returns per-group row counts.
fn clump_counts(order: &[usize], row_of: &[usize], rows: usize, limit: usize) -> Vec<Vec<usize>> {
    let mut clumps: Vec<Vec<usize>> = Vec::new();
    let mut last_row = usize::MAX;
    for &p in order {
        let r = row_of[p];
        if r != last_row {
            clumps.push(vec![0; rows]);
            last_row = r;
        }
        clumps.last_mut().unwrap()[r] += 1;
    }
    if clumps.len() <= limit {
        return clumps;
    }
    // Superclumps: cut after the clump where the running mass first
    // reaches the next multiple of n / limit.
    let n = order.len() as f64;
    let mut merged: Vec<Vec<usize>> = Vec::with_capacity(limit);
    let mut current = vec![0; rows];
    let mut mass = 0usize;
    let mut next_cut = 1usize;
    for c in clumps {
        for (acc, v) in current.iter_mut().zip(&c) {
            *acc += v;
        }
        mass += c.iter().sum::<usize>();
        if mass as f64 >= next_cut as f64 * n / limit as f64 {
            merged.push(std::mem::replace(&mut current, vec![0; rows]));
            while next_cut as f64 * n / limit as f64 <= mass as f64 {
                next_cut += 1;
            }
        }
    }
    if current.iter().any(|&v| v > 0) {
        merged.push(current);
    }
    merged
}

/// Best mutual information (nats) between the fixed row partition and a
/// partition of the free axis into at most `c` columns, for `c = 0..=max_cols`
/// (entries 0 and 1 are 0).
///
/// `order` lists point indices sorted along the free axis; `row_of` gives
/// each point's row.
pub fn optimal_axis_mi(
    order: &[usize],
    row_of: &[usize],
    rows: usize,
    max_cols: usize,
    clump_factor: usize,
) -> Vec<f64> {
    let n = order.len();
    let limit = (clump_factor * max_cols).max(max_cols);
    let groups = clump_counts(order, row_of, rows, limit);
    let m = groups.len();

    let mut row_totals = vec![0; rows];
    for g in &groups {
        for (t, v) in row_totals.iter_mut().zip(g) {
            *t += v;
        }
    }
    let h_rows = entropy_of_counts(&row_totals, n);

    // prefix[t][r]: row-r count among the first t groups.
    let mut prefix = vec![vec![0usize; rows]; m + 1];
    for t in 0..m {
        for r in 0..rows {
            prefix[t + 1][r] = prefix[t][r] + groups[t][r];
        }
    }
    let qlnq: Vec<f64> = (0..=n)
        .map(|q| {
            if q == 0 {
                0.0
            } else {
                q as f64 * (q as f64).ln()
            }
        })
        .collect();
    // sum_r q_r ln(q_r / Q) over the column made of groups s..t.
    let column = |s: usize, t: usize| -> f64 {
        let mut total = 0usize;
        let mut acc = 0.0;
        for r in 0..rows {
            let q = prefix[t][r] - prefix[s][r];
            total += q;
            acc += qlnq[q];
        }
        acc - qlnq[total]
    };

    let mut out = vec![0.0; max_cols + 1];
    let nf = n as f64;
    // best[t]: best score with exactly `l` columns covering the first t groups.
    let mut best: Vec<f64> = (0..=m)
        .map(|t| {
            if t == 0 {
                f64::NEG_INFINITY
            } else {
                column(0, t)
            }
        })
        .collect();
    let mut running = h_rows + best[m] / nf;
    if max_cols >= 1 {
        out[1] = 0.0;
    }
    for l in 2..=max_cols {
        let mut next = vec![f64::NEG_INFINITY; m + 1];
        for t in l..=m {
            let mut b = f64::NEG_INFINITY;
            for s in l - 1..t {
                let cand = best[s] + column(s, t);
                if cand > b {
                    b = cand;
                }
            }
            next[t] = b;
        }
        best = next;
        if best[m].is_finite() {
            running = running.max(h_rows + best[m] / nf);
        }
        out[l] = running.max(0.0);
    }
    out
}

/// Normalized characteristic matrix; entry `[cols][rows]` is defined for
/// `cols, rows >= 2` with `cols * rows <= budget`, other entries are 0.
pub fn characteristic_matrix(x: &[f64], y: &[f64], params: &MicParams) -> Result<Vec<Vec<f64>>> {
    check_same_len(x, y)?;
    let n = x.len();
    if n < 8 {
        return Err(invalid("MIC needs at least eight points"));
    }
    if !(params.alpha > 0.0 && params.alpha <= 1.0) {
        return Err(invalid(format!(
            "mic.alpha must be in (0, 1], got {}",
            params.alpha
        )));
    }
    if params.clumps == 0 {
        return Err(invalid("mic.clumps must be at least 1"));
    }
    let budget = grid_budget(n, params.alpha);
    let rx = ordinal_ranks(x);
    let ry = ordinal_ranks(y);
    let mut by_x = vec![0; n];
    let mut by_y = vec![0; n];
    for i in 0..n {
        by_x[rx[i]] = i;
        by_y[ry[i]] = i;
    }

    let mut raw = vec![vec![0.0f64; budget + 1]; budget + 1];
    for fixed in 2..=budget / 2 {
        let max_free = budget / fixed;
        if max_free < 2 {
            continue;
        }
        // y equipartitioned into `fixed` rows, x free.
        let rows_y = equipartition(&ry, fixed);
        let ix = optimal_axis_mi(&by_x, &rows_y, fixed, max_free, params.clumps);
        // x equipartitioned into `fixed` columns, y free.
        let cols_x = equipartition(&rx, fixed);
        let iy = optimal_axis_mi(&by_y, &cols_x, fixed, max_free, params.clumps);
        for free in 2..=max_free {
            raw[free][fixed] = raw[free][fixed].max(ix[free]);
            raw[fixed][free] = raw[fixed][free].max(iy[free]);
        }
    }
    for (c, row) in raw.iter_mut().enumerate() {
        for (r, v) in row.iter_mut().enumerate() {
            if c >= 2 && r >= 2 && c * r <= budget {
                *v = (*v / (c.min(r) as f64).ln()).clamp(0.0, 1.0);
            } else {
                *v = 0.0;
            }
        }
    }
    Ok(raw)
}

pub fn mic(x: &[f64], y: &[f64], params: &MicParams) -> Result<f64> {
    let m = characteristic_matrix(x, y, params)?;
    Ok(m.iter().flatten().copied().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_line_scores_one() {
        let x = crate::relations::sample_x(500, 1).unwrap();
        assert!(mic(&x, &x, &MicParams::default()).unwrap() >= 0.99);
    }

    #[test]
    fn budget() {
        assert_eq!(grid_budget(500, 0.6), 41);
        assert_eq!(grid_budget(8, 0.6), 4);
    }

    #[test]
    fn symmetric() {
        let x = crate::noise::standard_normal(200, 5);
        let y: Vec<f64> = x.iter().map(|v| (3.0 * v).sin()).collect();
        let p = MicParams::default();
        assert_eq!(mic(&x, &y, &p).unwrap(), mic(&y, &x, &p).unwrap());
    }

    #[test]
    fn superclumps_respect_limit() {
        let order: Vec<usize> = (0..100).collect();
        let rows: Vec<usize> = (0..100).map(|i| i % 2).collect();
        let g = clump_counts(&order, &rows, 2, 10);
        assert!(g.len() <= 10);
        assert_eq!(g.iter().flatten().sum::<usize>(), 100);
    }
}
