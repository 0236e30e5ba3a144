//! k-nearest-neighbour mutual information (neighbour-counting estimator,
//! max-norm, first variant), in nats.
//!
//! Each axis is first mapped to its empirical copula: ordinal ranks with
//! ties broken by index, spread to `(r + h(r)) / n` where `h` is a fixed
//! pseudo-random offset in `(0, 1)` depending only on the rank. The score is
//! therefore a function of the two rank vectors alone and is exactly
//! invariant under strictly increasing marginal maps.

use serde::{Deserialize, Serialize};

use crate::error::{check_same_len, invalid, Result};
use crate::stats::ordinal_ranks;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiParams {
    pub k: usize,
    /// Report binned `I / sqrt(H(x) H(y))` instead of the kNN estimate.
    pub normalized: bool,
}

impl Default for MiParams {
    fn default() -> Self {
        MiParams {
            k: 6,
            normalized: false,
        }
    }
}

fn rank_offset(r: usize) -> f64 {
    let mut z = (r as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    // 53 random bits in (0, 1).
    ((z >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

pub(crate) fn copula(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    ordinal_ranks(v)
        .into_iter()
        .map(|r| (r as f64 + rank_offset(r)) / n)
        .collect()
}

/// `psi(m)` for `m = 0..=n` (entry 0 unused).
fn digamma_table(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    if n >= 1 {
        t[1] = -EULER_GAMMA;
    }
    for m in 2..=n {
        t[m] = t[m - 1] + 1.0 / (m - 1) as f64;
    }
    t
}

/// Count of sorted values strictly within `radius` of `center`.
fn count_within(sorted: &[f64], center: f64, radius: f64) -> usize {
    let lo = sorted.partition_point(|&w| w <= center - radius);
    let hi = sorted.partition_point(|&w| w < center + radius);
    hi - lo
}

/// Max-norm distance from each point to its `k`-th nearest neighbour.
fn kth_neighbor_distances(u: &[f64], v: &[f64], k: usize) -> Vec<f64> {
    let n = u.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| u[a].total_cmp(&u[b]));
    let mut out = vec![0.0; n];
    // Sorted ascending list of the k best distances so far.
    let mut best: Vec<f64> = Vec::with_capacity(k + 1);
    for p in 0..n {
        let i = order[p];
        best.clear();
        let (mut left, mut right) = (p, p + 1);
        loop {
            let bound = if best.len() == k {
                best[k - 1]
            } else {
                f64::INFINITY
            };
            let dl = if left > 0 {
                u[i] - u[order[left - 1]]
            } else {
                f64::INFINITY
            };
            let dr = if right < n {
                u[order[right]] - u[i]
            } else {
                f64::INFINITY
            };
            let (du, j) = if dl <= dr {
                if left == 0 {
                    break;
                }
                left -= 1;
                (dl, order[left])
            } else {
                right += 1;
                (dr, order[right - 1])
            };
            if du >= bound {
                break;
            }
            let d = du.max((v[i] - v[j]).abs());
            if d < bound {
                let pos = best.partition_point(|&b| b <= d);
                best.insert(pos, d);
                best.truncate(k);
            }
        }
        out[i] = best[k - 1];
    }
    out
}

/// The neighbour-counting estimate on already transformed coordinates.
pub fn ksg(u: &[f64], v: &[f64], k: usize) -> f64 {
    let n = u.len();
    let eps = kth_neighbor_distances(u, v, k);
    let mut su = u.to_vec();
    su.sort_by(f64::total_cmp);
    let mut sv = v.to_vec();
    sv.sort_by(f64::total_cmp);
    let psi = digamma_table(n);
    let mut acc = 0.0;
    for i in 0..n {
        // Counts include the point itself, i.e. they are n_x + 1.
        let nx = count_within(&su, u[i], eps[i]);
        let ny = count_within(&sv, v[i], eps[i]);
        acc += psi[nx] + psi[ny];
    }
    psi[k] + psi[n] - acc / n as f64
}

fn binned_entropies(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len();
    let bins = (n as f64).sqrt().ceil() as usize;
    let bin = |v: &[f64]| -> Vec<usize> {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w = hi - lo;
        v.iter()
            .map(|&a| {
                if w > 0.0 {
                    (((a - lo) / w * bins as f64) as usize).min(bins - 1)
                } else {
                    0
                }
            })
            .collect()
    };
    let bx = bin(x);
    let by = bin(y);
    let mut joint = vec![0usize; bins * bins];
    let mut mx = vec![0usize; bins];
    let mut my = vec![0usize; bins];
    for (a, b) in bx.iter().zip(&by) {
        joint[a * bins + b] += 1;
        mx[*a] += 1;
        my[*b] += 1;
    }
    let h = |counts: &[usize]| -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n as f64;
                -p * p.ln()
            })
            .sum()
    };
    (h(&mx), h(&my), h(&joint))
}

/// Binned mutual information normalized by `sqrt(H(x) H(y))`, `ceil(sqrt(n))`
/// equal-width bins per axis.
pub fn normalized_binned_mi(x: &[f64], y: &[f64]) -> f64 {
    let (hx, hy, hxy) = binned_entropies(x, y);
    let denom = (hx * hy).sqrt();
    if denom > 0.0 {
        ((hx + hy - hxy) / denom).max(0.0)
    } else {
        0.0
    }
}

pub fn mutual_information(x: &[f64], y: &[f64], params: &MiParams) -> Result<f64> {
    check_same_len(x, y)?;
    let k = params.k;
    if k == 0 {
        return Err(invalid("mi.k must be at least 1"));
    }
    if x.len() <= k + 1 {
        return Err(invalid(format!(
            "mutual information needs more than k + 1 = {} points",
            k + 1
        )));
    }
    if params.normalized {
        return Ok(normalized_binned_mi(x, y));
    }
    Ok(ksg(&copula(x), &copula(y), k))
}
