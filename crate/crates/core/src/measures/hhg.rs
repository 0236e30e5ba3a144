//! HHG sum-of-chi-squares statistic on pairwise distances.
//!
//! For every ordered pair `(i, j)`, the remaining points are split by
//! `d(x_i, x_k) <= d(x_i, x_j)` and `d(y_i, y_k) <= d(y_i, y_j)` into a 2x2
//! table, whose Pearson chi-square is added to the total. Tables with an
//! empty margin contribute nothing.
//!
//! Per anchor `i`, points are swept in order of x-distance while a Fenwick
//! tree over y-distance ranks counts the dominated points, giving
//! `O(n^2 log n)` overall.

use serde::{Deserialize, Serialize};

use crate::error::{check_same_len, invalid, Error, Result};

pub const DEFAULT_HHG_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HhgParams {
    pub cap: usize,
}

impl Default for HhgParams {
    fn default() -> Self {
        HhgParams {
            cap: DEFAULT_HHG_CAP,
        }
    }
}

/// Chi-square of the table built from inclusive counts over the `m = n - 2`
/// points other than `i` and `j`. `None` for a degenerate margin.
pub fn table_chi_square(m: usize, a11: usize, row1: usize, col1: usize) -> Option<f64> {
    let row2 = m - row1;
    let col2 = m - col1;
    if row1 == 0 || row2 == 0 || col1 == 0 || col2 == 0 {
        return None;
    }
    let a12 = (row1 - a11) as f64;
    let a21 = (col1 - a11) as f64;
    let a22 = (m + a11 - row1 - col1) as f64;
    let a11 = a11 as f64;
    let det = a11 * a22 - a12 * a21;
    Some(m as f64 * det * det / (row1 as f64 * row2 as f64 * col1 as f64 * col2 as f64))
}

struct Fenwick(Vec<usize>);

impl Fenwick {
    fn reset(&mut self, size: usize) {
        self.0.clear();
        self.0.resize(size + 1, 0);
    }

    fn add(&mut self, pos: usize) {
        let mut i = pos;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count at positions `1..=pos`.
    fn prefix(&self, pos: usize) -> usize {
        let mut i = pos;
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Per-anchor orderings of one dataset, reusable across permutations of `y`.
///
/// For every anchor `a`, the other points in order of x-distance (with tie
/// groups), and the dense rank of every y-distance `|y_a - y_b|`. Under a
/// permutation `p` of `y`, anchor `i` looks up ranks in row `p[i]`.
pub struct HhgPrepared {
    n: usize,
    x_order: Vec<u32>,
    x_group_end: Vec<u32>,
    y_rank: Vec<u32>,
    y_cum: Vec<Vec<u32>>,
}

impl HhgPrepared {
    pub fn new(x: &[f64], y: &[f64], params: &HhgParams) -> Result<Self> {
        check_same_len(x, y)?;
        let n = x.len();
        if n < 4 {
            return Err(invalid("HHG needs at least four points"));
        }
        if n > params.cap {
            return Err(Error::SizeCap { n, cap: params.cap });
        }
        let w = n - 1;
        let mut x_order = vec![0u32; n * w];
        let mut x_group_end = vec![0u32; n * w];
        let mut y_rank = vec![0u32; n * n];
        let mut y_cum = Vec::with_capacity(n);
        let mut others: Vec<usize> = Vec::with_capacity(w);
        for a in 0..n {
            let dx = |k: usize| (x[a] - x[k]).abs();
            let dy = |k: usize| (y[a] - y[k]).abs();

            others.clear();
            others.extend((0..n).filter(|&k| k != a));
            others.sort_by(|&p, &q| dx(p).total_cmp(&dx(q)));
            let row = &mut x_order[a * w..(a + 1) * w];
            let ends = &mut x_group_end[a * w..(a + 1) * w];
            let mut start = 0;
            while start < w {
                let mut end = start + 1;
                while end < w && dx(others[end]) == dx(others[start]) {
                    end += 1;
                }
                for pos in start..end {
                    row[pos] = others[pos] as u32;
                    ends[pos] = end as u32;
                }
                start = end;
            }

            // Dense 1-based ranks; cum[r] = #points with rank <= r.
            others.sort_by(|&p, &q| dy(p).total_cmp(&dy(q)));
            let mut cum = vec![0u32];
            for (pos, &k) in others.iter().enumerate() {
                if pos == 0 || dy(k) != dy(others[pos - 1]) {
                    cum.push(*cum.last().unwrap());
                }
                let r = cum.len() - 1;
                y_rank[a * n + k] = r as u32;
                cum[r] += 1;
            }
            y_cum.push(cum);
        }
        Ok(HhgPrepared {
            n,
            x_order,
            x_group_end,
            y_rank,
            y_cum,
        })
    }

    /// Statistic on `(x, y[perm])`, i.e. `y_k` replaced by `y[perm[k]]`.
    pub fn score(&self, perm: &[usize]) -> f64 {
        let n = self.n;
        let w = n - 1;
        let m = n - 2;
        let mut total = 0.0;
        let mut terms = vec![0.0; n];
        let mut tree = Fenwick(Vec::new());
        let mut ranks = vec![0usize; w];
        for i in 0..n {
            let a = perm[i];
            let rank_row = &self.y_rank[a * n..(a + 1) * n];
            let cum = &self.y_cum[a];
            let order = &self.x_order[i * w..(i + 1) * w];
            let ends = &self.x_group_end[i * w..(i + 1) * w];
            for (r, &k) in ranks.iter_mut().zip(order) {
                *r = rank_row[perm[k as usize]] as usize;
            }
            tree.reset(cum.len());
            terms.iter_mut().for_each(|t| *t = 0.0);
            let mut start = 0;
            while start < w {
                let end = ends[start] as usize;
                for &r in &ranks[start..end] {
                    tree.add(r);
                }
                for pos in start..end {
                    let r = ranks[pos];
                    // Inclusive counts contain j itself once.
                    let a11 = tree.prefix(r) - 1;
                    let row1 = end - 1;
                    let col1 = cum[r] as usize - 1;
                    if let Some(c) = table_chi_square(m, a11, row1, col1) {
                        terms[order[pos] as usize] = c;
                    }
                }
                start = end;
            }
            total += terms.iter().sum::<f64>();
        }
        total
    }
}

pub fn hhg(x: &[f64], y: &[f64], params: &HhgParams) -> Result<f64> {
    let prepared = HhgPrepared::new(x, y, params)?;
    let identity: Vec<usize> = (0..x.len()).collect();
    Ok(prepared.score(&identity))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_is_enforced() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let err = hhg(&x, &x, &HhgParams { cap: 10 }).unwrap_err();
        assert_eq!(err, Error::SizeCap { n: 20, cap: 10 });
    }

    #[test]
    fn degenerate_margins_are_skipped() {
        assert_eq!(table_chi_square(5, 0, 0, 3), None);
        assert_eq!(table_chi_square(5, 3, 5, 3), None);
        // Perfect association in a 2/2 split.
        assert_eq!(table_chi_square(4, 2, 2, 2), Some(4.0));
    }

    #[test]
    fn prepared_matches_permuted_data() {
        use rand::seq::SliceRandom;
        let x = crate::noise::standard_normal(60, 3);
        let y: Vec<f64> = x.iter().map(|v| (v * 4.0).round()).collect();
        let prepared = HhgPrepared::new(&x, &y, &HhgParams::default()).unwrap();
        let mut perm: Vec<usize> = (0..60).collect();
        let mut rng = crate::seed::rng(4);
        for _ in 0..5 {
            perm.shuffle(&mut rng);
            let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
            let direct = hhg(&x, &yp, &HhgParams::default()).unwrap();
            assert_eq!(prepared.score(&perm).to_bits(), direct.to_bits());
        }
    }

    #[test]
    fn non_negative() {
        let x = crate::noise::standard_normal(40, 1);
        let y = crate::noise::standard_normal(40, 2);
        assert!(hhg(&x, &y, &HhgParams::default()).unwrap() >= 0.0);
    }
}
