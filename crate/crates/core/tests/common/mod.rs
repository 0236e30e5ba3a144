//! Direct small-instance oracles shared by the test targets.
#![allow(dead_code, clippy::needless_range_loop)]

use equibench::measures::dcor::distance_correlation;
use equibench::measures::hhg::{hhg, HhgParams};
use equibench::measures::kendall;
use equibench::measures::mic::{equipartition, grid_budget, mic, optimal_axis_mi, MicParams};
use equibench::seed::rng;
use equibench::stats::ordinal_ranks;
use rand::Rng;

pub fn kendall_brute(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut s, mut tx, mut ty) = (0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let a = (x[i] - x[j]).partial_cmp(&0.0).unwrap() as i64;
            let b = (y[i] - y[j]).partial_cmp(&0.0).unwrap() as i64;
            s += a * b;
            tx += (a == 0) as i64;
            ty += (b == 0) as i64;
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let (px, py) = (n0 - tx, n0 - ty);
    if px == 0 || py == 0 {
        return None;
    }
    Some((s as f64 / ((px as f64).sqrt() * (py as f64).sqrt())).clamp(-1.0, 1.0))
}

pub fn hhg_naive(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let m = (n - 2) as f64;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let rx = (x[i] - x[j]).abs();
            let ry = (y[i] - y[j]).abs();
            let mut t = [[0.0f64; 2]; 2];
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let a = ((x[i] - x[k]).abs() > rx) as usize;
                let b = ((y[i] - y[k]).abs() > ry) as usize;
                t[a][b] += 1.0;
            }
            let rows = [t[0][0] + t[0][1], t[1][0] + t[1][1]];
            let cols = [t[0][0] + t[1][0], t[0][1] + t[1][1]];
            if rows.contains(&0.0) || cols.contains(&0.0) {
                continue;
            }
            for a in 0..2 {
                for b in 0..2 {
                    let e = rows[a] * cols[b] / m;
                    total += (t[a][b] - e).powi(2) / e;
                }
            }
        }
    }
    total
}

pub fn mi_of_grid(col_of: &[usize], row_of: &[usize], cols: usize, rows: usize) -> f64 {
    let n = col_of.len() as f64;
    let mut joint = vec![vec![0.0; rows]; cols];
    for (&c, &r) in col_of.iter().zip(row_of) {
        joint[c][r] += 1.0;
    }
    let pc: Vec<f64> = joint.iter().map(|v| v.iter().sum::<f64>() / n).collect();
    let pr: Vec<f64> = (0..rows)
        .map(|r| joint.iter().map(|v| v[r]).sum::<f64>() / n)
        .collect();
    let mut i = 0.0;
    for c in 0..cols {
        for r in 0..rows {
            let p = joint[c][r] / n;
            if p > 0.0 {
                i += p * (p / (pc[c] * pr[r])).ln();
            }
        }
    }
    i
}

/// Best MI over every split of `order` into at most `max_cols` contiguous
/// columns, enumerating all cut sets.
pub fn exhaustive_axis_mi(order: &[usize], row_of: &[usize], rows: usize, max_cols: usize) -> f64 {
    fn walk(
        order: &[usize],
        row_of: &[usize],
        rows: usize,
        cuts: &mut Vec<usize>,
        from: usize,
        left: usize,
        best: &mut f64,
    ) {
        let mut col_of = vec![0usize; order.len()];
        let mut c = 0;
        for (pos, &p) in order.iter().enumerate() {
            if cuts.contains(&pos) {
                c += 1;
            }
            col_of[p] = c;
        }
        *best = best.max(mi_of_grid(&col_of, row_of, cuts.len() + 1, rows));
        if left == 0 {
            return;
        }
        for pos in from..order.len() {
            cuts.push(pos);
            walk(order, row_of, rows, cuts, pos + 1, left - 1, best);
            cuts.pop();
        }
    }
    let mut best = 0.0;
    walk(
        order,
        row_of,
        rows,
        &mut Vec::new(),
        1,
        max_cols - 1,
        &mut best,
    );
    best
}

pub fn dcor_naive(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let centred = |v: &[f64]| {
        let d: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| (v[i] - v[j]).abs()).collect())
            .collect();
        let row: Vec<f64> = d.iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
        let col: Vec<f64> = (0..n)
            .map(|j| d.iter().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        let g = row.iter().sum::<f64>() / n as f64;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| d[i][j] - row[i] - col[j] + g)
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let a = centred(x);
    let b = centred(y);
    let dot = |p: &Vec<Vec<f64>>, q: &Vec<Vec<f64>>| {
        p.iter()
            .zip(q)
            .map(|(r, s)| r.iter().zip(s).map(|(u, v)| u * v).sum::<f64>())
            .sum::<f64>()
            / (n * n) as f64
    };
    let (v, vx, vy) = (dot(&a, &b), dot(&a, &a), dot(&b, &b));
    (v / (vx * vy).sqrt()).max(0.0).sqrt()
}

/// Values on a coarse grid so that ties are common.
pub fn tied_sample(r: &mut impl Rng, n: usize, levels: u32) -> Vec<f64> {
    (0..n)
        .map(|_| r.random_range(0..levels) as f64 / 4.0)
        .collect()
}

pub type Check = Result<String, String>;

/// 500 instances, n <= 50, half of them heavily tied; bitwise equality.
pub fn check_kendall() -> Check {
    let mut r = rng(11);
    let mut compared = 0;
    let mut degenerate = 0;
    for inst in 0..500 {
        let n = r.random_range(2..=50);
        let levels = if inst % 2 == 0 { 6 } else { 1000 };
        let x = tied_sample(&mut r, n, levels);
        let y = tied_sample(&mut r, n, levels);
        match (kendall_brute(&x, &y), kendall(&x, &y)) {
            (Some(t), Ok(v)) if t.to_bits() == v.to_bits() => compared += 1,
            (None, Err(_)) => degenerate += 1,
            (want, got) => return Err(format!("kendall instance {inst}: {want:?} vs {got:?}")),
        }
    }
    Ok(format!(
        "kendall {compared} exact, {degenerate} degenerate rejected by both"
    ))
}

/// 200 instances, n <= 30, to 1e-9 relative.
pub fn check_hhg() -> Check {
    let mut r = rng(12);
    let mut worst = 0.0f64;
    for inst in 0..200 {
        let n = r.random_range(4..=30);
        let levels = if inst % 3 == 0 { 8 } else { 100_000 };
        let x = tied_sample(&mut r, n, levels);
        let y: Vec<f64> = if inst % 2 == 0 {
            x.iter().map(|v| v * v + r.random::<f64>() * 0.1).collect()
        } else {
            tied_sample(&mut r, n, levels)
        };
        let fast = hhg(&x, &y, &HhgParams::default()).map_err(|e| e.to_string())?;
        let slow = hhg_naive(&x, &y);
        let rel = (fast - slow).abs() / slow.abs().max(1.0);
        worst = worst.max(rel);
        if rel > 1e-9 {
            return Err(format!("hhg instance {inst}: {fast} vs {slow}"));
        }
    }
    Ok(format!("hhg max rel err {worst:.1e}"))
}

/// DP against every column split, n <= 30, grids up to 4x4.
pub fn check_mic_dp() -> Check {
    let mut r = rng(13);
    let mut worst = 0.0f64;
    for inst in 0..40 {
        let n = r.random_range(8..=30);
        let x: Vec<f64> = (0..n).map(|_| r.random()).collect();
        let y: Vec<f64> = if inst % 2 == 0 {
            x.iter()
                .map(|v| (6.0 * v).sin() + 0.3 * r.random::<f64>())
                .collect()
        } else {
            (0..n).map(|_| r.random()).collect()
        };
        let rx = ordinal_ranks(&x);
        let ry = ordinal_ranks(&y);
        let mut by_x = vec![0; n];
        for i in 0..n {
            by_x[rx[i]] = i;
        }
        for rows in 2..=4 {
            let row_of = equipartition(&ry, rows);
            let dp = optimal_axis_mi(&by_x, &row_of, rows, 4, n);
            for cols in 2..=4 {
                let ex = exhaustive_axis_mi(&by_x, &row_of, rows, cols);
                worst = worst.max((dp[cols] - ex).abs());
                if (dp[cols] - ex).abs() > 1e-12 {
                    return Err(format!(
                        "mic dp instance {inst} grid {cols}x{rows}: {} vs {ex}",
                        dp[cols]
                    ));
                }
            }
        }
    }
    Ok(format!("mic dp max abs err {worst:.1e}"))
}

/// Whole statistic against exhaustive characteristic matrices.
pub fn check_mic_matrix() -> Check {
    let mut r = rng(14);
    for inst in 0..20 {
        let n = r.random_range(20..=26);
        let x: Vec<f64> = (0..n).map(|_| r.random()).collect();
        let y: Vec<f64> = if inst % 2 == 0 {
            x.iter()
                .map(|v| (v - 0.5).powi(2) + 0.05 * r.random::<f64>())
                .collect()
        } else {
            (0..n).map(|_| r.random()).collect()
        };
        // Budgets 8 and 9 here: every admissible grid fits in 4x4.
        let params = MicParams {
            alpha: 0.7,
            ..MicParams::default()
        };
        let budget = grid_budget(n, params.alpha);
        assert!(budget <= 9);
        let rx = ordinal_ranks(&x);
        let ry = ordinal_ranks(&y);
        let (mut by_x, mut by_y) = (vec![0; n], vec![0; n]);
        for i in 0..n {
            by_x[rx[i]] = i;
            by_y[ry[i]] = i;
        }
        let mut want = 0.0f64;
        for a in 2..=4 {
            for b in 2..=4 {
                if a * b > budget {
                    continue;
                }
                // a free x-columns against b y-rows, and the transpose.
                let i1 = exhaustive_axis_mi(&by_x, &equipartition(&ry, b), b, a);
                let i2 = exhaustive_axis_mi(&by_y, &equipartition(&rx, a), a, b);
                want = want.max(i1.max(i2) / (a.min(b) as f64).ln());
            }
        }
        let got = mic(&x, &y, &params).map_err(|e| e.to_string())?;
        if (got - want.min(1.0)).abs() > 1e-12 {
            return Err(format!("mic instance {inst}: {got} vs {want}"));
        }
    }
    Ok("mic matrix exact".into())
}

/// Against the double-centred matrix formula, to 1e-12.
pub fn check_dcor() -> Check {
    let mut r = rng(15);
    let mut worst = 0.0f64;
    for inst in 0..100 {
        let n = r.random_range(2..=60);
        let x: Vec<f64> = (0..n).map(|_| r.random()).collect();
        let y: Vec<f64> = if inst % 2 == 0 {
            x.iter()
                .map(|v| v.powi(3) + 0.2 * r.random::<f64>())
                .collect()
        } else {
            (0..n).map(|_| r.random()).collect()
        };
        let got = distance_correlation(&x, &y).map_err(|e| e.to_string())?;
        let want = dcor_naive(&x, &y);
        worst = worst.max((got - want).abs());
        if (got - want).abs() > 1e-12 {
            return Err(format!("dcor instance {inst}: {got} vs {want}"));
        }
    }
    Ok(format!("dcor max abs err {worst:.1e}"))
}
