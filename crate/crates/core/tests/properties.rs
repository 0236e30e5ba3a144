use equibench::measures::{DependenceMeasure, Measure};
use equibench::noise::{exact_ssnr_adjust, heuristic_ssnr_noise, make_msnr_equal_pair, msnr, ssnr};
use equibench::relations::{eval_relation, ALL_RELATIONS};
use equibench::testing::{critical_value, wilson_interval};
use equibench::Error;
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Distinct-ish continuous samples in a bounded range.
fn sample(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

fn pair(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    n.prop_flat_map(|k| {
        (
            prop::collection::vec(-10.0f64..10.0, k),
            prop::collection::vec(-10.0f64..10.0, k),
        )
    })
}

fn fast_measures() -> Vec<Measure> {
    Measure::all()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relations_finite_and_deterministic(x in prop::collection::vec(0.0f64..=1.0, 1..50)) {
        for &r in ALL_RELATIONS.iter() {
            let a = eval_relation(r, &x);
            let b = eval_relation(r, &x);
            prop_assert!(a.iter().all(|v| v.is_finite()));
            prop_assert!(a.iter().zip(&b).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }

    #[test]
    fn snr_ratios_scale_covariant((y, e) in pair(3..=60), c in prop::sample::select(vec![-7.5, -1.0, 1e-3, 2.0, 1e4])) {
        let ys: Vec<f64> = y.iter().map(|v| c * v).collect();
        let es: Vec<f64> = e.iter().map(|v| c * v).collect();
        prop_assert!(rel_close(msnr(&y, &e).unwrap(), msnr(&ys, &es).unwrap(), 1e-12));
        prop_assert!(rel_close(ssnr(&y, &e).unwrap(), ssnr(&ys, &es).unwrap(), 1e-12));
    }

    #[test]
    fn noisy_equal_pairs_agree(
        x in prop::collection::vec(0.0f64..1.0, 20..120),
        i in 0usize..21,
        j in 0usize..21,
        seed in any::<u64>(),
    ) {
        let eps = equibench::noise::standard_normal(x.len(), seed);
        match make_msnr_equal_pair(ALL_RELATIONS[i], ALL_RELATIONS[j], &x, &eps) {
            Ok(p) => prop_assert!(rel_close(p.achieved_ratio_1, p.achieved_ratio_2, 1e-10)),
            // A relation can be constant on a small sample (L-shaped, spike).
            Err(Error::DegenerateSignal(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn exact_adjust_hits_target(
        (s, e) in pair(2..=200),
        target in 0.05f64..50.0,
    ) {
        match exact_ssnr_adjust(&s, &e, target) {
            Ok(eps) => {
                let y: Vec<f64> = s.iter().zip(&eps).map(|(a, b)| a + b).collect();
                prop_assert!(rel_close(ssnr(&y, &eps).unwrap(), target, 1e-9));
            }
            Err(Error::NoRealRoot { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn heuristic_trace_non_increasing(seed in any::<u64>(), target in 1.5f64..30.0) {
        let x = equibench::relations::sample_x(200, seed).unwrap();
        let s = eval_relation(equibench::Relation::Parabola, &x);
        let h = heuristic_ssnr_noise(&s, target, 100, 0.03, seed).unwrap();
        prop_assert!(h.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn rank_measures_invariant_under_increasing_maps((x, y) in pair(20..=60)) {
        let gx: Vec<f64> = x.iter().map(|v| (v / 3.0).exp() + v.powi(3)).collect();
        for m in ["scor", "kcor", "rdc", "mic", "mi"] {
            let m: Measure = m.parse().unwrap();
            let a = m.score(&x, &y).unwrap();
            let b = m.score(&gx, &y).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits(), "{}", m);
        }
    }

    #[test]
    fn symmetric_measures((x, y) in pair(20..=60)) {
        for id in ["dcor", "hsic", "hhg", "mi"] {
            let m: Measure = id.parse().unwrap();
            let a = m.score(&x, &y).unwrap();
            let b = m.score(&y, &x).unwrap();
            prop_assert!(rel_close(a, b, 1e-12), "{} {} {}", id, a, b);
        }
        for id in ["mic", "rdc"] {
            let m: Measure = id.parse().unwrap();
            let a = m.score(&x, &y).unwrap();
            let b = m.score(&y, &x).unwrap();
            prop_assert!(rel_close(a, b, 1e-9), "{} {} {}", id, a, b);
        }
    }

    #[test]
    fn joint_permutation_invariance((x, y) in pair(20..=60), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut idx: Vec<usize> = (0..x.len()).collect();
        idx.shuffle(&mut equibench::seed::rng(seed));
        let px: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
        let py: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        for m in fast_measures() {
            let a = m.score(&x, &y).unwrap();
            let b = m.score(&px, &py).unwrap();
            prop_assert!(rel_close(a, b, 1e-9), "{} {} {}", m, a, b);
        }
    }

    #[test]
    fn measures_are_pure((x, y) in pair(20..=40)) {
        for m in fast_measures() {
            prop_assert_eq!(m.score(&x, &y).unwrap().to_bits(), m.score(&x, &y).unwrap().to_bits());
        }
    }

    #[test]
    fn lambda_monotone_in_confidence(null in sample(20..=300), a in 0.001f64..0.5, b in 0.001f64..0.5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        // Smaller alpha, higher confidence, larger threshold.
        prop_assert!(critical_value(&null, lo).unwrap() >= critical_value(&null, hi).unwrap());
    }

    #[test]
    fn wilson_contains_estimate(n in 1usize..500, k in 0usize..500) {
        let k = k.min(n);
        let (lo, hi) = wilson_interval(k, n);
        let p = k as f64 / n as f64;
        prop_assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
    }
}
