//! Permutation tests and power estimation.
//!
//! The rejection threshold `lambda` is the upper `(1 - alpha)` empirical
//! quantile of the statistic over random re-pairings of `y` against `x`.
//! Signed measures are tested on their absolute value.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::{check_same_len, invalid, Error, Result};
use crate::measures::DependenceMeasure;
use crate::noise::{msnr_scaled_noise, ssnr_exact_noise, standard_normal, NoiseTarget};
use crate::relations::{eval_relation, sample_x, Relation};
use crate::seed::{self, SeedKey};
use crate::stats::upper_order_statistic;

pub const MIN_PERMUTATIONS: usize = 20;
pub const MIN_POWER_REPS: usize = 30;
pub const DEFAULT_PERMUTATIONS: usize = 200;

const PERMUTATION_RETRIES: u64 = 3;
const GENERATOR_ATTEMPTS: u64 = 5;
const Z_95: f64 = 1.959_963_984_540_054;

/// Scores of `measure` on `(x, sigma_b(y))` for `permutations` random
/// permutations `sigma_b`. Permutation `b` is drawn from a stream keyed on
/// `(seed, b)`, so the vector does not depend on thread count.
pub fn permutation_null<M: DependenceMeasure + ?Sized>(
    measure: &M,
    x: &[f64],
    y: &[f64],
    permutations: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_same_len(x, y)?;
    if permutations < MIN_PERMUTATIONS {
        return Err(invalid(format!(
            "at least {MIN_PERMUTATIONS} permutations are required, got {permutations}"
        )));
    }
    let scorer = measure.permutation_scorer(x, y)?;
    (0..permutations)
        .into_par_iter()
        .map(|b| {
            let mut last = None;
            for attempt in 0..=PERMUTATION_RETRIES {
                let key = SeedKey::new(seed).int(b as u64).int(attempt).finish();
                let mut rng = seed::rng(key);
                let mut perm: Vec<usize> = (0..y.len()).collect();
                perm.shuffle(&mut rng);
                match scorer(&perm) {
                    Ok(v) => return Ok(v),
                    Err(e) => last = Some(e),
                }
            }
            Err(last.expect("at least one attempt"))
        })
        .collect()
}

/// Upper-tail critical value: the `ceil((1 - alpha) B)`-th order statistic.
pub fn critical_value(null_scores: &[f64], alpha: f64) -> Result<f64> {
    if null_scores.is_empty() {
        return Err(invalid("empty null distribution"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let mut sorted = null_scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(upper_order_statistic(&sorted, 1.0 - alpha))
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// Central 95% range of rejection counts under `Binomial(trials, p)`:
/// the 2.5% and 97.5% quantiles.
pub fn binomial_band(trials: usize, p: f64) -> (usize, usize) {
    let dist = Binomial::new(p, trials as u64).expect("valid binomial");
    let quantile = |q: f64| -> usize {
        (0..=trials)
            .find(|&k| dist.cdf(k as u64) >= q)
            .unwrap_or(trials)
    };
    (quantile(0.025), quantile(0.975))
}

/// How the rejection threshold is shared across replicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    /// A fresh permutation null on every replicate's own data.
    #[default]
    PerDataset,
    /// One null, from the first completed replicate, reused for all.
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSettings {
    pub n: usize,
    pub reps: usize,
    pub alpha: f64,
    pub permutations: usize,
    pub lambda_mode: LambdaMode,
    /// Replace `y` by an independent shuffle before testing; the rejection
    /// rate then estimates the type-I error.
    pub null_injection: bool,
}

impl Default for PowerSettings {
    fn default() -> Self {
        PowerSettings {
            n: 500,
            reps: 100,
            alpha: 0.05,
            permutations: DEFAULT_PERMUTATIONS,
            lambda_mode: LambdaMode::PerDataset,
            null_injection: false,
        }
    }
}

impl PowerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.reps < MIN_POWER_REPS {
            return Err(invalid(format!(
                "power needs at least {MIN_POWER_REPS} replicates, got {}",
                self.reps
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!(
                "alpha must be in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.permutations < MIN_PERMUTATIONS {
            return Err(invalid(format!(
                "at least {MIN_PERMUTATIONS} permutations are required, got {}",
                self.permutations
            )));
        }
        if self.n < 2 {
            return Err(invalid("sample size must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerEstimate {
    pub measure: String,
    pub params: String,
    pub relation: Relation,
    pub noise: NoiseTarget,
    pub n: usize,
    pub reps: usize,
    pub reps_completed: usize,
    pub rejections: usize,
    pub alpha: f64,
    /// `rejections / reps_completed`.
    pub power: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Replicates lost to generator or measure failures, with the reason.
    pub missing: Vec<(usize, String)>,
}

/// One replicate's data: `y = f(x) + eps` at the noise target, the model
/// ratio matched by rescaling a standard-normal draw to this `f`.
pub fn power_replicate_data(
    relation: Relation,
    noise: &NoiseTarget,
    n: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let x = sample_x(n, SeedKey::new(seed).str("x").finish())?;
    let signal = eval_relation(relation, &x);
    let y = match *noise {
        NoiseTarget::Msnr { ratio } => {
            let z = standard_normal(n, SeedKey::new(seed).str("z").finish());
            msnr_scaled_noise(&signal, &z, ratio)?.y
        }
        NoiseTarget::Ssnr {
            ratio,
            tolerance,
            max_steps,
        } => {
            let s = SeedKey::new(seed).str("ssnr").finish();
            ssnr_exact_noise(&signal, ratio, max_steps, tolerance, s)?.y
        }
    };
    Ok((x, y))
}

fn generate_with_retries(
    relation: Relation,
    noise: &NoiseTarget,
    settings: &PowerSettings,
    rep_seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut last = None;
    for attempt in 0..GENERATOR_ATTEMPTS {
        let s = SeedKey::new(rep_seed).str("attempt").int(attempt).finish();
        match power_replicate_data(relation, noise, settings.n, s) {
            Ok((x, mut y)) => {
                if settings.null_injection {
                    let mut rng = seed::rng(SeedKey::new(s).str("null").finish());
                    y.shuffle(&mut rng);
                }
                return Ok((x, y));
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn null_statistics<M: DependenceMeasure + ?Sized>(
    measure: &M,
    x: &[f64],
    y: &[f64],
    settings: &PowerSettings,
    seed: u64,
) -> Result<f64> {
    let mut null = permutation_null(measure, x, y, settings.permutations, seed)?;
    if measure.is_signed() {
        null.iter_mut().for_each(|v| *v = v.abs());
    }
    critical_value(&null, settings.alpha)
}

type RepResult = std::result::Result<(RepOutcome, Vec<f64>, Vec<f64>), Error>;

struct RepOutcome {
    statistic: f64,
    lambda: Option<f64>,
}

/// Rejection rate of the permutation test over `settings.reps` replicates.
pub fn estimate_power<M: DependenceMeasure + ?Sized>(
    measure: &M,
    relation: Relation,
    noise: &NoiseTarget,
    settings: &PowerSettings,
    seed: u64,
) -> Result<PowerEstimate> {
    settings.validate()?;
    noise.validate()?;
    let per_dataset = settings.lambda_mode == LambdaMode::PerDataset;

    let outcomes: Vec<RepResult> = (0..settings.reps)
        .into_par_iter()
        .map(|rep| {
            let rep_seed = SeedKey::new(seed).str("rep").int(rep as u64).finish();
            let (x, y) = generate_with_retries(relation, noise, settings, rep_seed)?;
            let statistic = measure.test_statistic(&x, &y)?;
            let lambda = if per_dataset {
                let ps = SeedKey::new(rep_seed)
                    .str("perm")
                    .str(&measure.name())
                    .finish();
                Some(null_statistics(measure, &x, &y, settings, ps)?)
            } else {
                None
            };
            Ok((RepOutcome { statistic, lambda }, x, y))
        })
        .collect();

    let shared_lambda = if per_dataset {
        None
    } else {
        let first = outcomes
            .iter()
            .enumerate()
            .find_map(|(rep, o)| o.as_ref().ok().map(|(_, x, y)| (rep, x, y)));
        match first {
            Some((rep, x, y)) => {
                let rep_seed = SeedKey::new(seed).str("rep").int(rep as u64).finish();
                let ps = SeedKey::new(rep_seed)
                    .str("perm")
                    .str(&measure.name())
                    .finish();
                Some(null_statistics(measure, x, y, settings, ps)?)
            }
            None => None,
        }
    };

    let mut rejections = 0;
    let mut completed = 0;
    let mut missing = Vec::new();
    for (rep, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok((out, _, _)) => {
                let lambda = out.lambda.or(shared_lambda).expect("threshold computed");
                completed += 1;
                if out.statistic > lambda {
                    rejections += 1;
                }
            }
            Err(e) => missing.push((rep, e.to_string())),
        }
    }
    let (ci_low, ci_high) = wilson_interval(rejections, completed);
    let power = if completed > 0 {
        rejections as f64 / completed as f64
    } else {
        f64::NAN
    };
    let params = measure.params();
    Ok(PowerEstimate {
        measure: measure.name(),
        params,
        relation,
        noise: *noise,
        n: settings.n,
        reps: settings.reps,
        reps_completed: completed,
        rejections,
        alpha: settings.alpha,
        power,
        ci_low,
        ci_high,
        missing,
    })
}
