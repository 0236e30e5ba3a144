//! Noise construction at a controlled signal-to-noise ratio.
//!
//! Two ratios are supported. The model ratio (MSNR) is `var(y) / var(eps)`
//! and is matched across relations by rescaling one shared noise draw. The
//! signal ratio (SSNR) is `sum(y^2) / sum(eps^2)`; it is approached by a
//! randomized search over noise mean and spread, then hit exactly by solving
//! for the last noise component.

use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{check_same_len, invalid, Error, Result};
use crate::relations::{eval_relation, Relation};
use crate::seed::{self, SeedKey};
use crate::stats::{sum_squares, variance};

pub const DEFAULT_SSNR_TOLERANCE: f64 = 0.03;
pub const DEFAULT_SSNR_MAX_STEPS: usize = 100;

/// Population variance of `x` for `x ~ U(0, 1)`.
pub const UNIFORM_VARIANCE: f64 = 1.0 / 12.0;

/// Attempts at redrawing noise when the exact SSNR solve has no real root.
const SSNR_REDRAWS: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseTarget {
    Msnr {
        ratio: f64,
    },
    Ssnr {
        ratio: f64,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
        #[serde(default = "default_max_steps")]
        max_steps: usize,
    },
}

fn default_tolerance() -> f64 {
    DEFAULT_SSNR_TOLERANCE
}

fn default_max_steps() -> usize {
    DEFAULT_SSNR_MAX_STEPS
}

impl NoiseTarget {
    pub fn msnr(ratio: f64) -> Self {
        NoiseTarget::Msnr { ratio }
    }

    pub fn ssnr(ratio: f64) -> Self {
        NoiseTarget::Ssnr {
            ratio,
            tolerance: DEFAULT_SSNR_TOLERANCE,
            max_steps: DEFAULT_SSNR_MAX_STEPS,
        }
    }

    pub fn ratio(&self) -> f64 {
        match *self {
            NoiseTarget::Msnr { ratio } | NoiseTarget::Ssnr { ratio, .. } => ratio,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NoiseTarget::Msnr { .. } => "msnr",
            NoiseTarget::Ssnr { .. } => "ssnr",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ratio = self.ratio();
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(invalid(format!(
                "noise ratio must be positive, got {ratio}"
            )));
        }
        match *self {
            // var(f + eps) = var(f) + var(eps) for independent noise, so the
            // model ratio cannot be pushed to 1 or below.
            NoiseTarget::Msnr { ratio } if ratio <= 1.0 => Err(Error::OutOfRange {
                value: ratio,
                reason: "a model SNR target must exceed 1".into(),
            }),
            NoiseTarget::Ssnr {
                tolerance,
                max_steps,
                ..
            } => {
                if !(tolerance > 0.0) {
                    return Err(invalid(format!(
                        "SSNR tolerance must be positive, got {tolerance}"
                    )));
                }
                if max_steps == 0 {
                    return Err(invalid("SSNR max_steps must be at least 1"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Model signal-to-noise ratio `var(y) / var(eps)` (unbiased variances).
pub fn msnr(y: &[f64], eps: &[f64]) -> Result<f64> {
    check_same_len(y, eps)?;
    if y.len() < 2 {
        return Err(invalid("msnr needs at least two points"));
    }
    let ve = variance(eps);
    if !(ve > 0.0) {
        return Err(Error::DegenerateNoise("noise has zero variance".into()));
    }
    Ok(variance(y) / ve)
}

/// Signal-to-noise ratio of signals, `sum(y^2) / sum(eps^2)`.
pub fn ssnr(y: &[f64], eps: &[f64]) -> Result<f64> {
    check_same_len(y, eps)?;
    if y.is_empty() {
        return Err(invalid("ssnr needs at least one point"));
    }
    let se = sum_squares(eps);
    if !(se > 0.0) {
        return Err(Error::DegenerateNoise("noise is identically zero".into()));
    }
    Ok(sum_squares(y) / se)
}

/// Model ratio of `y = f + eps` under independent noise,
/// `(var(f) + var(eps)) / var(eps)`, evaluated on the realized sample.
///
/// Unlike [`msnr`] on the realized `y`, this drops the sample covariance
/// between `f` and `eps`, which is zero for the model but not for a draw.
pub fn model_msnr(signal: &[f64], eps: &[f64]) -> Result<f64> {
    check_same_len(signal, eps)?;
    let ve = variance(eps);
    if !(ve > 0.0) {
        return Err(Error::DegenerateNoise("noise has zero variance".into()));
    }
    Ok((variance(signal) + ve) / ve)
}

/// Which MSNR to R² conversion to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum R2Form {
    /// `1 - 1/msnr`, consistent with `msnr = var(y)/var(eps)`.
    #[default]
    Consistent,
    /// `1 / sqrt(1 + 1/msnr)`; the closed form printed alongside the
    /// definition, kept for comparison.
    Printed,
}

pub fn msnr_to_r2(msnr_value: f64, form: R2Form) -> Result<f64> {
    match form {
        R2Form::Consistent => {
            if msnr_value.is_nan() || msnr_value <= 1.0 {
                return Err(Error::OutOfRange {
                    value: msnr_value,
                    reason: "var(y)/var(eps) is at least 1 for independent noise".into(),
                });
            }
            Ok(1.0 - 1.0 / msnr_value)
        }
        R2Form::Printed => {
            if msnr_value.is_nan() || msnr_value <= 0.0 {
                return Err(Error::OutOfRange {
                    value: msnr_value,
                    reason: "ratio must be positive".into(),
                });
            }
            Ok(1.0 / (1.0 + 1.0 / msnr_value).sqrt())
        }
    }
}

/// Two models sharing one noise draw, rescaled so their MSNRs agree.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyModelPair {
    pub x: Vec<f64>,
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    /// `a` with `a^2 = var(f1(x)) / var(f2(x))`; model 2 carries noise `eps / a`.
    pub scale_a: f64,
    /// Model ratios `(var(f_i) + var(eps_i)) / var(eps_i)`; equal by construction.
    pub achieved_ratio_1: f64,
    pub achieved_ratio_2: f64,
    /// Plain `var(y_i) / var(eps_i)` on the draw, including the sample
    /// covariance between signal and noise.
    pub sample_ratio_1: f64,
    pub sample_ratio_2: f64,
}

pub fn make_msnr_equal_pair(
    f1: Relation,
    f2: Relation,
    x: &[f64],
    eps: &[f64],
) -> Result<NoisyModelPair> {
    check_same_len(x, eps)?;
    if x.len() < 3 {
        return Err(invalid("noisy-equal pairs need at least three points"));
    }
    let s1 = eval_relation(f1, x);
    let s2 = eval_relation(f2, x);
    let v1 = variance(&s1);
    let v2 = variance(&s2);
    if !(v2 > 0.0) {
        return Err(Error::DegenerateSignal(format!(
            "{f2} is constant on the sample"
        )));
    }
    if !(v1 > 0.0) {
        return Err(Error::DegenerateSignal(format!(
            "{f1} is constant on the sample"
        )));
    }
    let ve = variance(eps);
    if !(ve > 0.0) {
        return Err(Error::DegenerateNoise("noise has zero variance".into()));
    }
    let a = (v1 / v2).sqrt();
    let eps2: Vec<f64> = eps.iter().map(|e| e / a).collect();
    let y1: Vec<f64> = s1.iter().zip(eps).map(|(f, e)| f + e).collect();
    let y2: Vec<f64> = s2.iter().zip(&eps2).map(|(f, e)| f + e).collect();
    Ok(NoisyModelPair {
        x: x.to_vec(),
        achieved_ratio_1: (v1 + ve) / ve,
        achieved_ratio_2: model_msnr(&s2, &eps2)?,
        sample_ratio_1: msnr(&y1, eps)?,
        sample_ratio_2: msnr(&y2, &eps2)?,
        y1,
        y2,
        scale_a: a,
    })
}

/// Result of the randomized SSNR search.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicNoise {
    pub noise: Vec<f64>,
    /// SSNR of the returned noise.
    pub achieved: f64,
    pub steps: usize,
    /// Best-so-far `|achieved - target|` after each step.
    pub trace: Vec<f64>,
}

/// Randomized search for noise whose SSNR against `signal` is near `target`.
///
/// Each step draws a noise mean uniformly on `[-an, an]` with
/// `an = sqrt(c / n)` and `c = sum(signal^2) / target`, sets the spread so
/// that `E[sum(eps^2)] = c`, draws `n` normals and keeps the best draw.
/// Stops once within `tolerance`, or when the step counter passes
/// `max_steps` (so at most `max_steps + 1` draws).
pub fn heuristic_ssnr_noise(
    signal: &[f64],
    target: f64,
    max_steps: usize,
    tolerance: f64,
    seed: u64,
) -> Result<HeuristicNoise> {
    if !(target.is_finite() && target > 0.0) {
        return Err(invalid(format!(
            "SSNR target must be positive, got {target}"
        )));
    }
    if signal.is_empty() {
        return Err(invalid("empty signal"));
    }
    let signal_power = sum_squares(signal);
    if !(signal_power > 0.0) {
        return Err(Error::DegenerateSignal("signal is identically zero".into()));
    }
    let n = signal.len();
    let noise_power = signal_power / target;
    let an = (noise_power / n as f64).sqrt();
    let mean_dist = Uniform::new_inclusive(-an, an).map_err(|e| invalid(e.to_string()))?;
    let mut rng = seed::rng(seed);

    let mut best = vec![0.0; n];
    let mut best_achieved = f64::NAN;
    let mut delta = f64::INFINITY;
    let mut trace = Vec::new();
    let mut step = 0;
    loop {
        let mean = mean_dist.sample(&mut rng);
        let sd = (noise_power / n as f64 - mean * mean).max(0.0).sqrt();
        let noise: Vec<f64> = (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                mean + sd * z
            })
            .collect();
        step += 1;
        let achieved = ssnr(signal, &noise).unwrap_or(f64::INFINITY);
        let tdelta = (achieved - target).abs();
        if tdelta <= delta {
            best = noise;
            best_achieved = achieved;
            delta = tdelta;
        }
        trace.push(delta);
        if tdelta <= tolerance || step > max_steps {
            break;
        }
    }
    Ok(HeuristicNoise {
        noise: best,
        achieved: best_achieved,
        steps: step,
        trace,
    })
}

/// Replaces the last noise component so that `ssnr(signal + noise, noise)`
/// equals `target`.
///
/// With the first `n - 1` components fixed, the last one solves
/// `(t - 1) e^2 - 2 f_n e + [t S_eps - S_y - f_n^2] = 0`, where `S_eps` and
/// `S_y` are the partial sums of squares of the noise and of `f + eps`.
/// The real root of smallest magnitude is taken.
pub fn exact_ssnr_adjust(signal: &[f64], noise: &[f64], target: f64) -> Result<Vec<f64>> {
    check_same_len(signal, noise)?;
    let n = signal.len();
    if n < 2 {
        return Err(invalid("exact SSNR adjustment needs at least two points"));
    }
    if !(target.is_finite() && target > 0.0) {
        return Err(invalid(format!(
            "SSNR target must be positive, got {target}"
        )));
    }
    let head_noise: f64 = noise[..n - 1].iter().map(|e| e * e).sum();
    let head_signal: f64 = signal[..n - 1]
        .iter()
        .zip(&noise[..n - 1])
        .map(|(f, e)| (f + e) * (f + e))
        .sum();
    let f_n = signal[n - 1];
    let a = target - 1.0;
    let b = -2.0 * f_n;
    let c = target * head_noise - head_signal - f_n * f_n;

    let last = if a == 0.0 {
        if b == 0.0 {
            return Err(Error::NoRealRoot { discriminant: 0.0 });
        }
        -c / b
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Err(Error::NoRealRoot { discriminant: disc });
        }
        // Numerically stable pair of roots.
        let sq = disc.sqrt();
        let q = -0.5 * (b + b.signum() * sq);
        let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
        if r1.abs() <= r2.abs() {
            r1
        } else {
            r2
        }
    };
    let mut out = noise.to_vec();
    out[n - 1] = last;
    if sum_squares(&out) == 0.0 {
        return Err(Error::DegenerateNoise(
            "adjusted noise is identically zero".into(),
        ));
    }
    Ok(out)
}

/// A noisy realization of one relation.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisySample {
    pub y: Vec<f64>,
    pub noise: Vec<f64>,
    pub achieved_ratio: f64,
}

pub fn standard_normal(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = seed::rng(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Noise scale that gives the reference model `y = x + sd * z`, `x ~ U(0,1)`,
/// a population MSNR equal to `ratio`.
pub fn reference_noise_sd(ratio: f64) -> Result<f64> {
    NoiseTarget::msnr(ratio).validate()?;
    Ok((UNIFORM_VARIANCE / (ratio - 1.0)).sqrt())
}

/// Noise for `relation` made noisy-equal (by model ratio) to the reference
/// line `y = x + sd * z` at the given MSNR.
pub fn msnr_matched_to_line(
    relation: Relation,
    x: &[f64],
    z: &[f64],
    ratio: f64,
) -> Result<NoisySample> {
    let sd = reference_noise_sd(ratio)?;
    let eps: Vec<f64> = z.iter().map(|v| v * sd).collect();
    let pair = make_msnr_equal_pair(Relation::Line, relation, x, &eps)?;
    let noise = eps.iter().map(|e| e / pair.scale_a).collect();
    Ok(NoisySample {
        y: pair.y2,
        noise,
        achieved_ratio: pair.achieved_ratio_2,
    })
}

/// Direct rescaling of `z` so that the model ratio of `signal + noise`
/// equals `ratio` on this draw.
pub fn msnr_scaled_noise(signal: &[f64], z: &[f64], ratio: f64) -> Result<NoisySample> {
    check_same_len(signal, z)?;
    NoiseTarget::msnr(ratio).validate()?;
    let vf = variance(signal);
    if !(vf > 0.0) {
        return Err(Error::DegenerateSignal(
            "signal is constant on the sample".into(),
        ));
    }
    let vz = variance(z);
    if !(vz > 0.0) {
        return Err(Error::DegenerateNoise("noise has zero variance".into()));
    }
    let scale = (vf / ((ratio - 1.0) * vz)).sqrt();
    let noise: Vec<f64> = z.iter().map(|v| v * scale).collect();
    let y = signal.iter().zip(&noise).map(|(f, e)| f + e).collect();
    let achieved_ratio = model_msnr(signal, &noise)?;
    Ok(NoisySample {
        y,
        noise,
        achieved_ratio,
    })
}

/// Randomized search followed by the exact last-component solve. Redraws
/// from derived seeds when the solve has no real root.
pub fn ssnr_exact_noise(
    signal: &[f64],
    ratio: f64,
    max_steps: usize,
    tolerance: f64,
    seed: u64,
) -> Result<NoisySample> {
    let mut last_err = None;
    for attempt in 0..SSNR_REDRAWS {
        let s = if attempt == 0 {
            seed
        } else {
            SeedKey::new(seed).str("ssnr-redraw").int(attempt).finish()
        };
        let guess = heuristic_ssnr_noise(signal, ratio, max_steps, tolerance, s)?;
        match exact_ssnr_adjust(signal, &guess.noise, ratio) {
            Ok(noise) => {
                let y: Vec<f64> = signal.iter().zip(&noise).map(|(f, e)| f + e).collect();
                let achieved_ratio = ssnr(&y, &noise)?;
                return Ok(NoisySample {
                    y,
                    noise,
                    achieved_ratio,
                });
            }
            Err(e @ Error::NoRealRoot { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// Draws `y = f(x) + eps` for `relation` at `target`.
///
/// MSNR: the relation is made noisy-equal to the reference line through the
/// standard-normal draw `z`. SSNR: `z` is unused; noise comes from the
/// randomized search seeded with `seed`, then the exact solve.
pub fn noisy_relation(
    relation: Relation,
    x: &[f64],
    z: &[f64],
    target: &NoiseTarget,
    seed: u64,
) -> Result<NoisySample> {
    target.validate()?;
    match *target {
        NoiseTarget::Msnr { ratio } => msnr_matched_to_line(relation, x, z, ratio),
        NoiseTarget::Ssnr {
            ratio,
            tolerance,
            max_steps,
        } => {
            let signal = eval_relation(relation, x);
            ssnr_exact_noise(&signal, ratio, max_steps, tolerance, seed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::sample_x;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn msnr_examples() {
        let e = [0.3, -1.0, 2.0, 0.1];
        assert_eq!(msnr(&e, &e).unwrap(), 1.0);
        // var([0, 6, 0, 6]) = 12, var([0, 1, 0, 1]) = 1/3 -> scale noise by sqrt(3).
        let y = [0.0, 6.0, 0.0, 6.0];
        let s = 3f64.sqrt();
        let eps = [0.0, s, 0.0, s];
        assert!(rel(msnr(&y, &eps).unwrap(), 12.0) < 1e-12);
        assert!(matches!(
            msnr(&y, &[2.0; 4]),
            Err(Error::DegenerateNoise(_))
        ));
    }

    #[test]
    fn ssnr_examples() {
        assert_eq!(ssnr(&[1.0, -2.0], &[1.0, -2.0]).unwrap(), 1.0);
        assert_eq!(ssnr(&[3.0, 4.0], &[1.0, 0.0]).unwrap(), 25.0);
        assert!(matches!(
            ssnr(&[3.0, 4.0], &[0.0, 0.0]),
            Err(Error::DegenerateNoise(_))
        ));
    }

    #[test]
    fn identical_models_pair_trivially() {
        let x = sample_x(50, 1).unwrap();
        let e = standard_normal(50, 2);
        let p = make_msnr_equal_pair(Relation::Line, Relation::Line, &x, &e).unwrap();
        assert_eq!(p.scale_a, 1.0);
        assert_eq!(p.y1, p.y2);
    }

    #[test]
    fn pair_scale_matches_population_variances() {
        // var(x) = 1/12 and var(4x^2) = 16 (1/5 - 1/9) = 64/45 on U(0, 1).
        let expected = (1.0 / 12.0) / (64.0 / 45.0);
        let x = sample_x(1_000_000, 11).unwrap();
        let e = standard_normal(x.len(), 12);
        let p = make_msnr_equal_pair(Relation::Line, Relation::Parabola, &x, &e).unwrap();
        assert!(rel(p.scale_a * p.scale_a, expected) < 0.02);
        assert!(rel(p.achieved_ratio_1, p.achieved_ratio_2) < 1e-10);
    }

    #[test]
    fn constant_second_model_is_degenerate() {
        let x = vec![0.995, 0.996, 0.999];
        let e = [0.1, -0.2, 0.3];
        // L-shaped is constant above 99/100.
        let err = make_msnr_equal_pair(Relation::Line, Relation::LShaped, &x, &e).unwrap_err();
        assert!(matches!(err, Error::DegenerateSignal(_)));
    }

    #[test]
    fn r2_forms() {
        assert!((msnr_to_r2(11.529, R2Form::Consistent).unwrap() - 0.913_262).abs() < 1e-6);
        assert!((msnr_to_r2(1e12, R2Form::Consistent).unwrap() - 1.0).abs() < 1e-11);
        assert!(matches!(
            msnr_to_r2(1.0, R2Form::Consistent),
            Err(Error::OutOfRange { .. })
        ));
        assert!((msnr_to_r2(1.0, R2Form::Printed).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn r2_consistent_form_matches_monte_carlo() {
        // y = x + eps at a measured MSNR; the squared correlation of f(x)
        // with y should equal 1 - 1/MSNR.
        let n = 200_000;
        let x = sample_x(n, 5).unwrap();
        let z = standard_normal(n, 6);
        let sd = reference_noise_sd(11.529).unwrap();
        let eps: Vec<f64> = z.iter().map(|v| v * sd).collect();
        let y: Vec<f64> = x.iter().zip(&eps).map(|(a, b)| a + b).collect();
        let measured = msnr(&y, &eps).unwrap();
        let r = crate::stats::covariance(&x, &y) / (variance(&x) * variance(&y)).sqrt();
        let predicted = msnr_to_r2(measured, R2Form::Consistent).unwrap();
        assert!(
            (r * r - predicted).abs() < 0.005,
            "{} vs {}",
            r * r,
            predicted
        );
        assert!((predicted - 0.9133).abs() < 0.01);
        // The printed form predicts a visibly different value.
        let printed = msnr_to_r2(measured, R2Form::Printed).unwrap();
        assert!((r * r - printed).abs() > 0.02);
    }

    #[test]
    fn heuristic_defaults_and_errors() {
        assert_eq!(DEFAULT_SSNR_MAX_STEPS, 100);
        assert_eq!(DEFAULT_SSNR_TOLERANCE, 0.03);
        assert!(matches!(
            heuristic_ssnr_noise(&[1.0, 2.0], 0.0, 100, 0.03, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            heuristic_ssnr_noise(&[1.0, 2.0], -1.0, 100, 0.03, 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn heuristic_trace_is_non_increasing() {
        let x = sample_x(500, 3).unwrap();
        let s = eval_relation(Relation::SineLow, &x);
        let out = heuristic_ssnr_noise(&s, 10.471, 100, 1e-9, 4).unwrap();
        assert_eq!(out.steps, 101);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
        let achieved = ssnr(&s, &out.noise).unwrap();
        assert_eq!(achieved, out.achieved);
        assert_eq!((achieved - 10.471).abs(), *out.trace.last().unwrap());
    }

    #[test]
    fn exact_adjust_hand_example() {
        // e^2 - 2e - 2.75 = 0 -> e = 1 - sqrt(3.75).
        let out = exact_ssnr_adjust(&[1.0, 1.0], &[0.5, 123.0], 2.0).unwrap();
        assert_eq!(out[0], 0.5);
        let expected = 1.0 - 3.75f64.sqrt();
        assert!((out[1] - expected).abs() < 1e-14);
        assert!((out[1] + 0.936_492).abs() < 1e-6);
        let y = [1.5, 1.0 + out[1]];
        assert!(rel(ssnr(&y, &out).unwrap(), 2.0) < 1e-12);
    }

    #[test]
    fn exact_adjust_negative_discriminant() {
        // Tiny signal, large fixed noise and a high target: t S_eps dominates.
        let signal = [0.1, 0.1, 0.1];
        let noise = [1.0, 1.0, 0.0];
        let target = 10.0;
        let head_noise = 2.0;
        let head_sig = 2.0 * 1.1f64.powi(2);
        let c = target * head_noise - head_sig - 0.01;
        let disc = 4.0 * 0.01 - 4.0 * (target - 1.0) * c;
        assert!(disc < 0.0);
        assert!(matches!(
            exact_ssnr_adjust(&signal, &noise, target),
            Err(Error::NoRealRoot { .. })
        ));
    }

    #[test]
    fn exact_adjust_linear_case() {
        let signal = [1.0, 2.0, 0.5];
        let noise = [0.3, -0.4, 0.0];
        let out = exact_ssnr_adjust(&signal, &noise, 1.0).unwrap();
        let y: Vec<f64> = signal.iter().zip(&out).map(|(a, b)| a + b).collect();
        assert!(rel(ssnr(&y, &out).unwrap(), 1.0) < 1e-12);
    }

    #[test]
    fn msnr_matched_noise_agrees_with_reference() {
        let x = sample_x(500, 8).unwrap();
        let z = standard_normal(500, 9);
        let line = msnr_matched_to_line(Relation::Line, &x, &z, 11.529).unwrap();
        for r in crate::relations::list_relations() {
            let s = msnr_matched_to_line(*r, &x, &z, 11.529).unwrap();
            assert!(rel(s.achieved_ratio, line.achieved_ratio) < 1e-10, "{r}");
        }
    }

    #[test]
    fn msnr_target_must_exceed_one() {
        assert!(NoiseTarget::msnr(0.75).validate().is_err());
        assert!(NoiseTarget::msnr(1.5).validate().is_ok());
        assert!(NoiseTarget::ssnr(0.75).validate().is_ok());
    }
}
