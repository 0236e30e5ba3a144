//! Score-equitability and power-equitability experiments.
//!
//! Cells are keyed by identity: replicate data depend on `(base_seed, rep)`
//! (and the relation for SSNR noise), permutations additionally on the
//! measure and noise level. Work is spread over the rayon pool and results
//! are gathered in config order, so tables are identical for any worker
//! count and reordering the config only reorders rows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measures::{DependenceMeasure, Measure};
use crate::noise::{msnr_scaled_noise, noisy_relation, standard_normal, NoiseTarget};
use crate::relations::{eval_relation, sample_x, Relation, ALL_RELATIONS};
use crate::seed::SeedKey;
use crate::stats::{mean, std_dev};
use crate::testing::{
    estimate_power, LambdaMode, PowerEstimate, PowerSettings, DEFAULT_PERMUTATIONS,
    MIN_PERMUTATIONS, MIN_POWER_REPS,
};

/// Relations left out of the default subset spread: the four whose scores
/// separate from the rest for the kNN mutual information.
pub const SUBSET_EXCLUDED: [Relation; 4] = [
    Relation::Sigmoid,
    Relation::LopsidedLShaped,
    Relation::LShaped,
    Relation::Spike,
];

pub fn default_subset() -> Vec<Relation> {
    ALL_RELATIONS
        .iter()
        .copied()
        .filter(|r| !SUBSET_EXCLUDED.contains(r))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub relations: Vec<Relation>,
    pub measures: Vec<Measure>,
    /// Noise target for the score experiment.
    pub score_noise: NoiseTarget,
    /// Noise levels for the power experiment.
    pub power_noise: Vec<NoiseTarget>,
    pub n: usize,
    /// Sample size used for HHG when `n` is larger.
    pub hhg_n: usize,
    pub score_reps: usize,
    pub power_reps: usize,
    pub alpha: f64,
    pub permutations: usize,
    pub lambda_mode: LambdaMode,
    pub null_injection: bool,
    /// Relations for the subset spread; `None` means [`default_subset`].
    pub subset: Option<Vec<Relation>>,
    pub base_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            relations: ALL_RELATIONS.to_vec(),
            measures: Measure::all(),
            score_noise: NoiseTarget::msnr(11.529),
            power_noise: vec![
                NoiseTarget::msnr(1.25),
                NoiseTarget::msnr(1.5),
                NoiseTarget::msnr(2.0),
                NoiseTarget::msnr(3.0057),
            ],
            n: 500,
            hhg_n: 256,
            score_reps: 50,
            power_reps: 100,
            alpha: 0.05,
            permutations: DEFAULT_PERMUTATIONS,
            lambda_mode: LambdaMode::PerDataset,
            null_injection: false,
            subset: None,
            base_seed: 20_240_101,
        }
    }
}

impl ExperimentConfig {
    /// Every violated constraint, not just the first.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.relations.is_empty() {
            v.push("relations must not be empty".to_string());
        }
        if self.measures.is_empty() {
            v.push("measures must not be empty".to_string());
        }
        if self.score_reps < 2 {
            v.push(format!(
                "score_reps must be at least 2, got {}",
                self.score_reps
            ));
        }
        if self.power_reps < MIN_POWER_REPS {
            v.push(format!(
                "power_reps must be at least {MIN_POWER_REPS}, got {}",
                self.power_reps
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            v.push(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if self.permutations < MIN_PERMUTATIONS {
            v.push(format!(
                "permutations must be at least {MIN_PERMUTATIONS}, got {}",
                self.permutations
            ));
        }
        if self.n < 20 {
            v.push(format!("n must be at least 20, got {}", self.n));
        }
        if self.hhg_n < 4 {
            v.push(format!("hhg_n must be at least 4, got {}", self.hhg_n));
        }
        if let Err(e) = self.score_noise.validate() {
            v.push(format!("score noise: {e}"));
        }
        if self.power_noise.is_empty() {
            v.push("power noise levels must not be empty".to_string());
        }
        for (i, t) in self.power_noise.iter().enumerate() {
            if let Err(e) = t.validate() {
                v.push(format!("power noise level {}: {e}", i + 1));
            }
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(invalid(v.join("; ")))
        }
    }

    /// Sample size a measure is evaluated at.
    pub fn sample_size_for(&self, measure: &Measure) -> usize {
        match measure {
            Measure::Hhg(p) => self.n.min(self.hhg_n).min(p.cap),
            _ => self.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRow {
    pub measure: String,
    pub relation: Relation,
    pub rep: usize,
    pub score: f64,
    pub achieved_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrRow {
    pub relation: Relation,
    pub rep: usize,
    pub achieved_ratio: f64,
}

/// A cell that could not be computed; it is left out of the tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub measure: Option<String>,
    pub relation: Relation,
    pub rep: Option<usize>,
    pub noise_level: Option<f64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquitabilityRun {
    pub scores: Vec<ScoreRow>,
    pub snr: Vec<SnrRow>,
    pub failures: Vec<CellFailure>,
}

/// Shared draws of one replicate: `x` and the standard-normal base noise.
fn replicate_draws(n: usize, base_seed: u64, rep: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let x = sample_x(n, SeedKey::new(base_seed).str("x").int(rep as u64).finish())?;
    let z = standard_normal(n, SeedKey::new(base_seed).str("z").int(rep as u64).finish());
    Ok((x, z))
}

/// Scores every measure on every `(relation, rep)` at the common noise target.
pub fn run_equitability(config: &ExperimentConfig) -> Result<EquitabilityRun> {
    config.validate()?;
    let cells: Vec<(usize, usize)> = (0..config.score_reps)
        .flat_map(|rep| (0..config.relations.len()).map(move |r| (r, rep)))
        .collect();

    type CellOut = (Option<SnrRow>, Vec<ScoreRow>, Vec<CellFailure>);
    let outputs: Vec<CellOut> = cells
        .par_iter()
        .map(|&(ri, rep)| {
            let relation = config.relations[ri];
            let mut failures = Vec::new();
            let sample = replicate_draws(config.n, config.base_seed, rep).and_then(|(x, z)| {
                let s = SeedKey::new(config.base_seed)
                    .str("ssnr")
                    .str(relation.id())
                    .int(rep as u64)
                    .finish();
                noisy_relation(relation, &x, &z, &config.score_noise, s).map(|ns| (x, ns))
            });
            let (x, noisy) = match sample {
                Ok(v) => v,
                Err(e) => {
                    failures.push(CellFailure {
                        measure: None,
                        relation,
                        rep: Some(rep),
                        noise_level: Some(config.score_noise.ratio()),
                        error: e.to_string(),
                    });
                    return (None, Vec::new(), failures);
                }
            };
            let mut rows = Vec::with_capacity(config.measures.len());
            for m in &config.measures {
                let k = config.sample_size_for(m);
                match m.score(&x[..k], &noisy.y[..k]) {
                    Ok(score) => rows.push(ScoreRow {
                        measure: m.id().to_string(),
                        relation,
                        rep,
                        score,
                        achieved_ratio: noisy.achieved_ratio,
                    }),
                    Err(e) => failures.push(CellFailure {
                        measure: Some(m.id().to_string()),
                        relation,
                        rep: Some(rep),
                        noise_level: Some(config.score_noise.ratio()),
                        error: e.to_string(),
                    }),
                }
            }
            let snr = SnrRow {
                relation,
                rep,
                achieved_ratio: noisy.achieved_ratio,
            };
            (Some(snr), rows, failures)
        })
        .collect();

    // Cells were computed rep-major; emit measure, relation, rep order.
    let mut snr = Vec::new();
    let mut failures = Vec::new();
    let mut by_cell: Vec<Vec<ScoreRow>> = Vec::with_capacity(outputs.len());
    for (s, rows, f) in outputs {
        snr.extend(s);
        failures.extend(f);
        by_cell.push(rows);
    }
    let mut scores = Vec::new();
    for m in &config.measures {
        for &relation in &config.relations {
            for cell in &by_cell {
                scores.extend(
                    cell.iter()
                        .filter(|r| r.measure == m.id() && r.relation == relation)
                        .cloned(),
                );
            }
        }
    }
    snr.sort_by_key(|r| {
        (
            config.relations.iter().position(|x| *x == r.relation),
            r.rep,
        )
    });
    Ok(EquitabilityRun {
        scores,
        snr,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub measure: String,
    pub relation: Relation,
    pub mean: f64,
    pub sd: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureSpread {
    pub measure: String,
    /// Sample sd of the per-relation mean scores.
    pub spread_sd: f64,
    /// Max minus min of the per-relation mean scores.
    pub spread_range: f64,
    pub subset_sd: f64,
    pub subset_range: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquitabilityReport {
    pub cells: Vec<CellSummary>,
    pub measures: Vec<MeasureSpread>,
}

/// Sample sd and range of a set of values; both 0 for fewer than two.
pub fn spread(values: &[f64]) -> (f64, f64) {
    if values.len() < 2 {
        return (0.0, 0.0);
    }
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    (std_dev(values), hi - lo)
}

/// Reduces a score table to per-measure spreads of per-relation means.
/// Measures and relations are reported in order of first appearance.
pub fn equitability_spread(scores: &[ScoreRow], subset: Option<&[Relation]>) -> EquitabilityReport {
    let default = default_subset();
    let subset = subset.unwrap_or(&default);
    let mut measures: Vec<&str> = Vec::new();
    let mut relations: Vec<Relation> = Vec::new();
    for r in scores {
        if !measures.contains(&r.measure.as_str()) {
            measures.push(&r.measure);
        }
        if !relations.contains(&r.relation) {
            relations.push(r.relation);
        }
    }
    let mut cells = Vec::new();
    let mut out = Vec::new();
    for m in measures {
        let mut all_means = Vec::new();
        let mut subset_means = Vec::new();
        for &rel in &relations {
            let v: Vec<f64> = scores
                .iter()
                .filter(|r| r.measure == m && r.relation == rel)
                .map(|r| r.score)
                .collect();
            if v.is_empty() {
                continue;
            }
            let mu = mean(&v);
            cells.push(CellSummary {
                measure: m.to_string(),
                relation: rel,
                mean: mu,
                sd: std_dev(&v),
                count: v.len(),
            });
            all_means.push(mu);
            if subset.contains(&rel) {
                subset_means.push(mu);
            }
        }
        let (spread_sd, spread_range) = spread(&all_means);
        let (subset_sd, subset_range) = spread(&subset_means);
        out.push(MeasureSpread {
            measure: m.to_string(),
            spread_sd,
            spread_range,
            subset_sd,
            subset_range,
        });
    }
    EquitabilityReport {
        cells,
        measures: out,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRun {
    pub estimates: Vec<PowerEstimate>,
    pub failures: Vec<CellFailure>,
}

/// `estimate_power` for every `(measure, relation, level)`.
pub fn run_power_equitability(config: &ExperimentConfig) -> Result<PowerRun> {
    config.validate()?;
    let mut cells = Vec::new();
    for m in &config.measures {
        for &relation in &config.relations {
            for level in &config.power_noise {
                cells.push((*m, relation, *level));
            }
        }
    }
    let results: Vec<(Measure, Relation, NoiseTarget, Result<PowerEstimate>)> = cells
        .into_par_iter()
        .map(|(m, relation, level)| {
            let settings = PowerSettings {
                n: config.sample_size_for(&m),
                reps: config.power_reps,
                alpha: config.alpha,
                permutations: config.permutations,
                lambda_mode: config.lambda_mode,
                null_injection: config.null_injection,
            };
            let seed = SeedKey::new(config.base_seed)
                .str("power")
                .str(relation.id())
                .str(level.kind())
                .int(level.ratio().to_bits())
                .finish();
            let est = estimate_power(&m, relation, &level, &settings, seed);
            (m, relation, level, est)
        })
        .collect();
    let mut estimates = Vec::new();
    let mut failures = Vec::new();
    for (m, relation, level, est) in results {
        match est {
            Ok(e) => {
                for (rep, msg) in &e.missing {
                    failures.push(CellFailure {
                        measure: Some(m.id().to_string()),
                        relation,
                        rep: Some(*rep),
                        noise_level: Some(level.ratio()),
                        error: msg.clone(),
                    });
                }
                estimates.push(e);
            }
            Err(e) => failures.push(CellFailure {
                measure: Some(m.id().to_string()),
                relation,
                rep: None,
                noise_level: Some(level.ratio()),
                error: e.to_string(),
            }),
        }
    }
    Ok(PowerRun {
        estimates,
        failures,
    })
}

/// Sample sd of power across relations, per measure, at one noise level.
pub fn power_spread(estimates: &[PowerEstimate], measure: &str, ratio: f64) -> (f64, f64) {
    let v: Vec<f64> = estimates
        .iter()
        .filter(|e| e.measure == measure && e.noise.ratio() == ratio && e.power.is_finite())
        .map(|e| e.power)
        .collect();
    spread(&v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfEquitability {
    pub mean_delta: f64,
    pub sd_delta: f64,
}

/// Mean `|D[x; y] - D[f(x); y]|` over replicates of `y = f(x) + eps`, for a
/// strictly increasing catalog relation `f`.
pub fn self_equitability_check<M: DependenceMeasure + ?Sized>(
    measure: &M,
    relation: Relation,
    n: usize,
    reps: usize,
    noise_ratio: f64,
    seed: u64,
) -> Result<SelfEquitability> {
    if !relation.is_strictly_monotone() {
        return Err(Error::InvalidArgument(format!(
            "{relation} is not strictly monotone on [0, 1]"
        )));
    }
    if reps == 0 {
        return Err(invalid("reps must be at least 1"));
    }
    let deltas: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let (x, z) = replicate_draws(n, seed, rep)?;
            let fx = eval_relation(relation, &x);
            let y = msnr_scaled_noise(&fx, &z, noise_ratio)?.y;
            Ok((measure.score(&x, &y)? - measure.score(&fx, &y)?).abs())
        })
        .collect::<Result<_>>()?;
    Ok(SelfEquitability {
        mean_delta: mean(&deltas),
        sd_delta: std_dev(&deltas),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(m: &str, rel: Relation, rep: usize, score: f64) -> ScoreRow {
        ScoreRow {
            measure: m.into(),
            relation: rel,
            rep,
            score,
            achieved_ratio: 2.0,
        }
    }

    #[test]
    fn hand_built_spread() {
        let rows = vec![
            row("a", Relation::Line, 0, 0.4),
            row("a", Relation::Line, 1, 0.6),
            row("a", Relation::Cubic, 0, 0.7),
            row("a", Relation::Spike, 0, 0.9),
        ];
        let rep = equitability_spread(&rows, None);
        let s = &rep.measures[0];
        // Means 0.5, 0.7, 0.9: sd = sqrt((0.04 + 0 + 0.04) / 2) = 0.2.
        assert!((s.spread_range - 0.4).abs() < 1e-12);
        assert!((s.spread_sd - 0.2).abs() < 1e-12);
        // Spike is outside the default subset.
        assert!((s.subset_range - 0.2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_spreads() {
        let one = vec![
            row("a", Relation::Line, 0, 0.3),
            row("a", Relation::Line, 1, 0.8),
        ];
        let rep = equitability_spread(&one, None);
        assert_eq!(rep.measures[0].spread_sd, 0.0);
        let constant: Vec<ScoreRow> = ALL_RELATIONS.iter().map(|&r| row("c", r, 0, 0.5)).collect();
        let rep = equitability_spread(&constant, None);
        assert_eq!(rep.measures[0].spread_sd, 0.0);
        assert_eq!(rep.measures[0].spread_range, 0.0);
    }

    #[test]
    fn spread_ignores_relation_order() {
        let mut rows: Vec<ScoreRow> = ALL_RELATIONS
            .iter()
            .enumerate()
            .map(|(i, &r)| row("a", r, 0, (i as f64).sin()))
            .collect();
        let a = equitability_spread(&rows, None).measures[0].clone();
        rows.reverse();
        let b = equitability_spread(&rows, None).measures[0].clone();
        assert!((a.spread_sd - b.spread_sd).abs() < 1e-15);
        assert_eq!(a.spread_range, b.spread_range);
    }

    #[test]
    fn default_subset_has_seventeen() {
        assert_eq!(default_subset().len(), 17);
    }

    #[test]
    fn validation_lists_everything() {
        let c = ExperimentConfig {
            relations: vec![],
            power_reps: 10,
            alpha: 2.0,
            ..Default::default()
        };
        assert_eq!(c.violations().len(), 3);
    }

    #[test]
    fn self_equitability_rejects_non_monotone() {
        let r = self_equitability_check(&Measure::Pcor, Relation::Parabola, 100, 2, 3.0, 1);
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }
}
