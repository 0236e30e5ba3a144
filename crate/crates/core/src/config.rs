//! Experiment configuration files.
//!
//! Configs are TOML. Every key is optional and falls back to the value in
//! [`ExperimentConfig::default`]; [`DEFAULT_CONFIG`] spells all of them out.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::noise::{NoiseTarget, DEFAULT_SSNR_MAX_STEPS, DEFAULT_SSNR_TOLERANCE};
use crate::relations::Relation;
use crate::suite::ExperimentConfig;
use crate::testing::LambdaMode;

/// Commented template emitted by `print-default-config`.
pub const DEFAULT_CONFIG: &str = r#"# equibench experiment configuration.
# Every key may be omitted; the values below are the defaults.

# Base seed. All randomness in a run derives from it.
seed = 20240101

# Sample size per replicate.
n = 500

# HHG is evaluated on the first hhg_n points when n is larger.
hhg_n = 256

# Relation ids (see `equibench relations`).
relations = [
  "line", "linear_periodic_low", "linear_periodic_medium",
  "linear_periodic_high1", "linear_periodic_high2", "non_fourier_cosine_low",
  "cosine_high", "cubic", "cubic_y_stretched", "l_shaped", "exp2x", "exp10x",
  "parabola", "non_fourier_sine_low", "sine_low", "sine_high", "sigmoid",
  "varying_freq_cosine", "varying_freq_sine", "spike", "lopsided_l_shaped",
]

# Measure ids: pcor scor kcor dcor hsic mi mic rdc ace hhg.
measures = ["pcor", "scor", "kcor", "dcor", "hsic", "mi", "mic", "rdc", "ace", "hhg"]

# Relations for the subset spread. Omit for all but
# sigmoid, lopsided_l_shaped, l_shaped and spike.
# subset = ["line", "parabola"]

[score]
reps = 50
# "msnr" or "ssnr".
noise = "msnr"
ratio = 11.529
# SSNR only: heuristic tolerance and step limit.
tolerance = 0.03
max_steps = 100

[power]
reps = 100
alpha = 0.05
permutations = 200
# "per_dataset" or "shared".
lambda_mode = "per_dataset"
# Shuffle y before testing, so power estimates the type-I error.
null_injection = false
noise = "msnr"
levels = [1.25, 1.5, 2.0, 3.0057]
tolerance = 0.03
max_steps = 100

# Measure parameters, one table per measure.
[params.mi]
k = 6
normalized = false

[params.mic]
alpha = 0.6
clumps = 15

[params.rdc]
k = 20
s = 0.16666666666666666
seed = 0

[params.ace]
max_iter = 100
tol = 1e-6

[params.hhg]
cap = 512
"#;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    n: Option<usize>,
    hhg_n: Option<usize>,
    relations: Option<Vec<String>>,
    measures: Option<Vec<String>>,
    subset: Option<Vec<String>>,
    #[serde(default)]
    score: RawScore,
    #[serde(default)]
    power: RawPower,
    #[serde(default)]
    params: BTreeMap<String, BTreeMap<String, toml::Value>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScore {
    reps: Option<usize>,
    noise: Option<String>,
    ratio: Option<f64>,
    tolerance: Option<f64>,
    max_steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPower {
    reps: Option<usize>,
    alpha: Option<f64>,
    permutations: Option<usize>,
    lambda_mode: Option<LambdaMode>,
    null_injection: Option<bool>,
    noise: Option<String>,
    levels: Option<Vec<f64>>,
    tolerance: Option<f64>,
    max_steps: Option<usize>,
}

fn noise_target(
    kind: Option<&str>,
    ratio: f64,
    tolerance: Option<f64>,
    max_steps: Option<usize>,
) -> std::result::Result<NoiseTarget, String> {
    match kind.unwrap_or("msnr") {
        "msnr" => Ok(NoiseTarget::msnr(ratio)),
        "ssnr" => Ok(NoiseTarget::Ssnr {
            ratio,
            tolerance: tolerance.unwrap_or(DEFAULT_SSNR_TOLERANCE),
            max_steps: max_steps.unwrap_or(DEFAULT_SSNR_MAX_STEPS),
        }),
        other => Err(format!("unknown noise kind `{other}`")),
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses a config file. Syntax errors carry a line number; semantic
/// problems are collected and reported together.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let mut problems = Vec::new();
    let mut unknown = Vec::new();
    let mut cfg = ExperimentConfig::default();

    if let Some(s) = raw.seed {
        cfg.base_seed = s;
    }
    if let Some(n) = raw.n {
        cfg.n = n;
    }
    if let Some(n) = raw.hhg_n {
        cfg.hhg_n = n;
    }
    let relations = |ids: &[String], unknown: &mut Vec<String>| -> Vec<Relation> {
        ids.iter()
            .filter_map(|id| match id.parse() {
                Ok(r) => Some(r),
                Err(_) => {
                    unknown.push(format!("relation `{id}`"));
                    None
                }
            })
            .collect()
    };
    if let Some(ids) = &raw.relations {
        cfg.relations = relations(ids, &mut unknown);
    }
    if let Some(ids) = &raw.subset {
        cfg.subset = Some(relations(ids, &mut unknown));
    }
    if let Some(ids) = &raw.measures {
        cfg.measures = Vec::new();
        for id in ids {
            match id.parse::<Measure>() {
                Ok(m) => cfg.measures.push(m),
                Err(Error::Unimplemented(m)) => {
                    problems.push(format!("measure `{m}` has no built-in implementation"))
                }
                Err(_) => unknown.push(format!("measure `{id}`")),
            }
        }
    }
    for (id, table) in &raw.params {
        let targets: Vec<&mut Measure> = cfg.measures.iter_mut().filter(|m| m.id() == id).collect();
        if targets.is_empty() {
            if !crate::measures::ALL_MEASURE_IDS.contains(&id.as_str()) {
                unknown.push(format!("measure `{id}` in [params]"));
            }
            continue;
        }
        for m in targets {
            for (key, value) in table {
                let v = match value {
                    toml::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                if let Err(e) = m.set_param(key, &v) {
                    problems.push(format!("params.{id}: {e}"));
                }
            }
        }
    }

    if let Some(r) = raw.score.reps {
        cfg.score_reps = r;
    }
    let ratio = raw.score.ratio.unwrap_or(cfg.score_noise.ratio());
    match noise_target(
        raw.score.noise.as_deref(),
        ratio,
        raw.score.tolerance,
        raw.score.max_steps,
    ) {
        Ok(t) => cfg.score_noise = t,
        Err(e) => problems.push(format!("score.noise: {e}")),
    }

    let p = &raw.power;
    if let Some(r) = p.reps {
        cfg.power_reps = r;
    }
    if let Some(a) = p.alpha {
        cfg.alpha = a;
    }
    if let Some(b) = p.permutations {
        cfg.permutations = b;
    }
    if let Some(l) = p.lambda_mode {
        cfg.lambda_mode = l;
    }
    if let Some(b) = p.null_injection {
        cfg.null_injection = b;
    }
    let levels: Vec<f64> = p
        .levels
        .clone()
        .unwrap_or_else(|| cfg.power_noise.iter().map(|t| t.ratio()).collect());
    let mut power_noise = Vec::new();
    for ratio in levels {
        match noise_target(p.noise.as_deref(), ratio, p.tolerance, p.max_steps) {
            Ok(t) => power_noise.push(t),
            Err(e) => {
                problems.push(format!("power.noise: {e}"));
                break;
            }
        }
    }
    cfg.power_noise = power_noise;

    if !unknown.is_empty() {
        return Err(Error::UnknownId(unknown.join(", ")));
    }
    problems.extend(cfg.violations());
    if !problems.is_empty() {
        return Err(Error::InvalidArgument(problems.join("; ")));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_matches_defaults() {
        assert_eq!(
            parse_config(DEFAULT_CONFIG).unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn empty_file_is_default() {
        assert_eq!(parse_config("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn overrides() {
        let c = parse_config(
            "seed = 3\nmeasures = [\"mi\", \"pcor\"]\n[params.mi]\nk = 8\n[power]\nnoise = \"ssnr\"\nlevels = [2.0]\n",
        )
        .unwrap();
        assert_eq!(c.base_seed, 3);
        assert_eq!(c.measures.len(), 2);
        assert_eq!(c.measures[0].params_string(), "k=8;normalized=false");
        assert_eq!(c.power_noise, vec![NoiseTarget::ssnr(2.0)]);
    }

    #[test]
    fn syntax_error_has_line() {
        match parse_config("seed = 1\nn = \n") {
            Err(Error::Parse { line: Some(2), .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_relation() {
        assert!(matches!(
            parse_config("relations = [\"nosuch\"]"),
            Err(Error::UnknownId(_))
        ));
    }

    #[test]
    fn all_violations_listed() {
        match parse_config("[power]\nreps = 10\nalpha = 0.0\n") {
            Err(Error::InvalidArgument(m)) => {
                assert!(m.contains("power_reps") && m.contains("alpha"), "{m}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_param() {
        assert!(matches!(
            parse_config("[params.mi]\nbogus = 1\n"),
            Err(Error::InvalidArgument(_))
        ));
    }
}
