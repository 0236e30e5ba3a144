//! Python bindings: relations, noise generators, measures, permutation
//! tests and the equitability experiments.

use pyo3::exceptions::{PyKeyError, PyNotImplementedError, PyValueError};
use pyo3::prelude::*;

use eb::measures::{apply_override, DependenceMeasure, Measure};
use eb::noise::NoiseTarget;
use eb::relations::Relation;
use eb::testing::{LambdaMode, PowerSettings};
use equibench_core as eb;

fn to_py(e: eb::Error) -> PyErr {
    match e {
        eb::Error::UnknownId(m) => PyKeyError::new_err(m),
        eb::Error::Unimplemented(m) => PyNotImplementedError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn relation(id: &str) -> PyResult<Relation> {
    id.parse().map_err(to_py)
}

fn noise_target(msnr: Option<f64>, ssnr: Option<f64>) -> PyResult<NoiseTarget> {
    match (msnr, ssnr) {
        (Some(r), None) => Ok(NoiseTarget::msnr(r)),
        (None, Some(r)) => Ok(NoiseTarget::ssnr(r)),
        _ => Err(PyValueError::new_err("give exactly one of msnr and ssnr")),
    }
}

/// `(id, display name, formula)` for every catalog relation.
#[pyfunction]
fn list_relations() -> Vec<(String, String, String)> {
    eb::relations::list_relations()
        .iter()
        .map(|r| (r.id().into(), r.display_name().into(), r.formula().into()))
        .collect()
}

#[pyfunction]
fn eval_relation(relation_id: &str, x: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(eb::relations::eval_relation(relation(relation_id)?, &x))
}

/// `n` points uniform on `[0, 1)`.
#[pyfunction]
#[pyo3(signature = (n, seed=0))]
fn sample_x(n: usize, seed: u64) -> PyResult<Vec<f64>> {
    eb::relations::sample_x(n, seed).map_err(to_py)
}

#[pyfunction]
fn msnr(y: Vec<f64>, eps: Vec<f64>) -> PyResult<f64> {
    eb::noise::msnr(&y, &eps).map_err(to_py)
}

#[pyfunction]
fn ssnr(y: Vec<f64>, eps: Vec<f64>) -> PyResult<f64> {
    eb::noise::ssnr(&y, &eps).map_err(to_py)
}

#[pyfunction]
fn exact_ssnr_adjust(signal: Vec<f64>, noise: Vec<f64>, target: f64) -> PyResult<Vec<f64>> {
    eb::noise::exact_ssnr_adjust(&signal, &noise, target).map_err(to_py)
}

#[pyclass(frozen, get_all, module = "equibench")]
struct NoisyPair {
    y1: Vec<f64>,
    y2: Vec<f64>,
    scale_a: f64,
    achieved_ratio_1: f64,
    achieved_ratio_2: f64,
}

/// Two relations on the same `x` made equally noisy by MSNR.
#[pyfunction]
fn make_msnr_equal_pair(f1: &str, f2: &str, x: Vec<f64>, eps: Vec<f64>) -> PyResult<NoisyPair> {
    let p =
        eb::noise::make_msnr_equal_pair(relation(f1)?, relation(f2)?, &x, &eps).map_err(to_py)?;
    Ok(NoisyPair {
        y1: p.y1,
        y2: p.y2,
        scale_a: p.scale_a,
        achieved_ratio_1: p.achieved_ratio_1,
        achieved_ratio_2: p.achieved_ratio_2,
    })
}

#[pyclass(frozen, get_all, module = "equibench")]
struct Dataset {
    x: Vec<f64>,
    y: Vec<f64>,
    noise: Vec<f64>,
    achieved_ratio: f64,
}

/// A noisy sample of one relation at an MSNR or SSNR target.
#[pyfunction]
#[pyo3(signature = (relation_id, n, *, msnr=None, ssnr=None, seed=0))]
fn generate(
    relation_id: &str,
    n: usize,
    msnr: Option<f64>,
    ssnr: Option<f64>,
    seed: u64,
) -> PyResult<Dataset> {
    use eb::seed::SeedKey;
    let rel = relation(relation_id)?;
    let target = noise_target(msnr, ssnr)?;
    let x = eb::relations::sample_x(n, SeedKey::new(seed).str("x").finish()).map_err(to_py)?;
    let z = eb::noise::standard_normal(n, SeedKey::new(seed).str("z").finish());
    let s = eb::noise::noisy_relation(
        rel,
        &x,
        &z,
        &target,
        SeedKey::new(seed).str("ssnr").finish(),
    )
    .map_err(to_py)?;
    Ok(Dataset {
        x,
        y: s.y,
        noise: s.noise,
        achieved_ratio: s.achieved_ratio,
    })
}

/// A dependence measure with its parameters, e.g. `Measure("mi", k=8)`.
#[pyclass(frozen, name = "Measure", module = "equibench")]
struct PyMeasure(Measure);

#[pymethods]
impl PyMeasure {
    #[new]
    #[pyo3(signature = (id, **params))]
    fn new(id: &str, params: Option<&Bound<'_, pyo3::types::PyDict>>) -> PyResult<Self> {
        let mut m: Measure = id.parse().map_err(to_py)?;
        if let Some(params) = params {
            for (k, v) in params.iter() {
                let spec = format!("{id}.{}={}", k.str()?, v.str()?);
                apply_override(std::slice::from_mut(&mut m), &spec).map_err(to_py)?;
            }
        }
        Ok(PyMeasure(m))
    }

    #[getter]
    fn id(&self) -> &'static str {
        self.0.id()
    }

    #[getter]
    fn params(&self) -> String {
        self.0.params_string()
    }

    fn score(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        self.0.score(&x, &y).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Measure('{}', '{}')", self.0.id(), self.0.params_string())
    }
}

/// Ids of the built-in measures.
#[pyfunction]
fn list_measures() -> Vec<&'static str> {
    eb::measures::ALL_MEASURE_IDS.to_vec()
}

/// Score with default parameters.
#[pyfunction]
fn score(measure_id: &str, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    let m: Measure = measure_id.parse().map_err(to_py)?;
    m.score(&x, &y).map_err(to_py)
}

#[pyclass(frozen, get_all, module = "equibench")]
struct PermutationTest {
    statistic: f64,
    critical_value: f64,
    reject: bool,
}

/// Permutation test of independence at level `alpha`.
#[pyfunction]
#[pyo3(signature = (measure, x, y, *, permutations=200, alpha=0.05, seed=0))]
fn permutation_test(
    py: Python<'_>,
    measure: &PyMeasure,
    x: Vec<f64>,
    y: Vec<f64>,
    permutations: usize,
    alpha: f64,
    seed: u64,
) -> PyResult<PermutationTest> {
    let m = measure.0;
    py.detach(|| {
        let statistic = m.test_statistic(&x, &y)?;
        let mut null = eb::testing::permutation_null(&m, &x, &y, permutations, seed)?;
        if m.is_signed() {
            null.iter_mut().for_each(|v| *v = v.abs());
        }
        let critical_value = eb::testing::critical_value(&null, alpha)?;
        Ok(PermutationTest {
            statistic,
            critical_value,
            reject: statistic > critical_value,
        })
    })
    .map_err(to_py)
}

#[pyclass(frozen, get_all, module = "equibench")]
struct PowerEstimate {
    measure: String,
    relation: String,
    noise_level: f64,
    n: usize,
    reps_completed: usize,
    rejections: usize,
    power: f64,
    ci_low: f64,
    ci_high: f64,
}

impl From<eb::testing::PowerEstimate> for PowerEstimate {
    fn from(e: eb::testing::PowerEstimate) -> Self {
        PowerEstimate {
            measure: e.measure,
            relation: e.relation.id().into(),
            noise_level: e.noise.ratio(),
            n: e.n,
            reps_completed: e.reps_completed,
            rejections: e.rejections,
            power: e.power,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
        }
    }
}

/// Rejection rate of the permutation test over simulated replicates.
#[pyfunction]
#[pyo3(signature = (
    measure, relation_id, *, msnr=None, ssnr=None, n=200, reps=100, alpha=0.05,
    permutations=200, shared_lambda=false, null_injection=false, seed=0
))]
#[allow(clippy::too_many_arguments)]
fn estimate_power(
    py: Python<'_>,
    measure: &PyMeasure,
    relation_id: &str,
    msnr: Option<f64>,
    ssnr: Option<f64>,
    n: usize,
    reps: usize,
    alpha: f64,
    permutations: usize,
    shared_lambda: bool,
    null_injection: bool,
    seed: u64,
) -> PyResult<PowerEstimate> {
    let rel = relation(relation_id)?;
    let target = noise_target(msnr, ssnr)?;
    let settings = PowerSettings {
        n,
        reps,
        alpha,
        permutations,
        lambda_mode: if shared_lambda {
            LambdaMode::Shared
        } else {
            LambdaMode::PerDataset
        },
        null_injection,
    };
    let m = measure.0;
    py.detach(|| eb::testing::estimate_power(&m, rel, &target, &settings, seed))
        .map(Into::into)
        .map_err(to_py)
}

/// Commented TOML template accepted by `run_equitability` and `run_power`.
#[pyfunction]
fn default_config() -> &'static str {
    eb::config::DEFAULT_CONFIG
}

/// Score experiment from a TOML config. Returns the score rows as
/// `(measure, relation, rep, score, achieved_ratio)` and the per-measure
/// spreads as `(measure, spread_sd, spread_range, subset_sd)`.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn run_equitability(
    py: Python<'_>,
    config: &str,
) -> PyResult<(
    Vec<(String, String, usize, f64, f64)>,
    Vec<(String, f64, f64, f64)>,
)> {
    let cfg = eb::config::parse_config(config).map_err(to_py)?;
    let run = py
        .detach(|| eb::suite::run_equitability(&cfg))
        .map_err(to_py)?;
    let report = eb::suite::equitability_spread(&run.scores, cfg.subset.as_deref());
    let rows = run
        .scores
        .into_iter()
        .map(|r| {
            (
                r.measure,
                r.relation.id().into(),
                r.rep,
                r.score,
                r.achieved_ratio,
            )
        })
        .collect();
    let spreads = report
        .measures
        .into_iter()
        .map(|m| (m.measure, m.spread_sd, m.spread_range, m.subset_sd))
        .collect();
    Ok((rows, spreads))
}

/// Power experiment from a TOML config.
#[pyfunction]
fn run_power(py: Python<'_>, config: &str) -> PyResult<Vec<PowerEstimate>> {
    let cfg = eb::config::parse_config(config).map_err(to_py)?;
    let run = py
        .detach(|| eb::suite::run_power_equitability(&cfg))
        .map_err(to_py)?;
    Ok(run.estimates.into_iter().map(Into::into).collect())
}

#[pymodule]
fn equibench(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMeasure>()?;
    m.add_class::<Dataset>()?;
    m.add_class::<NoisyPair>()?;
    m.add_class::<PermutationTest>()?;
    m.add_class::<PowerEstimate>()?;
    m.add_function(wrap_pyfunction!(list_relations, m)?)?;
    m.add_function(wrap_pyfunction!(eval_relation, m)?)?;
    m.add_function(wrap_pyfunction!(sample_x, m)?)?;
    m.add_function(wrap_pyfunction!(msnr, m)?)?;
    m.add_function(wrap_pyfunction!(ssnr, m)?)?;
    m.add_function(wrap_pyfunction!(exact_ssnr_adjust, m)?)?;
    m.add_function(wrap_pyfunction!(make_msnr_equal_pair, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(list_measures, m)?)?;
    m.add_function(wrap_pyfunction!(score, m)?)?;
    m.add_function(wrap_pyfunction!(permutation_test, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_power, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_equitability, m)?)?;
    m.add_function(wrap_pyfunction!(run_power, m)?)?;
    Ok(())
}
