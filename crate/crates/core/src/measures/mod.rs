//! Dependence measures behind one interface.
//!
//! [`Measure`] enumerates the built-in statistics together with their
//! parameters; [`DependenceMeasure`] is the trait the testing engine and the
//! experiment suite work against, so external statistics can be plugged in.

pub mod ace;
pub mod correlation;
pub mod dcor;
pub mod hhg;
pub mod hsic;
pub mod mi;
pub mod mic;
pub mod rdc;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use ace::{ace, ace_fit, AceFit, AceParams};
pub use correlation::{kendall, pearson, spearman};
pub use dcor::distance_correlation;
pub use hhg::{hhg, HhgParams};
pub use hsic::hsic;
pub use mi::{mutual_information, MiParams};
pub use mic::{mic, MicParams};
pub use rdc::{rdc, RdcParams};

/// A statistic `D[x; y]`; larger means more dependent.
pub trait DependenceMeasure: Send + Sync {
    fn name(&self) -> String;

    fn score(&self, x: &[f64], y: &[f64]) -> Result<f64>;

    /// Parameter summary recorded next to scores.
    fn params(&self) -> String {
        String::new()
    }

    /// Signed statistics are tested on their absolute value.
    fn is_signed(&self) -> bool {
        false
    }

    /// The value compared against the permutation critical value.
    fn test_statistic(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let s = self.score(x, y)?;
        Ok(if self.is_signed() { s.abs() } else { s })
    }

    /// Scores `(x, y[perm])` for many `perm`, where `y[perm]` has
    /// `y[perm[k]]` at position `k`. Measures with per-dataset
    /// precomputation override this.
    fn permutation_scorer<'a>(
        &'a self,
        x: &'a [f64],
        y: &'a [f64],
    ) -> Result<PermutationScorer<'a>> {
        Ok(Box::new(move |perm: &[usize]| {
            let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
            self.score(x, &yp)
        }))
    }
}

pub type PermutationScorer<'a> = Box<dyn Fn(&[usize]) -> Result<f64> + Send + Sync + 'a>;

/// Measures referenced by the benchmark for which no definition is
/// available here; they are recognised by name and must be supplied through
/// [`DependenceMeasure`].
pub const DECLARED_SLOTS: [&str; 2] = ["cdc", "curve_correlation"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "lowercase")]
pub enum Measure {
    Pcor,
    Scor,
    Kcor,
    Dcor,
    Hsic,
    Mi(MiParams),
    Mic(MicParams),
    Rdc(RdcParams),
    Ace(AceParams),
    Hhg(HhgParams),
}

pub const ALL_MEASURE_IDS: [&str; 10] = [
    "pcor", "scor", "kcor", "dcor", "hsic", "mi", "mic", "rdc", "ace", "hhg",
];

impl Measure {
    pub fn id(&self) -> &'static str {
        match self {
            Measure::Pcor => "pcor",
            Measure::Scor => "scor",
            Measure::Kcor => "kcor",
            Measure::Dcor => "dcor",
            Measure::Hsic => "hsic",
            Measure::Mi(_) => "mi",
            Measure::Mic(_) => "mic",
            Measure::Rdc(_) => "rdc",
            Measure::Ace(_) => "ace",
            Measure::Hhg(_) => "hhg",
        }
    }

    /// Every built-in measure with default parameters.
    pub fn all() -> Vec<Measure> {
        ALL_MEASURE_IDS
            .iter()
            .map(|id| id.parse().expect("built-in id"))
            .collect()
    }

    /// Parameters as `key=value` pairs joined by `;` (empty when none).
    pub fn params_string(&self) -> String {
        match self {
            Measure::Mi(p) => format!("k={};normalized={}", p.k, p.normalized),
            Measure::Mic(p) => format!("alpha={};clumps={}", p.alpha, p.clumps),
            Measure::Rdc(p) => format!("k={};s={};seed={}", p.k, p.s, p.seed),
            Measure::Ace(p) => format!("max_iter={};tol={}", p.max_iter, p.tol),
            Measure::Hhg(p) => format!("cap={}", p.cap),
            _ => String::new(),
        }
    }

    /// Sets one parameter, e.g. `set_param("k", "8")` on `mi`.
    pub fn set_param(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .trim()
                .parse()
                .map_err(|_| invalid(format!("bad value `{value}` for `{key}`")))
        }
        let id = self.id();
        let unknown = || invalid(format!("`{id}` has no parameter `{key}`"));
        match self {
            Measure::Mi(p) => match key {
                "k" => p.k = num(key, value)?,
                "normalized" => p.normalized = num(key, value)?,
                _ => return Err(unknown()),
            },
            Measure::Mic(p) => match key {
                "alpha" | "alpha_exponent" => p.alpha = num(key, value)?,
                "clumps" => p.clumps = num(key, value)?,
                _ => return Err(unknown()),
            },
            Measure::Rdc(p) => match key {
                "k" => p.k = num(key, value)?,
                "s" => p.s = num(key, value)?,
                "seed" => p.seed = num(key, value)?,
                _ => return Err(unknown()),
            },
            Measure::Ace(p) => match key {
                "max_iter" => p.max_iter = num(key, value)?,
                "tol" => p.tol = num(key, value)?,
                _ => return Err(unknown()),
            },
            Measure::Hhg(p) => match key {
                "cap" => p.cap = num(key, value)?,
                _ => return Err(unknown()),
            },
            _ => return Err(unknown()),
        }
        Ok(())
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "pcor" => Measure::Pcor,
            "scor" => Measure::Scor,
            "kcor" => Measure::Kcor,
            "dcor" => Measure::Dcor,
            "hsic" => Measure::Hsic,
            "mi" => Measure::Mi(MiParams::default()),
            "mic" => Measure::Mic(MicParams::default()),
            "rdc" => Measure::Rdc(RdcParams::default()),
            "ace" => Measure::Ace(AceParams::default()),
            "hhg" => Measure::Hhg(HhgParams::default()),
            other if DECLARED_SLOTS.contains(&other) => {
                return Err(Error::Unimplemented(other.to_string()))
            }
            other => return Err(Error::UnknownId(format!("measure `{other}`"))),
        })
    }
}

impl DependenceMeasure for Measure {
    fn name(&self) -> String {
        self.id().to_string()
    }

    fn score(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            Measure::Pcor => pearson(x, y),
            Measure::Scor => spearman(x, y),
            Measure::Kcor => kendall(x, y),
            Measure::Dcor => distance_correlation(x, y),
            Measure::Hsic => hsic(x, y),
            Measure::Mi(p) => mutual_information(x, y, p),
            Measure::Mic(p) => mic(x, y, p),
            Measure::Rdc(p) => rdc(x, y, p),
            Measure::Ace(p) => ace(x, y, p),
            Measure::Hhg(p) => hhg(x, y, p),
        }
    }

    fn params(&self) -> String {
        self.params_string()
    }

    fn is_signed(&self) -> bool {
        matches!(self, Measure::Pcor | Measure::Scor | Measure::Kcor)
    }

    fn permutation_scorer<'a>(
        &'a self,
        x: &'a [f64],
        y: &'a [f64],
    ) -> Result<PermutationScorer<'a>> {
        match self {
            Measure::Hhg(p) => {
                let prepared = hhg::HhgPrepared::new(x, y, p)?;
                Ok(Box::new(move |perm: &[usize]| Ok(prepared.score(perm))))
            }
            _ => Ok(Box::new(move |perm: &[usize]| {
                let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
                self.score(x, &yp)
            })),
        }
    }
}

/// One computed score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureScore {
    pub measure: Measure,
    pub value: f64,
    pub n: usize,
}

pub fn score(measure: &Measure, x: &[f64], y: &[f64]) -> Result<MeasureScore> {
    Ok(MeasureScore {
        measure: *measure,
        value: measure.score(x, y)?,
        n: x.len(),
    })
}

/// Parses `"pcor,mi"` into measures with default parameters.
pub fn parse_measure_list(list: &str) -> Result<Vec<Measure>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

/// Applies an override such as `mi.k=6` to every matching measure.
/// Overrides naming a measure absent from `measures` are rejected.
pub fn apply_override(measures: &mut [Measure], spec: &str) -> Result<()> {
    let (lhs, value) = spec.split_once('=').ok_or_else(|| {
        invalid(format!(
            "override `{spec}` is not of the form id.param=value"
        ))
    })?;
    let (id, key) = lhs.trim().split_once('.').ok_or_else(|| {
        invalid(format!(
            "override `{spec}` is not of the form id.param=value"
        ))
    })?;
    let mut hit = false;
    for m in measures.iter_mut().filter(|m| m.id() == id) {
        m.set_param(key, value)?;
        hit = true;
    }
    if !hit {
        return Err(invalid(format!(
            "override `{spec}` names no selected measure"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_parse_and_print() {
        for m in Measure::all() {
            assert_eq!(m.id().parse::<Measure>().unwrap(), m);
        }
        assert!(matches!(
            "cdc".parse::<Measure>(),
            Err(Error::Unimplemented(_))
        ));
        assert!(matches!(
            "nope".parse::<Measure>(),
            Err(Error::UnknownId(_))
        ));
    }

    #[test]
    fn overrides() {
        let mut ms = parse_measure_list("pcor, mi,rdc").unwrap();
        apply_override(&mut ms, "mi.k=8").unwrap();
        apply_override(&mut ms, "rdc.seed=3").unwrap();
        assert_eq!(
            ms[1],
            Measure::Mi(MiParams {
                k: 8,
                normalized: false
            })
        );
        assert_eq!(ms[1].params_string(), "k=8;normalized=false");
        assert!(apply_override(&mut ms, "mic.alpha=0.5").is_err());
        assert!(apply_override(&mut ms, "pcor.k=1").is_err());
        assert!(apply_override(&mut ms, "mi.k=abc").is_err());
    }

    #[test]
    fn signed_measures_test_on_magnitude() {
        let x = [1.0, 2.0, 3.0];
        let y = [3.0, 2.0, 1.0];
        assert_eq!(Measure::Pcor.test_statistic(&x, &y).unwrap(), 1.0);
        assert_eq!(Measure::Pcor.score(&x, &y).unwrap(), -1.0);
    }
}
