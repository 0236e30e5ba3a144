//! The catalog of 21 functional relationships on `[0, 1]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Line,
    LinearPeriodicLow,
    LinearPeriodicMedium,
    LinearPeriodicHigh1,
    LinearPeriodicHigh2,
    NonFourierCosineLow,
    CosineHigh,
    Cubic,
    CubicYStretched,
    LShaped,
    Exp2x,
    Exp10x,
    Parabola,
    NonFourierSineLow,
    SineLow,
    SineHigh,
    Sigmoid,
    VaryingFreqCosine,
    VaryingFreqSine,
    Spike,
    LopsidedLShaped,
}

pub const ALL_RELATIONS: [Relation; 21] = [
    Relation::Line,
    Relation::LinearPeriodicLow,
    Relation::LinearPeriodicMedium,
    Relation::LinearPeriodicHigh1,
    Relation::LinearPeriodicHigh2,
    Relation::NonFourierCosineLow,
    Relation::CosineHigh,
    Relation::Cubic,
    Relation::CubicYStretched,
    Relation::LShaped,
    Relation::Exp2x,
    Relation::Exp10x,
    Relation::Parabola,
    Relation::NonFourierSineLow,
    Relation::SineLow,
    Relation::SineHigh,
    Relation::Sigmoid,
    Relation::VaryingFreqCosine,
    Relation::VaryingFreqSine,
    Relation::Spike,
    Relation::LopsidedLShaped,
];

/// All relations in catalog order.
pub fn list_relations() -> &'static [Relation] {
    &ALL_RELATIONS
}

fn ind(cond: bool) -> f64 {
    if cond {
        1.0
    } else {
        0.0
    }
}

impl Relation {
    /// Snake-case identifier used on the command line and in CSV output.
    pub fn id(self) -> &'static str {
        use Relation::*;
        match self {
            Line => "line",
            LinearPeriodicLow => "linear_periodic_low",
            LinearPeriodicMedium => "linear_periodic_medium",
            LinearPeriodicHigh1 => "linear_periodic_high1",
            LinearPeriodicHigh2 => "linear_periodic_high2",
            NonFourierCosineLow => "non_fourier_cosine_low",
            CosineHigh => "cosine_high",
            Cubic => "cubic",
            CubicYStretched => "cubic_y_stretched",
            LShaped => "l_shaped",
            Exp2x => "exp2x",
            Exp10x => "exp10x",
            Parabola => "parabola",
            NonFourierSineLow => "non_fourier_sine_low",
            SineLow => "sine_low",
            SineHigh => "sine_high",
            Sigmoid => "sigmoid",
            VaryingFreqCosine => "varying_freq_cosine",
            VaryingFreqSine => "varying_freq_sine",
            Spike => "spike",
            LopsidedLShaped => "lopsided_l_shaped",
        }
    }

    pub fn display_name(self) -> &'static str {
        use Relation::*;
        match self {
            Line => "Line",
            LinearPeriodicLow => "Linear+Periodic, Low Freq",
            LinearPeriodicMedium => "Linear+Periodic, Medium Freq",
            LinearPeriodicHigh1 => "Linear+Periodic, High Freq",
            LinearPeriodicHigh2 => "Linear+Periodic, High Freq 2",
            NonFourierCosineLow => "Non-Fourier Freq [Low] Cosine",
            CosineHigh => "Cosine, High Freq",
            Cubic => "Cubic",
            CubicYStretched => "Cubic, Y-stretched",
            LShaped => "L-shaped",
            Exp2x => "Exponential [2^x]",
            Exp10x => "Exponential [10^x]",
            Parabola => "Parabola",
            NonFourierSineLow => "Non-Fourier Freq [Low] Sine",
            SineLow => "Sine, Low Freq",
            SineHigh => "Sine, High Freq",
            Sigmoid => "Sigmoid",
            VaryingFreqCosine => "Varying Freq [Medium] Cosine",
            VaryingFreqSine => "Varying Freq [Medium] Sine",
            Spike => "Spike",
            LopsidedLShaped => "Lopsided L-shaped",
        }
    }

    /// Plain-text formula, as listed by `equibench relations`.
    pub fn formula(self) -> &'static str {
        use Relation::*;
        match self {
            Line => "y = x",
            LinearPeriodicLow => "y = 0.2 sin(4(2x-1)) + 1.1(2x-1)",
            LinearPeriodicMedium => "y = sin(10 pi x) + x",
            LinearPeriodicHigh1 => "y = 0.1 sin(10.6(2x-1)) + 1.1(2x-1)",
            LinearPeriodicHigh2 => "y = 0.2 sin(10.6(2x-1)) + 1.1(2x-1)",
            NonFourierCosineLow => "y = cos(7 pi x)",
            CosineHigh => "y = cos(14 pi x)",
            Cubic => "y = 4x^3 + x^2 - 4x",
            CubicYStretched => "y = 41(4x^3 + x^2 - 4x)",
            LShaped => "y = (x/99) I(x <= 99/100) + I(x > 99/100)",
            Exp2x => "y = 2^x",
            Exp10x => "y = 10^x",
            Parabola => "y = 4x^2",
            NonFourierSineLow => "y = sin(9 pi x)",
            SineLow => "y = sin(8 pi x)",
            SineHigh => "y = sin(16 pi x)",
            Sigmoid => "y = [50(x-0.5)+0.5] I(1/20 <= x <= 51/100) + I(x > 51/100)",
            VaryingFreqCosine => "y = sin(5 pi x(1+x))",
            VaryingFreqSine => "y = sin(6 pi x(1+x))",
            Spike => "y = 20 I(x < 1/20) + (-18x + 19/10) I(1/20 <= x < 1/10) + (-x/9 + 1/9) I(x >= 1/10)",
            LopsidedLShaped => {
                "y = 200x I(x < 1/200) + (-198x + 199/100) I(1/200 <= x < 1/100) + (-x/99 + 1/99) I(x >= 1/100)"
            }
        }
    }

    /// True for the members that are strictly increasing on `[0, 1]`.
    pub fn is_strictly_monotone(self) -> bool {
        matches!(self, Relation::Line | Relation::Exp2x | Relation::Exp10x)
    }

    /// Noise-free value at a single point.
    pub fn apply(self, x: f64) -> f64 {
        use Relation::*;
        match self {
            Line => x,
            LinearPeriodicLow => 0.2 * (4.0 * (2.0 * x - 1.0)).sin() + 1.1 * (2.0 * x - 1.0),
            LinearPeriodicMedium => (10.0 * PI * x).sin() + x,
            LinearPeriodicHigh1 => 0.1 * (10.6 * (2.0 * x - 1.0)).sin() + 1.1 * (2.0 * x - 1.0),
            LinearPeriodicHigh2 => 0.2 * (10.6 * (2.0 * x - 1.0)).sin() + 1.1 * (2.0 * x - 1.0),
            NonFourierCosineLow => (7.0 * PI * x).cos(),
            CosineHigh => (14.0 * PI * x).cos(),
            Cubic => 4.0 * x.powi(3) + x * x - 4.0 * x,
            CubicYStretched => 41.0 * (4.0 * x.powi(3) + x * x - 4.0 * x),
            LShaped => x / 99.0 * ind(x <= 99.0 / 100.0) + ind(x > 99.0 / 100.0),
            Exp2x => 2f64.powf(x),
            Exp10x => 10f64.powf(x),
            Parabola => 4.0 * x * x,
            NonFourierSineLow => (9.0 * PI * x).sin(),
            SineLow => (8.0 * PI * x).sin(),
            SineHigh => (16.0 * PI * x).sin(),
            Sigmoid => {
                (50.0 * (x - 0.5) + 0.5) * ind((1.0 / 20.0..=51.0 / 100.0).contains(&x))
                    + ind(x > 51.0 / 100.0)
            }
            VaryingFreqCosine => (5.0 * PI * x * (1.0 + x)).sin(),
            VaryingFreqSine => (6.0 * PI * x * (1.0 + x)).sin(),
            Spike => {
                20.0 * ind(x < 1.0 / 20.0)
                    + (-18.0 * x + 19.0 / 10.0) * ind((1.0 / 20.0..1.0 / 10.0).contains(&x))
                    + (-x / 9.0 + 1.0 / 9.0) * ind(x >= 1.0 / 10.0)
            }
            LopsidedLShaped => {
                200.0 * x * ind(x < 1.0 / 200.0)
                    + (-198.0 * x + 199.0 / 100.0) * ind((1.0 / 200.0..1.0 / 100.0).contains(&x))
                    + (-x / 99.0 + 1.0 / 99.0) * ind(x >= 1.0 / 100.0)
            }
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_RELATIONS
            .iter()
            .copied()
            .find(|r| r.id() == s)
            .ok_or_else(|| Error::UnknownId(format!("relation `{s}`")))
    }
}

/// Componentwise noise-free `f(x)`.
pub fn eval_relation(relation: Relation, x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| relation.apply(v)).collect()
}

/// `n` seeded draws from U(0, 1).
pub fn sample_x(n: usize, seed: u64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(invalid(format!("sample size must be at least 2, got {n}")));
    }
    let mut rng = seed::rng(seed);
    Ok((0..n).map(|_| rng.random::<f64>()).collect())
}
