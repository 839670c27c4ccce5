//! Forecast accuracy metrics and the Lewis MAPE bands.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check<T: Scalar>(actual: &[T], forecast: &[T]) -> Result<T> {
    if actual.len() != forecast.len() {
        return Err(Error::Shape(actual.len(), forecast.len()));
    }
    if actual.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(T::count(actual.len()))
}

pub fn mse<T: Scalar>(actual: &[T], forecast: &[T]) -> Result<T> {
    let n = check(actual, forecast)?;
    let sum: T = actual
        .iter()
        .zip(forecast)
        .map(|(&a, &f)| (a - f) * (a - f))
        .sum();
    Ok(sum / n)
}

pub fn mae<T: Scalar>(actual: &[T], forecast: &[T]) -> Result<T> {
    let n = check(actual, forecast)?;
    let sum: T = actual
        .iter()
        .zip(forecast)
        .map(|(&a, &f)| (a - f).abs())
        .sum();
    Ok(sum / n)
}

/// Mean absolute percentage error, in percent. Every actual must be > 0.
pub fn mape<T: Scalar>(actual: &[T], forecast: &[T]) -> Result<T> {
    let n = check(actual, forecast)?;
    if let Some((index, &a)) = actual.iter().enumerate().find(|(_, &a)| !(a > T::zero())) {
        return Err(Error::MapeUndefined {
            index,
            value: a.as_f64(),
        });
    }
    let sum: T = actual
        .iter()
        .zip(forecast)
        .map(|(&a, &f)| (a - f).abs() / a)
        .sum();
    Ok(T::lit(100.0) * sum / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub mse: f64,
    pub mae: f64,
    /// Percent.
    pub mape: f64,
}

impl EvalMetrics {
    pub fn compute<T: Scalar>(actual: &[T], forecast: &[T]) -> Result<Self> {
        Ok(Self {
            mse: mse(actual, forecast)?.as_f64(),
            mae: mae(actual, forecast)?.as_f64(),
            mape: mape(actual, forecast)?.as_f64(),
        })
    }
}

/// Lewis accuracy bands, best first.
///
/// Bands are `[0, 10)`, `[10, 20)`, `[20, 50]` and `(50, inf)`: a shared
/// boundary belongs to the worse band, except 50 which stays reasonable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AccuracyCategory {
    HighlyAccurate,
    Good,
    Reasonable,
    Inaccurate,
}

impl AccuracyCategory {
    pub const ALL: [AccuracyCategory; 4] = [
        AccuracyCategory::HighlyAccurate,
        AccuracyCategory::Good,
        AccuracyCategory::Reasonable,
        AccuracyCategory::Inaccurate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AccuracyCategory::HighlyAccurate => "HIGHLY_ACCURATE",
            AccuracyCategory::Good => "GOOD",
            AccuracyCategory::Reasonable => "REASONABLE",
            AccuracyCategory::Inaccurate => "INACCURATE",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AccuracyCategory::HighlyAccurate => "Highly accurate forecasting",
            AccuracyCategory::Good => "Good forecasting",
            AccuracyCategory::Reasonable => "Reasonable forecasting",
            AccuracyCategory::Inaccurate => "Inaccurate forecasting",
        }
    }
}

impl fmt::Display for AccuracyCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AccuracyCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AccuracyCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidSeries(format!("unknown accuracy category {s:?}")))
    }
}

pub fn categorize_mape(mape: f64) -> Result<AccuracyCategory> {
    if mape.is_nan() || mape < 0.0 {
        return Err(Error::InvalidMape(mape));
    }
    Ok(if mape < 10.0 {
        AccuracyCategory::HighlyAccurate
    } else if mape < 20.0 {
        AccuracyCategory::Good
    } else if mape <= 50.0 {
        AccuracyCategory::Reasonable
    } else {
        AccuracyCategory::Inaccurate
    })
}
