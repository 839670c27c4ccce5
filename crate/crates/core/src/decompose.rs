//! Classical additive decomposition with a 12-month period.

use crate::error::{Error, Result};
use crate::month::MonthIndex;
use crate::scalar::Scalar;
use crate::series::KpiSeries;

pub const PERIOD: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    pub start: MonthIndex,
    /// Centered 2x12 moving average; `None` for the first and last 6 months.
    pub trend: Vec<Option<T>>,
    /// Seasonal effect per calendar month, January first. Sums to zero.
    pub seasonal: [T; PERIOD],
    pub residual: Vec<Option<T>>,
}

impl<T: Scalar> Decomposition<T> {
    pub fn seasonal_at(&self, i: usize) -> T {
        self.seasonal[self.start.offset(i as i64).slot()]
    }

    /// `(trend + seasonal) + residual` at `i`, where the trend exists.
    pub fn reconstruct(&self, i: usize) -> Option<T> {
        let t = self.trend[i]?;
        let r = self.residual[i]?;
        Some((t + self.seasonal_at(i)) + r)
    }
}

/// `v - x`, corrected so that `x + r` rounds back to `v` whenever some
/// representable `r` can do that.
fn exact_residual<T: Scalar>(v: T, x: T) -> T {
    let mut r = v - x;
    for _ in 0..4 {
        let e = v - (x + r);
        if e == T::zero() {
            break;
        }
        r += e;
    }
    r
}

pub fn decompose<T: Scalar>(s: &KpiSeries<T>) -> Result<Decomposition<T>> {
    let values = s.dense()?;
    let n = values.len();
    if n < 2 * PERIOD {
        return Err(Error::SeriesTooShort {
            len: n,
            needed: 2 * PERIOD,
        });
    }
    let half = PERIOD / 2;
    let mut trend = vec![None; n];
    let edge = T::lit(0.5);
    for (i, slot) in trend.iter_mut().enumerate().take(n - half).skip(half) {
        let inner: T = values[i + 1 - half..i + half].iter().copied().sum();
        let sum = edge * values[i - half] + inner + edge * values[i + half];
        *slot = Some(sum / T::count(PERIOD));
    }

    let mut sums = [T::zero(); PERIOD];
    let mut counts = [0usize; PERIOD];
    for i in 0..n {
        if let Some(t) = trend[i] {
            let slot = s.month_at(i).slot();
            sums[slot] += values[i] - t;
            counts[slot] += 1;
        }
    }
    let mut seasonal = [T::zero(); PERIOD];
    for k in 0..PERIOD {
        seasonal[k] = sums[k] / T::count(counts[k]);
    }
    let centre = crate::scalar::mean(&seasonal);
    for v in &mut seasonal {
        *v -= centre;
    }

    let residual = (0..n)
        .map(|i| trend[i].map(|t| exact_residual(values[i], t + seasonal[s.month_at(i).slot()])))
        .collect();

    Ok(Decomposition {
        start: s.start(),
        trend,
        seasonal,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::KpiKind;

    fn series(values: &[f64]) -> KpiSeries<f64> {
        KpiSeries::from_values("X", KpiKind::Adr, MonthIndex::new(2018, 1).unwrap(), values)
            .unwrap()
    }

    #[test]
    fn linear_ramp_has_flat_seasonal_and_ramp_trend() {
        let values: Vec<f64> = (1..=48).map(|t| t as f64).collect();
        let d = decompose(&series(&values)).unwrap();
        for s in d.seasonal {
            assert!(s.abs() < 1e-9);
        }
        for (i, t) in d.trend.iter().enumerate() {
            if (6..42).contains(&i) {
                assert!((t.unwrap() - values[i]).abs() < 1e-9);
            } else {
                assert!(t.is_none());
            }
        }
    }

    #[test]
    fn pure_sinusoid_leaves_tiny_residual() {
        let values: Vec<f64> = (0..48)
            .map(|t| 100.0 + 10.0 * (2.0 * std::f64::consts::PI * t as f64 / 12.0).sin())
            .collect();
        let d = decompose(&series(&values)).unwrap();
        for r in d.residual.iter().flatten() {
            assert!(r.abs() < 1e-6);
        }
        let total: f64 = d.seasonal.iter().sum();
        assert!(total.abs() < 1e-9);
    }

    #[test]
    fn reconstruction_is_exact() {
        let values: Vec<f64> = (0..40)
            .map(|t| 50.0 + (t as f64 * 1.3).sin() * 7.0 + t as f64 * 0.4)
            .collect();
        let d = decompose(&series(&values)).unwrap();
        for (i, v) in values.iter().enumerate() {
            if let Some(r) = d.reconstruct(i) {
                assert_eq!(r, *v);
            }
        }
    }

    #[test]
    fn too_short() {
        let err = decompose(&series(&[1.0; 23])).unwrap_err();
        assert_eq!(
            err,
            Error::SeriesTooShort {
                len: 23,
                needed: 24
            }
        );
    }

    #[test]
    fn seasonal_is_indexed_by_calendar_month() {
        // start in July: the seasonal bump must land on January regardless
        let start = MonthIndex::new(2018, 7).unwrap();
        let values: Vec<f64> = (0..36)
            .map(|i| {
                if start.offset(i).month() == 1 {
                    20.0
                } else {
                    10.0
                }
            })
            .collect();
        let s = KpiSeries::from_values("X", KpiKind::Adr, start, &values).unwrap();
        let d = decompose(&s).unwrap();
        let max = d
            .seasonal
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(max, 0);
    }
}
