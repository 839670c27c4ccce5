use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleMethod {
    #[default]
    MinMax,
    ZScore,
}

/// Fitted affine normalization.
///
/// For [`ScaleMethod::MinMax`] `a` is the minimum and `b` the maximum; for
/// [`ScaleMethod::ZScore`] `a` is the mean and `b` the population standard
/// deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalerParams<T> {
    pub method: ScaleMethod,
    pub a: T,
    pub b: T,
}

impl<T: Scalar> ScalerParams<T> {
    pub fn fit(values: &[T], method: ScaleMethod) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let (a, b) = match method {
            ScaleMethod::MinMax => {
                let lo = values.iter().copied().fold(T::infinity(), T::min);
                let hi = values.iter().copied().fold(T::neg_infinity(), T::max);
                if !(hi > lo) {
                    return Err(Error::DegenerateScale("min-max fit on constant input"));
                }
                (lo, hi)
            }
            ScaleMethod::ZScore => {
                let mean = crate::scalar::mean(values);
                let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>()
                    / T::count(values.len());
                let std = var.sqrt();
                if !(std > T::zero()) {
                    return Err(Error::DegenerateScale("z-score fit on constant input"));
                }
                (mean, std)
            }
        };
        Ok(Self { method, a, b })
    }

    fn span(&self) -> T {
        match self.method {
            ScaleMethod::MinMax => self.b - self.a,
            ScaleMethod::ZScore => self.b,
        }
    }

    #[inline]
    pub fn scale(&self, x: T) -> T {
        (x - self.a) / self.span()
    }

    #[inline]
    pub fn unscale(&self, y: T) -> T {
        y * self.span() + self.a
    }

    pub fn apply(&self, values: &[T]) -> Vec<T> {
        values.iter().map(|&x| self.scale(x)).collect()
    }

    pub fn invert(&self, values: &[T]) -> Vec<T> {
        values.iter().map(|&y| self.unscale(y)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_max_maps_to_unit_interval() {
        let p = ScalerParams::fit(&[10.0, 20.0, 30.0], ScaleMethod::MinMax).unwrap();
        assert_eq!(p.apply(&[10.0, 20.0, 30.0]), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn z_score_uses_population_std() {
        let p = ScalerParams::fit(&[1.0, 3.0], ScaleMethod::ZScore).unwrap();
        assert_eq!((p.a, p.b), (2.0, 1.0));
        assert_eq!(p.apply(&[1.0, 3.0]), vec![-1.0, 1.0]);
    }

    #[test]
    fn degenerate_fits() {
        for m in [ScaleMethod::MinMax, ScaleMethod::ZScore] {
            assert!(matches!(
                ScalerParams::fit(&[0.0, 0.0, 0.0], m),
                Err(Error::DegenerateScale(_))
            ));
        }
        assert_eq!(
            ScalerParams::<f64>::fit(&[], ScaleMethod::MinMax),
            Err(Error::EmptyInput)
        );
    }

    #[test]
    fn f32_round_trip() {
        let xs = [3.5f32, 9.25, -1.0, 4.0];
        let p = ScalerParams::fit(&xs, ScaleMethod::ZScore).unwrap();
        for (x, y) in xs.iter().zip(p.invert(&p.apply(&xs))) {
            assert!((x - y).abs() < 1e-5);
        }
    }
}
