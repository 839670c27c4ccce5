use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lstm::TrainingConfig;

/// Learning-rate axis: a log-uniform interval for random and Bayesian
/// sampling, and a discrete list for grid search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningRateAxis {
    pub min: f64,
    pub max: f64,
    pub grid: Vec<f64>,
}

impl LearningRateAxis {
    /// `n` points evenly spaced in log10 between `min` and `max` inclusive.
    pub fn log_spaced(min: f64, max: f64, n: usize) -> Self {
        let grid = match n {
            0 => Vec::new(),
            1 => vec![min],
            _ => {
                let (a, b) = (min.log10(), max.log10());
                (0..n)
                    .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
                    .collect()
            }
        };
        Self { min, max, grid }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpace {
    pub lookback: Vec<usize>,
    pub hidden_size: Vec<usize>,
    pub learning_rate: LearningRateAxis,
    pub epochs: Vec<usize>,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            lookback: vec![6, 12],
            hidden_size: vec![8, 16, 32],
            learning_rate: LearningRateAxis {
                min: 1e-3,
                max: 2e-2,
                grid: vec![1e-3, 5e-3, 2e-2],
            },
            epochs: vec![800],
        }
    }
}

/// One concrete point of a [`SearchSpace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub lookback: usize,
    pub hidden_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl HyperParams {
    pub fn apply(&self, base: &TrainingConfig) -> TrainingConfig {
        TrainingConfig {
            lookback: self.lookback,
            hidden_size: self.hidden_size,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            ..base.clone()
        }
    }
}

fn check_set(name: &str, set: &[usize]) -> Result<()> {
    if set.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "search space: {name} set is empty"
        )));
    }
    if set.contains(&0) {
        return Err(Error::InvalidConfig(format!(
            "search space: {name} values must be positive"
        )));
    }
    Ok(())
}

fn unit(v: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        0.0
    }
}

fn bounds(set: &[usize]) -> (f64, f64) {
    let lo = set.iter().min().copied().unwrap_or(0) as f64;
    let hi = set.iter().max().copied().unwrap_or(0) as f64;
    (lo, hi)
}

impl SearchSpace {
    pub const DIM: usize = 4;

    pub fn validate(&self) -> Result<()> {
        check_set("lookback", &self.lookback)?;
        check_set("hidden_size", &self.hidden_size)?;
        check_set("epochs", &self.epochs)?;
        let lr = &self.learning_rate;
        if !(lr.min > 0.0 && lr.min.is_finite() && lr.max.is_finite() && lr.min <= lr.max) {
            return Err(Error::InvalidConfig(format!(
                "search space: learning-rate interval [{}, {}] must be positive and ordered",
                lr.min, lr.max
            )));
        }
        if lr.grid.is_empty() {
            return Err(Error::InvalidConfig(
                "search space: learning-rate grid is empty".into(),
            ));
        }
        if let Some(v) = lr.grid.iter().find(|&&v| !(v >= lr.min && v <= lr.max)) {
            return Err(Error::InvalidConfig(format!(
                "search space: learning-rate grid value {v} lies outside [{}, {}]",
                lr.min, lr.max
            )));
        }
        Ok(())
    }

    pub fn grid_size(&self) -> usize {
        self.lookback.len()
            * self.hidden_size.len()
            * self.learning_rate.grid.len()
            * self.epochs.len()
    }

    /// Every grid point, ordered lexicographically by
    /// (lookback, hidden_size, learning_rate, epochs) in declaration order.
    pub fn grid(&self) -> Vec<HyperParams> {
        let mut out = Vec::with_capacity(self.grid_size());
        for &lookback in &self.lookback {
            for &hidden_size in &self.hidden_size {
                for &learning_rate in &self.learning_rate.grid {
                    for &epochs in &self.epochs {
                        out.push(HyperParams {
                            lookback,
                            hidden_size,
                            learning_rate,
                            epochs,
                        });
                    }
                }
            }
        }
        out
    }

    /// Integer axes uniform over their sets, learning rate log-uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> HyperParams {
        let pick = |set: &[usize], rng: &mut R| *set.choose(rng).expect("validated non-empty");
        let lookback = pick(&self.lookback, rng);
        let hidden_size = pick(&self.hidden_size, rng);
        let lr = &self.learning_rate;
        let u: f64 = rng.random();
        let learning_rate = 10f64.powf(lr.min.log10() + u * (lr.max.log10() - lr.min.log10()));
        let epochs = pick(&self.epochs, rng);
        HyperParams {
            lookback,
            hidden_size,
            learning_rate,
            epochs,
        }
    }

    /// Maps a point into the unit hypercube: integer axes affinely between
    /// their set extremes, learning rate in log10.
    pub fn embed(&self, p: &HyperParams) -> [f64; Self::DIM] {
        let (l0, l1) = bounds(&self.lookback);
        let (h0, h1) = bounds(&self.hidden_size);
        let (e0, e1) = bounds(&self.epochs);
        let lr = &self.learning_rate;
        [
            unit(p.lookback as f64, l0, l1),
            unit(p.hidden_size as f64, h0, h1),
            unit(p.learning_rate.log10(), lr.min.log10(), lr.max.log10()),
            unit(p.epochs as f64, e0, e1),
        ]
    }

    pub fn contains(&self, p: &HyperParams) -> bool {
        let lr = &self.learning_rate;
        self.lookback.contains(&p.lookback)
            && self.hidden_size.contains(&p.hidden_size)
            && self.epochs.contains(&p.epochs)
            && p.learning_rate >= lr.min * (1.0 - 1e-12)
            && p.learning_rate <= lr.max * (1.0 + 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_grid_has_eighteen_points_in_order() {
        let s = SearchSpace::default();
        s.validate().unwrap();
        let g = s.grid();
        assert_eq!(g.len(), 18);
        assert_eq!(g.len(), s.grid_size());
        assert_eq!(
            (g[0].lookback, g[0].hidden_size, g[0].learning_rate),
            (6, 8, 1e-3)
        );
        assert_eq!(
            (g[1].lookback, g[1].hidden_size, g[1].learning_rate),
            (6, 8, 5e-3)
        );
        assert_eq!((g[3].lookback, g[3].hidden_size), (6, 16));
        assert_eq!(g[9].lookback, 12);
    }

    #[test]
    fn log_spacing() {
        let a = LearningRateAxis::log_spaced(1e-4, 1e-1, 4);
        for (x, y) in a.grid.iter().zip([1e-4, 1e-3, 1e-2, 1e-1]) {
            assert!((x / y - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn samples_stay_inside_and_embed_in_unit_cube() {
        let s = SearchSpace::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let p = s.sample(&mut rng);
            assert!(s.contains(&p));
            assert!(s.embed(&p).iter().all(|&u| (0.0..=1.0).contains(&u)));
        }
    }

    #[test]
    fn invalid_spaces() {
        let mut s = SearchSpace::default();
        s.hidden_size.clear();
        assert!(s.validate().is_err());
        let mut s = SearchSpace::default();
        s.learning_rate.min = 0.0;
        assert!(s.validate().is_err());
        let mut s = SearchSpace::default();
        s.learning_rate.grid.push(0.5);
        assert!(s.validate().is_err());
    }
}
