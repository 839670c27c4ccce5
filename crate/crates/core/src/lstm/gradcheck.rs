//! Finite-difference verification of the analytic gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::lstm::cell::{backward, batch_mse};
use crate::lstm::weights::LstmWeights;
use crate::window::WindowedSamples;

pub const DEFAULT_EPSILON: f64 = 1e-5;
pub const TOLERANCE: f64 = 1e-4;
/// Denominator floor for the relative error, so entries whose true
/// gradient is ~0 are judged by absolute error.
pub const REL_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub models: usize,
    pub parameters: usize,
    pub max_rel_error: f64,
    /// (model, parameter index) of the worst entry.
    pub worst: (usize, usize),
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error < TOLERANCE
    }
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_FLOOR)
}

/// Random model (H in 1..=4, L in 1..=6) with a random batch of 1..=8 samples.
pub fn random_problem(rng: &mut ChaCha8Rng) -> (LstmWeights<f64>, WindowedSamples<f64>) {
    let hidden = rng.random_range(1..=4);
    let lookback = rng.random_range(1..=6);
    let n = rng.random_range(1..=8);
    let mut w = LstmWeights::<f64>::zeros(hidden);
    for v in w.as_mut_slice() {
        *v = rng.random_range(-1.0..1.0);
    }
    let inputs = (0..n)
        .map(|_| (0..lookback).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let targets = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let batch = WindowedSamples::new(lookback, inputs, targets).expect("consistent shapes");
    (w, batch)
}

/// Central differences of the batch loss for every parameter.
pub fn numeric_gradient(
    batch: &WindowedSamples<f64>,
    w: &LstmWeights<f64>,
    epsilon: f64,
) -> Result<Vec<f64>> {
    let mut probe = w.clone();
    let mut out = Vec::with_capacity(w.as_slice().len());
    for k in 0..w.as_slice().len() {
        let orig = probe.as_slice()[k];
        probe.as_mut_slice()[k] = orig + epsilon;
        let up = batch_mse(batch, &probe)?;
        probe.as_mut_slice()[k] = orig - epsilon;
        let down = batch_mse(batch, &probe)?;
        probe.as_mut_slice()[k] = orig;
        out.push((up - down) / (2.0 * epsilon));
    }
    Ok(out)
}

/// Compares analytic and numeric gradients on `models` random problems.
/// `corrupt` perturbs one analytic entry per model as a negative control.
pub fn gradient_check(
    seed: u64,
    models: usize,
    epsilon: f64,
    corrupt: bool,
) -> Result<GradCheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = GradCheckReport {
        models,
        parameters: 0,
        max_rel_error: 0.0,
        worst: (0, 0),
    };
    for m in 0..models {
        let (w, batch) = random_problem(&mut rng);
        let (_, mut grad) = backward(&batch, &w)?;
        if corrupt {
            let g = grad.as_mut_slice();
            g[0] += 1e-2 * g[0].abs().max(1.0);
        }
        let numeric = numeric_gradient(&batch, &w, epsilon)?;
        report.parameters += numeric.len();
        for (k, (&a, &n)) in grad.as_slice().iter().zip(&numeric).enumerate() {
            let e = relative_error(a, n);
            if e > report.max_rel_error {
                report.max_rel_error = e;
                report.worst = (m, k);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let r = gradient_check(0, 20, DEFAULT_EPSILON, false).unwrap();
        assert!(r.passed(), "max relative error {}", r.max_rel_error);
    }

    #[test]
    fn corruption_is_detected() {
        let r = gradient_check(0, 3, DEFAULT_EPSILON, true).unwrap();
        assert!(!r.passed());
    }
}
