//! Gaussian-process surrogate with a fixed RBF kernel, and expected
//! improvement for minimisation.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const LENGTH_SCALE: f64 = 0.2;
pub const NOISE_RATIO: f64 = 1e-4;
/// Diagonal jitter tried, in order, when the kernel matrix is not PD.
pub const JITTER: [f64; 4] = [1e-12, 1e-10, 1e-8, 1e-6];

#[derive(Debug, Clone)]
pub struct GpSurrogate {
    x: Vec<Vec<f64>>,
    signal_var: f64,
    length_scale: f64,
    noise_var: f64,
    prior_mean: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

impl GpSurrogate {
    /// Kernel settings from the data: signal variance is the sample variance
    /// of `y` (1 when that is zero or undefined), noise is a fixed fraction of it.
    pub fn fit(x: Vec<Vec<f64>>, y: &[f64]) -> Result<Self> {
        let n = y.len();
        let mut signal_var = 1.0;
        if n >= 2 {
            let m = y.iter().sum::<f64>() / n as f64;
            let v = y.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
            if v > 0.0 && v.is_finite() {
                signal_var = v;
            }
        }
        Self::with_hyperparameters(x, y, signal_var, LENGTH_SCALE, NOISE_RATIO * signal_var)
    }

    pub fn with_hyperparameters(
        x: Vec<Vec<f64>>,
        y: &[f64],
        signal_var: f64,
        length_scale: f64,
        noise_var: f64,
    ) -> Result<Self> {
        let n = y.len();
        if n == 0 || x.len() != n {
            return Err(Error::Shape(x.len(), n));
        }
        let prior_mean = y.iter().sum::<f64>() / n as f64;
        let mut gp = Self {
            x,
            signal_var,
            length_scale,
            noise_var,
            prior_mean,
            chol: Cholesky::new(DMatrix::identity(1, 1)).expect("identity is PD"),
            alpha: DVector::zeros(n),
        };
        let k = DMatrix::from_fn(n, n, |i, j| {
            gp.kernel(&gp.x[i], &gp.x[j]) + if i == j { noise_var } else { 0.0 }
        });
        let chol = std::iter::once(0.0)
            .chain(JITTER)
            .find_map(|j| Cholesky::new(&k + DMatrix::identity(n, n) * j))
            .ok_or(Error::SurrogateSingular)?;
        let resid = DVector::from_iterator(n, y.iter().map(|v| v - prior_mean));
        gp.alpha = chol.solve(&resid);
        gp.chol = chol;
        Ok(gp)
    }

    pub fn kernel(&self, a: &[f64], b: &[f64]) -> f64 {
        let d2: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
        self.signal_var * (-d2 / (2.0 * self.length_scale * self.length_scale)).exp()
    }

    pub fn signal_var(&self) -> f64 {
        self.signal_var
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior_mean
    }

    /// Posterior mean and variance of the latent function at `q`.
    pub fn posterior(&self, q: &[f64]) -> (f64, f64) {
        let n = self.x.len();
        let ks = DVector::from_iterator(n, self.x.iter().map(|xi| self.kernel(xi, q)));
        let mean = self.prior_mean + ks.dot(&self.alpha);
        let v = self
            .chol
            .l()
            .solve_lower_triangular(&ks)
            .expect("Cholesky factor has a positive diagonal");
        let var = (self.kernel(q, q) - v.dot(&v)).max(0.0);
        (mean, var)
    }
}

pub fn expected_improvement(mean: f64, variance: f64, best: f64) -> f64 {
    let sigma = variance.max(0.0).sqrt();
    let gain = best - mean;
    if sigma == 0.0 {
        return gain.max(0.0);
    }
    let z = gain / sigma;
    let n = Normal::standard();
    (gain * n.cdf(z) + sigma * n.pdf(z)).max(0.0)
}
