use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

/// The four LSTM gate blocks, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input,
    Forget,
    Output,
    Candidate,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Input, Gate::Forget, Gate::Output, Gate::Candidate];

    pub fn name(self) -> &'static str {
        match self {
            Gate::Input => "input",
            Gate::Forget => "forget",
            Gate::Output => "output",
            Gate::Candidate => "candidate",
        }
    }

    #[inline]
    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

/// Parameters of a univariate single-layer LSTM with a scalar dense head.
///
/// Everything lives in one flat buffer. For each gate in [`Gate::ALL`] order:
/// the input weights `W` (H), the recurrent matrix `U` (H x H, row-major, row
/// `r` feeds lane `r`), and the bias `b` (H). Then the head weights (H) and the
/// head bias (1). Gradients and optimizer moments use the same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmWeights<T> {
    hidden: usize,
    params: Vec<T>,
}

impl<T: Scalar> LstmWeights<T> {
    pub fn param_count(hidden: usize) -> usize {
        4 * (2 * hidden + hidden * hidden) + hidden + 1
    }

    pub fn zeros(hidden: usize) -> Self {
        assert!(hidden >= 1, "hidden size must be at least 1");
        Self {
            hidden,
            params: vec![T::zero(); Self::param_count(hidden)],
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.hidden)
    }

    pub fn from_flat(hidden: usize, params: Vec<T>) -> Option<Self> {
        (hidden >= 1 && params.len() == Self::param_count(hidden))
            .then_some(Self { hidden, params })
    }

    /// Seeded initialization: every weight uniform in `[-1/sqrt(H), 1/sqrt(H)]`,
    /// forget-gate bias 1, all other biases 0.
    pub fn init(hidden: usize, seed: u64) -> Self {
        let mut w = Self::zeros(hidden);
        let bound = 1.0 / (hidden as f64).sqrt();
        let dist = Uniform::new_inclusive(-bound, bound).expect("finite bound");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for g in Gate::ALL {
            for v in w.w_mut(g) {
                *v = T::lit(dist.sample(&mut rng));
            }
            for v in w.u_mut(g) {
                *v = T::lit(dist.sample(&mut rng));
            }
        }
        for v in w.w_out_mut() {
            *v = T::lit(dist.sample(&mut rng));
        }
        w.b_mut(Gate::Forget).fill(T::one());
        w
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn as_slice(&self) -> &[T] {
        &self.params
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.params
    }

    #[inline]
    fn block(&self) -> usize {
        2 * self.hidden + self.hidden * self.hidden
    }

    #[inline]
    pub(crate) fn w_offset(&self, g: Gate) -> usize {
        g.index() * self.block()
    }

    #[inline]
    pub(crate) fn u_offset(&self, g: Gate) -> usize {
        self.w_offset(g) + self.hidden
    }

    #[inline]
    pub(crate) fn b_offset(&self, g: Gate) -> usize {
        self.u_offset(g) + self.hidden * self.hidden
    }

    #[inline]
    pub(crate) fn head_offset(&self) -> usize {
        4 * self.block()
    }

    pub fn w(&self, g: Gate) -> &[T] {
        let o = self.w_offset(g);
        &self.params[o..o + self.hidden]
    }

    pub fn w_mut(&mut self, g: Gate) -> &mut [T] {
        let o = self.w_offset(g);
        &mut self.params[o..o + self.hidden]
    }

    pub fn u(&self, g: Gate) -> &[T] {
        let o = self.u_offset(g);
        &self.params[o..o + self.hidden * self.hidden]
    }

    pub fn u_mut(&mut self, g: Gate) -> &mut [T] {
        let o = self.u_offset(g);
        let n = self.hidden * self.hidden;
        &mut self.params[o..o + n]
    }

    pub fn b(&self, g: Gate) -> &[T] {
        let o = self.b_offset(g);
        &self.params[o..o + self.hidden]
    }

    pub fn b_mut(&mut self, g: Gate) -> &mut [T] {
        let o = self.b_offset(g);
        &mut self.params[o..o + self.hidden]
    }

    pub fn w_out(&self) -> &[T] {
        let o = self.head_offset();
        &self.params[o..o + self.hidden]
    }

    pub fn w_out_mut(&mut self) -> &mut [T] {
        let o = self.head_offset();
        &mut self.params[o..o + self.hidden]
    }

    pub fn b_out(&self) -> T {
        self.params[self.params.len() - 1]
    }

    pub fn set_b_out(&mut self, v: T) {
        let n = self.params.len();
        self.params[n - 1] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|v| v.is_finite())
    }

    pub fn norm(&self) -> T {
        self.params.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn scale(&mut self, k: T) {
        for v in &mut self.params {
            *v *= k;
        }
    }
}
