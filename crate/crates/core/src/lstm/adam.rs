use crate::lstm::weights::LstmWeights;
use crate::scalar::Scalar;

/// Adam moments for one [`LstmWeights`] shape.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    m: Vec<T>,
    v: Vec<T>,
    t: u64,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(shape: &LstmWeights<T>) -> Self {
        let n = shape.as_slice().len();
        Self {
            m: vec![T::zero(); n],
            v: vec![T::zero(); n],
            t: 0,
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            epsilon: T::lit(1e-8),
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }
}

/// Rescales `grad` in place so its global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
pub fn clip_global_norm<T: Scalar>(grad: &mut LstmWeights<T>, max_norm: T) -> T {
    let norm = grad.norm();
    if norm > max_norm && norm > T::zero() {
        grad.scale(max_norm / norm);
    }
    norm
}

/// One bias-corrected Adam update after global-norm clipping.
pub fn adam_step<T: Scalar>(
    w: &mut LstmWeights<T>,
    grad: &LstmWeights<T>,
    opt: &mut AdamState<T>,
    lr: T,
    gradient_clip: T,
) {
    assert_eq!(w.hidden(), grad.hidden(), "gradient shape mismatch");
    let mut g = grad.clone();
    clip_global_norm(&mut g, gradient_clip);

    opt.t += 1;
    let t = opt.t as i32;
    let one = T::one();
    let bc1 = one - opt.beta1.powi(t);
    let bc2 = one - opt.beta2.powi(t);
    for (((p, &g), m), v) in w
        .as_mut_slice()
        .iter_mut()
        .zip(g.as_slice())
        .zip(opt.m.iter_mut())
        .zip(opt.v.iter_mut())
    {
        *m = opt.beta1 * *m + (one - opt.beta1) * g;
        *v = opt.beta2 * *v + (one - opt.beta2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= lr * m_hat / (v_hat.sqrt() + opt.epsilon);
    }
}
