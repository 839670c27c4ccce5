//! Forward pass and backpropagation through time.

use crate::error::{Error, Result};
use crate::lstm::weights::{Gate, LstmWeights};
use crate::scalar::{sigmoid, Scalar};
use crate::window::WindowedSamples;

#[derive(Debug, Clone, PartialEq)]
pub struct LstmState<T> {
    pub h: Vec<T>,
    pub c: Vec<T>,
}

impl<T: Scalar> LstmState<T> {
    pub fn zeros(hidden: usize) -> Self {
        Self {
            h: vec![T::zero(); hidden],
            c: vec![T::zero(); hidden],
        }
    }
}

/// Activations recorded while running one window, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct SequenceTrace<T> {
    hidden: usize,
    inputs: Vec<T>,
    /// Per step: i, f, o, g~ lanes back to back (4H).
    gates: Vec<T>,
    /// Per step plus the initial zero state: (L + 1) x H.
    c: Vec<T>,
    h: Vec<T>,
    /// tanh(c_t) per step.
    tanh_c: Vec<T>,
}

impl<T: Scalar> SequenceTrace<T> {
    pub fn steps(&self) -> usize {
        self.inputs.len()
    }

    /// Gate activations at step `t` in `Gate::ALL` order.
    pub fn gates_at(&self, t: usize) -> &[T] {
        let n = 4 * self.hidden;
        &self.gates[t * n..(t + 1) * n]
    }

    /// Hidden state after step `t` (`t` counts from 1; 0 is the zero state).
    pub fn h_at(&self, t: usize) -> &[T] {
        &self.h[t * self.hidden..(t + 1) * self.hidden]
    }

    pub fn c_at(&self, t: usize) -> &[T] {
        &self.c[t * self.hidden..(t + 1) * self.hidden]
    }
}

/// One step. Writes the gate activations (i, f, o, g~) into `gates`, the new
/// cell state into `c_out`, tanh of it into `tanh_out`, and the new hidden
/// state into `h_out`.
#[inline]
#[allow(clippy::too_many_arguments)]
fn step<T: Scalar>(
    x: T,
    h_prev: &[T],
    c_prev: &[T],
    w: &LstmWeights<T>,
    gates: &mut [T],
    c_out: &mut [T],
    tanh_out: &mut [T],
    h_out: &mut [T],
) {
    let hdim = w.hidden();
    let p = w.as_slice();
    for g in Gate::ALL {
        let wo = w.w_offset(g);
        let uo = w.u_offset(g);
        let bo = w.b_offset(g);
        let lanes = &mut gates[g.index() * hdim..(g.index() + 1) * hdim];
        for (r, lane) in lanes.iter_mut().enumerate() {
            let row = &p[uo + r * hdim..uo + (r + 1) * hdim];
            let mut z = p[wo + r] * x + p[bo + r];
            for (u, h) in row.iter().zip(h_prev) {
                z += *u * *h;
            }
            *lane = if g == Gate::Candidate {
                z.tanh()
            } else {
                sigmoid(z)
            };
        }
    }
    for r in 0..hdim {
        let i = gates[r];
        let f = gates[hdim + r];
        let o = gates[2 * hdim + r];
        let cand = gates[3 * hdim + r];
        let c = f * c_prev[r] + i * cand;
        let tc = c.tanh();
        c_out[r] = c;
        tanh_out[r] = tc;
        h_out[r] = o * tc;
    }
}

/// Advances the cell by one input.
pub fn cell_forward<T: Scalar>(
    x: T,
    state: &LstmState<T>,
    w: &LstmWeights<T>,
) -> Result<LstmState<T>> {
    let hdim = w.hidden();
    let mut gates = vec![T::zero(); 4 * hdim];
    let mut next = LstmState::zeros(hdim);
    let mut tanh_c = vec![T::zero(); hdim];
    step(
        x,
        &state.h,
        &state.c,
        w,
        &mut gates,
        &mut next.c,
        &mut tanh_c,
        &mut next.h,
    );
    if next.c.iter().chain(&next.h).any(|v| !v.is_finite()) {
        return Err(Error::NumericOverflow("cell_forward"));
    }
    Ok(next)
}

/// Runs a window from the zero state and applies the dense head to the last
/// hidden state.
pub fn sequence_forward<T: Scalar>(
    window: &[T],
    w: &LstmWeights<T>,
) -> Result<(T, SequenceTrace<T>)> {
    let hdim = w.hidden();
    let steps = window.len();
    let mut tr = SequenceTrace {
        hidden: hdim,
        inputs: window.to_vec(),
        gates: vec![T::zero(); steps * 4 * hdim],
        c: vec![T::zero(); (steps + 1) * hdim],
        h: vec![T::zero(); (steps + 1) * hdim],
        tanh_c: vec![T::zero(); steps * hdim],
    };
    for (t, &x) in window.iter().enumerate() {
        let (c_prev, c_next) = tr.c.split_at_mut((t + 1) * hdim);
        let (h_prev, h_next) = tr.h.split_at_mut((t + 1) * hdim);
        step(
            x,
            &h_prev[t * hdim..],
            &c_prev[t * hdim..],
            w,
            &mut tr.gates[t * 4 * hdim..(t + 1) * 4 * hdim],
            &mut c_next[..hdim],
            &mut tr.tanh_c[t * hdim..(t + 1) * hdim],
            &mut h_next[..hdim],
        );
    }
    let h_last = tr.h_at(steps);
    let mut y = w.b_out();
    for (a, b) in w.w_out().iter().zip(h_last) {
        y += *a * *b;
    }
    if !y.is_finite() {
        return Err(Error::NumericOverflow("sequence_forward"));
    }
    Ok((y, tr))
}

pub fn predict<T: Scalar>(window: &[T], w: &LstmWeights<T>) -> Result<T> {
    sequence_forward(window, w).map(|(y, _)| y)
}

/// Mean squared error of the model over `batch`, forward pass only.
pub fn batch_mse<T: Scalar>(batch: &WindowedSamples<T>, w: &LstmWeights<T>) -> Result<T> {
    if batch.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sum = T::zero();
    for (x, y) in batch.iter() {
        let e = predict(x, w)? - y;
        sum += e * e;
    }
    Ok(sum / T::count(batch.len()))
}

/// Accumulates `dloss/dy * dy/dtheta` for one traced window into `grad`.
fn backprop_one<T: Scalar>(
    tr: &SequenceTrace<T>,
    dy: T,
    w: &LstmWeights<T>,
    grad: &mut LstmWeights<T>,
) {
    let hdim = w.hidden();
    let steps = tr.steps();
    let p = w.as_slice();

    let head = grad.head_offset();
    {
        let gp = grad.as_mut_slice();
        for (r, h) in tr.h_at(steps).iter().enumerate() {
            gp[head + r] += dy * *h;
        }
        let n = gp.len();
        gp[n - 1] += dy;
    }

    let mut dh: Vec<T> = w.w_out().iter().map(|&v| v * dy).collect();
    let mut dc = vec![T::zero(); hdim];
    let mut dz = vec![T::zero(); 4 * hdim];
    let one = T::one();

    for t in (1..=steps).rev() {
        let gates = tr.gates_at(t - 1);
        let c_prev = tr.c_at(t - 1);
        let h_prev = tr.h_at(t - 1);
        let tanh_c = &tr.tanh_c[(t - 1) * hdim..t * hdim];
        let x = tr.inputs[t - 1];

        for r in 0..hdim {
            let i = gates[r];
            let f = gates[hdim + r];
            let o = gates[2 * hdim + r];
            let cand = gates[3 * hdim + r];
            let tc = tanh_c[r];

            let dcr = dc[r] + dh[r] * o * (one - tc * tc);
            dz[r] = dcr * cand * i * (one - i);
            dz[hdim + r] = dcr * c_prev[r] * f * (one - f);
            dz[2 * hdim + r] = dh[r] * tc * o * (one - o);
            dz[3 * hdim + r] = dcr * i * (one - cand * cand);
            dc[r] = dcr * f;
        }

        dh.fill(T::zero());
        for g in Gate::ALL {
            let wo = w.w_offset(g);
            let uo = w.u_offset(g);
            let bo = w.b_offset(g);
            let dzg = &dz[g.index() * hdim..(g.index() + 1) * hdim];
            let gp = grad.as_mut_slice();
            for (r, &d) in dzg.iter().enumerate() {
                gp[wo + r] += d * x;
                gp[bo + r] += d;
                let row = uo + r * hdim;
                for c in 0..hdim {
                    gp[row + c] += d * h_prev[c];
                    dh[c] += p[row + c] * d;
                }
            }
        }
    }
}

/// Mean squared error over the batch and its exact gradient with respect to
/// every parameter, averaged over samples.
pub fn backward<T: Scalar>(
    batch: &WindowedSamples<T>,
    w: &LstmWeights<T>,
) -> Result<(T, LstmWeights<T>)> {
    if batch.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = T::count(batch.len());
    let mut grad = w.zeros_like();
    let mut loss = T::zero();
    for (x, y) in batch.iter() {
        let (pred, tr) = sequence_forward(x, w)?;
        let e = pred - y;
        loss += e * e;
        backprop_one(&tr, T::lit(2.0) * e / n, w, &mut grad);
    }
    let loss = loss / n;
    if !loss.is_finite() || !grad.is_finite() {
        return Err(Error::NumericOverflow("backward"));
    }
    Ok((loss, grad))
}
