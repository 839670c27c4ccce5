use kpicast::lstm::gradcheck::{
    gradient_check, numeric_gradient, random_problem, DEFAULT_EPSILON, TOLERANCE,
};
use kpicast::lstm::{backward, cell_forward, predict, Gate, LstmState, LstmWeights};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sig(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Straight-line cell written directly from the gate equations.
fn oracle_step(x: f64, h: &[f64], c: &[f64], w: &LstmWeights<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = h.len();
    let pre = |g: Gate, r: usize| {
        let mut z = w.w(g)[r] * x + w.b(g)[r];
        for (k, hk) in h.iter().enumerate() {
            z += w.u(g)[r * n + k] * hk;
        }
        z
    };
    let mut h2 = vec![0.0; n];
    let mut c2 = vec![0.0; n];
    for r in 0..n {
        let i = sig(pre(Gate::Input, r));
        let f = sig(pre(Gate::Forget, r));
        let o = sig(pre(Gate::Output, r));
        let g = pre(Gate::Candidate, r).tanh();
        c2[r] = f * c[r] + i * g;
        h2[r] = o * c2[r].tanh();
    }
    (h2, c2)
}

#[test]
fn cell_and_sequence_match_straight_line_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..30 {
        let (w, batch) = random_problem(&mut rng);
        let n = w.hidden();
        for (window, _) in batch.iter() {
            let (mut h, mut c) = (vec![0.0; n], vec![0.0; n]);
            let mut state = LstmState::zeros(n);
            for &x in window {
                (h, c) = oracle_step(x, &h, &c, &w);
                state = cell_forward(x, &state, &w).unwrap();
                for r in 0..n {
                    assert!((state.h[r] - h[r]).abs() < 1e-12);
                    assert!((state.c[r] - c[r]).abs() < 1e-12);
                }
            }
            let y: f64 = w.w_out().iter().zip(&h).map(|(a, b)| a * b).sum::<f64>() + w.b_out();
            assert!((predict(window, &w).unwrap() - y).abs() < 1e-12);
        }
    }
}

#[test]
fn backward_matches_finite_differences() {
    let report = gradient_check(2024, 20, DEFAULT_EPSILON, false).unwrap();
    assert!(report.passed(), "max rel error {}", report.max_rel_error);
    assert!(report.max_rel_error < TOLERANCE);

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (w, batch) = random_problem(&mut rng);
    let (_, g) = backward(&batch, &w).unwrap();
    let fd = numeric_gradient(&batch, &w, 1e-6).unwrap();
    for (a, n) in g.as_slice().iter().zip(&fd) {
        assert!((a - n).abs() < 1e-6 * (1.0 + n.abs()));
    }
}

#[test]
fn corrupted_gradient_is_caught() {
    assert!(!gradient_check(2024, 3, DEFAULT_EPSILON, true)
        .unwrap()
        .passed());
}

proptest! {
    #[test]
    fn activations_stay_bounded(seed in 0u64..1000, xs in prop::collection::vec(-1e3f64..1e3, 1..20)) {
        let w = LstmWeights::<f64>::init(5, seed);
        let mut s = LstmState::zeros(5);
        for (t, &x) in xs.iter().enumerate() {
            s = cell_forward(x, &s, &w).unwrap();
            prop_assert!(s.h.iter().all(|v| v.abs() <= 1.0));
            // |c_t| grows by at most 1 per step.
            prop_assert!(s.c.iter().all(|v| v.abs() <= (t + 1) as f64));
        }
    }
}
