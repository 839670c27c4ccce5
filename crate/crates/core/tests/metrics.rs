use kpicast::metrics::{mae, mape, mse};
use kpicast::report::{build_report, EvalInput, EvalReport};
use kpicast::{categorize_mape, AccuracyCategory, KpiKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn loop_mse(a: &[f64], f: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        let d = a[i] - f[i];
        s += d * d;
    }
    s / a.len() as f64
}

fn loop_mae(a: &[f64], f: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += if a[i] > f[i] {
            a[i] - f[i]
        } else {
            f[i] - a[i]
        };
    }
    s / a.len() as f64
}

fn loop_mape(a: &[f64], f: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        let d = if a[i] > f[i] {
            a[i] - f[i]
        } else {
            f[i] - a[i]
        };
        s += d / a[i];
    }
    100.0 * s / a.len() as f64
}

#[test]
fn metrics_match_loop_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let n = rng.random_range(1..60);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..250.0)).collect();
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..250.0)).collect();
        assert!(
            (mse(&a, &f).unwrap() - loop_mse(&a, &f)).abs() <= 1e-12 * loop_mse(&a, &f).max(1.0)
        );
        assert!(
            (mae(&a, &f).unwrap() - loop_mae(&a, &f)).abs() < 1e-12 * loop_mae(&a, &f).max(1.0)
        );
        assert!(
            (mape(&a, &f).unwrap() - loop_mape(&a, &f)).abs() < 1e-12 * loop_mape(&a, &f).max(1.0)
        );
    }
}

#[test]
fn category_pins() {
    use AccuracyCategory::*;
    for (m, c) in [
        (3.10, HighlyAccurate),
        (10.0, Good),
        (20.0, Reasonable),
        (50.0, Reasonable),
        (50.01, Inaccurate),
    ] {
        assert_eq!(categorize_mape(m).unwrap(), c);
    }
}

#[test]
fn f32_metrics_agree_with_f64() {
    let a = [100.0f32, 80.0, 95.5];
    let f = [90.0f32, 85.0, 95.0];
    let a64: Vec<f64> = a.iter().map(|&v| v as f64).collect();
    let f64_: Vec<f64> = f.iter().map(|&v| v as f64).collect();
    assert!((mape(&a, &f).unwrap() as f64 - loop_mape(&a64, &f64_)).abs() < 1e-4);
}

proptest! {
    #[test]
    fn mse_and_mae_are_symmetric(pairs in prop::collection::vec((1.0f64..1e3, 1.0f64..1e3), 1..40)) {
        let (a, f): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        prop_assert_eq!(mse(&a, &f).unwrap(), mse(&f, &a).unwrap());
        prop_assert_eq!(mae(&a, &f).unwrap(), mae(&f, &a).unwrap());
    }

    #[test]
    fn scaling_behaviour(pairs in prop::collection::vec((1.0f64..1e3, 1.0f64..1e3), 1..40), k in 0.1f64..10.0) {
        let (a, f): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let ka: Vec<f64> = a.iter().map(|v| v * k).collect();
        let kf: Vec<f64> = f.iter().map(|v| v * k).collect();
        let rel = |x: f64, y: f64| (x - y).abs() <= 1e-9 * y.abs().max(1e-12);
        prop_assert!(rel(mse(&ka, &kf).unwrap(), k * k * mse(&a, &f).unwrap()));
        prop_assert!(rel(mae(&ka, &kf).unwrap(), k * mae(&a, &f).unwrap()));
        prop_assert!(rel(mape(&ka, &kf).unwrap(), mape(&a, &f).unwrap()));
    }

    #[test]
    fn categorization_is_monotone(x in 0.0f64..200.0, y in 0.0f64..200.0) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(categorize_mape(lo).unwrap() <= categorize_mape(hi).unwrap());
    }
}

#[test]
fn report_csv_round_trip_and_layout() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut inputs = Vec::new();
    for city in ["Manchester", "Dubai"] {
        for kind in KpiKind::ALL {
            let a: Vec<f64> = (0..17).map(|_| rng.random_range(50.0..150.0)).collect();
            let f: Vec<f64> = a.iter().map(|v| v * rng.random_range(0.9..1.1)).collect();
            inputs.push(EvalInput {
                city: city.into(),
                kind,
                actual: a,
                forecast: f,
            });
        }
    }
    inputs.reverse();
    let report = build_report(&inputs).unwrap();
    assert_eq!(report.len(), 6);
    assert_eq!(report.rows()[0].city, "Dubai");
    assert_eq!(report.rows()[0].kind, KpiKind::Occ);

    let csv = report.to_csv_string().unwrap();
    assert!(csv.starts_with("city,kpi,n,mse,mae,mape,category\n"));
    assert_eq!(EvalReport::read_csv(csv.as_bytes()).unwrap(), report);

    let text = report.render_text();
    assert!(text.lines().next().unwrap().contains("OCC"));
    assert!(text.contains("Highly accurate forecasting"));
    assert_eq!(
        text.lines().filter(|l| l.starts_with("Manchester")).count(),
        4
    );
}
