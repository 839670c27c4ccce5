use kpicast::decompose::decompose;
use kpicast::scaler::{ScaleMethod, ScalerParams};
use kpicast::series::{
    chronological_split, filter_outliers, impute_missing, split_point, KpiSeries,
};
use kpicast::window::make_windows;
use kpicast::{KpiKind, MonthIndex};
use proptest::prelude::*;

fn start() -> MonthIndex {
    MonthIndex::new(2018, 1).unwrap()
}

fn gappy() -> impl Strategy<Value = Vec<Option<f64>>> {
    prop::collection::vec(prop::option::weighted(0.8, 1.0f64..500.0), 2..80)
        .prop_filter("needs two values", |v| v.iter().flatten().count() >= 2)
}

proptest! {
    #[test]
    fn imputation_is_idempotent_and_keeps_observations(vals in gappy()) {
        let s = KpiSeries::new("C", KpiKind::Adr, start(), vals.clone()).unwrap();
        let once = impute_missing(&s).unwrap();
        prop_assert_eq!(once.missing_count(), 0);
        prop_assert_eq!(&impute_missing(&once).unwrap(), &once);
        for (a, b) in vals.iter().zip(once.values()) {
            if let Some(a) = a {
                prop_assert_eq!(Some(*a), *b);
            }
        }
    }

    #[test]
    fn scalers_round_trip(vals in prop::collection::vec(-1e4f64..1e4, 2..60), zs in any::<bool>()) {
        let method = if zs { ScaleMethod::ZScore } else { ScaleMethod::MinMax };
        if let Ok(p) = ScalerParams::fit(&vals, method) {
            for v in &vals {
                let back = p.unscale(p.scale(*v));
                prop_assert!((back - v).abs() < 1e-9 * (1.0 + v.abs()));
            }
            if !zs {
                prop_assert!(p.apply(&vals).iter().all(|u| (-1e-12..=1.0 + 1e-12).contains(u)));
            }
        }
    }

    #[test]
    fn split_conserves_months(len in 2usize..200, frac in 0.05f64..0.95) {
        let s = KpiSeries::from_values("C", KpiKind::Occ, start(), &vec![50.0; len]).unwrap();
        if let Ok((train, test)) = chronological_split(&s, frac) {
            prop_assert_eq!(train.len() + test.len(), len);
            prop_assert_eq!(train.len(), split_point(len, frac).unwrap());
            prop_assert_eq!(train.end().succ(), test.start());
        }
    }

    #[test]
    fn window_count(len in 1usize..100, lookback in 1usize..20) {
        let v: Vec<f64> = (0..len).map(|i| i as f64).collect();
        match make_windows(&v, lookback) {
            Ok(w) => {
                prop_assert_eq!(w.len(), len - lookback);
                for (i, (x, y)) in w.iter().enumerate() {
                    prop_assert_eq!(x, &v[i..i + lookback]);
                    prop_assert_eq!(y, v[i + lookback]);
                }
            }
            Err(_) => prop_assert!(len <= lookback),
        }
    }

    #[test]
    fn decomposition_identities(vals in prop::collection::vec(1.0f64..300.0, 24..90), m in 1u8..=12) {
        let s = KpiSeries::from_values("C", KpiKind::Adr, MonthIndex::new(2019, m).unwrap(), &vals).unwrap();
        let d = decompose(&s).unwrap();
        prop_assert!(d.seasonal.iter().sum::<f64>().abs() < 1e-9);
        for (i, v) in vals.iter().enumerate() {
            match d.reconstruct(i) {
                Some(r) => {
                    let scale = d.trend[i].unwrap().abs() + d.seasonal_at(i).abs() + v.abs();
                    prop_assert!((r - v).abs() <= 4.0 * f64::EPSILON * scale);
                }
                None => prop_assert!(i < 6 || i >= vals.len() - 6),
            }
        }
    }

    #[test]
    fn decomposition_is_bit_exact_on_kpi_shaped_series(
        base in 40.0f64..300.0,
        amp in 0.0f64..0.3,
        trend in -0.01f64..0.01,
        noise in prop::collection::vec(-0.05f64..0.05, 24..90),
    ) {
        let vals: Vec<f64> = noise
            .iter()
            .enumerate()
            .map(|(t, e)| {
                let season = 1.0 + amp * (2.0 * std::f64::consts::PI * t as f64 / 12.0).sin();
                base * (1.0 + trend * t as f64) * season * (1.0 + e)
            })
            .collect();
        let s = KpiSeries::from_values("C", KpiKind::Adr, start(), &vals).unwrap();
        let d = decompose(&s).unwrap();
        for (i, v) in vals.iter().enumerate().take(vals.len() - 6).skip(6) {
            prop_assert_eq!(d.reconstruct(i), Some(*v));
        }
    }

    #[test]
    fn outlier_filter_only_touches_flagged(vals in prop::collection::vec(10.0f64..20.0, 5..40), spike in 0usize..40) {
        let mut vals = vals;
        let k = spike % vals.len();
        vals[k] = 5000.0;
        let s = KpiSeries::from_values("C", KpiKind::Adr, start(), &vals).unwrap();
        let (f, flags) = filter_outliers(&s, 2.0).unwrap();
        for (i, (a, b)) in vals.iter().zip(f.values()).enumerate() {
            if !flags[i] {
                prop_assert_eq!(Some(*a), *b);
            }
        }
    }
}

#[test]
fn eighty_five_months_split_68_17() {
    let s = KpiSeries::from_values("C", KpiKind::Occ, start(), &[60.0; 85]).unwrap();
    let (train, test) = chronological_split(&s, 0.8).unwrap();
    assert_eq!((train.len(), test.len()), (68, 17));
    assert_eq!(train.end().to_string(), "2023-08");
    assert_eq!(test.start().to_string(), "2023-09");
    assert_eq!(test.end().to_string(), "2025-01");
}
