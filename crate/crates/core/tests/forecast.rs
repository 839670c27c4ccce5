use kpicast::forecast::{multi_step_forecast, rolling_forecast, run_pipeline, PipelineConfig};
use kpicast::io::{read_series, write_series, Ingested};
use kpicast::lstm::{predict, LstmModel, LstmWeights, TrainingConfig};
use kpicast::scaler::{ScaleMethod, ScalerParams};
use kpicast::series::{revpar_consistency, KpiSeries};
use kpicast::synthetic::{default_archetypes, generate_city};
use kpicast::{KpiKind, MonthIndex};

fn model(lookback: usize) -> LstmModel<f64> {
    LstmModel {
        weights: LstmWeights::init(6, 3),
        config: TrainingConfig {
            lookback,
            hidden_size: 6,
            ..TrainingConfig::default()
        },
    }
}

fn quick() -> PipelineConfig {
    PipelineConfig {
        training: TrainingConfig {
            lookback: 6,
            hidden_size: 4,
            epochs: 40,
            min_epochs: 0,
            ..TrainingConfig::default()
        },
        ..PipelineConfig::default()
    }
}

fn series(kind: KpiKind) -> KpiSeries<f64> {
    let city = generate_city(
        &default_archetypes()[0],
        MonthIndex::new(2018, 1).unwrap(),
        85,
    )
    .unwrap();
    let [occ, adr, revpar] = city.into_series();
    match kind {
        KpiKind::Occ => occ,
        KpiKind::Adr => adr,
        KpiKind::Revpar => revpar,
    }
}

#[test]
fn multi_step_matches_hand_chained_windows() {
    let m = model(4);
    let scaler = ScalerParams {
        method: ScaleMethod::MinMax,
        a: 10.0,
        b: 30.0,
    };
    let scaled = [0.1, 0.5, 0.3, 0.9, 0.2, 0.7];
    let out = multi_step_forecast(&m, &scaled, 3, &scaler).unwrap();

    let y1 = predict(&[0.3, 0.9, 0.2, 0.7], &m.weights).unwrap();
    let y2 = predict(&[0.9, 0.2, 0.7, y1], &m.weights).unwrap();
    let y3 = predict(&[0.2, 0.7, y1, y2], &m.weights).unwrap();
    let expect: Vec<f64> = [y1, y2, y3].iter().map(|y| 10.0 + 20.0 * y).collect();
    assert_eq!(out, expect);
}

#[test]
fn rolling_uses_actual_history() {
    let m = model(3);
    let scaler = ScalerParams {
        method: ScaleMethod::ZScore,
        a: 5.0,
        b: 2.0,
    };
    let scaled = [0.4, -1.0, 0.2, 1.5, 0.0, -0.3];
    let out = rolling_forecast(&m, &scaled, 3, 3, &scaler).unwrap();
    for (j, v) in out.iter().enumerate() {
        let t = 3 + j;
        let y = predict(&scaled[t - 3..t], &m.weights).unwrap();
        assert_eq!(*v, 5.0 + 2.0 * y);
    }
    assert_eq!(
        rolling_forecast(&m, &scaled, 3, 1, &scaler).unwrap()[0],
        multi_step_forecast(&m, &scaled[..3], 1, &scaler).unwrap()[0]
    );
}

#[test]
fn pipeline_shape_contract_on_85_months() {
    let r = run_pipeline(&series(KpiKind::Occ), &quick()).unwrap();
    assert_eq!(r.test_actual.len(), 17);
    assert_eq!(r.rolling.len(), 17);
    assert_eq!(r.fitted.len(), 68 - 6);
    for h in [3, 6, 12] {
        assert_eq!(r.future[&h].len(), h);
    }
    assert_eq!(r.future[&3][..], r.future[&12][..3]);
    assert_eq!(r.future[&12][0].0.to_string(), "2025-02");
}

#[test]
fn test_months_never_influence_training() {
    let s = series(KpiKind::Adr);
    let mut vals = s.values().to_vec();
    for v in vals.iter_mut().skip(68) {
        *v = v.map(|x| x * 3.0);
    }
    let bent = KpiSeries::new(s.city(), s.kind(), s.start(), vals).unwrap();
    let a = run_pipeline(&s, &quick()).unwrap();
    let b = run_pipeline(&bent, &quick()).unwrap();
    assert_eq!(a.model, b.model);
    assert_eq!(a.scaler, b.scaler);
    assert_eq!(a.fitted, b.fitted);
    assert_eq!(a.history, b.history);
    assert_eq!(a.rolling[0], b.rolling[0]);
    assert_ne!(a.rolling[16], b.rolling[16]);
}

#[test]
fn single_precision_pipeline_runs() {
    let s = series(KpiKind::Revpar);
    let v: Vec<Option<f32>> = s.values().iter().map(|v| v.map(|x| x as f32)).collect();
    let s32 = KpiSeries::new(s.city(), s.kind(), s.start(), v).unwrap();
    let r = run_pipeline(&s32, &quick()).unwrap();
    assert!(r.rolling.iter().all(|(_, v)| v.is_finite()));
}

#[test]
fn synthetic_data_is_consistent_and_ingestible() {
    for p in default_archetypes() {
        let c = generate_city(&p, MonthIndex::new(2018, 1).unwrap(), 85).unwrap();
        let [occ, adr, rev] = c.series();
        let rows = revpar_consistency(occ, adr, rev, 1e-9).unwrap();
        assert!(rows.iter().all(|r| !r.flagged));
        let mut buf = Vec::new();
        write_series(&mut buf, &c.series()).unwrap();
        let back: Ingested<f64> = read_series(buf.as_slice()).unwrap();
        assert!(back.failures.is_empty());
        assert_eq!(back.series.len(), 3);
        assert_eq!(&back.series[0], occ);
        assert_eq!(back.series[0].len(), 85);
    }
}
