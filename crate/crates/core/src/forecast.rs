//! Per-series pipeline: clean, split, scale, train, then fitted values,
//! walk-forward one-step test forecasts and recursive multi-step forecasts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lstm::{train, LossHistory, LstmModel, TrainingConfig};
use crate::metrics::mape;
use crate::month::MonthIndex;
use crate::scalar::Scalar;
use crate::scaler::{ScaleMethod, ScalerParams};
use crate::series::{filter_outliers, impute_missing, split_point, KpiKind, KpiSeries};
use crate::window::{make_windows, WindowedSamples};

pub const STANDARD_HORIZONS: [usize; 3] = [3, 6, 12];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub scaling: ScaleMethod,
    pub z_threshold: f64,
    pub train_fraction: f64,
    pub horizons: Vec<usize>,
    /// Retrain on everything observed so far at every k-th test month.
    /// 0 disables retraining.
    pub retrain_every: usize,
    pub training: TrainingConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            scaling: ScaleMethod::MinMax,
            z_threshold: crate::series::DEFAULT_Z_THRESHOLD,
            train_fraction: 0.8,
            horizons: STANDARD_HORIZONS.to_vec(),
            retrain_every: 0,
            training: TrainingConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.training.validate()?;
        if !(self.z_threshold > 0.0) {
            return Err(Error::InvalidConfig("z_threshold must be > 0".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidConfig(
                "train_fraction must lie in (0, 1)".into(),
            ));
        }
        if let Some(&h) = self.horizons.iter().find(|&&h| h == 0) {
            return Err(Error::InvalidHorizon(h));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult<T> {
    pub city: String,
    pub kind: KpiKind,
    /// Observed values as ingested, missing months omitted.
    pub actual: Vec<(MonthIndex, T)>,
    /// One-step in-sample predictions for every training window.
    pub fitted: Vec<(MonthIndex, T)>,
    /// Walk-forward one-step predictions, one per test month.
    pub rolling: Vec<(MonthIndex, T)>,
    /// Observed test values aligned with `rolling`; `None` where missing.
    pub test_actual: Vec<Option<T>>,
    /// Recursive forecasts from the end of the series, keyed by horizon.
    pub future: BTreeMap<usize, Vec<(MonthIndex, T)>>,
    pub scaler: ScalerParams<T>,
    pub model: LstmModel<T>,
    pub history: LossHistory<T>,
    /// Training-prefix months replaced by the outlier filter.
    pub outliers: Vec<MonthIndex>,
    pub warnings: Vec<String>,
    pub config: PipelineConfig,
}

impl<T: Scalar> ForecastResult<T> {
    /// Test months with an observation, as (actual, rolling forecast) pairs.
    pub fn scored_pairs(&self) -> (Vec<T>, Vec<T>) {
        self.test_actual
            .iter()
            .zip(&self.rolling)
            .filter_map(|(a, (_, f))| a.map(|a| (a, *f)))
            .unzip()
    }
}

/// One-step predictions over `test_len` months starting at index `test_start`
/// of `scaled`, each fed the `L` actual observations before it.
pub fn rolling_forecast<T: Scalar>(
    model: &LstmModel<T>,
    scaled: &[T],
    test_start: usize,
    test_len: usize,
    scaler: &ScalerParams<T>,
) -> Result<Vec<T>> {
    let lookback = model.lookback();
    if test_start < lookback {
        return Err(Error::InsufficientHistory {
            len: test_start,
            lookback,
        });
    }
    if test_start + test_len > scaled.len() {
        return Err(Error::Shape(test_start + test_len, scaled.len()));
    }
    (test_start..test_start + test_len)
        .map(|t| Ok(scaler.unscale(model.predict(&scaled[t - lookback..t])?)))
        .collect()
}

/// Recursive forecast: predictions are appended to the window as it slides.
pub fn multi_step_forecast<T: Scalar>(
    model: &LstmModel<T>,
    scaled: &[T],
    horizon: usize,
    scaler: &ScalerParams<T>,
) -> Result<Vec<T>> {
    if horizon < 1 {
        return Err(Error::InvalidHorizon(horizon));
    }
    let lookback = model.lookback();
    if scaled.len() < lookback {
        return Err(Error::InsufficientHistory {
            len: scaled.len(),
            lookback,
        });
    }
    let mut window = scaled[scaled.len() - lookback..].to_vec();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let y = model.predict(&window)?;
        out.push(scaler.unscale(y));
        window.remove(0);
        window.push(y);
    }
    Ok(out)
}

pub fn fitted_values<T: Scalar>(
    model: &LstmModel<T>,
    samples: &WindowedSamples<T>,
    scaler: &ScalerParams<T>,
) -> Result<Vec<T>> {
    samples
        .inputs()
        .iter()
        .map(|x| Ok(scaler.unscale(model.predict(x)?)))
        .collect()
}

/// Training prefix after imputation and outlier filtering, plus outlier flags.
fn clean_prefix<T: Scalar>(
    series: &KpiSeries<T>,
    n_train: usize,
    z_threshold: f64,
) -> Result<(Vec<T>, Vec<bool>)> {
    let prefix = KpiSeries::new(
        series.city(),
        series.kind(),
        series.start(),
        series.values()[..n_train].to_vec(),
    )?;
    let imputed = impute_missing(&prefix).map_err(|e| e.at_stage("impute"))?;
    let (filtered, flags) =
        filter_outliers(&imputed, T::lit(z_threshold)).map_err(|e| e.at_stage("outliers"))?;
    Ok((filtered.dense()?, flags))
}

/// Fills missing test months by interpolating against the cleaned prefix.
/// Present test values pass through untouched.
fn fill_test<T: Scalar>(series: &KpiSeries<T>, clean_train: &[T]) -> Result<Vec<T>> {
    let n_train = clean_train.len();
    let joined: Vec<Option<T>> = clean_train
        .iter()
        .map(|&v| Some(v))
        .chain(series.values()[n_train..].iter().copied())
        .collect();
    let s = KpiSeries::new(series.city(), series.kind(), series.start(), joined)?;
    Ok(impute_missing(&s)?.dense()?[n_train..].to_vec())
}

struct Prepared<T> {
    n_train: usize,
    clean_train: Vec<T>,
    flags: Vec<bool>,
    scaler: ScalerParams<T>,
    samples: WindowedSamples<T>,
}

fn prepare<T: Scalar>(series: &KpiSeries<T>, config: &PipelineConfig) -> Result<Prepared<T>> {
    config.validate().map_err(|e| e.at_stage("config"))?;
    let lookback = config.training.lookback;
    if series.len() < lookback + 2 {
        return Err(Error::InsufficientData(format!(
            "{} months cannot cover a lookback of {lookback} plus a test month",
            series.len()
        ))
        .at_stage("split/window"));
    }
    let n_train =
        split_point(series.len(), config.train_fraction).map_err(|e| e.at_stage("split/window"))?;
    let (clean_train, flags) = clean_prefix(series, n_train, config.z_threshold)?;
    let scaler =
        ScalerParams::fit(&clean_train, config.scaling).map_err(|e| e.at_stage("scale"))?;
    let samples = make_windows(&scaler.apply(&clean_train), lookback).map_err(|_| {
        Error::InsufficientData(format!(
            "{n_train} training months cannot feed a lookback of {lookback}"
        ))
        .at_stage("split/window")
    })?;
    Ok(Prepared {
        n_train,
        clean_train,
        flags,
        scaler,
        samples,
    })
}

fn range_warnings<T: Scalar>(
    kind: KpiKind,
    label: &str,
    points: &[(MonthIndex, T)],
) -> Vec<String> {
    points
        .iter()
        .filter(|(_, v)| !kind.admits(v.as_f64()))
        .map(|(m, v)| format!("{label} {kind} prediction {v} at {m} outside the valid range"))
        .collect()
}

pub fn run_pipeline<T: Scalar>(
    series: &KpiSeries<T>,
    config: &PipelineConfig,
) -> Result<ForecastResult<T>> {
    let p = prepare(series, config)?;
    let lookback = config.training.lookback;
    let (model, history) = train(&p.samples, &config.training).map_err(|e| e.at_stage("train"))?;

    let fitted: Vec<_> = fitted_values(&model, &p.samples, &p.scaler)
        .map_err(|e| e.at_stage("fitted"))?
        .into_iter()
        .enumerate()
        .map(|(i, v)| (series.month_at(lookback + i), v))
        .collect();

    let test = fill_test(series, &p.clean_train).map_err(|e| e.at_stage("impute"))?;
    let full: Vec<T> = p.clean_train.iter().chain(&test).copied().collect();
    let scaled = p.scaler.apply(&full);
    let test_len = series.len() - p.n_train;

    let rolling_values = if config.retrain_every == 0 {
        rolling_forecast(&model, &scaled, p.n_train, test_len, &p.scaler)
    } else {
        rolling_with_retraining(&model, &scaled, p.n_train, test_len, &p.scaler, config)
    }
    .map_err(|e| e.at_stage("rolling"))?;
    let rolling: Vec<_> = rolling_values
        .into_iter()
        .enumerate()
        .map(|(j, v)| (series.month_at(p.n_train + j), v))
        .collect();

    let mut future = BTreeMap::new();
    for &h in &config.horizons {
        let path = multi_step_forecast(&model, &scaled, h, &p.scaler)
            .map_err(|e| e.at_stage("multi-step"))?;
        let end = series.end();
        let dated: Vec<_> = path
            .into_iter()
            .enumerate()
            .map(|(k, v)| (end.offset(k as i64 + 1), v))
            .collect();
        future.insert(h, dated);
    }

    let mut warnings = Vec::new();
    for &h in &config.horizons {
        if !STANDARD_HORIZONS.contains(&h) {
            warnings.push(format!("non-standard horizon {h}"));
        }
    }
    warnings.extend(range_warnings(series.kind(), "fitted", &fitted));
    warnings.extend(range_warnings(series.kind(), "rolling", &rolling));
    for (h, path) in &future {
        warnings.extend(range_warnings(series.kind(), &format!("future{h}"), path));
    }

    Ok(ForecastResult {
        city: series.city().to_string(),
        kind: series.kind(),
        actual: series
            .values()
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (series.month_at(i), v)))
            .collect(),
        fitted,
        rolling,
        test_actual: series.values()[p.n_train..].to_vec(),
        future,
        scaler: p.scaler,
        model,
        history,
        outliers: p
            .flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| series.month_at(i))
            .collect(),
        warnings,
        config: config.clone(),
    })
}

/// Walk-forward where the model is refit on all observations up to every
/// `retrain_every`-th test month. The scaler stays fixed to the training fit.
fn rolling_with_retraining<T: Scalar>(
    initial: &LstmModel<T>,
    scaled: &[T],
    test_start: usize,
    test_len: usize,
    scaler: &ScalerParams<T>,
    config: &PipelineConfig,
) -> Result<Vec<T>> {
    let k = config.retrain_every;
    let mut model = initial.clone();
    let mut out = Vec::with_capacity(test_len);
    for j in 0..test_len {
        let t = test_start + j;
        if j > 0 && j % k == 0 {
            let samples = make_windows(&scaled[..t], model.lookback())?;
            model = train(&samples, &config.training)?.0;
        }
        out.extend(rolling_forecast(&model, scaled, t, 1, scaler)?);
    }
    Ok(out)
}

/// Hyperparameter objective: MAPE (percent, original units) of one-step
/// predictions on the validation tail carved from the training prefix.
/// Never touches the test months.
pub fn holdout_mape<T: Scalar>(series: &KpiSeries<T>, config: &PipelineConfig) -> Result<f64> {
    let p = prepare(series, config)?;
    let n_val = config.training.validation_count(p.samples.len());
    if n_val == 0 {
        return Err(Error::InsufficientData(
            "validation tail is empty; raise val_fraction".into(),
        ));
    }
    let (model, _) = train(&p.samples, &config.training).map_err(|e| e.at_stage("train"))?;
    let (_, val) = p.samples.split_tail(n_val);
    let predicted = fitted_values(&model, &val, &p.scaler)?;
    let actual = p.scaler.invert(val.targets());
    let score = mape(&actual, &predicted)?;
    Ok(score.as_f64())
}
