//! Monthly hotel KPI forecasting with a from-scratch LSTM.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases
//! below fix it to `f64`, which is what the CLI uses.

// `!(x > 0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decompose;
pub mod error;
pub mod forecast;
pub mod hpo;
pub mod io;
pub mod lstm;
pub mod metrics;
pub mod month;
pub mod report;
pub mod scalar;
pub mod scaler;
pub mod series;
pub mod synthetic;
pub mod window;

pub use error::{Error, Result};
pub use forecast::{run_pipeline, PipelineConfig};
pub use lstm::TrainingConfig;
pub use metrics::{categorize_mape, AccuracyCategory, EvalMetrics};
pub use month::MonthIndex;
pub use scalar::Scalar;
pub use series::KpiKind;

pub type Series = series::KpiSeries<f64>;
pub type Decomposition = decompose::Decomposition<f64>;
pub type Scaler = scaler::ScalerParams<f64>;
pub type Samples = window::WindowedSamples<f64>;
pub type Weights = lstm::LstmWeights<f64>;
pub type Model = lstm::LstmModel<f64>;
pub type History = lstm::LossHistory<f64>;
pub type Forecast = forecast::ForecastResult<f64>;
pub type Dataset = io::Ingested<f64>;
