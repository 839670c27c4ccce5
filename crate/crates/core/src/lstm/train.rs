use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lstm::adam::{adam_step, AdamState};
use crate::lstm::cell::{backward, batch_mse, predict};
use crate::lstm::weights::LstmWeights;
use crate::scalar::Scalar;
use crate::window::WindowedSamples;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub lookback: usize,
    pub hidden_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Epochs without validation improvement tolerated before stopping.
    pub patience: usize,
    /// Early stopping is not allowed to end training before this many epochs.
    pub min_epochs: usize,
    /// Chronological tail of the samples held out for early stopping.
    pub val_fraction: f64,
    pub gradient_clip: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            lookback: 12,
            hidden_size: 16,
            epochs: 800,
            learning_rate: 0.005,
            seed: 1,
            patience: 50,
            min_epochs: 300,
            val_fraction: 0.1,
            gradient_clip: 5.0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.lookback == 0 || self.hidden_size == 0 || self.epochs == 0 {
            return bad("lookback, hidden_size and epochs must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!(
                "learning_rate {} must be positive",
                self.learning_rate
            ));
        }
        if !(self.gradient_clip > 0.0) {
            return bad(format!(
                "gradient_clip {} must be positive",
                self.gradient_clip
            ));
        }
        if !(0.0..0.5).contains(&self.val_fraction) {
            return bad(format!(
                "val_fraction {} outside [0, 0.5)",
                self.val_fraction
            ));
        }
        Ok(())
    }

    /// Number of trailing samples reserved for validation out of `n`.
    pub fn validation_count(&self, n: usize) -> usize {
        (n as f64 * self.val_fraction).floor() as usize
    }
}

/// Trained weights together with the configuration that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmModel<T> {
    pub weights: LstmWeights<T>,
    pub config: TrainingConfig,
}

impl<T: Scalar> LstmModel<T> {
    pub fn lookback(&self) -> usize {
        self.config.lookback
    }

    pub fn predict(&self, window: &[T]) -> Result<T> {
        if window.len() != self.lookback() {
            return Err(Error::Shape(window.len(), self.lookback()));
        }
        predict(window, &self.weights)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossHistory<T> {
    pub train: Vec<T>,
    /// Validation MSE per epoch; empty when no validation tail was reserved.
    pub val: Vec<T>,
    /// Epoch whose weights were returned.
    pub best_epoch: usize,
}

impl<T: Scalar> LossHistory<T> {
    pub fn epochs(&self) -> usize {
        self.train.len()
    }

    /// The series early stopping watched: validation if present, else training.
    pub fn monitored(&self) -> &[T] {
        if self.val.is_empty() {
            &self.train
        } else {
            &self.val
        }
    }
}

/// Full-batch Adam with early stopping on the chronological validation tail.
///
/// Each epoch evaluates the current weights, records the losses, and only then
/// applies the update, so `history.train[e]` is the loss of the weights that
/// would be returned if epoch `e` were best.
pub fn train<T: Scalar>(
    samples: &WindowedSamples<T>,
    config: &TrainingConfig,
) -> Result<(LstmModel<T>, LossHistory<T>)> {
    config.validate()?;
    if samples.lookback() != config.lookback {
        return Err(Error::InvalidConfig(format!(
            "samples use lookback {}, config says {}",
            samples.lookback(),
            config.lookback
        )));
    }
    let n_val = config.validation_count(samples.len());
    let (fit, val) = samples.split_tail(n_val);
    if fit.is_empty() {
        return Err(Error::InsufficientData(format!(
            "{} samples leave nothing to train on after reserving {n_val} for validation",
            samples.len()
        )));
    }

    let mut w = LstmWeights::<T>::init(config.hidden_size, config.seed);
    let mut opt = AdamState::new(&w);
    let lr = T::lit(config.learning_rate);
    let clip = T::lit(config.gradient_clip);

    let mut history = LossHistory::default();
    let mut best = T::infinity();
    let mut best_w = w.clone();
    let mut since_best = 0usize;

    for epoch in 0..config.epochs {
        let (loss, grad) = backward(&fit, &w)?;
        history.train.push(loss);
        let monitored = if val.is_empty() {
            loss
        } else {
            let v = batch_mse(&val, &w)?;
            history.val.push(v);
            v
        };
        if monitored < best {
            best = monitored;
            best_w.clone_from(&w);
            history.best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best > config.patience && epoch + 1 >= config.min_epochs {
                break;
            }
        }
        adam_step(&mut w, &grad, &mut opt, lr, clip);
    }

    Ok((
        LstmModel {
            weights: best_w,
            config: config.clone(),
        },
        history,
    ))
}
