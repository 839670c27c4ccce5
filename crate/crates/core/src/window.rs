use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Supervised (window, next value) pairs cut from one series.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedSamples<T> {
    lookback: usize,
    inputs: Vec<Vec<T>>,
    targets: Vec<T>,
}

impl<T: Scalar> WindowedSamples<T> {
    pub fn new(lookback: usize, inputs: Vec<Vec<T>>, targets: Vec<T>) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::Shape(inputs.len(), targets.len()));
        }
        if let Some(bad) = inputs.iter().find(|w| w.len() != lookback) {
            return Err(Error::Shape(bad.len(), lookback));
        }
        Ok(Self {
            lookback,
            inputs,
            targets,
        })
    }

    pub fn lookback(&self) -> usize {
        self.lookback
    }

    pub fn inputs(&self) -> &[Vec<T>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[T] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[T], T)> + '_ {
        self.inputs
            .iter()
            .map(Vec::as_slice)
            .zip(self.targets.iter().copied())
    }

    /// Splits off the last `n` samples, keeping chronological order.
    pub fn split_tail(&self, n: usize) -> (Self, Self) {
        let k = self.len().saturating_sub(n);
        let head = Self {
            lookback: self.lookback,
            inputs: self.inputs[..k].to_vec(),
            targets: self.targets[..k].to_vec(),
        };
        let tail = Self {
            lookback: self.lookback,
            inputs: self.inputs[k..].to_vec(),
            targets: self.targets[k..].to_vec(),
        };
        (head, tail)
    }
}

pub fn make_windows<T: Scalar>(values: &[T], lookback: usize) -> Result<WindowedSamples<T>> {
    if lookback == 0 || values.len() <= lookback {
        return Err(Error::InsufficientHistory {
            len: values.len(),
            lookback,
        });
    }
    let (inputs, targets) = values
        .windows(lookback + 1)
        .map(|w| (w[..lookback].to_vec(), w[lookback]))
        .unzip();
    Ok(WindowedSamples {
        lookback,
        inputs,
        targets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_windows() {
        let w = make_windows(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(w.inputs(), &[vec![1.0, 2.0], vec![2.0, 3.0]]);
        assert_eq!(w.targets(), &[3.0, 4.0]);
    }

    #[test]
    fn counts_and_boundaries() {
        let v = vec![0.5f64; 68];
        assert_eq!(make_windows(&v, 12).unwrap().len(), 56);
        assert_eq!(
            make_windows(&v[..12], 12).unwrap_err(),
            Error::InsufficientHistory {
                len: 12,
                lookback: 12
            }
        );
        assert!(make_windows(&v, 0).is_err());
    }

    #[test]
    fn split_tail_keeps_order() {
        let w = make_windows(&[1.0, 2.0, 3.0, 4.0, 5.0], 1).unwrap();
        let (head, tail) = w.split_tail(1);
        assert_eq!(head.targets(), &[2.0, 3.0, 4.0]);
        assert_eq!(tail.targets(), &[5.0]);
        assert_eq!(tail.inputs(), &[vec![4.0]]);
    }
}
