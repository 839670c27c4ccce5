//! Plain-text model files.
//!
//! ```text
//! kpicast-lstm 1
//! scalar f64
//! lookback 12
//! hidden 16
//! epochs 800
//! learning_rate 0.005
//! seed 1
//! patience 50
//! min_epochs 300
//! val_fraction 0.1
//! gradient_clip 5
//! input.w <H values>
//! input.u <H*H values, row-major>
//! input.b <H values>
//! forget.w ...            (then forget, output, candidate in the same pattern)
//! head.w <H values>
//! head.b <1 value>
//! ```
//!
//! Numbers are written in Rust's shortest round-trip decimal form, so a model
//! reloads bit-identically on any platform.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lstm::train::{LstmModel, TrainingConfig};
use crate::lstm::weights::{Gate, LstmWeights};
use crate::scalar::Scalar;

pub const MAGIC: &str = "kpicast-lstm";
pub const FORMAT_VERSION: u32 = 1;

fn write_row<T: Scalar>(out: &mut String, key: &str, values: &[T]) {
    out.push_str(key);
    for v in values {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
}

pub fn to_text<T: Scalar>(model: &LstmModel<T>) -> String {
    let c = &model.config;
    let w = &model.weights;
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {FORMAT_VERSION}");
    let _ = writeln!(out, "scalar {}", T::NAME);
    let _ = writeln!(out, "lookback {}", c.lookback);
    let _ = writeln!(out, "hidden {}", w.hidden());
    let _ = writeln!(out, "epochs {}", c.epochs);
    let _ = writeln!(out, "learning_rate {}", c.learning_rate);
    let _ = writeln!(out, "seed {}", c.seed);
    let _ = writeln!(out, "patience {}", c.patience);
    let _ = writeln!(out, "min_epochs {}", c.min_epochs);
    let _ = writeln!(out, "val_fraction {}", c.val_fraction);
    let _ = writeln!(out, "gradient_clip {}", c.gradient_clip);
    for g in Gate::ALL {
        write_row(&mut out, &format!("{}.w", g.name()), w.w(g));
        write_row(&mut out, &format!("{}.u", g.name()), w.u(g));
        write_row(&mut out, &format!("{}.b", g.name()), w.b(g));
    }
    write_row(&mut out, "head.w", w.w_out());
    write_row(&mut out, "head.b", &[w.b_out()]);
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn expect(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (i, line) = self.inner.next().ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("unexpected end of file, wanted {key}"),
        })?;
        let mut parts = line.split_ascii_whitespace();
        match parts.next() {
            Some(k) if k == key => Ok((i + 1, parts.collect())),
            other => Err(Error::Parse {
                line: i + 1,
                message: format!("expected {key}, found {other:?}"),
            }),
        }
    }

    fn scalar<V: std::str::FromStr>(&mut self, key: &str) -> Result<V> {
        let (line, parts) = self.expect(key)?;
        match parts.as_slice() {
            [v] => v.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad value for {key}: {v}"),
            }),
            _ => Err(Error::Parse {
                line,
                message: format!("{key} takes exactly one value"),
            }),
        }
    }

    fn row<T: Scalar>(&mut self, key: &str, dst: &mut [T]) -> Result<()> {
        let (line, parts) = self.expect(key)?;
        if parts.len() != dst.len() {
            return Err(Error::Parse {
                line,
                message: format!("{key}: expected {} values, got {}", dst.len(), parts.len()),
            });
        }
        for (d, p) in dst.iter_mut().zip(parts) {
            *d = p.parse().map_err(|_| Error::Parse {
                line,
                message: format!("{key}: bad number {p}"),
            })?;
        }
        Ok(())
    }
}

pub fn from_text<T: Scalar>(text: &str) -> Result<LstmModel<T>> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let version: u32 = lines.scalar(MAGIC)?;
    if version != FORMAT_VERSION {
        return Err(Error::Parse {
            line: 1,
            message: format!("unsupported model format version {version}"),
        });
    }
    let scalar: String = lines.scalar("scalar")?;
    if scalar != T::NAME {
        return Err(Error::Parse {
            line: 2,
            message: format!("model stores {scalar}, loading as {}", T::NAME),
        });
    }
    let lookback = lines.scalar("lookback")?;
    let hidden: usize = lines.scalar("hidden")?;
    if hidden == 0 {
        return Err(Error::Parse {
            line: 4,
            message: "hidden size must be positive".into(),
        });
    }
    let config = TrainingConfig {
        lookback,
        hidden_size: hidden,
        epochs: lines.scalar("epochs")?,
        learning_rate: lines.scalar("learning_rate")?,
        seed: lines.scalar("seed")?,
        patience: lines.scalar("patience")?,
        min_epochs: lines.scalar("min_epochs")?,
        val_fraction: lines.scalar("val_fraction")?,
        gradient_clip: lines.scalar("gradient_clip")?,
    };
    let mut w = LstmWeights::<T>::zeros(hidden);
    for g in Gate::ALL {
        lines.row(&format!("{}.w", g.name()), w.w_mut(g))?;
        lines.row(&format!("{}.u", g.name()), w.u_mut(g))?;
        lines.row(&format!("{}.b", g.name()), w.b_mut(g))?;
    }
    lines.row("head.w", w.w_out_mut())?;
    let mut b = [T::zero()];
    lines.row("head.b", &mut b)?;
    w.set_b_out(b[0]);
    if !w.is_finite() {
        return Err(Error::Parse {
            line: 0,
            message: "non-finite weight".into(),
        });
    }
    Ok(LstmModel { weights: w, config })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model<T: Scalar>() -> LstmModel<T> {
        let mut weights = LstmWeights::<T>::init(3, 77);
        weights.set_b_out(T::lit(-0.1234567890123));
        LstmModel {
            weights,
            config: TrainingConfig {
                hidden_size: 3,
                ..TrainingConfig::default()
            },
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = model::<f64>();
        let back: LstmModel<f64> = from_text(&to_text(&m)).unwrap();
        assert_eq!(back, m);
        let m32 = model::<f32>();
        let back32: LstmModel<f32> = from_text(&to_text(&m32)).unwrap();
        assert_eq!(back32, m32);
    }

    #[test]
    fn header_is_versioned() {
        let text = to_text(&model::<f64>());
        assert!(text.starts_with("kpicast-lstm 1\nscalar f64\nlookback 12\nhidden 3\n"));
    }

    #[test]
    fn rejects_wrong_scalar_and_truncation() {
        let text = to_text(&model::<f64>());
        assert!(from_text::<f32>(&text).is_err());
        let cut: String = text.lines().take(13).collect::<Vec<_>>().join("\n");
        assert!(matches!(from_text::<f64>(&cut), Err(Error::Parse { .. })));
        let bumped = text.replacen("kpicast-lstm 1", "kpicast-lstm 2", 1);
        assert!(from_text::<f64>(&bumped).is_err());
    }
}
