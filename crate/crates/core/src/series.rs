//! Monthly KPI series and the cleaning steps applied before modelling.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::month::MonthIndex;
use crate::scalar::Scalar;

/// Default |z| above which a value is treated as an outlier.
pub const DEFAULT_Z_THRESHOLD: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum KpiKind {
    /// Occupancy, percent of available rooms sold.
    Occ,
    /// Average daily rate, currency per sold room-night.
    Adr,
    /// Revenue per available room-night.
    Revpar,
}

impl KpiKind {
    pub const ALL: [KpiKind; 3] = [KpiKind::Occ, KpiKind::Adr, KpiKind::Revpar];

    pub fn as_str(self) -> &'static str {
        match self {
            KpiKind::Occ => "OCC",
            KpiKind::Adr => "ADR",
            KpiKind::Revpar => "REVPAR",
        }
    }

    /// Whether `v` is a legal observed value for this KPI.
    pub fn admits(self, v: f64) -> bool {
        match self {
            KpiKind::Occ => v > 0.0 && v <= 100.0,
            KpiKind::Adr | KpiKind::Revpar => v > 0.0,
        }
    }
}

impl fmt::Display for KpiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KpiKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "OCC" => Ok(KpiKind::Occ),
            "ADR" => Ok(KpiKind::Adr),
            "REVPAR" => Ok(KpiKind::Revpar),
            other => Err(Error::InvalidSeries(format!("unknown KPI {other:?}"))),
        }
    }
}

/// One city's monthly values for one KPI. Missing months are `None`, never absent.
#[derive(Debug, Clone, PartialEq)]
pub struct KpiSeries<T> {
    city: String,
    kind: KpiKind,
    start: MonthIndex,
    values: Vec<Option<T>>,
}

impl<T: Scalar> KpiSeries<T> {
    pub fn new(
        city: impl Into<String>,
        kind: KpiKind,
        start: MonthIndex,
        values: Vec<Option<T>>,
    ) -> Result<Self> {
        let city = city.into();
        if values.is_empty() {
            return Err(Error::InvalidSeries(format!("{city}/{kind}: empty series")));
        }
        for (i, v) in values.iter().enumerate() {
            if let Some(v) = v {
                let x = v.as_f64();
                if !x.is_finite() || !kind.admits(x) {
                    return Err(Error::InvalidSeries(format!(
                        "{city}/{kind} {}: value {x} out of range",
                        start.offset(i as i64)
                    )));
                }
            }
        }
        Ok(Self {
            city,
            kind,
            start,
            values,
        })
    }

    /// Series with every month present.
    pub fn from_values(
        city: impl Into<String>,
        kind: KpiKind,
        start: MonthIndex,
        values: &[T],
    ) -> Result<Self> {
        Self::new(city, kind, start, values.iter().map(|&v| Some(v)).collect())
    }

    pub fn city(&self) -> &str {
        &self.city
    }

    pub fn kind(&self) -> KpiKind {
        self.kind
    }

    pub fn start(&self) -> MonthIndex {
        self.start
    }

    /// Last covered month.
    pub fn end(&self) -> MonthIndex {
        self.month_at(self.len() - 1)
    }

    pub fn month_at(&self, i: usize) -> MonthIndex {
        self.start.offset(i as i64)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<T>] {
        &self.values
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Values as a plain vector; fails if anything is missing.
    pub fn dense(&self) -> Result<Vec<T>> {
        self.values
            .iter()
            .map(|v| {
                v.ok_or_else(|| {
                    Error::InvalidSeries(format!("{}/{} has missing values", self.city, self.kind))
                })
            })
            .collect()
    }

    fn with_values(&self, start: MonthIndex, values: Vec<Option<T>>) -> Self {
        Self {
            city: self.city.clone(),
            kind: self.kind,
            start,
            values,
        }
    }
}

/// Linear interpolation across gaps, nearest-value extension at the edges.
fn fill_gaps<T: Scalar>(values: &[Option<T>]) -> Result<Vec<T>> {
    let present: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_some()).collect();
    if present.len() < 2 {
        return Err(Error::Unimputable {
            present: present.len(),
        });
    }
    let first = present[0];
    let last = present[present.len() - 1];
    let mut out = Vec::with_capacity(values.len());
    let mut right = 0;
    for (i, v) in values.iter().enumerate() {
        if let Some(v) = v {
            out.push(*v);
            continue;
        }
        if i < first {
            out.push(values[first].unwrap());
        } else if i > last {
            out.push(values[last].unwrap());
        } else {
            while present[right] < i {
                right += 1;
            }
            let (lo, hi) = (present[right - 1], present[right]);
            let (a, b) = (values[lo].unwrap(), values[hi].unwrap());
            let w = T::count(i - lo) / T::count(hi - lo);
            out.push(a + (b - a) * w);
        }
    }
    Ok(out)
}

pub fn impute_missing<T: Scalar>(s: &KpiSeries<T>) -> Result<KpiSeries<T>> {
    let filled = fill_gaps(&s.values)?;
    Ok(s.with_values(s.start, filled.into_iter().map(Some).collect()))
}

/// Flags values whose z-score (sample standard deviation) exceeds `z_threshold`
/// and replaces them by interpolating the unflagged neighbours.
pub fn filter_outliers<T: Scalar>(
    s: &KpiSeries<T>,
    z_threshold: T,
) -> Result<(KpiSeries<T>, Vec<bool>)> {
    if !(z_threshold > T::zero()) {
        return Err(Error::InvalidConfig("z_threshold must be > 0".into()));
    }
    let values = s.dense()?;
    let n = values.len();
    let mut flags = vec![false; n];
    if n < 2 {
        return Ok((s.clone(), flags));
    }
    let mean = crate::scalar::mean(&values);
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / T::count(n - 1);
    let std = var.sqrt();
    if !(std > T::zero()) {
        return Ok((s.clone(), flags));
    }
    let mut masked = Vec::with_capacity(n);
    for (i, &v) in values.iter().enumerate() {
        if ((v - mean) / std).abs() > z_threshold {
            flags[i] = true;
            masked.push(None);
        } else {
            masked.push(Some(v));
        }
    }
    if !flags.iter().any(|&f| f) {
        return Ok((s.clone(), flags));
    }
    let filled = fill_gaps(&masked)?;
    Ok((
        s.with_values(s.start, filled.into_iter().map(Some).collect()),
        flags,
    ))
}

/// Number of training months for a chronological split; floor rounding.
pub fn split_point(len: usize, train_fraction: f64) -> Result<usize> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let n_train = (len as f64 * train_fraction).floor() as usize;
    if n_train < 1 || n_train >= len {
        return Err(Error::SplitEmpty {
            len,
            fraction: train_fraction,
        });
    }
    Ok(n_train)
}

pub fn chronological_split<T: Scalar>(
    s: &KpiSeries<T>,
    train_fraction: f64,
) -> Result<(KpiSeries<T>, KpiSeries<T>)> {
    let k = split_point(s.len(), train_fraction)?;
    let train = s.with_values(s.start, s.values[..k].to_vec());
    let test = s.with_values(s.month_at(k), s.values[k..].to_vec());
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyRow {
    pub month: MonthIndex,
    /// `None` when any of the three values is missing.
    pub rel_error: Option<f64>,
    pub flagged: bool,
}

/// Checks RevPAR against `(OCC / 100) * ADR` month by month.
pub fn revpar_consistency<T: Scalar>(
    occ: &KpiSeries<T>,
    adr: &KpiSeries<T>,
    revpar: &KpiSeries<T>,
    rel_tol: f64,
) -> Result<Vec<ConsistencyRow>> {
    let kinds = [occ.kind, adr.kind, revpar.kind];
    if kinds != KpiKind::ALL {
        return Err(Error::Alignment(format!(
            "expected OCC, ADR, REVPAR series, got {kinds:?}"
        )));
    }
    if occ.city != adr.city || occ.city != revpar.city {
        return Err(Error::Alignment("series belong to different cities".into()));
    }
    for s in [adr, revpar] {
        if s.start != occ.start || s.len() != occ.len() {
            return Err(Error::Alignment(format!(
                "{} covers {}..{}, OCC covers {}..{}",
                s.kind,
                s.start,
                s.end(),
                occ.start,
                occ.end()
            )));
        }
    }
    let rows = (0..occ.len())
        .map(|i| {
            let rel_error = match (occ.values[i], adr.values[i], revpar.values[i]) {
                (Some(o), Some(a), Some(r)) => {
                    let (o, a, r) = (o.as_f64(), a.as_f64(), r.as_f64());
                    Some((r - o / 100.0 * a).abs() / r)
                }
                _ => None,
            };
            ConsistencyRow {
                month: occ.month_at(i),
                rel_error,
                flagged: rel_error.is_some_and(|e| e > rel_tol),
            }
        })
        .collect();
    Ok(rows)
}
