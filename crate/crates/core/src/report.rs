//! City x KPI accuracy report: CSV and a plain-text table laid out like the
//! usual MSE / MAPE comparison grid.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{categorize_mape, AccuracyCategory, EvalMetrics};
use crate::scalar::Scalar;
use crate::series::KpiKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub city: String,
    #[serde(rename = "kpi")]
    pub kind: KpiKind,
    /// Number of scored test months.
    pub n: usize,
    pub mse: f64,
    pub mae: f64,
    pub mape: f64,
    pub category: AccuracyCategory,
}

impl ReportRow {
    pub fn new(city: impl Into<String>, kind: KpiKind, n: usize, m: EvalMetrics) -> Result<Self> {
        Ok(Self {
            city: city.into(),
            kind,
            n,
            mse: m.mse,
            mae: m.mae,
            mape: m.mape,
            category: categorize_mape(m.mape)?,
        })
    }
}

/// Actual and forecast values for one (city, KPI) pair.
#[derive(Debug, Clone)]
pub struct EvalInput<T> {
    pub city: String,
    pub kind: KpiKind,
    pub actual: Vec<T>,
    pub forecast: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    rows: Vec<ReportRow>,
}

impl EvalReport {
    /// Orders rows by first appearance of each city, then OCC, ADR, REVPAR.
    /// Rejects duplicate (city, KPI) pairs.
    pub fn from_rows(rows: Vec<ReportRow>) -> Result<Self> {
        let mut cities: Vec<&str> = Vec::new();
        for r in &rows {
            if !cities.contains(&r.city.as_str()) {
                cities.push(&r.city);
            }
        }
        let rank = |r: &ReportRow| {
            let c = cities
                .iter()
                .position(|c| *c == r.city)
                .unwrap_or(usize::MAX);
            (c, r.kind)
        };
        let mut keyed: Vec<_> = rows.iter().map(|r| (rank(r), r.clone())).collect();
        keyed.sort_by_key(|(k, _)| *k);
        for pair in keyed.windows(2) {
            if pair[0].0 == pair[1].0 {
                let r = &pair[0].1;
                return Err(Error::InvalidSeries(format!(
                    "duplicate report row for {}/{}",
                    r.city, r.kind
                )));
            }
        }
        Ok(Self {
            rows: keyed.into_iter().map(|(_, r)| r).collect(),
        })
    }

    pub fn rows(&self) -> &[ReportRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, city: &str, kind: KpiKind) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.city == city && r.kind == kind)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<ReportRow>, _>>()?;
        Self::from_rows(rows)
    }

    /// Wide grid (one line per city, MSE and MAPE per KPI) followed by the
    /// long-form rows with MAE and the accuracy band.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut cities: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !cities.contains(&r.city.as_str()) {
                cities.push(&r.city);
            }
        }
        let width = cities.iter().map(|c| c.len()).max().unwrap_or(4).max(4);

        let _ = write!(out, "{:<width$}", "City");
        for k in KpiKind::ALL {
            let _ = write!(out, " | {:^21}", k.as_str());
        }
        out.push('\n');
        let _ = write!(out, "{:<width$}", "");
        for _ in KpiKind::ALL {
            let _ = write!(out, " | {:>10} {:>10}", "MSE", "MAPE");
        }
        out.push('\n');
        let _ = writeln!(out, "{}", "-".repeat(width + 3 * 24));
        for c in &cities {
            let _ = write!(out, "{c:<width$}");
            for k in KpiKind::ALL {
                match self.get(c, k) {
                    Some(r) => {
                        let _ = write!(out, " | {:>10.2} {:>9.2}%", r.mse, r.mape);
                    }
                    None => {
                        let _ = write!(out, " | {:>10} {:>10}", "-", "-");
                    }
                }
            }
            out.push('\n');
        }

        out.push('\n');
        let _ = writeln!(
            out,
            "{:<width$}  {:<6} {:>4} {:>12} {:>10} {:>8}  Accuracy",
            "City", "KPI", "n", "MSE", "MAE", "MAPE"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:<6} {:>4} {:>12.4} {:>10.4} {:>7.2}%  {}",
                r.city,
                r.kind.as_str(),
                r.n,
                r.mse,
                r.mae,
                r.mape,
                r.category.label()
            );
        }
        out
    }
}

pub fn build_report<T: Scalar>(inputs: &[EvalInput<T>]) -> Result<EvalReport> {
    if inputs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let rows = inputs
        .iter()
        .map(|i| {
            let annotate = |e: Error| Error::Series {
                city: i.city.clone(),
                kpi: i.kind.to_string(),
                source: Box::new(e),
            };
            let m = EvalMetrics::compute(&i.actual, &i.forecast).map_err(annotate)?;
            ReportRow::new(i.city.clone(), i.kind, i.actual.len(), m).map_err(annotate)
        })
        .collect::<Result<Vec<_>>>()?;
    EvalReport::from_rows(rows)
}
