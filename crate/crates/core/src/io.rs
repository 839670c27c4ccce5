//! CSV ingestion and export.
//!
//! Input files carry `city,kpi,month,value` with an empty `value` for a
//! missing month. A bad row fails only the series it belongs to.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::forecast::ForecastResult;
use crate::month::MonthIndex;
use crate::scalar::Scalar;
use crate::series::{KpiKind, KpiSeries};

pub const HEADER: [&str; 4] = ["city", "kpi", "month", "value"];
pub const FORECAST_HEADER: [&str; 3] = ["month", "kind", "value"];

/// A series (or an unattributable row) that could not be ingested.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestFailure {
    pub city: String,
    pub kpi: String,
    /// 1-based file line of the first offending row, when one is to blame.
    pub line: Option<u64>,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested<T> {
    pub series: Vec<KpiSeries<T>>,
    pub failures: Vec<IngestFailure>,
}

struct Pending<T> {
    rows: Vec<(MonthIndex, Option<T>, u64)>,
    bad: Option<(u64, Error)>,
}

fn parse_row<T: Scalar>(
    rec: &csv::StringRecord,
    line: u64,
) -> Result<(KpiKind, MonthIndex, Option<T>)> {
    let bad = |message: String| Error::Parse {
        line: line as usize,
        message,
    };
    if rec.len() != HEADER.len() {
        return Err(bad(format!("expected 4 fields, found {}", rec.len())));
    }
    let kind: KpiKind = rec[1].parse().map_err(|e: Error| bad(e.to_string()))?;
    let month: MonthIndex = rec[2].parse().map_err(|e: Error| bad(e.to_string()))?;
    let raw = rec[3].trim();
    let value = if raw.is_empty() {
        None
    } else {
        let v: T = raw
            .parse()
            .map_err(|_| bad(format!("bad number {raw:?}")))?;
        let x = v.as_f64();
        if !x.is_finite() || !kind.admits(x) {
            return Err(bad(format!("{kind} value {raw} out of range")));
        }
        Some(v)
    };
    Ok((kind, month, value))
}

fn assemble<T: Scalar>(
    city: &str,
    kind: KpiKind,
    mut p: Pending<T>,
) -> std::result::Result<KpiSeries<T>, (Option<u64>, Error)> {
    if let Some((line, e)) = p.bad {
        return Err((Some(line), e));
    }
    p.rows.sort_by_key(|r| r.0);
    for w in p.rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.0 == b.0 {
            return Err((
                Some(b.2),
                Error::InvalidSeries(format!("{city}/{kind}: duplicate month {}", b.0)),
            ));
        }
        if a.0.succ() != b.0 {
            return Err((
                Some(b.2),
                Error::InvalidSeries(format!(
                    "{city}/{kind}: months {} to {} leave a gap",
                    a.0, b.0
                )),
            ));
        }
    }
    let start = p.rows[0].0;
    KpiSeries::new(city, kind, start, p.rows.into_iter().map(|r| r.1).collect())
        .map_err(|e| (None, e))
}

/// Reads a whole file. Only a missing or wrong header fails the call; every
/// other problem is reported per series in [`Ingested::failures`].
pub fn read_series<T: Scalar, R: Read>(input: R) -> Result<Ingested<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(input);
    let header = reader.headers()?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header {}, found {}",
                HEADER.join(","),
                names.join(",")
            ),
        });
    }

    let mut order: Vec<(String, KpiKind)> = Vec::new();
    let mut pending: HashMap<(String, KpiKind), Pending<T>> = HashMap::new();
    let mut failures = Vec::new();
    for rec in reader.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line());
                failures.push(IngestFailure {
                    city: String::new(),
                    kpi: String::new(),
                    line,
                    error: e.into(),
                });
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line());
        let city = rec.get(0).unwrap_or("").trim().to_string();
        let kpi_raw = rec.get(1).unwrap_or("").trim();
        let Ok(kind) = kpi_raw.parse::<KpiKind>() else {
            failures.push(IngestFailure {
                city,
                kpi: kpi_raw.to_string(),
                line: Some(line),
                error: Error::Parse {
                    line: line as usize,
                    message: format!("unknown KPI {kpi_raw:?}"),
                },
            });
            continue;
        };
        if city.is_empty() {
            failures.push(IngestFailure {
                city,
                kpi: kind.to_string(),
                line: Some(line),
                error: Error::Parse {
                    line: line as usize,
                    message: "empty city".into(),
                },
            });
            continue;
        }
        let key = (city, kind);
        let entry = pending.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            Pending {
                rows: Vec::new(),
                bad: None,
            }
        });
        match parse_row::<T>(&rec, line) {
            Ok((_, month, value)) => entry.rows.push((month, value, line)),
            Err(e) => {
                if entry.bad.is_none() {
                    entry.bad = Some((line, e));
                }
            }
        }
    }

    let mut series = Vec::new();
    for key in order {
        let p = pending.remove(&key).expect("key recorded on insert");
        match assemble(&key.0, key.1, p) {
            Ok(s) => series.push(s),
            Err((line, error)) => failures.push(IngestFailure {
                city: key.0,
                kpi: key.1.to_string(),
                line,
                error,
            }),
        }
    }
    Ok(Ingested { series, failures })
}

fn fmt_opt<T: Scalar>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_series<T: Scalar, W: Write>(out: W, series: &[&KpiSeries<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for s in series {
        for (i, v) in s.values().iter().enumerate() {
            w.write_record([
                s.city(),
                s.kind().as_str(),
                &s.month_at(i).to_string(),
                &fmt_opt(*v),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Plot-ready long format: `month,kind,value` with kinds `actual`, `fitted`,
/// `rolling` and `future<h>`.
pub fn write_forecast<T: Scalar, W: Write>(out: W, r: &ForecastResult<T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FORECAST_HEADER)?;
    let mut put = |kind: &str, rows: &[(MonthIndex, T)]| -> Result<()> {
        for (m, v) in rows {
            w.write_record([m.to_string(), kind.to_string(), v.to_string()])?;
        }
        Ok(())
    };
    put("actual", &r.actual)?;
    put("fitted", &r.fitted)?;
    put("rolling", &r.rolling)?;
    for (h, path) in &r.future {
        put(&format!("future{h}"), path)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "city,kpi,month,value\n\
        Oslo,OCC,2020-02,71.5\n\
        Oslo,OCC,2020-01,70\n\
        Oslo,ADR,2020-01,\n\
        Oslo,ADR,2020-02,120.25\n";

    #[test]
    fn reads_and_sorts() {
        let d: Ingested<f64> = read_series(GOOD.as_bytes()).unwrap();
        assert!(d.failures.is_empty());
        assert_eq!(d.series.len(), 2);
        assert_eq!(d.series[0].values(), &[Some(70.0), Some(71.5)]);
        assert_eq!(d.series[1].values(), &[None, Some(120.25)]);
        assert_eq!(d.series[0].start().to_string(), "2020-01");
    }

    #[test]
    fn round_trip() {
        let d: Ingested<f64> = read_series(GOOD.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_series(&mut buf, &d.series.iter().collect::<Vec<_>>()).unwrap();
        let back: Ingested<f64> = read_series(buf.as_slice()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn bad_row_fails_only_its_series() {
        let text =
            format!("{GOOD}Oslo,REVPAR,2020-01,abc\nLima,OCC,2020-01,101\nLima,ADR,2020-01,5\n");
        let d: Ingested<f64> = read_series(text.as_bytes()).unwrap();
        assert_eq!(d.series.len(), 3);
        assert_eq!(d.failures.len(), 2);
        let f = &d.failures[0];
        assert_eq!(
            (f.city.as_str(), f.kpi.as_str(), f.line),
            ("Oslo", "REVPAR", Some(6))
        );
        assert_eq!(d.failures[1].line, Some(7));
    }

    #[test]
    fn gaps_and_duplicates_fail() {
        let gap = "city,kpi,month,value\nA,OCC,2020-01,1\nA,OCC,2020-03,1\n";
        let d: Ingested<f64> = read_series(gap.as_bytes()).unwrap();
        assert_eq!(d.failures[0].line, Some(3));
        let dup = "city,kpi,month,value\nA,OCC,2020-01,1\nA,OCC,2020-01,2\n";
        let d: Ingested<f64> = read_series(dup.as_bytes()).unwrap();
        assert!(d.series.is_empty());
        assert_eq!(d.failures.len(), 1);
    }

    #[test]
    fn header_is_required() {
        assert!(read_series::<f64, _>("a,b,c,d\n".as_bytes()).is_err());
    }

    #[test]
    fn unknown_kpi_and_short_rows() {
        let text = "city,kpi,month,value\nA,FOO,2020-01,1\nA,OCC,2020-01\n";
        let d: Ingested<f64> = read_series(text.as_bytes()).unwrap();
        assert_eq!(d.failures.len(), 2);
        assert_eq!(d.failures[0].kpi, "FOO");
        assert_eq!(d.failures[1].line, Some(3));
    }
}
