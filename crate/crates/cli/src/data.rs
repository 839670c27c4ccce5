//! Loading series from files or the synthetic generator.

use std::collections::HashSet;
use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::Context;
use kpicast::io::{read_series, IngestFailure};
use kpicast::synthetic::{generate_city, seeded_archetypes};
use kpicast::{Error, Series};

use crate::{Ctx, Source};

/// A series that never reached the pipeline.
pub struct LoadFailure {
    pub file: Option<String>,
    pub failure: IngestFailure,
}

pub struct Loaded {
    pub label: String,
    pub series: Vec<Series>,
    pub failures: Vec<LoadFailure>,
}

fn csv_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
        .collect();
    files.sort();
    Ok(files)
}

pub fn load(ctx: &Ctx, source: &Source) -> anyhow::Result<Loaded> {
    if source.synth {
        let start = ctx.config.start_month()?;
        let mut series = Vec::new();
        for p in seeded_archetypes(ctx.seed) {
            let city = generate_city(&p, start, ctx.config.synth.months)
                .with_context(|| format!("generating {}", p.name))?;
            series.extend(city.into_series());
        }
        return Ok(Loaded {
            label: "synthetic".into(),
            series,
            failures: Vec::new(),
        });
    }

    let path = source.input.as_ref().expect("clap requires a source");
    let files = if path.is_dir() {
        csv_files(path)?
    } else {
        vec![path.clone()]
    };
    if files.is_empty() {
        anyhow::bail!("no .csv files in {}", path.display());
    }
    let mut seen = HashSet::new();
    let mut out = Loaded {
        label: path.display().to_string(),
        series: Vec::new(),
        failures: Vec::new(),
    };
    for f in files {
        let name = f
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let reader = File::open(&f).with_context(|| format!("opening {}", f.display()))?;
        let data = read_series(reader).with_context(|| format!("reading {}", f.display()))?;
        for s in data.series {
            if seen.insert((s.city().to_string(), s.kind())) {
                out.series.push(s);
            } else {
                out.failures.push(LoadFailure {
                    file: Some(name.clone()),
                    failure: IngestFailure {
                        city: s.city().to_string(),
                        kpi: s.kind().to_string(),
                        line: None,
                        error: Error::InvalidSeries(format!(
                            "{}/{} appears in more than one file",
                            s.city(),
                            s.kind()
                        )),
                    },
                });
            }
        }
        out.failures
            .extend(data.failures.into_iter().map(|failure| LoadFailure {
                file: Some(name.clone()),
                failure,
            }));
    }
    Ok(out)
}

/// File-name-safe form of a city name.
pub fn slug(city: &str) -> String {
    city.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}
