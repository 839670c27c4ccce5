use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context};
use kpicast::forecast::holdout_mape;
use kpicast::hpo::{bayesian_search, grid_search, SearchOutcome};
use kpicast::io::{write_forecast, write_series};
use kpicast::lstm::gradcheck::gradient_check;
use kpicast::report::{EvalReport, ReportRow};
use kpicast::synthetic::{generate_city, seeded_archetypes};
use kpicast::{run_pipeline, Error, EvalMetrics, Forecast, KpiKind, Series};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{HpoMethod, RunConfig};
use crate::data::{load, slug, LoadFailure};
use crate::{Ctx, Source};

/// Series, its pipeline outcome and wall time in seconds.
type Outcome<'a> = (&'a Series, Result<(Forecast, ReportRow), Error>, f64);

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn synth(ctx: Ctx, months: Option<usize>, start: Option<String>) -> anyhow::Result<bool> {
    let mut config = ctx.config.clone();
    if let Some(m) = months {
        config.synth.months = m;
    }
    if let Some(s) = start {
        config.synth.start = s;
    }
    let start = config.start_month()?;
    for p in seeded_archetypes(ctx.seed) {
        let city = generate_city(&p, start, config.synth.months)?;
        let path = ctx.out.join(format!("{}.csv", slug(&p.name)));
        let mut w = create(&path)?;
        write_series(&mut w, &city.series())?;
        w.flush()?;
        ctx.info(format!("wrote {}", path.display()));
    }
    Ok(true)
}

#[derive(Serialize, Default)]
struct SeriesEntry {
    city: String,
    kpi: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    code: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    forecast_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epochs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_epoch: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    outliers: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

impl SeriesEntry {
    fn failed(city: &str, kpi: &str, e: &Error) -> Self {
        Self {
            city: city.into(),
            kpi: kpi.into(),
            status: "failed",
            stage: e.stage().map(Into::into),
            code: Some(e.code().into()),
            error: Some(e.to_string()),
            ..Self::default()
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    input: &'a str,
    config: &'a RunConfig,
    series_ok: usize,
    series_failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings_file: Option<&'static str>,
    series: Vec<SeriesEntry>,
}

fn evaluate(r: &Forecast) -> Result<ReportRow, Error> {
    let (a, f) = r.scored_pairs();
    let m = EvalMetrics::compute(&a, &f).map_err(|e| e.at_stage("evaluate"))?;
    ReportRow::new(r.city.clone(), r.kind, a.len(), m).map_err(|e| e.at_stage("evaluate"))
}

pub fn run(ctx: Ctx, source: &Source, with_timings: bool) -> anyhow::Result<bool> {
    let loaded = load(&ctx, source)?;
    let pipeline = &ctx.config.pipeline;
    let total = loaded.series.len();
    let results: Vec<Outcome> = loaded
        .series
        .par_iter()
        .map(|s| {
            let t = Instant::now();
            let r = run_pipeline(s, pipeline).and_then(|f| evaluate(&f).map(|row| (f, row)));
            (s, r, t.elapsed().as_secs_f64())
        })
        .collect();

    let mut entries = Vec::new();
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for (i, (s, result, secs)) in results.into_iter().enumerate() {
        let kpi = s.kind().as_str();
        timings.push((s.city(), kpi, secs));
        match result {
            Ok((f, row)) => {
                let rel = format!("forecasts/{}_{}.csv", slug(s.city()), kpi);
                let mut w = create(&ctx.out.join(&rel))?;
                write_forecast(&mut w, &f)?;
                w.flush()?;
                ctx.info(format!(
                    "[{}/{total}] {}/{kpi}: MAPE {:.2}% ({})",
                    i + 1,
                    s.city(),
                    row.mape,
                    row.category
                ));
                entries.push(SeriesEntry {
                    city: s.city().into(),
                    kpi: kpi.into(),
                    status: "ok",
                    forecast_file: Some(rel),
                    epochs: Some(f.history.epochs()),
                    best_epoch: Some(f.history.best_epoch),
                    outliers: f.outliers.iter().map(ToString::to_string).collect(),
                    warnings: f.warnings.clone(),
                    ..SeriesEntry::default()
                });
                rows.push(row);
            }
            Err(e) => {
                ctx.info(format!(
                    "[{}/{total}] {}/{kpi}: failed: {e}",
                    i + 1,
                    s.city()
                ));
                entries.push(SeriesEntry::failed(s.city(), kpi, &e));
            }
        }
    }
    if with_timings {
        let mut w = csv::Writer::from_writer(create(&ctx.out.join("timings.csv"))?);
        w.write_record(["city", "kpi", "seconds"])?;
        for (city, kpi, secs) in &timings {
            w.write_record([*city, *kpi, &format!("{secs:.3}")])?;
        }
        w.flush()?;
    }
    for LoadFailure { file, failure } in loaded.failures {
        ctx.info(format!(
            "{}/{}: not loaded: {}",
            failure.city, failure.kpi, failure.error
        ));
        entries.push(SeriesEntry {
            file,
            line: failure.line,
            stage: Some("ingest".into()),
            ..SeriesEntry::failed(&failure.city, &failure.kpi, &failure.error)
        });
    }

    let report = EvalReport::from_rows(rows)?;
    let mut w = create(&ctx.out.join("report.csv"))?;
    report.write_csv(&mut w)?;
    w.flush()?;
    let text = report.render_text();
    write_text(&ctx.out.join("report.txt"), &text)?;
    if !ctx.quiet {
        println!("{text}");
    }

    let failed = entries.iter().filter(|e| e.status == "failed").count();
    let manifest = Manifest {
        tool: "kpicast",
        version: env!("CARGO_PKG_VERSION"),
        seed: ctx.seed,
        input: &loaded.label,
        config: &ctx.config,
        series_ok: entries.len() - failed,
        series_failed: failed,
        timings_file: with_timings.then_some("timings.csv"),
        series: entries,
    };
    let json = serde_json::to_string_pretty(&manifest)? + "\n";
    write_text(&ctx.out.join("manifest.json"), &json)?;
    if failed > 0 {
        eprintln!(
            "{failed} series failed; see {}",
            ctx.out.join("manifest.json").display()
        );
    }
    Ok(failed == 0)
}

fn pick_series(
    series: Vec<Series>,
    city: Option<&str>,
    kpi: Option<KpiKind>,
) -> anyhow::Result<Series> {
    let mut matching: Vec<Series> = series
        .into_iter()
        .filter(|s| city.is_none_or(|c| s.city() == c) && kpi.is_none_or(|k| s.kind() == k))
        .collect();
    match matching.len() {
        1 => Ok(matching.remove(0)),
        0 => bail!("no series matches the requested --city/--kpi"),
        n => bail!("{n} series match; narrow the choice with --city and --kpi"),
    }
}

fn write_trials(path: &Path, outcome: &SearchOutcome) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record([
        "index",
        "lookback",
        "hidden_size",
        "learning_rate",
        "epochs",
        "score",
        "error",
    ])?;
    for t in &outcome.trials {
        let (score, error) = match &t.score {
            Ok(s) => (s.to_string(), String::new()),
            Err(e) => (String::new(), e.clone()),
        };
        w.write_record([
            t.index.to_string(),
            t.params.lookback.to_string(),
            t.params.hidden_size.to_string(),
            t.params.learning_rate.to_string(),
            t.params.epochs.to_string(),
            score,
            error,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn hpo(
    ctx: Ctx,
    source: &Source,
    city: Option<String>,
    kpi: Option<String>,
    method: Option<HpoMethod>,
    budget: Option<usize>,
) -> anyhow::Result<bool> {
    let kind = kpi.map(|k| k.parse::<KpiKind>()).transpose()?;
    let loaded = load(&ctx, source)?;
    let series = pick_series(loaded.series, city.as_deref(), kind)?;
    let hpo = &ctx.config.hpo;
    let method = method.unwrap_or(hpo.method);
    let base = ctx.config.pipeline.clone();
    let objective = |p: &kpicast::hpo::HyperParams| {
        let mut cfg = base.clone();
        cfg.training = p.apply(&base.training);
        holdout_mape(&series, &cfg)
    };
    ctx.info(format!(
        "searching {}/{} with {method:?}",
        series.city(),
        series.kind()
    ));
    let outcome = match method {
        HpoMethod::Grid => grid_search(&hpo.space, objective),
        HpoMethod::Bayes => bayesian_search(
            &hpo.space,
            budget.unwrap_or(hpo.budget),
            ctx.seed,
            objective,
        ),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(Error::NoValidTrial) => {
            eprintln!("error: {}", Error::NoValidTrial.code());
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    write_trials(&ctx.out.join("trials.csv"), &outcome)?;

    let mut best = ctx.config.clone();
    best.pipeline.training = outcome.best.params.apply(&best.pipeline.training);
    write_text(&ctx.out.join("best_config.toml"), &best.to_toml()?)?;
    let p = outcome.best.params;
    ctx.info(format!(
        "{} trials; best #{}: lookback {} hidden {} lr {} epochs {} -> validation MAPE {:.3}%",
        outcome.trials.len(),
        outcome.best.index,
        p.lookback,
        p.hidden_size,
        p.learning_rate,
        p.epochs,
        outcome.best.value().unwrap_or(f64::NAN)
    ));
    Ok(true)
}

pub fn gradcheck(ctx: &Ctx, models: usize, epsilon: f64, corrupt: bool) -> anyhow::Result<bool> {
    let r = gradient_check(ctx.seed, models, epsilon, corrupt)?;
    println!(
        "max relative error {:.6e} over {} models ({} parameters)",
        r.max_rel_error, r.models, r.parameters
    );
    Ok(r.passed())
}

pub fn report(path: &Path, out: Option<&Path>) -> anyhow::Result<bool> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let report = EvalReport::read_csv(f).with_context(|| format!("reading {}", path.display()))?;
    let text = report.render_text();
    print!("{text}");
    if let Some(dir) = out {
        write_text(&dir.join("report.txt"), &text)?;
    }
    Ok(true)
}
