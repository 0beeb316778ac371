//! Rate experiments: a grid of sample sizes, several replicates per size,
//! a log-log fit of the mean excess risk, and CSV persistence.
//!
//! Replicates run in parallel; rows are sorted by `(n, replicate)` before
//! anything is written, so the output depends only on the config.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ovaplug::datagen::TrainingRegime;
use ovaplug::rate::{
    classify_regime, fit_rate, theoretical_exponent, ExponentAxis, RateFitResult, Setting, XAxis,
};
use ovaplug::risk::evaluate_replicate;
use ovaplug::rng::replicate_seed;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, ProblemSpec};
use crate::error::{LabError, LabResult};

/// One replicate, as persisted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicateRow {
    pub n: usize,
    pub n_e: usize,
    pub replicate: usize,
    pub oracle_excess: f64,
    pub zero_one_excess: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ReplicateRow>,
    pub fit: RateFitResult,
}

/// Runs every `(n, replicate)` pair. Replicate `r` at grid position `g`
/// uses seed `base_seed ^ (g * 10007 + r)`.
///
/// On failure the successful rows are still returned, with the first error.
pub fn run_replicates(
    problem: &ProblemSpec,
    n_grid: &[usize],
    replicates: usize,
    n_test: usize,
    base_seed: u64,
) -> (Vec<ReplicateRow>, Option<LabError>) {
    let setup = problem
        .distribution()
        .and_then(|dist| problem.training_regime(&dist).map(|regime| (dist, regime)));
    let (dist, regime) = match setup {
        Ok(v) => v,
        Err(e) => return (Vec::new(), Some(e)),
    };
    let jobs: Vec<(usize, usize, usize)> = n_grid
        .iter()
        .enumerate()
        .flat_map(|(g, &n)| (0..replicates).map(move |r| (g, n, r)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(g, n, r)| {
            let seed = replicate_seed(base_seed, g, r);
            evaluate_replicate(&dist, &regime, n, n_test, seed).map(|out| ReplicateRow {
                n,
                n_e: out.n_e,
                replicate: r,
                oracle_excess: out.risk.oracle_excess,
                zero_one_excess: out.risk.zero_one_excess,
                seed,
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut first_error = None;
    for result in results {
        match result {
            Ok(row) => rows.push(row),
            Err(e) if first_error.is_none() => first_error = Some(LabError::from(e)),
            Err(_) => {}
        }
    }
    rows.sort_by_key(|row| (row.n, row.replicate));
    (rows, first_error)
}

/// Averages the rows per grid point and fits the rate on the axis the
/// theory is stated in: `n_e` for mixing, `n` otherwise.
pub fn summarize(problem: &ProblemSpec, rows: &[ReplicateRow]) -> LabResult<RateFitResult> {
    let dist = problem.distribution()?;
    let regime = problem.training_regime(&dist)?;
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.dedup();
    let mut n_es = Vec::with_capacity(ns.len());
    let mut mean_risks = Vec::with_capacity(ns.len());
    for &n in &ns {
        let group: Vec<&ReplicateRow> = rows.iter().filter(|r| r.n == n).collect();
        n_es.push(group[0].n_e);
        mean_risks.push(group.iter().map(|r| r.oracle_excess).sum::<f64>() / group.len() as f64);
    }

    let (alpha, beta, d) = (dist.alpha(), dist.beta(), dist.dim());
    let (x_axis, axis_values, exponent, setting, c3, raw_n_slope) = match regime {
        TrainingRegime::Mixing(chain) => {
            let c3 = chain.mixing_spec().c3;
            let raw = fit_rate(&ns, &mean_risks)?;
            (
                XAxis::EffectiveN,
                n_es,
                theoretical_exponent(alpha, beta, d, ExponentAxis::MixingEffectiveN, c3),
                Setting::Mixing,
                c3,
                Some(raw.slope),
            )
        }
        _ => (
            XAxis::RawN,
            ns,
            theoretical_exponent(alpha, beta, d, ExponentAxis::DriftOrIid, f64::INFINITY),
            Setting::DriftOrIid,
            f64::INFINITY,
            None,
        ),
    };
    let fit = fit_rate(&axis_values, &mean_risks)?;
    Ok(RateFitResult {
        ns: axis_values,
        x_axis,
        mean_risks,
        fitted_slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        theoretical_exponent: exponent,
        regime: classify_regime(alpha, beta, d, setting, c3),
        raw_n_slope,
    })
}

/// `rate.csv` -> `rate.summary.csv`.
pub fn summary_path(output: &Path) -> PathBuf {
    output.with_extension("summary.csv")
}

pub fn write_rows<W: Write>(out: W, rows: &[ReplicateRow]) -> std::io::Result<W> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(["n", "n_e", "replicate", "oracle_excess", "zero_one_excess", "seed"])?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

pub fn write_summary<W: Write>(out: W, fit: &RateFitResult) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "fitted_slope",
        "intercept",
        "r_squared",
        "theoretical_exponent",
        "regime",
        "x_axis",
        "raw_n_slope",
    ])?;
    w.write_record([
        fit.fitted_slope.to_string(),
        fit.intercept.to_string(),
        fit.r_squared.to_string(),
        fit.theoretical_exponent.to_string(),
        fit.regime.as_str().to_string(),
        fit.x_axis.as_str().to_string(),
        fit.raw_n_slope.map(|s| s.to_string()).unwrap_or_default(),
    ])?;
    w.flush()
}

fn persist(output: &Path, rows: &[ReplicateRow], failure: Option<&LabError>) -> LabResult<()> {
    let io = |e| LabError::io(output, e);
    let file = File::create(output).map_err(io)?;
    let mut out = write_rows(BufWriter::new(file), rows).map_err(io)?;
    if let Some(e) = failure {
        writeln!(out, "# error: {e}").map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Runs the configured experiment and, if `output` is set, writes the
/// per-replicate CSV and the summary record next to it. A failing
/// replicate or fit leaves the rows gathered so far on disk followed by an
/// `# error:` line.
pub fn run_experiment(config: &ExperimentConfig) -> LabResult<ExperimentReport> {
    config.validate()?;
    let (rows, failure) = run_replicates(
        &config.problem,
        &config.n_grid,
        config.replicates,
        config.n_test,
        config.base_seed,
    );
    let outcome = match failure {
        Some(e) => Err(e),
        None => summarize(&config.problem, &rows),
    };
    if let Some(output) = &config.output {
        persist(output, &rows, outcome.as_ref().err())?;
        if let Ok(fit) = &outcome {
            let path = summary_path(output);
            let file = File::create(&path).map_err(|e| LabError::io(&path, e))?;
            write_summary(BufWriter::new(file), fit).map_err(|e| LabError::io(&path, e))?;
        }
    }
    outcome.map(|fit| ExperimentReport { rows, fit })
}
