//! Seeded benchmark sweeps over instances and parameter sets.
//!
//! Run `r` of every `(instance, parameter set)` row uses seed
//! `base_seed + r`, so a row can be re-run in isolation and the report does
//! not depend on how many worker threads executed it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, PsoError};
use crate::jobshop::{
    decode_position_with, jssp_objective_with, JsspInstance, Schedule, ScheduleBuilder,
};
use crate::orlib::InstanceRecord;
use crate::pso::{run_pso, ParameterSet, PsoConfig, RunResult};

/// Fixed CSV column order of the summary report.
pub const CSV_HEADER: &str =
    "instance,label,n_runs,best,avg,stddev,best_known,abs_dev,pct_dev,avg_ms_per_run";

/// A labelled parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub label: String,
    pub params: ParameterSet,
}

impl ParamSpec {
    /// Accepts a preset label (`kennedy`, `pedersen`, `apso`) or four
    /// comma-separated values `a1,a2,w,b`.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let text = text.trim();
        if let Some(params) = ParameterSet::preset(text) {
            return Ok(Self {
                label: text.to_ascii_lowercase(),
                params,
            });
        }
        if !text.contains(',') {
            return Err(ConfigError::UnknownLabel {
                label: text.to_string(),
                known: ParameterSet::PRESET_LABELS.join(", "),
            });
        }
        let values: Vec<f64> = text
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| ConfigError::ParamValues(text.to_string()))?;
        let [a1, a2, w, b] = values[..] else {
            return Err(ConfigError::ParamValues(text.to_string()));
        };
        let params = ParameterSet::new(a1, a2, w, b)?;
        Ok(Self {
            label: text.to_string(),
            params,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n_runs: usize,
    pub base_seed: u64,
    pub pso: PsoConfig,
    /// Measure wall-clock time per run. Off yields byte-identical reports.
    pub timing: bool,
    pub builder: ScheduleBuilder,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n_runs: 100,
            base_seed: 0,
            pso: PsoConfig::default(),
            timing: true,
            builder: ScheduleBuilder::default(),
        }
    }
}

impl BenchConfig {
    /// The desk-scale preset: 20 runs per row.
    pub fn quick() -> Self {
        Self {
            n_runs: 20,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub label: String,
    pub params: ParameterSet,
    pub n_runs: usize,
    pub best: u64,
    pub avg: f64,
    pub stddev: f64,
    pub best_known: Option<u64>,
    /// `avg - best_known`.
    pub abs_dev: Option<f64>,
    /// `100 * abs_dev / best_known`.
    pub pct_dev: Option<f64>,
    pub avg_ms_per_run: f64,
    /// Best makespan of each run, in run order.
    pub runs: Vec<u64>,
    pub seeds: Vec<u64>,
}

impl ReportRow {
    fn from_runs(
        record: &InstanceRecord,
        spec: &ParamSpec,
        seeds: Vec<u64>,
        runs: Vec<u64>,
        total_ms: f64,
    ) -> Self {
        let n = runs.len();
        let best = runs.iter().copied().min().unwrap_or(0);
        let avg = runs.iter().sum::<u64>() as f64 / n as f64;
        let stddev = if n > 1 {
            let ss: f64 = runs.iter().map(|&r| (r as f64 - avg).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let abs_dev = record.best_known.map(|bk| avg - bk as f64);
        let pct_dev = record
            .best_known
            .zip(abs_dev)
            .map(|(bk, d)| 100.0 * d / bk as f64);
        Self {
            instance: record.name.clone(),
            label: spec.label.clone(),
            params: spec.params,
            n_runs: n,
            best,
            avg,
            stddev,
            best_known: record.best_known,
            abs_dev,
            pct_dev,
            avg_ms_per_run: total_ms / n as f64,
            runs,
            seeds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelTotals {
    /// Sum of `abs_dev` over rows with a best-known value.
    pub total_abs_dev: f64,
    pub total_avg: f64,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchConfig,
    pub rows: Vec<ReportRow>,
    pub totals: BTreeMap<String, LabelTotals>,
}

/// Best schedule of one swarm run on `inst`.
pub fn solve(
    inst: &JsspInstance,
    params: &ParameterSet,
    config: &PsoConfig,
    builder: ScheduleBuilder,
) -> Result<(Schedule, RunResult), PsoError> {
    let (mut objective, space) = jssp_objective_with(inst, builder);
    let result = run_pso(&mut objective, &space, config, params)?;
    let schedule = decode_position_with(&result.best_position, inst, builder)
        .expect("swarm positions have the instance's dimension");
    Ok((schedule, result))
}

fn solve_makespan(
    inst: &JsspInstance,
    params: &ParameterSet,
    config: &PsoConfig,
    builder: ScheduleBuilder,
) -> Result<u64, PsoError> {
    let (mut objective, space) = jssp_objective_with(inst, builder);
    let result = run_pso(&mut objective, &space, config, params)?;
    Ok(result.best_value as u64)
}

/// Runs `config.n_runs` seeded runs for every `(instance, parameter set)`
/// pair on the current rayon pool.
pub fn run_benchmark(
    suite: &[InstanceRecord],
    sets: &[ParamSpec],
    config: &BenchConfig,
) -> Result<BenchmarkReport, ConfigError> {
    config.pso.validate()?;
    if config.n_runs == 0 {
        return Err(ConfigError::ZeroCount("n_runs"));
    }
    for spec in sets {
        spec.params.validate()?;
    }
    let seeds: Vec<u64> = (0..config.n_runs as u64)
        .map(|r| config.base_seed.wrapping_add(r))
        .collect();

    let tasks: Vec<(usize, usize, u64)> = (0..suite.len())
        .flat_map(|i| {
            (0..sets.len()).flat_map(move |s| (0..config.n_runs).map(move |r| (i, s, r as u64)))
        })
        .collect();
    let outcomes = tasks
        .par_iter()
        .map(|&(i, s, r)| {
            let pso = config.pso.with_seed(config.base_seed.wrapping_add(r));
            let started = config.timing.then(Instant::now);
            let makespan =
                solve_makespan(&suite[i].instance, &sets[s].params, &pso, config.builder)?;
            let ms = started.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3);
            Ok((makespan, ms))
        })
        .collect::<Result<Vec<(u64, f64)>, PsoError>>()?;

    let mut rows = Vec::with_capacity(suite.len() * sets.len());
    for (chunk, (record, spec)) in outcomes
        .chunks(config.n_runs)
        .zip(suite.iter().flat_map(|r| sets.iter().map(move |s| (r, s))))
    {
        let runs = chunk.iter().map(|(m, _)| *m).collect();
        let total_ms = chunk.iter().map(|(_, t)| *t).sum();
        rows.push(ReportRow::from_runs(
            record,
            spec,
            seeds.clone(),
            runs,
            total_ms,
        ));
    }
    Ok(BenchmarkReport::from_rows(*config, rows))
}

impl BenchmarkReport {
    pub fn from_rows(config: BenchConfig, rows: Vec<ReportRow>) -> Self {
        let mut totals: BTreeMap<String, LabelTotals> = BTreeMap::new();
        for row in &rows {
            let t = totals.entry(row.label.clone()).or_insert(LabelTotals {
                total_abs_dev: 0.0,
                total_avg: 0.0,
                rows: 0,
            });
            t.total_abs_dev += row.abs_dev.unwrap_or(0.0);
            t.total_avg += row.avg;
            t.rows += 1;
        }
        Self {
            config,
            rows,
            totals,
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = Vec::new();
        for row in &self.rows {
            if !labels.contains(&row.label.as_str()) {
                labels.push(&row.label);
            }
        }
        labels
    }

    pub fn row(&self, instance: &str, label: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.instance == instance && r.label == label)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.2},{:.2},{},{},{},{:.3}",
                r.instance,
                csv_field(&r.label),
                r.n_runs,
                r.best,
                r.avg,
                r.stddev,
                opt(r.best_known.map(|v| v.to_string())),
                opt(r.abs_dev.map(|v| format!("{v:.2}"))),
                opt(r.pct_dev.map(|v| format!("{v:.3}"))),
                r.avg_ms_per_run,
            );
        }
        out
    }

    /// Raw per-run results: `instance,label,run,seed,makespan`.
    pub fn runs_csv(&self) -> String {
        let mut out = String::from("instance,label,run,seed,makespan\n");
        for r in &self.rows {
            for (i, (m, s)) in r.runs.iter().zip(&r.seeds).enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.instance,
                    csv_field(&r.label),
                    i,
                    s,
                    m
                );
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Average and best makespans side by side, one column per parameter
    /// set, followed by the best-known value. Times are abstract units.
    pub fn to_table(&self) -> String {
        let labels = self.labels();
        let mut instances: Vec<&str> = Vec::new();
        for row in &self.rows {
            if !instances.contains(&row.instance.as_str()) {
                instances.push(&row.instance);
            }
        }
        let width = labels.iter().map(|l| l.len()).max().unwrap_or(0).max(10);
        let mut out = String::new();
        for (title, pick) in [
            ("Average makespan (time units)", 0usize),
            ("Best makespan (time units)", 1),
        ] {
            let _ = writeln!(out, "{title}");
            let _ = write!(out, "{:<10}", "instance");
            for l in &labels {
                let _ = write!(out, " {l:>width$}");
            }
            let _ = writeln!(out, " {:>10}", "well known");
            for inst in &instances {
                let _ = write!(out, "{inst:<10}");
                let mut known = None;
                for l in &labels {
                    match self.row(inst, l) {
                        Some(r) => {
                            known = known.or(r.best_known);
                            let cell = if pick == 0 {
                                format!("{:.2}", r.avg)
                            } else {
                                r.best.to_string()
                            };
                            let _ = write!(out, " {cell:>width$}");
                        }
                        None => {
                            let _ = write!(out, " {:>width$}", "-");
                        }
                    }
                }
                let known = known.map_or("-".to_string(), |k| k.to_string());
                let _ = writeln!(out, " {known:>10}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "Total deviation of averages from well-known values");
        for l in &labels {
            if let Some(t) = self.totals.get(*l) {
                let _ = writeln!(out, "  {l:<width$} {:.2}", t.total_abs_dev);
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
