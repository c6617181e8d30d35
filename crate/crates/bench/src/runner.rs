//! Monte-Carlo sweeps: one instance per (cell, realization), every
//! requested algorithm on the same instance, averaged per cell.

use std::time::Instant;

use anyhow::{Context, Result};
use ehs::common::schedule_scsb2;
use ehs::model::{generate_instance, Dims};
use ehs::multi::{schedule_mcmb_with_mode, schedule_mcsb_with_mode, schedule_scmb};
use ehs::oracle::solve_exact_with_mode;
use ehs::scsb::schedule_scsb1;
use ehs::{EnergyMode, GenerationParams, Instance};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, Cell, ExperimentConfig};
use crate::stats::{splitmix64, Summary};

pub const CSV_HEADER: [&str; 9] = [
    "figure",
    "axis_name",
    "axis_value",
    "extra_axes",
    "algorithm",
    "mean",
    "stderr",
    "realizations",
    "wall_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub figure: String,
    pub axis_name: String,
    pub axis_value: f64,
    pub extra_axes: String,
    pub algorithm: String,
    pub mean: f64,
    pub stderr: f64,
    pub realizations: usize,
    pub wall_ms: u64,
}

/// Seed of one realization: a hash of the base seed, the full axis tuple
/// and the realization index. Other cells never share or shift it.
pub fn cell_seed(base: u64, cell: &Cell, realization: usize) -> u64 {
    let parts = [
        cell.users as u64,
        cell.bs as u64,
        cell.channels as u64,
        cell.slots as u64,
        cell.lambda.to_bits(),
        realization as u64,
    ];
    parts.iter().fold(splitmix64(base), |h, &p| splitmix64(h ^ p))
}

pub fn energy_mode(cfg: &ExperimentConfig) -> EnergyMode {
    if cfg.energy_per_slot_mode {
        EnergyMode::PerSlot
    } else {
        EnergyMode::PerChannel
    }
}

/// Users served by `alg` on `inst`.
pub fn served_by(alg: Algorithm, inst: &Instance, cfg: &ExperimentConfig) -> Result<usize> {
    let mode = energy_mode(cfg);
    let served = match alg {
        Algorithm::Scsb1 => schedule_scsb1(inst)?.served_count,
        Algorithm::Scsb2 => schedule_scsb2(inst)?.served_count,
        Algorithm::Scmb => schedule_scmb(inst)?.served_total,
        Algorithm::Mcsb => schedule_mcsb_with_mode(inst, mode)?.served_count,
        Algorithm::Mcmb => schedule_mcmb_with_mode(inst, mode)?.served_total,
        Algorithm::Oracle => solve_exact_with_mode(inst, &cfg.oracle_limits, mode)?.optimum,
    };
    Ok(served)
}

pub fn instance_for(cfg: &ExperimentConfig, cell: &Cell, realization: usize) -> Result<Instance> {
    let params = GenerationParams {
        seed: cell_seed(cfg.seed, cell, realization),
        poisson_rate: cell.lambda,
        deadline_mode: cfg.deadline_mode,
        ..cfg.generation.clone()
    };
    let dims = Dims::new(cell.users, cell.bs, cell.channels, cell.slots);
    Ok(generate_instance(&params, dims)?)
}

/// Runs the whole sweep. Rows come out sorted by figure and axis value;
/// within one axis value they keep the order of the config's cells and
/// algorithms. Thread scheduling never changes the output.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for cell in cfg.cells() {
        // served[r][a], nanos[r][a]
        let per_run: Vec<(Vec<usize>, Vec<u128>)> = (0..cfg.realizations)
            .into_par_iter()
            .map(|r| -> Result<(Vec<usize>, Vec<u128>)> {
                let inst = instance_for(cfg, &cell, r)?;
                let mut served = Vec::with_capacity(cfg.algorithms.len());
                let mut nanos = Vec::with_capacity(cfg.algorithms.len());
                for &alg in &cfg.algorithms {
                    let start = Instant::now();
                    served.push(
                        served_by(alg, &inst, cfg)
                            .with_context(|| format!("{alg} on cell {cell:?}, realization {r}"))?,
                    );
                    nanos.push(start.elapsed().as_nanos());
                }
                Ok((served, nanos))
            })
            .collect::<Result<_>>()?;

        for (a, &alg) in cfg.algorithms.iter().enumerate() {
            let summary = Summary::of(per_run.iter().map(|(s, _)| s[a] as f64));
            let wall_ms = if cfg.record_wall_time {
                (per_run.iter().map(|(_, n)| n[a]).sum::<u128>() / 1_000_000) as u64
            } else {
                0
            };
            rows.push(ResultRow {
                figure: cfg.figure.clone(),
                axis_name: cfg.axis.name().to_owned(),
                axis_value: cell.value(cfg.axis),
                extra_axes: cfg.extra_axes(&cell),
                algorithm: alg.name().to_owned(),
                mean: summary.mean,
                stderr: summary.stderr,
                realizations: summary.count,
                wall_ms,
            });
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// Stable sort by (figure, axis name, axis value).
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.figure
            .cmp(&b.figure)
            .then(a.axis_name.cmp(&b.axis_name))
            .then(a.axis_value.total_cmp(&b.axis_value))
    });
}

/// Serializes rows with a fixed number format so equal runs give equal bytes.
pub fn to_csv(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.figure.clone(),
            r.axis_name.clone(),
            format!("{}", r.axis_value),
            r.extra_axes.clone(),
            r.algorithm.clone(),
            format!("{:.6}", r.mean),
            format!("{:.6}", r.stderr),
            r.realizations.to_string(),
            r.wall_ms.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Parses a results CSV; errors name the offending one-based line.
pub fn from_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = reader.headers().context("reading CSV header")?.clone();
    if !headers.is_empty() && headers.iter().ne(CSV_HEADER) {
        anyhow::bail!("line 1: expected header {}", CSV_HEADER.join(","));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<ResultRow>().enumerate() {
        let row = record.with_context(|| format!("line {}: malformed row", i + 2))?;
        rows.push(row);
    }
    Ok(rows)
}
