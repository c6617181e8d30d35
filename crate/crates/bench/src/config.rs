//! Experiment configuration, read from JSON.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use ehs::model::DeadlineMode;
use ehs::oracle::OracleLimits;
use ehs::GenerationParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "SCSB1")]
    Scsb1,
    #[serde(rename = "SCSB2")]
    Scsb2,
    #[serde(rename = "SCMB")]
    Scmb,
    #[serde(rename = "MCSB")]
    Mcsb,
    #[serde(rename = "MCMB")]
    Mcmb,
    #[serde(rename = "ORACLE")]
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Scsb1,
        Algorithm::Scsb2,
        Algorithm::Scmb,
        Algorithm::Mcsb,
        Algorithm::Mcmb,
        Algorithm::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Scsb1 => "SCSB1",
            Algorithm::Scsb2 => "SCSB2",
            Algorithm::Scmb => "SCMB",
            Algorithm::Mcsb => "MCSB",
            Algorithm::Mcmb => "MCMB",
            Algorithm::Oracle => "ORACLE",
        }
    }

    /// Why this algorithm cannot run on a cell, if it cannot.
    pub fn unsupported(self, bs: usize, channels: usize, deadlines: DeadlineMode) -> Option<String> {
        match self {
            Algorithm::Scsb1 if bs != 1 || channels != 1 => Some(format!("needs B=1 and C=1, got B={bs} C={channels}")),
            Algorithm::Scsb2 if bs != 1 || channels != 1 => Some(format!("needs B=1 and C=1, got B={bs} C={channels}")),
            Algorithm::Scsb2 if deadlines != DeadlineMode::Common => Some("needs common deadlines".into()),
            Algorithm::Scmb if channels != 1 => Some(format!("needs C=1, got C={channels}")),
            Algorithm::Mcsb if bs != 1 => Some(format!("needs B=1, got B={bs}")),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .with_context(|| format!("unknown algorithm {s:?}"))
    }
}

/// The swept quantity drawn on the x axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "U")]
    Users,
    #[serde(rename = "B")]
    Bs,
    #[serde(rename = "C")]
    Channels,
    #[serde(rename = "T")]
    Slots,
    #[serde(rename = "lambda")]
    Lambda,
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::Users, Axis::Bs, Axis::Channels, Axis::Slots, Axis::Lambda];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Users => "U",
            Axis::Bs => "B",
            Axis::Channels => "C",
            Axis::Slots => "T",
            Axis::Lambda => "lambda",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::Users => "Number of users (U)",
            Axis::Bs => "Number of BSs (B)",
            Axis::Channels => "Number of channels (C)",
            Axis::Slots => "Frame length (T)",
            Axis::Lambda => "Energy arrival rate (λ)",
        }
    }

    pub fn from_name(name: &str) -> Option<Axis> {
        Axis::ALL.into_iter().find(|a| a.name() == name)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub plots: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Figure id written to every row, e.g. `fig3`.
    pub figure: String,
    pub axis: Axis,
    pub users: Vec<usize>,
    #[serde(default = "one")]
    pub bs: Vec<usize>,
    #[serde(default = "one")]
    pub channels: Vec<usize>,
    #[serde(default = "ten")]
    pub slots: Vec<usize>,
    #[serde(default = "half")]
    pub lambda: Vec<f64>,
    pub realizations: usize,
    #[serde(default)]
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub deadline_mode: DeadlineMode,
    /// Charge one energy unit per busy slot instead of per busy channel.
    #[serde(default)]
    pub energy_per_slot_mode: bool,
    /// Wall time makes the CSV non-reproducible, so it is opt-in; `wall_ms`
    /// is `0` otherwise.
    #[serde(default)]
    pub record_wall_time: bool,
    #[serde(default)]
    pub oracle_limits: OracleLimits,
    /// Radio and traffic parameters; `seed`, `poisson_rate` and
    /// `deadline_mode` are overridden per cell.
    #[serde(default)]
    pub generation: GenerationParams,
    #[serde(default)]
    pub output: Outputs,
}

fn one() -> Vec<usize> {
    vec![1]
}

fn ten() -> Vec<usize> {
    vec![10]
}

fn half() -> Vec<f64> {
    vec![0.5]
}

/// One point of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub users: usize,
    pub bs: usize,
    pub channels: usize,
    pub slots: usize,
    pub lambda: f64,
}

impl Cell {
    pub fn value(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Users => self.users as f64,
            Axis::Bs => self.bs as f64,
            Axis::Channels => self.channels as f64,
            Axis::Slots => self.slots as f64,
            Axis::Lambda => self.lambda,
        }
    }

    pub fn format(&self, axis: Axis) -> String {
        format!("{}", self.value(axis))
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Checks everything that can fail before any instance is drawn.
    pub fn validate(&self) -> Result<()> {
        if self.figure.trim().is_empty() || self.figure.contains(['/', '\\', ',']) {
            bail!("figure id {:?} must be non-empty without separators or commas", self.figure);
        }
        if self.realizations == 0 {
            bail!("realizations must be at least 1");
        }
        if self.algorithms.is_empty() {
            bail!("no algorithms requested");
        }
        for (name, empty, zero) in [
            ("users", self.users.is_empty(), self.users.contains(&0)),
            ("bs", self.bs.is_empty(), self.bs.contains(&0)),
            ("channels", self.channels.is_empty(), self.channels.contains(&0)),
            ("slots", self.slots.is_empty(), self.slots.contains(&0)),
        ] {
            if empty || zero {
                bail!("axis {name} needs at least one positive value");
            }
        }
        if self.lambda.is_empty() || self.lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
            bail!("axis lambda needs non-negative finite values");
        }
        self.generation.validate().context("generation parameters")?;
        for cell in self.cells() {
            for &alg in &self.algorithms {
                if let Some(why) = alg.unsupported(cell.bs, cell.channels, self.deadline_mode) {
                    bail!("{alg} cannot run at U={} B={} C={} T={}: {why}", cell.users, cell.bs, cell.channels, cell.slots);
                }
                if alg == Algorithm::Oracle
                    && !self.oracle_limits.admits(cell.users, cell.bs, cell.channels, cell.slots)
                {
                    bail!(
                        "ORACLE requested at U={} B={} C={} T={}, beyond limits U<={} B<={} C<={} T<={}",
                        cell.users,
                        cell.bs,
                        cell.channels,
                        cell.slots,
                        self.oracle_limits.max_users,
                        self.oracle_limits.max_bs,
                        self.oracle_limits.max_channels,
                        self.oracle_limits.max_slots
                    );
                }
            }
        }
        Ok(())
    }

    /// Every combination of the axis values, in declaration order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &users in &self.users {
            for &bs in &self.bs {
                for &channels in &self.channels {
                    for &slots in &self.slots {
                        for &lambda in &self.lambda {
                            out.push(Cell {
                                users,
                                bs,
                                channels,
                                slots,
                                lambda,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// The non-x axis values of a cell, e.g. `B=1;C=1;T=10;lambda=0.5`.
    pub fn extra_axes(&self, cell: &Cell) -> String {
        Axis::ALL
            .into_iter()
            .filter(|&a| a != self.axis)
            .map(|a| format!("{}={}", a.name(), cell.format(a)))
            .collect::<Vec<_>>()
            .join(";")
    }
}
