use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "densmat", version, about = "Random density matrix experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Sample density matrices; write spectra and moment estimates.
    Sample(Args),
    /// Eigenvalue density on a grid (n = 2 or 3) with a Monte Carlo overlay.
    Density(Args),
    /// Compare the three exact moment routes.
    Moments(Args),
    /// Empirical spectral measure against the Marchenko-Pastur law.
    Mp(Args),
    /// Largest eigenvalue and its edge fluctuations.
    Edge(Args),
    /// Distance to the maximally mixed state and mean entropy as k grows.
    Firstmodel(Args),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sample(_) => "sample",
            Command::Density(_) => "density",
            Command::Moments(_) => "moments",
            Command::Mp(_) => "mp",
            Command::Edge(_) => "edge",
            Command::Firstmodel(_) => "firstmodel",
        }
    }

    pub fn args(&self) -> &Args {
        match self {
            Command::Sample(a)
            | Command::Density(a)
            | Command::Moments(a)
            | Command::Mp(a)
            | Command::Edge(a)
            | Command::Firstmodel(a) => a,
        }
    }
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by all subcommands; each subcommand reads the ones it needs.
#[derive(clap::Args, Debug, Clone)]
pub struct Args {
    /// System dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Environment dimension.
    #[arg(long, conflicts_with = "c")]
    pub k: Option<usize>,
    /// Aspect ratio k/n; k is rounded to the nearest integer.
    #[arg(long)]
    pub c: Option<f64>,
    /// Largest moment order.
    #[arg(long = "q-max")]
    pub q_max: Option<usize>,
    /// Monte Carlo draws (per size for sweeps).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; never changes results.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Tracy-Widom GUE table (`s cdf` per line).
    #[arg(long = "tw-table")]
    pub tw_table: Option<PathBuf>,
    /// Comma-separated system dimensions for sweeps.
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Comma-separated environment dimensions.
    #[arg(long = "k-list", value_delimiter = ',')]
    pub k_list: Option<Vec<usize>>,
    /// Histogram bins.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Grid resolution (points per unit length).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Largest accepted |MC mean − exact| in standard errors.
    #[arg(long = "threshold-zscore")]
    pub threshold_zscore: Option<f64>,
    /// Largest accepted relative discrepancy between exact routes.
    #[arg(long = "threshold-rel")]
    pub threshold_rel: Option<f64>,
    /// Largest accepted Kolmogorov-Smirnov distance.
    #[arg(long = "threshold-ks")]
    pub threshold_ks: Option<f64>,
    /// Largest accepted relative error of the mean edge location.
    #[arg(long = "threshold-edge")]
    pub threshold_edge: Option<f64>,
    /// Smallest accepted chi-square p-value.
    #[arg(long = "threshold-pvalue")]
    pub threshold_pvalue: Option<f64>,
    /// Largest accepted |grid mass − 1|.
    #[arg(long = "threshold-mass")]
    pub threshold_mass: Option<f64>,
    /// Largest accepted relative change of the edge sd across sizes.
    #[arg(long = "threshold-sd")]
    pub threshold_sd: Option<f64>,
}

/// Fully resolved parameters of a run; embedded in every output file.
#[derive(Serialize, Clone, Debug, Default)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tw_table: Option<PathBuf>,
    pub master_seed: u64,
    pub workers: usize,
    pub format: Format,
    pub thresholds: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn new(command: &str, args: &Args) -> Result<Self> {
        if args.workers == 0 {
            bail!("--workers must be positive");
        }
        for (flag, v) in [
            ("--n", args.n),
            ("--k", args.k),
            ("--q-max", args.q_max),
            ("--samples", args.samples),
            ("--bins", args.bins),
            ("--grid", args.grid),
        ] {
            if v == Some(0) {
                bail!("{flag} must be positive");
            }
        }
        if let Some(c) = args.c {
            if !(c > 0.0 && c.is_finite()) {
                bail!("--c must be positive, got {c}");
            }
        }
        for list in [&args.n_list, &args.k_list].into_iter().flatten() {
            if list.is_empty() || list.contains(&0) {
                bail!("dimension lists must be non-empty and positive");
            }
        }
        Ok(Self {
            command: command.to_string(),
            master_seed: args.seed,
            workers: args.workers,
            format: args.format,
            ..Self::default()
        })
    }

    /// Records a threshold and returns its value.
    pub fn threshold(&mut self, name: &str, value: Option<f64>, default: f64) -> f64 {
        let v = value.unwrap_or(default);
        self.thresholds.insert(name.to_string(), v);
        v
    }
}

/// `k` from `--k`, else from `--c` and `n`, else `default`.
pub fn resolve_k(args: &Args, n: usize, default: usize) -> Result<usize> {
    match (args.k, args.c) {
        (Some(k), _) => Ok(k),
        (None, Some(c)) => k_from_ratio(n, c),
        (None, None) => Ok(default),
    }
}

pub fn k_from_ratio(n: usize, c: f64) -> Result<usize> {
    let k = (c * n as f64).round();
    if k < 1.0 {
        bail!("c = {c} with n = {n} gives k < 1");
    }
    Ok(k as usize)
}
