use std::time::Instant;

use bgn::{cd_train, hebbian_weights, TrainConfig, WeightMatrix};
use serde::Serialize;

use crate::args::{Rule, TrainArgs};
use crate::error::{write_file, CliError, Result};
use crate::report::{elapsed_ms, write_json};
use crate::source::{load_patterns, SourceEcho};
use crate::weights_file;

pub const WEIGHTS_FILE: &str = "weights.bgn";
pub const REPORT_FILE: &str = "train_report.json";

#[derive(Debug, Clone, Serialize)]
pub struct TrainEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cd_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cd_step_size: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop_threshold: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainReport {
    pub command: &'static str,
    pub rule: &'static str,
    pub source: SourceEcho,
    pub neurons: usize,
    pub pattern_ids: Vec<usize>,
    pub labels: Vec<Option<u8>>,
    pub config: TrainEcho,
    pub epochs_run: usize,
    pub history: Vec<f64>,
    pub final_delta_norm: Option<f64>,
    pub weights_file: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

fn reject_for_hebb(args: &TrainArgs) -> Result<()> {
    let cd_only = [
        ("--epochs", args.epochs.is_some()),
        ("--eta", args.eta.is_some()),
        ("--cd-order", args.cd_order.is_some()),
        ("--init-scale", args.init_scale.is_some()),
        ("--dt", args.dt.is_some()),
        ("--stop-threshold", args.stop_threshold.is_some()),
    ];
    match cd_only.iter().find(|(_, set)| *set) {
        Some((flag, _)) => Err(CliError::Usage(format!("{flag} only applies to --rule cd"))),
        None => Ok(()),
    }
}

/// Hebbian scale used when `--beta` is absent: `p/N`, which turns the
/// outer-product sum into `(1/N) Σ_k ξ(k) ξ(k)ᵀ` and keeps Euler at dt=0.1
/// stable for any network size.
pub fn default_beta(patterns: usize, neurons: usize) -> f64 {
    patterns as f64 / neurons as f64
}

pub fn cd_config(args: &TrainArgs) -> TrainConfig {
    let d = TrainConfig::default();
    TrainConfig {
        learning_rate: args.eta.unwrap_or(d.learning_rate),
        epochs: args.epochs.unwrap_or(d.epochs),
        cd_order: args.cd_order.unwrap_or(d.cd_order),
        hebb_beta: d.hebb_beta,
        init_scale: args.init_scale.unwrap_or(d.init_scale),
        rng_seed: args.seed,
        cd_step_size: args.dt.unwrap_or(d.cd_step_size),
        stop_threshold: args.stop_threshold,
    }
}

pub fn run(args: &TrainArgs) -> Result<TrainReport> {
    let start = Instant::now();
    let set = load_patterns(&args.source)?;
    let n = set.neurons();

    let (weights, config, history): (WeightMatrix, TrainEcho, Vec<f64>) = match args.rule {
        Rule::Hebb => {
            reject_for_hebb(args)?;
            let beta = args
                .beta
                .unwrap_or_else(|| default_beta(set.patterns.len(), n));
            let w = hebbian_weights(&set.patterns, beta)?;
            let echo = TrainEcho {
                beta: Some(beta),
                eta: None,
                epochs: None,
                cd_order: None,
                cd_step_size: None,
                init_scale: None,
                init_seed: None,
                stop_threshold: None,
            };
            (w, echo, Vec::new())
        }
        Rule::Cd => {
            if args.beta.is_some() {
                return Err(CliError::Usage("--beta only applies to --rule hebb".into()));
            }
            let cfg = cd_config(args);
            let out = cd_train(&set.patterns, &cfg)?;
            let echo = TrainEcho {
                beta: None,
                eta: Some(cfg.learning_rate),
                epochs: Some(cfg.epochs),
                cd_order: Some(cfg.cd_order),
                cd_step_size: Some(cfg.cd_step_size),
                init_scale: Some(cfg.init_scale),
                init_seed: Some(cfg.rng_seed),
                stop_threshold: cfg.stop_threshold,
            };
            (out.weights, echo, out.history)
        }
    };

    write_file(args.out.join(WEIGHTS_FILE), &weights_file::encode(&weights))?;
    let report = TrainReport {
        command: "train",
        rule: args.rule.name(),
        source: set.echo.clone(),
        neurons: n,
        pattern_ids: set.ids.clone(),
        labels: set.labels(),
        config,
        epochs_run: history.len(),
        final_delta_norm: history.last().copied(),
        history,
        weights_file: WEIGHTS_FILE,
        duration_ms: elapsed_ms(start, args.timing),
    };
    write_json(&args.out, REPORT_FILE, &report)?;
    Ok(report)
}
