use std::ops::Range;
use std::time::Instant;

use bgn::{
    binarize, cd_train, cd_update, hebbian_weights, relax, BipolarPattern, IntegratorConfig,
    StateVector, TrainConfig, WeightMatrix,
};
use serde::Serialize;

use crate::args::{CompareArgs, FamilyKind};
use crate::error::{CliError, Result};
use crate::report::{elapsed_ms, write_json};
use crate::source::{family_patterns, SourceEcho};
use crate::train::default_beta;

pub const REPORT_FILE: &str = "compare_report.json";

#[derive(Debug, Clone, Serialize)]
pub struct PatternRecall {
    pub pattern: usize,
    pub error_rate: f64,
    /// Error on the block active in every pattern (overlap family only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shared_block_error: Option<f64>,
    /// Error on this pattern's own distinguishing block.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub own_block_error: Option<f64>,
    /// Error over all distinguishing blocks together.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinct_blocks_error: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleResult {
    pub rule: &'static str,
    pub recalls: Vec<PatternRecall>,
    pub all_exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareEcho {
    pub beta: f64,
    pub eta: f64,
    pub epochs: usize,
    pub cd_order: usize,
    pub cd_step_size: f64,
    pub init_scale: f64,
    pub init_seed: u64,
    pub stop_threshold: f64,
    pub recall_step_size: f64,
    pub recall_max_steps: usize,
    pub recall_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub command: &'static str,
    pub source: SourceEcho,
    pub config: CompareEcho,
    pub hebb: RuleResult,
    pub cd: RuleResult,
    pub cd_epochs_run: usize,
    pub cd_history: Vec<f64>,
    /// Largest weight change from one more CD pass over the trained weights.
    pub cd_stationarity_delta: f64,
    /// Some pattern lost part of its own distinguishing block under Hebb.
    pub hebb_failed: bool,
    pub cd_succeeded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

fn block_error(a: &BipolarPattern, b: &BipolarPattern, range: Range<usize>) -> f64 {
    let len = range.len();
    let diff = range.filter(|&i| a.values()[i] != b.values()[i]).count();
    diff as f64 / len as f64
}

struct Blocks {
    shared: Range<usize>,
    distinct: Range<usize>,
    n_distinct: usize,
}

fn recall_all(
    rule: &'static str,
    weights: &WeightMatrix,
    patterns: &[BipolarPattern],
    blocks: Option<&Blocks>,
    cfg: &IntegratorConfig,
) -> Result<RuleResult> {
    let mut recalls = Vec::with_capacity(patterns.len());
    for (k, p) in patterns.iter().enumerate() {
        let r = relax(&StateVector::from(p), weights, cfg)?;
        let got = binarize(&r.final_state);
        let own = blocks.map(|b| {
            let s = b.distinct.start + k * b.n_distinct;
            s..s + b.n_distinct
        });
        recalls.push(PatternRecall {
            pattern: k,
            error_rate: bgn::error_rate(&got, p)?,
            shared_block_error: blocks.map(|b| block_error(&got, p, b.shared.clone())),
            own_block_error: own.map(|r| block_error(&got, p, r)),
            distinct_blocks_error: blocks.map(|b| block_error(&got, p, b.distinct.clone())),
            converged: r.converged,
        });
    }
    Ok(RuleResult {
        rule,
        all_exact: recalls.iter().all(|r| r.error_rate == 0.0),
        recalls,
    })
}

pub fn run(args: &CompareArgs) -> Result<CompareReport> {
    let start = Instant::now();
    let set = family_patterns(&args.family, FamilyKind::Overlap)?;
    let n = set.neurons();
    let f = &args.family;
    let blocks = matches!(set.echo, SourceEcho::Overlap { .. }).then(|| Blocks {
        shared: 0..f.n_shared,
        distinct: f.n_shared..f.n_shared + f.count * f.n_distinct,
        n_distinct: f.n_distinct,
    });

    let recall_cfg = IntegratorConfig {
        step_size: args.dt,
        max_steps: args.max_steps,
        convergence_tol: args.tol,
        snapshot_stride: args.max_steps.max(1),
    };
    recall_cfg
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let beta = args
        .beta
        .unwrap_or_else(|| default_beta(set.patterns.len(), n));
    let hebb_w = hebbian_weights(&set.patterns, beta)?;

    let train_cfg = TrainConfig {
        learning_rate: args.eta,
        epochs: args.epochs,
        cd_order: args.cd_order,
        hebb_beta: beta,
        init_scale: args.init_scale,
        rng_seed: args.seed,
        cd_step_size: args.dt,
        stop_threshold: Some(args.stop_threshold),
    };
    let trained = cd_train(&set.patterns, &train_cfg)?;

    let mut stationarity = 0.0f64;
    for p in &set.patterns {
        let (_, delta) = cd_update(&trained.weights, p, &train_cfg)?;
        stationarity = stationarity.max(delta);
    }

    let hebb = recall_all("hebb", &hebb_w, &set.patterns, blocks.as_ref(), &recall_cfg)?;
    let cd = recall_all(
        "cd",
        &trained.weights,
        &set.patterns,
        blocks.as_ref(),
        &recall_cfg,
    )?;

    let hebb_failed = match &blocks {
        Some(_) => hebb
            .recalls
            .iter()
            .any(|r| r.own_block_error.unwrap_or(0.0) > 0.0),
        None => !hebb.all_exact,
    };

    let report = CompareReport {
        command: "compare",
        source: set.echo.clone(),
        config: CompareEcho {
            beta,
            eta: args.eta,
            epochs: args.epochs,
            cd_order: args.cd_order,
            cd_step_size: args.dt,
            init_scale: args.init_scale,
            init_seed: args.seed,
            stop_threshold: args.stop_threshold,
            recall_step_size: recall_cfg.step_size,
            recall_max_steps: recall_cfg.max_steps,
            recall_tol: recall_cfg.convergence_tol,
        },
        hebb_failed,
        cd_succeeded: cd.all_exact,
        hebb,
        cd,
        cd_epochs_run: trained.history.len(),
        cd_history: trained.history,
        cd_stationarity_delta: stationarity,
        duration_ms: elapsed_ms(start, args.timing),
    };
    if let Some(dir) = &args.out {
        write_json(dir, REPORT_FILE, &report)?;
    }

    if args.assert && !(report.hebb_failed && report.cd_succeeded) {
        return Err(CliError::Assertion(format!(
            "expected Hebb to fail and CD to succeed, got hebb_failed={} cd_succeeded={}",
            report.hebb_failed, report.cd_succeeded
        )));
    }
    Ok(report)
}
