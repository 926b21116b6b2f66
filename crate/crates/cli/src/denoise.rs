use std::path::{Path, PathBuf};
use std::time::Instant;

use bgn::mnist::write_pgm;
use bgn::{binarize, error_rate, flip_noise, relax, IntegratorConfig, NoiseSpec, StateVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::DenoiseArgs;
use crate::derive_seed;
use crate::error::{read_file, write_file, CliError, Result};
use crate::report::{elapsed_ms, mean, write_json};
use crate::source::{load_patterns, SourceEcho};
use crate::weights_file;

pub const REPORT_FILE: &str = "denoise_report.json";
pub const SNAPSHOT_DIR: &str = "snapshots";

#[derive(Debug, Clone, Serialize)]
pub struct DenoiseEcho {
    pub weights: String,
    pub flip_count: usize,
    pub base_seed: u64,
    pub trials: usize,
    pub step_size: f64,
    pub max_steps: usize,
    pub convergence_tol: f64,
    pub snapshot_stride: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecallEntry {
    pub pattern_id: usize,
    pub label: Option<u8>,
    pub trial: usize,
    pub noise_seed: u64,
    pub noisy_error_rate: f64,
    pub error_rate: f64,
    pub converged: bool,
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PatternSummary {
    pub pattern_id: usize,
    pub label: Option<u8>,
    pub mean_error_rate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DenoiseReport {
    pub command: &'static str,
    pub source: SourceEcho,
    pub config: DenoiseEcho,
    pub entries: Vec<RecallEntry>,
    pub per_pattern: Vec<PatternSummary>,
    pub mean_error_rate: f64,
    pub snapshots_written: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

fn parse_shape(s: &str) -> Result<(usize, usize)> {
    let bad = || CliError::Usage(format!("--shape expects WIDTHxHEIGHT, got `{s}`"));
    let (w, h) = s.split_once('x').ok_or_else(bad)?;
    Ok((w.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?))
}

pub fn snapshot_path(out: &Path, pattern_id: usize, trial: usize, step: usize) -> PathBuf {
    out.join(SNAPSHOT_DIR)
        .join(format!("pattern{pattern_id}_trial{trial}_step{step}.pgm"))
}

pub fn run(args: &DenoiseArgs) -> Result<DenoiseReport> {
    let start = Instant::now();
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let cfg = IntegratorConfig {
        step_size: args.dt,
        max_steps: args.max_steps,
        convergence_tol: args.tol,
        snapshot_stride: args.stride,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let weights =
        weights_file::decode(&read_file(&args.weights)?).map_err(|source| CliError::Weights {
            path: args.weights.clone(),
            source,
        })?;
    let set = load_patterns(&args.source)?;
    let n = set.neurons();
    if weights.size() != n {
        return Err(CliError::Mismatch(format!(
            "weights have {} neurons, patterns have {n}",
            weights.size()
        )));
    }
    if args.flip > n {
        return Err(CliError::Usage(format!(
            "--flip {} exceeds the {n} pattern entries",
            args.flip
        )));
    }

    let shape = match &args.shape {
        Some(s) => Some(parse_shape(s)?),
        None => set.shape,
    };
    if let Some((w, h)) = shape {
        if w * h != n {
            return Err(CliError::Mismatch(format!(
                "shape {w}x{h} does not cover {n} neurons"
            )));
        }
    }
    let snapshot_shape = shape.filter(|_| !args.no_snapshots);

    let jobs: Vec<(usize, usize)> = (0..set.patterns.len())
        .flat_map(|p| (0..args.trials).map(move |t| (p, t)))
        .collect();

    let results: Vec<Result<(RecallEntry, usize)>> = jobs
        .par_iter()
        .map(|&(pi, trial)| {
            let target = &set.patterns[pi];
            let noise_seed = derive_seed(args.seed, (pi * args.trials + trial) as u64);
            let noisy = flip_noise(
                target,
                &NoiseSpec {
                    flip_count: args.flip,
                    rng_seed: noise_seed,
                },
            )?;
            let r = relax(&StateVector::from(&noisy), &weights, &cfg)?;
            let recalled = binarize(&r.final_state);

            let mut written = 0;
            if let Some((w, h)) = snapshot_shape {
                for snap in &r.trajectory {
                    let mut buf = Vec::new();
                    write_pgm(&snap.state, w, h, &mut buf).expect("shape checked above");
                    write_file(
                        snapshot_path(&args.out, set.ids[pi], trial, snap.step),
                        &buf,
                    )?;
                    written += 1;
                }
            }
            Ok((
                RecallEntry {
                    pattern_id: set.ids[pi],
                    label: target.label(),
                    trial,
                    noise_seed,
                    noisy_error_rate: error_rate(&noisy, target)?,
                    error_rate: error_rate(&recalled, target)?,
                    converged: r.converged,
                    steps: r.steps,
                },
                written,
            ))
        })
        .collect();

    let mut entries = Vec::with_capacity(results.len());
    let mut snapshots_written = 0;
    for r in results {
        let (entry, written) = r?;
        entries.push(entry);
        snapshots_written += written;
    }

    let per_pattern = set
        .ids
        .iter()
        .zip(&set.patterns)
        .map(|(&id, p)| PatternSummary {
            pattern_id: id,
            label: p.label(),
            mean_error_rate: mean(
                entries
                    .iter()
                    .filter(|e| e.pattern_id == id)
                    .map(|e| e.error_rate),
            ),
        })
        .collect();

    let report = DenoiseReport {
        command: "denoise",
        source: set.echo.clone(),
        config: DenoiseEcho {
            weights: args.weights.display().to_string(),
            flip_count: args.flip,
            base_seed: args.seed,
            trials: args.trials,
            step_size: cfg.step_size,
            max_steps: cfg.max_steps,
            convergence_tol: cfg.convergence_tol,
            snapshot_stride: cfg.snapshot_stride,
        },
        mean_error_rate: mean(entries.iter().map(|e| e.error_rate)),
        entries,
        per_pattern,
        snapshots_written,
        duration_ms: elapsed_ms(start, args.timing),
    };
    write_json(&args.out, REPORT_FILE, &report)?;

    if let Some(max) = args.assert_max_error {
        if report.mean_error_rate > max {
            return Err(CliError::Assertion(format!(
                "mean error rate {:.5} exceeds {max}",
                report.mean_error_rate
            )));
        }
    }
    Ok(report)
}
