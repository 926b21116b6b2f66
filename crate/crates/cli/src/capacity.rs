use bgn::{
    binarize, cd_train, error_rate, hebbian_weights, random_patterns, relax, BipolarPattern,
    IntegratorConfig, StateVector, TrainConfig, WeightMatrix,
};
use rayon::prelude::*;

use crate::args::{CapacityArgs, Rule};
use crate::derive_seed;
use crate::error::{write_file, CliError, Result};
use crate::report::mean;
use crate::train::default_beta;

pub const CSV_FILE: &str = "capacity.csv";
pub const CSV_HEADER: &str = "n,p,rule,trial,seed,error";

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityRow {
    pub n: usize,
    pub p: usize,
    pub rule: Rule,
    pub trial: usize,
    pub seed: u64,
    /// Mean clean-pattern recall error over the `p` stored patterns.
    pub error: f64,
}

pub fn to_csv(rows: &[CapacityRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.p,
            r.rule.name(),
            r.trial,
            r.seed,
            r.error
        ));
    }
    s
}

fn trial_seed(base: u64, n: usize, p: usize, trial: usize) -> u64 {
    derive_seed(
        derive_seed(derive_seed(base, n as u64), p as u64),
        trial as u64,
    )
}

fn recall_error(
    weights: &WeightMatrix,
    patterns: &[BipolarPattern],
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let mut errors = Vec::with_capacity(patterns.len());
    for p in patterns {
        let r = relax(&StateVector::from(p), weights, cfg)?;
        errors.push(error_rate(&binarize(&r.final_state), p)?);
    }
    Ok(mean(errors))
}

pub fn run(args: &CapacityArgs) -> Result<Vec<CapacityRow>> {
    if args.sizes.is_empty() || args.sizes.contains(&0) {
        return Err(CliError::Usage("--n needs positive sizes".into()));
    }
    if args.counts.is_empty() || args.counts.contains(&0) {
        return Err(CliError::Usage("--p needs positive counts".into()));
    }
    if args.rules.is_empty() || args.trials == 0 {
        return Err(CliError::Usage(
            "need at least one rule and one trial".into(),
        ));
    }
    let recall_cfg = IntegratorConfig {
        step_size: args.dt,
        max_steps: args.max_steps,
        convergence_tol: args.tol,
        snapshot_stride: args.max_steps.max(1),
    };
    recall_cfg
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let mut cells = Vec::new();
    for &n in &args.sizes {
        for &p in &args.counts {
            for trial in 0..args.trials {
                cells.push((n, p, trial));
            }
        }
    }

    let per_cell: Vec<Result<Vec<CapacityRow>>> = cells
        .par_iter()
        .map(|&(n, p, trial)| {
            let seed = trial_seed(args.seed, n, p, trial);
            let patterns = random_patterns(n, p, seed)?;
            args.rules
                .iter()
                .map(|&rule| {
                    let weights = match rule {
                        Rule::Hebb => {
                            let beta = args.beta.unwrap_or_else(|| default_beta(p, n));
                            hebbian_weights(&patterns, beta)?
                        }
                        Rule::Cd => {
                            let cfg = TrainConfig {
                                learning_rate: args.eta,
                                epochs: args.epochs,
                                cd_order: args.cd_order,
                                init_scale: args.init_scale,
                                rng_seed: seed,
                                cd_step_size: args.dt,
                                ..TrainConfig::default()
                            };
                            cd_train(&patterns, &cfg)?.weights
                        }
                    };
                    Ok(CapacityRow {
                        n,
                        p,
                        rule,
                        trial,
                        seed,
                        error: recall_error(&weights, &patterns, &recall_cfg)?,
                    })
                })
                .collect()
        })
        .collect();

    // Regroup so rows run n, p, rule, trial.
    let mut by_cell = Vec::with_capacity(per_cell.len());
    for c in per_cell {
        by_cell.push(c?);
    }
    let mut rows = Vec::with_capacity(by_cell.len() * args.rules.len());
    for chunk in by_cell.chunks(args.trials) {
        for ri in 0..args.rules.len() {
            rows.extend(chunk.iter().map(|cell| cell[ri].clone()));
        }
    }

    if let Some(dir) = &args.out {
        write_file(dir.join(CSV_FILE), to_csv(&rows).as_bytes())?;
    }
    Ok(rows)
}

/// Mean error per (n, p, rule), in row order.
pub fn summarize(rows: &[CapacityRow]) -> Vec<(usize, usize, Rule, f64)> {
    let mut out: Vec<(usize, usize, Rule, f64)> = Vec::new();
    for r in rows {
        if out
            .last()
            .is_some_and(|&(n, p, rule, _)| (n, p, rule) == (r.n, r.p, r.rule))
        {
            continue;
        }
        let m = mean(
            rows.iter()
                .filter(|x| (x.n, x.p, x.rule) == (r.n, r.p, r.rule))
                .map(|x| x.error),
        );
        out.push((r.n, r.p, r.rule, m));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rows = vec![CapacityRow {
            n: 10,
            p: 2,
            rule: Rule::Hebb,
            trial: 0,
            seed: 7,
            error: 0.25,
        }];
        assert_eq!(
            to_csv(&rows),
            "n,p,rule,trial,seed,error\n10,2,hebb,0,7,0.25\n"
        );
    }

    #[test]
    fn trial_seeds_differ() {
        assert_ne!(trial_seed(0, 100, 5, 0), trial_seed(0, 100, 5, 1));
        assert_ne!(trial_seed(0, 100, 5, 0), trial_seed(0, 100, 6, 0));
        assert_eq!(trial_seed(3, 100, 5, 2), trial_seed(3, 100, 5, 2));
    }
}
