//! Parametric bootstrap: each observed count `n_k` is redrawn as
//! `Poisson(n_k)`, the state is re-estimated, and a scalar statistic is
//! collected. Resample `i` uses the RNG seeded with `seed + i`, so the result
//! does not depend on the thread schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{mle_reconstruct, poisson_draw, MleOptions, TomographyRecord};
use crate::error::{Error, Result};
use crate::linalg::{fidelity, DensityMatrix};
use crate::measures::{concurrence, discord};

#[derive(Debug, Clone)]
pub enum Statistic {
    Discord,
    Concurrence,
    FidelityTo(DensityMatrix),
}

impl Statistic {
    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<f64> {
        match self {
            Statistic::Discord => Ok(discord(rho)?.discord),
            Statistic::Concurrence => concurrence(rho),
            Statistic::FidelityTo(target) => fidelity(rho, target),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapSummary {
    pub mean: f64,
    /// Sample standard deviation (`n − 1` denominator).
    pub std: f64,
    /// Statistic value of each successful resample, in resample order.
    pub values: Vec<f64>,
    /// Resamples whose reconstruction or statistic returned an error.
    pub failures: usize,
    /// Resamples whose optimizer hit the iteration cap (still included).
    pub not_converged: usize,
}

enum Outcome {
    Value { value: f64, converged: bool },
    Failed,
}

fn resample(records: &[TomographyRecord], seed: u64, statistic: &Statistic, opts: &MleOptions) -> Result<(f64, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn = Vec::with_capacity(records.len());
    for r in records {
        drawn.push(TomographyRecord {
            setting: r.setting.clone(),
            count: poisson_draw(&mut rng, r.count as f64)?,
        });
    }
    let fit = mle_reconstruct(&drawn, opts)?;
    Ok((statistic.evaluate(&fit.rho)?, fit.converged))
}

pub fn bootstrap_uncertainty(
    records: &[TomographyRecord],
    n_resamples: usize,
    seed: u64,
    statistic: &Statistic,
    opts: &MleOptions,
) -> Result<BootstrapSummary> {
    if n_resamples < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 resamples, got {n_resamples}")));
    }
    let outcomes: Vec<Outcome> = (0..n_resamples as u64)
        .into_par_iter()
        .map(|i| match resample(records, seed.wrapping_add(i), statistic, opts) {
            Ok((value, converged)) => Outcome::Value { value, converged },
            Err(_) => Outcome::Failed,
        })
        .collect();

    let mut values = Vec::with_capacity(n_resamples);
    let mut failures = 0;
    let mut not_converged = 0;
    for o in outcomes {
        match o {
            Outcome::Value { value, converged } => {
                values.push(value);
                if !converged {
                    not_converged += 1;
                }
            }
            Outcome::Failed => failures += 1,
        }
    }
    if values.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "only {} of {n_resamples} resamples could be reconstructed",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok(BootstrapSummary {
        mean,
        std: var.sqrt(),
        values,
        failures,
        not_converged,
    })
}
