//! Semi-parametric bootstrap goodness-of-fit test for the fitted power law.
//!
//! Each synthetic dataset mixes parametric draws from the fitted power law
//! above the estimated lower bound with empirical resamples of the observed
//! body below it, is refitted with the full scan, and contributes its own KS
//! statistic. The p-value is the fraction of replicates whose KS exceeds the
//! observed one.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::exec::{replicate_map, replicate_rng};
use crate::model::sample_powerlaw;
use crate::powerlaw::{scan_xmin, PowerLawFit};

pub(crate) const STAGE_GOF: u64 = 2;

/// Default replicate count; odd so achievable p-values avoid exact ties at
/// the decision threshold.
pub const DEFAULT_GOF_REPLICATIONS: usize = 4_999;

/// Rejection threshold for the power-law hypothesis.
pub const GOF_THRESHOLD: f64 = 0.1;

/// Outcome of the goodness-of-fit test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub ks_observed: f64,
    pub replications: usize,
    /// Replicates with KS strictly greater than the observed value.
    pub exceed_count: usize,
    pub p_value: f64,
    /// True when p_value < 0.1.
    pub reject: bool,
    /// Replicate refits that failed and were dropped.
    pub dropped: usize,
    /// Set when the original data had no body below x_min_hat, so every
    /// synthetic observation is a parametric draw.
    pub all_parametric: bool,
}

/// Run the semi-parametric bootstrap GOF test. `fit` must come from `data`
/// (same `min_tail` is reused for the replicate refits). Deterministic in
/// `seed` for any worker count.
pub fn gof_test(
    data: &Dataset,
    fit: &PowerLawFit,
    replications: usize,
    seed: u64,
    min_tail: usize,
    workers: usize,
) -> Result<GofResult> {
    if replications < 99 {
        return Err(Error::Input(format!(
            "need at least 99 replications, got {replications}"
        )));
    }
    let n = data.len();
    let body = data.body(fit.x_min_hat);
    let params = fit.params();
    let tail_prob = fit.n_tail as f64 / n as f64;
    let all_parametric = body.is_empty();

    let replicate_ks: Vec<Option<f64>> = replicate_map(replications, workers, |i| {
        let mut rng = replicate_rng(seed, STAGE_GOF, i as u64);
        let mut synthetic: Vec<f64> = (0..n)
            .map(|_| {
                // Independent tail/body coin per observation.
                if body.is_empty() || rng.random::<f64>() < tail_prob {
                    let u: f64 = rng.random();
                    sample_powerlaw(&params, u)
                } else {
                    body[rng.random_range(0..body.len())]
                }
            })
            .collect();
        synthetic.sort_by(|a, b| a.total_cmp(b));
        scan_xmin(&synthetic, min_tail).ok().map(|(_, _, ks, _)| ks)
    });

    let mut exceed_count = 0usize;
    let mut dropped = 0usize;
    for ks in &replicate_ks {
        match ks {
            Some(ks) if *ks > fit.ks => exceed_count += 1,
            Some(_) => {}
            None => dropped += 1,
        }
    }
    let p_value = exceed_count as f64 / replications as f64;
    Ok(GofResult {
        ks_observed: fit.ks,
        replications,
        exceed_count,
        p_value,
        reject: p_value < GOF_THRESHOLD,
        dropped,
        all_parametric,
    })
}
