//! Joint estimation of the power-law exponent and the lower bound of
//! power-law behaviour.
//!
//! The lower bound is chosen by scanning the observed values and keeping the
//! candidate whose fitted model minimizes the Kolmogorov-Smirnov distance to
//! the empirical tail. Standard errors come from a full nonparametric
//! bootstrap that re-estimates both parameters per replicate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::exec::{replicate_map, replicate_rng};
use crate::model::{powerlaw_ccdf_from_logs, PowerLawParams};

pub(crate) const STAGE_SE: u64 = 1;

/// Joint power-law fit: exponent, lower bound, tail size and KS distance,
/// with bootstrap standard errors once attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha_hat: f64,
    pub x_min_hat: f64,
    pub n_tail: usize,
    pub n_total: usize,
    pub ks: f64,
    pub se_alpha: Option<f64>,
    pub se_x_min: Option<f64>,
}

impl PowerLawFit {
    pub fn params(&self) -> PowerLawParams {
        PowerLawParams { alpha: self.alpha_hat, x_min: self.x_min_hat }
    }

    pub fn tail_fraction(&self) -> f64 {
        self.n_tail as f64 / self.n_total as f64
    }
}

/// Closed-form exponent MLE over a tail slice:
/// alpha = 1 + n / sum(ln(x_i) - ln(x_min)).
pub(crate) fn alpha_mle(tail: &[f64], x_min: f64) -> Result<f64> {
    if tail.len() < 2 {
        return Err(Error::Input(format!(
            "need at least 2 tail observations, got {}",
            tail.len()
        )));
    }
    let ln_x_min = x_min.ln();
    let sum: f64 = tail.iter().map(|x| x.ln() - ln_x_min).sum();
    if sum <= 0.0 {
        return Err(Error::DegenerateData);
    }
    Ok(1.0 + tail.len() as f64 / sum)
}

/// Exponent MLE on the observations of `data` with x >= x_min.
pub fn fit_alpha(data: &Dataset, x_min: f64) -> Result<f64> {
    alpha_mle(data.tail(x_min), x_min)
}

/// KS distance between the empirical tail CDF and the fitted model CDF,
/// both conditional on x >= x_min. `tail_ln` holds ln of the sorted tail
/// values; discrepancies are taken at both step edges of each distinct value.
fn ks_from_logs(tail_ln: &[f64], alpha: f64, ln_x_min: f64) -> f64 {
    let m = tail_ln.len() as f64;
    let mut ks = 0.0f64;
    let mut i = 0;
    while i < tail_ln.len() {
        let lx = tail_ln[i];
        let mut j = i + 1;
        while j < tail_ln.len() && tail_ln[j] == lx {
            j += 1;
        }
        let p = 1.0 - powerlaw_ccdf_from_logs(alpha, lx, ln_x_min);
        let s_lo = i as f64 / m;
        let s_hi = j as f64 / m;
        ks = ks.max((s_lo - p).abs()).max((s_hi - p).abs());
        i = j;
    }
    ks
}

/// KS distance for `data` against the power law `params`.
pub fn ks_statistic(data: &Dataset, params: &PowerLawParams) -> Result<f64> {
    let tail = data.tail(params.x_min);
    if tail.is_empty() {
        return Err(Error::Input("empty tail".into()));
    }
    let tail_ln: Vec<f64> = tail.iter().map(|x| x.ln()).collect();
    Ok(ks_from_logs(&tail_ln, params.alpha, params.x_min.ln()))
}

/// Scan result over a sorted slice; shared by the public fitters and the
/// bootstrap stages.
pub(crate) fn scan_xmin(sorted: &[f64], min_tail: usize) -> Result<(f64, f64, f64, usize)> {
    if min_tail < 4 {
        return Err(Error::Input(format!("min_tail must be >= 4, got {min_tail}")));
    }
    let n = sorted.len();
    if n < min_tail {
        return Err(Error::Input(format!(
            "need at least min_tail = {min_tail} observations, got {n}"
        )));
    }
    let ln_x: Vec<f64> = sorted.iter().map(|x| x.ln()).collect();

    let mut best: Option<(f64, f64, f64, usize)> = None;
    let mut i = 0;
    while i + min_tail <= n {
        // Candidates are the distinct observed values.
        if i > 0 && sorted[i] == sorted[i - 1] {
            i += 1;
            continue;
        }
        let ln_v = ln_x[i];
        let m = n - i;
        let sum: f64 = ln_x[i..].iter().map(|lx| lx - ln_v).sum();
        if sum <= 0.0 {
            i += 1;
            continue;
        }
        let alpha = 1.0 + m as f64 / sum;
        let ks = ks_from_logs(&ln_x[i..], alpha, ln_v);
        // Strict improvement keeps the smaller x_min (larger tail) on ties.
        if best.map_or(true, |(_, _, best_ks, _)| ks < best_ks) {
            best = Some((sorted[i], alpha, ks, m));
        }
        i += 1;
    }
    best.ok_or(Error::DegenerateData)
}

/// Joint (x_min, alpha) estimate minimizing the KS distance over candidate
/// lower bounds with tail size >= `min_tail`. Standard errors are not
/// filled in; see [`bootstrap_se`].
pub fn fit_xmin(data: &Dataset, min_tail: usize) -> Result<PowerLawFit> {
    let (x_min_hat, alpha_hat, ks, n_tail) = scan_xmin(data.values(), min_tail)?;
    Ok(PowerLawFit {
        alpha_hat,
        x_min_hat,
        n_tail,
        n_total: data.len(),
        ks,
        se_alpha: None,
        se_x_min: None,
    })
}

/// Power-law fit with a user-imposed lower bound (no scan).
pub fn fit_fixed_xmin(data: &Dataset, x_min: f64) -> Result<PowerLawFit> {
    let alpha_hat = fit_alpha(data, x_min)?;
    let ks = ks_statistic(data, &PowerLawParams { alpha: alpha_hat, x_min })?;
    Ok(PowerLawFit {
        alpha_hat,
        x_min_hat: x_min,
        n_tail: data.tail(x_min).len(),
        n_total: data.len(),
        ks,
        se_alpha: None,
        se_x_min: None,
    })
}

/// Bootstrap standard errors of (alpha_hat, x_min_hat).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSe {
    pub se_alpha: f64,
    pub se_x_min: f64,
    pub replications: usize,
    /// Replicates whose scan failed (degenerate resample) and were dropped.
    pub dropped: usize,
    /// Set when more than 1% of replicates dropped.
    pub warning: bool,
}

fn sample_sd(values: &[f64]) -> f64 {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0)).sqrt()
}

/// Resample the full dataset with replacement `replications` times, re-run
/// the fit on each replicate, and report the standard deviations of the two
/// estimates. `hold_x_min` skips the per-replicate scan and re-estimates
/// only the exponent at the given fixed lower bound. Deterministic in
/// `seed` for any worker count.
pub fn bootstrap_se(
    data: &Dataset,
    replications: usize,
    seed: u64,
    min_tail: usize,
    hold_x_min: Option<f64>,
    workers: usize,
) -> Result<BootstrapSe> {
    if replications < 2 {
        return Err(Error::Input(format!(
            "need at least 2 replications, got {replications}"
        )));
    }
    let values = data.values();
    let n = values.len();

    let estimates: Vec<Option<(f64, f64)>> = replicate_map(replications, workers, |i| {
        let mut rng = replicate_rng(seed, STAGE_SE, i as u64);
        let mut resample: Vec<f64> = (0..n).map(|_| values[rng.random_range(0..n)]).collect();
        resample.sort_by(|a, b| a.total_cmp(b));
        match hold_x_min {
            Some(xm) => {
                let start = resample.partition_point(|&v| v < xm);
                alpha_mle(&resample[start..], xm).ok().map(|a| (a, xm))
            }
            None => scan_xmin(&resample, min_tail)
                .ok()
                .map(|(xm, alpha, _, _)| (alpha, xm)),
        }
    });

    let kept: Vec<(f64, f64)> = estimates.iter().flatten().copied().collect();
    let dropped = replications - kept.len();
    if kept.len() < 2 {
        return Err(Error::Input(
            "bootstrap failed: fewer than 2 usable replicates".into(),
        ));
    }
    let alphas: Vec<f64> = kept.iter().map(|e| e.0).collect();
    let xmins: Vec<f64> = kept.iter().map(|e| e.1).collect();
    Ok(BootstrapSe {
        se_alpha: sample_sd(&alphas),
        se_x_min: sample_sd(&xmins),
        replications,
        dropped,
        warning: dropped * 100 > replications,
    })
}
