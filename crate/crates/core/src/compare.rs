//! Likelihood-ratio comparison of the fitted power law against each
//! alternative, and the final verdict classification.
//!
//! Non-nested alternatives use the normalized log-likelihood ratio, which is
//! asymptotically standard normal; the cut-off family nests the pure power
//! law, so twice the (non-positive) log-likelihood ratio is referred to a
//! chi-squared distribution with one degree of freedom.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mle::{fit_mle, FitOutcome, ModelFamily};
use crate::model::PowerLawParams;
use crate::model::TailModel;
use crate::special::{chi2_sf_1df, normal_two_sided_p};

/// The four rival families, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    LogNormal,
    Exponential,
    StretchedExp,
    CutoffPowerLaw,
}

impl Alternative {
    pub const ALL: [Alternative; 4] = [
        Alternative::LogNormal,
        Alternative::Exponential,
        Alternative::StretchedExp,
        Alternative::CutoffPowerLaw,
    ];

    pub fn family(self) -> ModelFamily {
        match self {
            Alternative::LogNormal => ModelFamily::LogNormal,
            Alternative::Exponential => ModelFamily::Exponential,
            Alternative::StretchedExp => ModelFamily::StretchedExp,
            Alternative::CutoffPowerLaw => ModelFamily::CutoffPowerLaw,
        }
    }

    pub fn is_nested(self) -> bool {
        matches!(self, Alternative::CutoffPowerLaw)
    }

    pub fn label(self) -> &'static str {
        match self {
            Alternative::LogNormal => "log-normal",
            Alternative::Exponential => "exponential",
            Alternative::StretchedExp => "stretched exponential",
            Alternative::CutoffPowerLaw => "power law with cut-off",
        }
    }
}

/// Which statistic a row carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum StatKind {
    Nlr,
    Lr,
}

/// One row of the comparison block: the statistic against a single
/// alternative, or "nc" when that alternative's MLE did not converge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub alternative: Alternative,
    pub kind: StatKind,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub nc: bool,
}

impl ComparisonRow {
    fn nc(alternative: Alternative) -> Self {
        let kind = if alternative.is_nested() { StatKind::Lr } else { StatKind::Nlr };
        ComparisonRow { alternative, kind, statistic: None, p_value: None, nc: true }
    }
}

/// Final classification of power-law support, following the report taxonomy:
/// `none` (GOF rejected), `with_cutoff` (exponential cut-off favoured),
/// `good` (every rival significantly worse), `moderate` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Good,
    Moderate,
    WithCutoff,
    None,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Good => "good",
            Verdict::Moderate => "moderate",
            Verdict::WithCutoff => "with_cutoff",
            Verdict::None => "none",
        }
    }
}

/// Vuong test for a non-nested alternative. Both models must share the tail
/// and its lower bound. Positive statistic favours the power law.
pub fn vuong_nonnested(
    tail: &[f64],
    pl: &PowerLawParams,
    alt: &FitOutcome,
) -> Result<ComparisonRow> {
    let (alt_model, alternative) = match alt.model() {
        Some(m) => (m, alternative_of(m)?),
        None => {
            return Err(Error::Input(
                "non-converged alternative: emit an nc row instead".into(),
            ))
        }
    };
    if alternative.is_nested() {
        return Err(Error::Input("cut-off family requires the nested test".into()));
    }
    let pl_model = TailModel::PowerLaw(*pl);
    let n = tail.len() as f64;
    let diffs: Vec<f64> = tail
        .iter()
        .map(|&x| pl_model.log_pdf_unchecked(x) - alt_model.log_pdf_unchecked(x))
        .collect();
    let lr: f64 = diffs.iter().sum();
    let mean = lr / n;
    // Population (divide-by-n) standard deviation, matching the n^(-1/2)
    // normalization of the statistic.
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n;
    let sigma = var.sqrt();
    // Relative threshold: identical pointwise likelihoods can leave a
    // rounding-level residual variance instead of an exact zero.
    if sigma <= 1e-12 * (1.0 + mean.abs()) {
        return Err(Error::DegenerateComparison);
    }
    let nlr = lr / (n.sqrt() * sigma);
    Ok(ComparisonRow {
        alternative,
        kind: StatKind::Nlr,
        statistic: Some(nlr),
        p_value: Some(normal_two_sided_p(nlr)),
        nc: false,
    })
}

fn alternative_of(m: &TailModel) -> Result<Alternative> {
    match m {
        TailModel::LogNormal(_) => Ok(Alternative::LogNormal),
        TailModel::Exponential(_) => Ok(Alternative::Exponential),
        TailModel::StretchedExp(_) => Ok(Alternative::StretchedExp),
        TailModel::CutoffPowerLaw(_) => Ok(Alternative::CutoffPowerLaw),
        TailModel::PowerLaw(_) => {
            Err(Error::Input("power law is not an alternative to itself".into()))
        }
    }
}

/// Nested test against the cut-off family: LR = ll(power law) - ll(cut-off)
/// is never positive; the p-value is the upper chi-squared(1) tail at -2 LR.
pub fn vuong_nested(tail: &[f64], pl: &PowerLawParams, cutoff: &FitOutcome) -> Result<ComparisonRow> {
    let ll_cut = match cutoff.log_likelihood() {
        Some(ll) => ll,
        None => return Ok(ComparisonRow::nc(Alternative::CutoffPowerLaw)),
    };
    let pl_model = TailModel::PowerLaw(*pl);
    let ll_pl: f64 = tail.iter().map(|&x| pl_model.log_pdf_unchecked(x)).sum();
    let lr = ll_pl - ll_cut;
    if lr > 1e-8 {
        return Err(Error::Internal(format!(
            "nesting violated: LR = {lr} > 0 (cut-off optimizer bug)"
        )));
    }
    let lr = lr.min(0.0);
    Ok(ComparisonRow {
        alternative: Alternative::CutoffPowerLaw,
        kind: StatKind::Lr,
        statistic: Some(lr),
        p_value: Some(chi2_sf_1df(-2.0 * lr)),
        nc: false,
    })
}

/// Fit all four alternatives on the same tail and run the matching test for
/// each, in fixed column order. A non-converged MLE yields an nc row.
pub fn compare_all(tail: &[f64], pl: &PowerLawParams) -> Result<Vec<ComparisonRow>> {
    Alternative::ALL
        .iter()
        .map(|&alt| {
            let outcome = fit_mle(alt.family(), tail, pl.x_min)?;
            if !outcome.converged() {
                return Ok(ComparisonRow::nc(alt));
            }
            if alt.is_nested() {
                vuong_nested(tail, pl, &outcome)
            } else {
                vuong_nonnested(tail, pl, &outcome)
            }
        })
        .collect()
}

/// Inputs to [`classify`] that come from the GOF stage.
#[derive(Debug, Clone, Copy)]
pub struct GofSummary {
    pub p_value: f64,
}

/// Classification rule:
/// 1. GOF p < 0.1 -> `none`;
/// 2. else a converged cut-off row with p < 0.1 -> `with_cutoff`;
/// 3. else every non-nested row significant (p < 0.1) with the power law
///    favoured (statistic > 0) -> `good`;
/// 4. else `moderate`.
///
/// With `strict_alternatives`, a non-nested rival that is significantly
/// better (p < 0.1 and statistic < 0) downgrades the verdict to `none`.
pub fn classify(gof_p: f64, rows: &[ComparisonRow], strict_alternatives: bool) -> Verdict {
    if gof_p < 0.1 {
        return Verdict::None;
    }
    if let Some(cut) = rows
        .iter()
        .find(|r| r.alternative == Alternative::CutoffPowerLaw)
    {
        if !cut.nc && cut.p_value.is_some_and(|p| p < 0.1) {
            return Verdict::WithCutoff;
        }
    }
    let nonnested: Vec<&ComparisonRow> = rows
        .iter()
        .filter(|r| !r.alternative.is_nested())
        .collect();
    let all_worse = !nonnested.is_empty()
        && nonnested.iter().all(|r| {
            !r.nc
                && r.p_value.is_some_and(|p| p < 0.1)
                && r.statistic.is_some_and(|s| s > 0.0)
        });
    if all_worse {
        return Verdict::Good;
    }
    if strict_alternatives {
        let beaten = nonnested.iter().any(|r| {
            !r.nc
                && r.p_value.is_some_and(|p| p < 0.1)
                && r.statistic.is_some_and(|s| s < 0.0)
        });
        if beaten {
            return Verdict::None;
        }
    }
    Verdict::Moderate
}
