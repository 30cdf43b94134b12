//! End-to-end analysis of one dataset: fit, bootstrap standard errors,
//! goodness of fit, model comparison, verdict.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::compare::{classify, compare_all, ComparisonRow, StatKind, Verdict};
use crate::data::Dataset;
use crate::error::Result;
use crate::gof::{gof_test, GofResult, DEFAULT_GOF_REPLICATIONS};
use crate::powerlaw::{bootstrap_se, fit_fixed_xmin, fit_xmin, PowerLawFit};

/// Default bootstrap replication count for standard errors.
pub const DEFAULT_SE_REPLICATIONS: usize = 10_000;

/// Default minimum tail size for an x_min candidate.
pub const DEFAULT_MIN_TAIL: usize = 10;

/// Tunable settings for one analysis run; echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub min_tail: usize,
    pub gof_reps: usize,
    pub se_reps: usize,
    pub workers: usize,
    /// Fit with a user-imposed lower bound instead of the KS scan.
    pub xmin_fixed: Option<f64>,
    /// Hold x_min fixed inside the SE bootstrap instead of re-estimating it.
    pub hold_xmin_bootstrap: bool,
    /// Run the model comparison even when the GOF test rejects.
    pub force_compare: bool,
    /// Let a significantly better non-nested rival downgrade the verdict.
    pub strict_alternatives: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            min_tail: DEFAULT_MIN_TAIL,
            gof_reps: DEFAULT_GOF_REPLICATIONS,
            se_reps: DEFAULT_SE_REPLICATIONS,
            workers: 0,
            xmin_fixed: None,
            hold_xmin_bootstrap: false,
            force_compare: false,
            strict_alternatives: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFit {
    pub alpha: f64,
    pub se_alpha: Option<f64>,
    pub x_min: f64,
    pub se_x_min: Option<f64>,
    pub n_tail: usize,
    pub n_total: usize,
    pub ks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportGof {
    pub p: f64,
    pub reps: usize,
    pub ks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportComparison {
    pub alt: String,
    pub kind: String,
    pub stat: Option<f64>,
    pub p: Option<f64>,
    pub nc: bool,
}

impl From<&ComparisonRow> for ReportComparison {
    fn from(r: &ComparisonRow) -> Self {
        ReportComparison {
            alt: match r.alternative {
                crate::compare::Alternative::LogNormal => "log_normal",
                crate::compare::Alternative::Exponential => "exponential",
                crate::compare::Alternative::StretchedExp => "stretched_exponential",
                crate::compare::Alternative::CutoffPowerLaw => "cutoff_power_law",
            }
            .into(),
            kind: match r.kind {
                StatKind::Nlr => "NLR",
                StatKind::Lr => "LR",
            }
            .into(),
            stat: r.statistic,
            p: r.p_value,
            nc: r.nc,
        }
    }
}

/// Full per-dataset report. Serializes to the documented JSON schema; field
/// order is fixed by the struct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub label: String,
    pub year: Option<i32>,
    pub fit: ReportFit,
    pub gof: ReportGof,
    pub comparisons: Vec<ReportComparison>,
    pub verdict: Verdict,
    pub seed: u64,
    pub settings: Settings,
    pub runtime_ms: u64,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// JSON with the wall clock and worker count zeroed, for comparing runs
    /// that differ only in parallelism.
    pub fn to_canonical_json(&self) -> String {
        let mut c = self.clone();
        c.runtime_ms = 0;
        c.settings.workers = 0;
        serde_json::to_string_pretty(&c).expect("report serialization cannot fail")
    }
}

/// Run the full pipeline on one dataset:
/// load -> fit -> bootstrap SEs -> GOF -> (comparisons) -> verdict.
///
/// The comparison stage runs only when the GOF test does not reject, unless
/// `force_compare` is set.
pub fn run_analyze(data: &Dataset, seed: u64, settings: &Settings) -> Result<AnalysisReport> {
    let start = Instant::now();

    let mut fit: PowerLawFit = match settings.xmin_fixed {
        Some(xm) => fit_fixed_xmin(data, xm)?,
        None => fit_xmin(data, settings.min_tail)?,
    };

    let hold = if settings.hold_xmin_bootstrap || settings.xmin_fixed.is_some() {
        Some(fit.x_min_hat)
    } else {
        None
    };
    let se = bootstrap_se(
        data,
        settings.se_reps,
        seed,
        settings.min_tail,
        hold,
        settings.workers,
    )?;
    fit.se_alpha = Some(se.se_alpha);
    fit.se_x_min = Some(se.se_x_min);

    let gof: GofResult = gof_test(
        data,
        &fit,
        settings.gof_reps,
        seed,
        settings.min_tail,
        settings.workers,
    )?;

    let rows: Vec<ComparisonRow> = if !gof.reject || settings.force_compare {
        compare_all(data.tail(fit.x_min_hat), &fit.params())?
    } else {
        Vec::new()
    };
    let verdict = if rows.is_empty() {
        Verdict::None
    } else {
        classify(gof.p_value, &rows, settings.strict_alternatives)
    };

    Ok(AnalysisReport {
        label: data.label.clone(),
        year: data.year,
        fit: ReportFit {
            alpha: fit.alpha_hat,
            se_alpha: fit.se_alpha,
            x_min: fit.x_min_hat,
            se_x_min: fit.se_x_min,
            n_tail: fit.n_tail,
            n_total: fit.n_total,
            ks: fit.ks,
        },
        gof: ReportGof { p: gof.p_value, reps: gof.replications, ks: gof.ks_observed },
        comparisons: rows.iter().map(ReportComparison::from).collect(),
        verdict,
        seed,
        settings: settings.clone(),
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

fn fmt_stat(v: Option<f64>, nc: bool) -> String {
    if nc {
        "nc".into()
    } else {
        v.map_or("-".into(), |v| format!("{v:.3}"))
    }
}

fn fmt_p(v: Option<f64>, nc: bool) -> String {
    if nc {
        "-".into()
    } else {
        v.map_or("-".into(), |v| format!("{v:.3}"))
    }
}

/// Human-readable rendering: fit summary plus the comparison block in the
/// NLR/p ... LR/p column layout.
pub fn render_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let year = report.year.map_or(String::new(), |y| format!(" ({y})"));
    writeln!(out, "Dataset: {}{year}", report.label).unwrap();
    let f = &report.fit;
    writeln!(
        out,
        "Power-law fit: alpha = {:.4} (se {}), x_min = {:.6} (se {}), tail {}/{} ({:.1}%), KS = {:.5}",
        f.alpha,
        f.se_alpha.map_or("-".into(), |v| format!("{v:.4}")),
        f.x_min,
        f.se_x_min.map_or("-".into(), |v| format!("{v:.4}")),
        f.n_tail,
        f.n_total,
        100.0 * f.n_tail as f64 / f.n_total as f64,
        f.ks
    )
    .unwrap();
    writeln!(
        out,
        "Goodness of fit: p = {:.3} ({} replications){}",
        report.gof.p,
        report.gof.reps,
        if report.gof.p < 0.1 { "  [power law rejected]" } else { "" }
    )
    .unwrap();
    if !report.comparisons.is_empty() {
        writeln!(out).unwrap();
        writeln!(
            out,
            "{:<24} {:>10} {:>8}",
            "Alternative", "NLR|LR", "p"
        )
        .unwrap();
        for c in &report.comparisons {
            let name = match c.alt.as_str() {
                "log_normal" => "Log-normal (NLR)",
                "exponential" => "Exponential (NLR)",
                "stretched_exponential" => "Stretched exp. (NLR)",
                "cutoff_power_law" => "With cut-off (LR)",
                other => other,
            };
            writeln!(
                out,
                "{:<24} {:>10} {:>8}",
                name,
                fmt_stat(c.stat, c.nc),
                fmt_p(c.p, c.nc)
            )
            .unwrap();
        }
    }
    writeln!(out).unwrap();
    writeln!(out, "Support for power law: {}", report.verdict.label()).unwrap();
    out
}

/// One row of the batch summary CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub year: Option<i32>,
    pub alpha_hat: f64,
    pub se_alpha: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub x_min_hat: f64,
    pub n_tail: usize,
    pub tail_fraction: f64,
    pub gof_p: f64,
    pub verdict: Verdict,
}

impl SummaryRow {
    pub fn from_report(r: &AnalysisReport) -> Self {
        let se = r.fit.se_alpha.unwrap_or(f64::NAN);
        SummaryRow {
            year: r.year,
            alpha_hat: r.fit.alpha,
            se_alpha: se,
            ci95_lo: r.fit.alpha - 1.96 * se,
            ci95_hi: r.fit.alpha + 1.96 * se,
            x_min_hat: r.fit.x_min,
            n_tail: r.fit.n_tail,
            tail_fraction: r.fit.n_tail as f64 / r.fit.n_total as f64,
            gof_p: r.gof.p,
            verdict: r.verdict,
        }
    }
}

/// Write summary rows as CSV with a fixed header.
pub fn write_summary_csv<W: std::io::Write>(rows: &[SummaryRow], mut w: W) -> Result<()> {
    writeln!(
        w,
        "year,alpha_hat,se_alpha,ci95_lo,ci95_hi,x_min_hat,n_tail,tail_fraction,gof_p,verdict"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.year.map_or(String::new(), |y| y.to_string()),
            r.alpha_hat,
            r.se_alpha,
            r.ci95_lo,
            r.ci95_hi,
            r.x_min_hat,
            r.n_tail,
            r.tail_fraction,
            r.gof_p,
            r.verdict.label()
        )?;
    }
    Ok(())
}
