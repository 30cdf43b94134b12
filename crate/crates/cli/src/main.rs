//! Command-line pipeline for power-law tail analysis.
//!
//! Exit codes: 0 success, 2 input/parse problems, 3 numerical failures.

use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use richtail::compare::{Alternative, ComparisonRow, StatKind};
use richtail::data::{BodySpec, SyntheticSpec};
use richtail::model::{
    CutoffPowerLawParams, ExponentialTailParams, LogNormalTailParams, PowerLawParams,
    StretchedExpTailParams, TailModel,
};
use richtail::pipeline::{render_text, write_summary_csv, SummaryRow};
use richtail::{classify, ColumnSel, Dataset, Error, InputFormat, Settings};

#[derive(Parser)]
#[command(
    name = "richtail",
    about = "Detects and validates power-law behaviour in the upper tail of positive-valued data",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Args)]
struct InputOpts {
    /// Input data file(s).
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Input file format.
    #[arg(long, value_enum, default_value = "plain")]
    format: Format,
    /// CSV column to read (name or 0-based index).
    #[arg(long)]
    column: Option<String>,
}

#[derive(Args)]
struct RunOpts {
    /// RNG seed; random (and echoed in the report) when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Goodness-of-fit bootstrap replications.
    #[arg(long, default_value_t = richtail::DEFAULT_GOF_REPLICATIONS)]
    gof_reps: usize,
    /// Standard-error bootstrap replications.
    #[arg(long, default_value_t = richtail::DEFAULT_SE_REPLICATIONS)]
    se_reps: usize,
    /// Minimum tail size for an x_min candidate.
    #[arg(long, default_value_t = richtail::DEFAULT_MIN_TAIL)]
    min_tail: usize,
    /// Fix the lower bound instead of estimating it by the KS scan.
    #[arg(long)]
    xmin: Option<f64>,
    /// Worker threads for the bootstrap stages (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, value_enum, default_value = "text")]
    output: Output,
    /// Run the model comparison even when the GOF test rejects.
    #[arg(long)]
    force_compare: bool,
    /// Hold x_min fixed inside the SE bootstrap instead of re-estimating it.
    #[arg(long)]
    hold_xmin_bootstrap: bool,
    /// Downgrade the verdict when a rival is significantly better.
    #[arg(long)]
    strict_alternatives: bool,
}

impl RunOpts {
    fn settings(&self) -> Settings {
        Settings {
            min_tail: self.min_tail,
            gof_reps: self.gof_reps,
            se_reps: self.se_reps,
            workers: self.workers,
            xmin_fixed: self.xmin,
            hold_xmin_bootstrap: self.hold_xmin_bootstrap,
            force_compare: self.force_compare,
            strict_alternatives: self.strict_alternatives,
        }
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(rand::random)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline on one or more datasets.
    Analyze {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Full pipeline over a manifest of datasets, plus a summary CSV.
    Batch {
        /// Manifest CSV with header `file,label,year[,format,column]`.
        #[arg(long)]
        manifest: PathBuf,
        /// Directory for per-dataset JSON reports.
        #[arg(long)]
        report_dir: Option<PathBuf>,
        /// Summary CSV path (stdout when omitted).
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Power-law fit and goodness-of-fit test only.
    Gof {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Power-law fit and model comparisons only (no GOF stage).
    Compare {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Generate a synthetic dataset.
    Generate {
        /// Tail family: power_law, log_normal, exponential, stretched_exponential, cutoff_power_law.
        #[arg(long, default_value = "power_law")]
        family: String,
        #[arg(long, default_value_t = 2.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        xmin: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Tail sample size.
        #[arg(long, short)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional uniform body: lo,hi,count.
        #[arg(long, value_delimiter = ',')]
        body: Option<Vec<f64>>,
        /// Output file (plain text, one value per line).
        #[arg(long)]
        out: PathBuf,
    },
    /// Export the empirical CCDF (optionally with a fitted overlay) as CSV.
    Ccdf {
        #[command(flatten)]
        input: InputOpts,
        /// Fit a power law first and add the model CCDF column.
        #[arg(long)]
        fit: bool,
        #[arg(long, default_value_t = richtail::DEFAULT_MIN_TAIL)]
        min_tail: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify verdicts from already-computed statistics.
    ///
    /// Input CSV header: label,gof_p,lognormal_nlr,lognormal_p,exponential_nlr,
    /// exponential_p,stretched_nlr,stretched_p,cutoff_lr,cutoff_p
    /// ("nc" allowed in the cutoff cells).
    ClassifyOnly {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        strict_alternatives: bool,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::DegenerateData | Error::DegenerateComparison | Error::Internal(_) => 3,
        _ => 2,
    }
}

fn load_dataset(path: &Path, format: Format, column: Option<&str>) -> richtail::Result<Dataset> {
    let fmt = match format {
        Format::Plain => InputFormat::Plain,
        Format::Csv => InputFormat::Csv,
    };
    let col = column.map(|c| match c.parse::<usize>() {
        Ok(i) => ColumnSel::Index(i),
        Err(_) => ColumnSel::Name(c.to_string()),
    });
    richtail::load(path, fmt, col.as_ref())
}

fn run() -> richtail::Result<()> {
    match Cli::parse().command {
        Command::Analyze { input, run } => {
            let settings = run.settings();
            let seed = run.seed();
            for path in &input.input {
                let ds = load_dataset(path, input.format, input.column.as_deref())?;
                let report = richtail::run_analyze(&ds, seed, &settings)
                    .map_err(|e| annotate(e, &ds.label))?;
                match run.output {
                    Output::Json => println!("{}", report.to_json()),
                    Output::Text => print!("{}", render_text(&report)),
                }
            }
            Ok(())
        }
        Command::Batch { manifest, report_dir, summary, run } => {
            run_batch(&manifest, report_dir.as_deref(), summary.as_deref(), &run)
        }
        Command::Gof { input, run } => {
            let settings = run.settings();
            let seed = run.seed();
            for path in &input.input {
                let ds = load_dataset(path, input.format, input.column.as_deref())?;
                let fit = match settings.xmin_fixed {
                    Some(xm) => richtail::fit_fixed_xmin(&ds, xm)?,
                    None => richtail::fit_xmin(&ds, settings.min_tail)?,
                };
                let gof = richtail::gof_test(
                    &ds,
                    &fit,
                    settings.gof_reps,
                    seed,
                    settings.min_tail,
                    settings.workers,
                )?;
                match run.output {
                    Output::Json => println!(
                        "{}",
                        serde_json::json!({
                            "label": ds.label,
                            "fit": { "alpha": fit.alpha_hat, "x_min": fit.x_min_hat,
                                     "n_tail": fit.n_tail, "n_total": fit.n_total, "ks": fit.ks },
                            "gof": { "p": gof.p_value, "reps": gof.replications, "ks": gof.ks_observed },
                            "seed": seed,
                        })
                    ),
                    Output::Text => println!(
                        "{}: alpha = {:.4}, x_min = {:.6}, tail {}/{}, KS = {:.5}, GOF p = {:.3}{}",
                        ds.label,
                        fit.alpha_hat,
                        fit.x_min_hat,
                        fit.n_tail,
                        fit.n_total,
                        fit.ks,
                        gof.p_value,
                        if gof.reject { "  [power law rejected]" } else { "" }
                    ),
                }
            }
            Ok(())
        }
        Command::Compare { input, run } => {
            let settings = run.settings();
            for path in &input.input {
                let ds = load_dataset(path, input.format, input.column.as_deref())?;
                let fit = match settings.xmin_fixed {
                    Some(xm) => richtail::fit_fixed_xmin(&ds, xm)?,
                    None => richtail::fit_xmin(&ds, settings.min_tail)?,
                };
                let rows = richtail::compare_all(ds.tail(fit.x_min_hat), &fit.params())?;
                match run.output {
                    Output::Json => {
                        let rows_json: Vec<_> = rows
                            .iter()
                            .map(richtail::pipeline::ReportComparison::from)
                            .collect();
                        println!(
                            "{}",
                            serde_json::json!({
                                "label": ds.label,
                                "fit": { "alpha": fit.alpha_hat, "x_min": fit.x_min_hat },
                                "comparisons": rows_json,
                            })
                        );
                    }
                    Output::Text => {
                        println!(
                            "{}: alpha = {:.4}, x_min = {:.6}",
                            ds.label, fit.alpha_hat, fit.x_min_hat
                        );
                        for r in &rows {
                            let stat = match (r.nc, r.statistic) {
                                (true, _) => "nc".to_string(),
                                (false, Some(s)) => format!("{s:.3}"),
                                _ => "-".into(),
                            };
                            let p = match (r.nc, r.p_value) {
                                (true, _) => "-".to_string(),
                                (false, Some(p)) => format!("{p:.3}"),
                                _ => "-".into(),
                            };
                            println!("  {:<24} {stat:>8}  p = {p}", r.alternative.label());
                        }
                    }
                }
            }
            Ok(())
        }
        Command::Generate {
            family,
            alpha,
            xmin,
            lambda,
            beta,
            mu,
            sigma,
            n,
            seed,
            body,
            out,
        } => {
            let model = match family.as_str() {
                "power_law" => TailModel::PowerLaw(PowerLawParams { alpha, x_min: xmin }),
                "log_normal" => {
                    TailModel::LogNormal(LogNormalTailParams { mu, sigma, x_min: xmin })
                }
                "exponential" => {
                    TailModel::Exponential(ExponentialTailParams { lambda, x_min: xmin })
                }
                "stretched_exponential" => TailModel::StretchedExp(StretchedExpTailParams {
                    lambda,
                    beta,
                    x_min: xmin,
                }),
                "cutoff_power_law" => TailModel::CutoffPowerLaw(CutoffPowerLawParams {
                    alpha,
                    lambda,
                    x_min: xmin,
                }),
                other => return Err(Error::Input(format!("unknown family {other:?}"))),
            };
            let body = match body {
                Some(v) if v.len() == 3 => Some(BodySpec { lo: v[0], hi: v[1], n: v[2] as usize }),
                Some(v) => {
                    return Err(Error::Input(format!(
                        "--body expects lo,hi,count (3 values, got {})",
                        v.len()
                    )))
                }
                None => None,
            };
            let ds = richtail::generate(&SyntheticSpec { model, n, seed, body })?;
            richtail::save(&ds, &out)?;
            eprintln!("wrote {} values to {}", ds.len(), out.display());
            Ok(())
        }
        Command::Ccdf { input, fit, min_tail, out } => {
            let path = &input.input[0];
            let ds = load_dataset(path, input.format, input.column.as_deref())?;
            let params = if fit {
                Some(richtail::fit_xmin(&ds, min_tail)?.params())
            } else {
                None
            };
            let series = richtail::export_ccdf(&ds, params.as_ref(), &out)?;
            eprintln!("wrote {} CCDF points to {}", series.points.len(), out.display());
            Ok(())
        }
        Command::ClassifyOnly { input, strict_alternatives } => {
            classify_only(&input, strict_alternatives)
        }
    }
}

fn annotate(e: Error, label: &str) -> Error {
    match e {
        Error::Input(m) => Error::Input(format!("{label}: {m}")),
        Error::Internal(m) => Error::Internal(format!("{label}: {m}")),
        other => other,
    }
}

fn run_batch(
    manifest: &Path,
    report_dir: Option<&Path>,
    summary: Option<&Path>,
    run: &RunOpts,
) -> richtail::Result<()> {
    let settings = run.settings();
    let seed = run.seed();
    let mut reader = csv::Reader::from_path(manifest)?;
    let headers = reader.headers()?.clone();
    let idx = |name: &str| headers.iter().position(|h| h == name);
    let (fi, li, yi) = (idx("file"), idx("label"), idx("year"));
    let (fmti, coli) = (idx("format"), idx("column"));
    let fi = fi.ok_or_else(|| Error::Input("manifest needs a `file` column".into()))?;

    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut rows = Vec::new();
    let mut failures = 0usize;
    let mut any = false;
    for record in reader.records() {
        let record = record?;
        any = true;
        let file = record.get(fi).unwrap_or_default();
        let path = base.join(file);
        let format = match fmti.and_then(|i| record.get(i)) {
            Some("csv") => Format::Csv,
            _ => Format::Plain,
        };
        let column = coli.and_then(|i| record.get(i)).filter(|c| !c.is_empty());
        let result = (|| -> richtail::Result<SummaryRow> {
            let mut ds = load_dataset(&path, format, column)?;
            if let Some(label) = li.and_then(|i| record.get(i)).filter(|l| !l.is_empty()) {
                ds.label = label.to_string();
            }
            if let Some(year) = yi.and_then(|i| record.get(i)).and_then(|y| y.parse().ok()) {
                ds = ds.with_year(year);
            }
            let report = richtail::run_analyze(&ds, seed, &settings)?;
            if let Some(dir) = report_dir {
                std::fs::create_dir_all(dir)?;
                let mut f = File::create(dir.join(format!("{}.json", ds.label)))?;
                writeln!(f, "{}", report.to_json())?;
            }
            Ok(SummaryRow::from_report(&report))
        })();
        match result {
            Ok(row) => rows.push(row),
            Err(e) => {
                failures += 1;
                eprintln!("{}: {e}", path.display());
            }
        }
    }
    if !any {
        return Err(Error::Input(format!("{}: empty manifest", manifest.display())));
    }
    match summary {
        Some(p) => write_summary_csv(&rows, File::create(p)?)?,
        None => write_summary_csv(&rows, std::io::stdout().lock())?,
    }
    if failures > 0 {
        eprintln!("{failures} dataset(s) failed");
    }
    Ok(())
}

fn parse_stat_cell(s: &str) -> Option<f64> {
    let t = s.trim();
    if t == "nc" || t == "-" || t.is_empty() {
        None
    } else {
        t.parse().ok()
    }
}

fn classify_only(input: &Path, strict: bool) -> richtail::Result<()> {
    let mut reader = csv::Reader::from_path(input)?;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let get = |j: usize| -> richtail::Result<&str> {
            record.get(j).ok_or(Error::Parse {
                line,
                message: format!("missing column {j}"),
            })
        };
        let label = get(0)?.to_string();
        let gof_p: f64 = get(1)?.trim().parse().map_err(|_| Error::Parse {
            line,
            message: "bad gof_p".into(),
        })?;
        let alts = [
            Alternative::LogNormal,
            Alternative::Exponential,
            Alternative::StretchedExp,
            Alternative::CutoffPowerLaw,
        ];
        let mut rows = Vec::new();
        for (k, alt) in alts.iter().enumerate() {
            let stat = parse_stat_cell(get(2 + 2 * k)?);
            let p = parse_stat_cell(get(3 + 2 * k)?);
            let nc = stat.is_none();
            rows.push(ComparisonRow {
                alternative: *alt,
                kind: if alt.is_nested() { StatKind::Lr } else { StatKind::Nlr },
                statistic: stat,
                p_value: p,
                nc,
            });
        }
        let verdict = classify(gof_p, &rows, strict);
        println!("{label},{}", verdict.label());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
