//! Detection and validation of power-law behaviour in the upper tail of
//! positive-valued data, rich lists being the motivating case.
//!
//! The pipeline estimates the exponent by maximum likelihood, chooses the
//! lower bound of power-law behaviour by minimizing the Kolmogorov-Smirnov
//! distance over the observed values, attaches bootstrap standard errors,
//! checks goodness of fit with a semi-parametric bootstrap, and compares the
//! power law against log-normal, exponential, stretched-exponential and
//! exponentially cut-off rivals via likelihood-ratio tests.
//!
//! Bootstrap stages run data-parallel when the `parallel` feature (default)
//! is enabled; results are bit-identical for any worker count because each
//! replicate's random stream depends only on the seed and replicate index.

pub mod compare;
pub mod data;
pub mod error;
pub mod exec;
pub mod gof;
pub mod mle;
pub mod model;
pub mod optim;
pub mod pipeline;
pub mod powerlaw;
pub mod special;

pub use compare::{classify, compare_all, vuong_nested, vuong_nonnested};
pub use compare::{Alternative, ComparisonRow, StatKind, Verdict};
pub use data::{ccdf_series, export_ccdf, generate, load, save};
pub use data::{BodySpec, CcdfSeries, ColumnSel, Dataset, InputFormat, SyntheticSpec};
pub use error::{Error, Result};
pub use gof::{gof_test, GofResult, DEFAULT_GOF_REPLICATIONS, GOF_THRESHOLD};
pub use mle::{fit_mle, FitOutcome, ModelFamily};
pub use model::{
    CutoffPowerLawParams, ExponentialTailParams, LogNormalTailParams, PowerLawParams,
    StretchedExpTailParams, TailModel,
};
pub use pipeline::{
    render_text, run_analyze, write_summary_csv, AnalysisReport, Settings, SummaryRow,
    DEFAULT_MIN_TAIL, DEFAULT_SE_REPLICATIONS,
};
pub use powerlaw::{
    bootstrap_se, fit_alpha, fit_fixed_xmin, fit_xmin, ks_statistic, BootstrapSe, PowerLawFit,
};
