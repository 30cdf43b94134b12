//! End-to-end tests of the `richtail` binary.

use std::path::Path;
use std::process::{Command, Output};

fn richtail(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_richtail"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn generate_sample(dir: &Path, name: &str, seed: u64) {
    let out = richtail(
        &[
            "generate",
            "--family",
            "power_law",
            "--alpha",
            "2.4",
            "--xmin",
            "2.0",
            "-n",
            "300",
            "--seed",
            &seed.to_string(),
            "--body",
            "0.5,2.0,200",
            "--out",
            name,
        ],
        dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn analyze_emits_json_report() {
    let dir = tempfile::tempdir().unwrap();
    generate_sample(dir.path(), "data.txt", 1);
    let out = richtail(
        &[
            "analyze", "--input", "data.txt", "--seed", "7", "--gof-reps", "99", "--se-reps",
            "50", "--output", "json",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for key in ["label", "fit", "gof", "comparisons", "verdict", "seed", "settings", "runtime_ms"] {
        assert!(v.get(key).is_some(), "missing key {key}");
    }
    let fit = &v["fit"];
    for key in ["alpha", "se_alpha", "x_min", "se_x_min", "n_tail", "n_total", "ks"] {
        assert!(fit.get(key).is_some(), "missing fit key {key}");
    }
    assert_eq!(v["seed"], 7);
    assert_eq!(v["comparisons"].as_array().map(Vec::len), Some(4));
}

#[test]
fn analyze_is_deterministic_for_fixed_seed_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    generate_sample(dir.path(), "data.txt", 2);
    let args = [
        "analyze", "--input", "data.txt", "--seed", "11", "--gof-reps", "99", "--se-reps",
        "50", "--workers", "1", "--output", "json",
    ];
    let a = richtail(&args, dir.path());
    let b = richtail(&args, dir.path());
    let strip = |s: &str| {
        let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
        v["runtime_ms"] = 0.into();
        v
    };
    assert_eq!(strip(&stdout(&a)), strip(&stdout(&b)));
}

#[test]
fn gof_text_output_reports_fit_and_p() {
    let dir = tempfile::tempdir().unwrap();
    generate_sample(dir.path(), "data.txt", 3);
    let out = richtail(
        &["gof", "--input", "data.txt", "--seed", "5", "--gof-reps", "99"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("alpha ="), "{text}");
    assert!(text.contains("GOF p ="), "{text}");
}

#[test]
fn compare_lists_all_four_alternatives() {
    let dir = tempfile::tempdir().unwrap();
    generate_sample(dir.path(), "data.txt", 4);
    let out = richtail(&["compare", "--input", "data.txt"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    for label in ["log-normal", "exponential", "stretched exponential", "power law with cut-off"] {
        assert!(text.contains(label), "missing {label} in:\n{text}");
    }
}

#[test]
fn ccdf_exports_fit_overlay() {
    let dir = tempfile::tempdir().unwrap();
    generate_sample(dir.path(), "data.txt", 5);
    let out = richtail(
        &["ccdf", "--input", "data.txt", "--fit", "--out", "ccdf.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("ccdf.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,ccdf_empirical,ccdf_fit"));
    assert!(lines.count() > 100);
}

#[test]
fn batch_writes_summary_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    generate_sample(dir.path(), "a.txt", 6);
    generate_sample(dir.path(), "b.txt", 7);
    std::fs::write(
        dir.path().join("manifest.csv"),
        "file,label,year\na.txt,alpha-list,2006\nb.txt,beta-list,2007\n",
    )
    .unwrap();
    let out = richtail(
        &[
            "batch", "--manifest", "manifest.csv", "--report-dir", "reports", "--summary",
            "summary.csv", "--seed", "9", "--gof-reps", "99", "--se-reps", "50",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("year,alpha_hat,se_alpha,ci95_lo,ci95_hi,x_min_hat,n_tail,"));
    assert_eq!(summary.lines().count(), 3);
    assert!(dir.path().join("reports/alpha-list.json").exists());
    assert!(dir.path().join("reports/beta-list.json").exists());
}

#[test]
fn batch_continues_past_a_bad_entry() {
    let dir = tempfile::tempdir().unwrap();
    generate_sample(dir.path(), "a.txt", 8);
    std::fs::write(
        dir.path().join("manifest.csv"),
        "file,label,year\nmissing.txt,gone,2000\na.txt,kept,2001\n",
    )
    .unwrap();
    let out = richtail(
        &[
            "batch", "--manifest", "manifest.csv", "--summary", "summary.csv", "--seed", "9",
            "--gof-reps", "99", "--se-reps", "50",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2, "only the good entry is summarized");
    assert!(String::from_utf8_lossy(&out.stderr).contains("1 dataset(s) failed"));
}

#[test]
fn classify_only_reads_nc_cells() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("stats.csv"),
        concat!(
            "label,gof_p,lognormal_nlr,lognormal_p,exponential_nlr,exponential_p,",
            "stretched_nlr,stretched_p,cutoff_lr,cutoff_p\n",
            "row-a,0.981,0.026,0.979,2.043,0.041,-0.043,0.966,-0.068,0.713\n",
            "row-b,0.154,-0.929,0.353,2.623,0.009,-0.955,0.340,-1.715,0.064\n",
            "row-c,0.101,-1.596,0.110,3.200,0.001,-1.664,0.096,nc,-\n",
            "row-d,0.05,0.0,1.0,0.0,1.0,0.0,1.0,0.0,1.0\n",
        ),
    )
    .unwrap();
    let out = richtail(&["classify-only", "--input", "stats.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        stdout(&out),
        "row-a,moderate\nrow-b,with_cutoff\nrow-c,moderate\nrow-d,none\n"
    );
}

#[test]
fn missing_input_gives_exit_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = richtail(&["analyze", "--input", "nope.txt"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_data_gives_exit_code_3() {
    let dir = tempfile::tempdir().unwrap();
    // Twenty copies of the same value: the scan has no usable candidate.
    std::fs::write(dir.path().join("flat.txt"), "2.5\n".repeat(20)).unwrap();
    let out = richtail(
        &["analyze", "--input", "flat.txt", "--gof-reps", "99", "--se-reps", "50"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn csv_input_with_named_column() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = String::from("name,net_worth\n");
    for i in 0..200 {
        rows.push_str(&format!("p{i},{}\n", 1.0 + i as f64 * 0.05));
    }
    std::fs::write(dir.path().join("list.csv"), rows).unwrap();
    let out = richtail(
        &[
            "gof", "--input", "list.csv", "--format", "csv", "--column", "net_worth",
            "--seed", "3", "--gof-reps", "99",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
