//! Property-based invariants of the estimators and the data layer.

use proptest::collection::vec;
use proptest::prelude::*;

use richtail::data::{load, save, Dataset, InputFormat};
use richtail::model::PowerLawParams;
use richtail::powerlaw::{fit_alpha, fit_xmin, ks_statistic};

fn positive_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    vec(0.01f64..1e6, n..=n * 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Rescaling the data and the lower bound together leaves the exponent
    /// estimate unchanged (the likelihood depends only on x / x_min).
    #[test]
    fn alpha_is_scale_equivariant(values in positive_values(10), scale in 0.1f64..100.0) {
        let ds = Dataset::new(values.clone(), "t").unwrap();
        let x_min = ds.values()[0];
        prop_assume!(fit_alpha(&ds, x_min).is_ok());
        let a = fit_alpha(&ds, x_min).unwrap();

        let scaled = Dataset::new(values.iter().map(|v| v * scale).collect(), "t").unwrap();
        let b = fit_alpha(&scaled, x_min * scale).unwrap();
        prop_assert!((a - b).abs() <= 1e-6 * a.abs(), "a {a} vs {b}");
    }

    /// Same for the KS distance at matching parameters.
    #[test]
    fn ks_is_scale_equivariant(values in positive_values(10), scale in 0.1f64..100.0) {
        let ds = Dataset::new(values.clone(), "t").unwrap();
        let x_min = ds.values()[0];
        let params = PowerLawParams { alpha: 2.5, x_min };
        let k1 = ks_statistic(&ds, &params).unwrap();

        let scaled = Dataset::new(values.iter().map(|v| v * scale).collect(), "t").unwrap();
        let k2 = ks_statistic(&scaled, &PowerLawParams { alpha: 2.5, x_min: x_min * scale }).unwrap();
        prop_assert!((k1 - k2).abs() <= 1e-9, "ks {k1} vs {k2}");
    }

    /// KS lies in [0, 1] for any data and admissible parameters.
    #[test]
    fn ks_is_a_probability_distance(values in positive_values(5), alpha in 1.01f64..6.0) {
        let ds = Dataset::new(values, "t").unwrap();
        let x_min = ds.values()[0];
        let ks = ks_statistic(&ds, &PowerLawParams { alpha, x_min }).unwrap();
        prop_assert!((0.0..=1.0).contains(&ks), "ks {ks}");
    }

    /// The scan never returns a KS above any single candidate's KS and its
    /// x_min is an observed value.
    #[test]
    fn scan_result_is_an_observed_value(values in positive_values(15)) {
        let ds = Dataset::new(values, "t").unwrap();
        if let Ok(fit) = fit_xmin(&ds, 10) {
            prop_assert!(ds.values().contains(&fit.x_min_hat));
            prop_assert!(fit.alpha_hat > 1.0);
            prop_assert!(fit.n_tail >= 10);
            let direct = ks_statistic(&ds, &fit.params()).unwrap();
            prop_assert_eq!(fit.ks.to_bits(), direct.to_bits());
        }
    }

    /// Text round-trip through save/load preserves the sorted values exactly.
    #[test]
    fn save_load_roundtrip(values in positive_values(5)) {
        let ds = Dataset::new(values, "roundtrip").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.txt");
        save(&ds, &path).unwrap();
        let back = load(&path, InputFormat::Plain, None).unwrap();
        prop_assert_eq!(ds.values(), back.values());
    }
}
