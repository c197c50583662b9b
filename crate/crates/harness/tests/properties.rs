//! Randomized invariants of the harness plumbing.

use hessdamp_harness::config::ExperimentConfig;
use hessdamp_harness::output::{csv_string, parse_csv, TraceRow};
use hessdamp_harness::rate::{oscillation_count, rate_fit, upper_envelope, RateMode};
use hessdamp_harness::rng::Rng;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e300..1e300f64,
        -1.0..1.0f64,
        (1e-300..1e-200f64),
        Just(0.0),
        Just(f64::MIN_POSITIVE),
        Just(f64::MAX),
    ]
}

fn row() -> impl Strategy<Value = (f64, f64, f64, Option<f64>)> {
    (finite(), finite(), finite(), prop::option::of(finite()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn csv_round_trip_is_bit_exact(rows in prop::collection::vec(row(), 1..20)) {
        let rows: Vec<TraceRow> = rows
            .into_iter()
            .enumerate()
            .map(|(index, (t, f_gap, grad_norm, energy))| TraceRow { index, t, f_gap, grad_norm, energy })
            .collect();
        let text = csv_string(&rows).unwrap();
        prop_assert_eq!(text.lines().count(), rows.len() + 1);
        let back = parse_csv(&text).unwrap();
        for (a, b) in rows.iter().zip(&back) {
            prop_assert_eq!(a.t.to_bits(), b.t.to_bits());
            prop_assert_eq!(a.f_gap.to_bits(), b.f_gap.to_bits());
            prop_assert_eq!(a.grad_norm.to_bits(), b.grad_norm.to_bits());
            prop_assert_eq!(a.energy.map(f64::to_bits), b.energy.map(f64::to_bits));
        }
    }

    #[test]
    fn config_round_trip_is_bit_exact(alpha in 3.0..50.0f64, beta in 0.0..1.0f64, s in 1e-6..1e-3f64, seed in any::<u64>(), eig in prop::collection::vec(finite(), 1..6)) {
        let eig: Vec<f64> = eig.into_iter().map(f64::abs).collect();
        let text = format!(
            r#"{{"name": "p", "problem": {{"type": "quadratic", "eigenvalues": {}}},
                "algorithm": {{"type": "igahd", "alpha": {alpha:e}, "beta": {beta:e}, "s": {s:e}}},
                "horizon": {{"iterations": 10}}, "seed": {seed}}}"#,
            serde_json::to_string(&eig).unwrap()
        );
        let cfg = ExperimentConfig::from_json(&text).unwrap();
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(&cfg, &back);
        prop_assert_eq!(cfg.seed, seed);
        prop_assert_eq!(cfg.to_json(), back.to_json());
    }

    #[test]
    fn power_laws_are_recovered(p in 0.1..4.0f64, c in 1e-3..1e3f64, lo in 1.0..50.0f64) {
        let series: Vec<(f64, f64)> = (1..=2000).map(|k| (k as f64, c * (k as f64).powf(-p))).collect();
        let r = rate_fit(&series, (lo, 2000.0), RateMode::Poly).unwrap();
        prop_assert!((r.slope + p).abs() < 1e-9);
        prop_assert!((r.intercept - c.ln()).abs() < 1e-8);
        prop_assert!(r.residual < 1e-9);
    }

    #[test]
    fn geometric_decays_are_recovered(q in 0.5..0.999f64, c in 1e-3..1e3f64) {
        let series: Vec<(f64, f64)> = (0..400).map(|k| (k as f64, c * q.powi(k))).collect();
        let r = rate_fit(&series, (0.0, 399.0), RateMode::Linear).unwrap();
        prop_assert!((r.slope - q.ln()).abs() < 1e-9);
    }

    #[test]
    fn oscillation_count_ignores_scale_and_monotone_series(v in prop::collection::vec(0.0..1.0f64, 3..60), scale in 1e-3..1e3f64) {
        let scaled: Vec<f64> = v.iter().map(|x| x * scale).collect();
        prop_assert_eq!(oscillation_count(&v), oscillation_count(&scaled));
        prop_assert_eq!(oscillation_count(&upper_envelope(&v)), 0);
        prop_assert!(oscillation_count(&v) <= (v.len() - 1) / 2);
        let mut sorted = v.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        prop_assert_eq!(oscillation_count(&sorted), 0);
    }

    #[test]
    fn rng_streams_depend_only_on_the_seed(seed in any::<u64>()) {
        let (mut a, mut b) = (Rng::new(seed), Rng::new(seed));
        for _ in 0..32 {
            let u = a.uniform();
            prop_assert!((0.0..1.0).contains(&u));
            prop_assert_eq!(u.to_bits(), b.uniform().to_bits());
        }
        let picks = a.choose(50, 10);
        let mut sorted = picks.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), 10);
        prop_assert!(picks.iter().all(|&i| i < 50));
    }
}
