mod common;

use std::collections::BTreeMap;

use common::rng;
use meltmap::dataset::{synth_generate, FeatureSpec, Field, SynthOptions};
use meltmap::numerics::DenseMatrix;
use meltmap::polyfit::{
    expand_monomials, feature_importance, fit_design, fit_polynomial, monomial_exponents, SymbolicEquation,
};
use meltmap::zoo;
use proptest::prelude::*;
use rand::Rng;

fn binomial(n: usize, k: usize) -> usize {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

/// Random coefficients with magnitude in [0.5, 5] and random sign.
fn coefficients(r: &mut impl Rng, count: usize) -> Vec<f64> {
    (0..count)
        .map(|_| {
            let m = r.random_range(0.5..5.0);
            if r.random_bool(0.5) { m } else { -m }
        })
        .collect()
}

fn random_inputs(r: &mut impl Rng, n: usize, d: usize) -> DenseMatrix {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| r.random_range(0.5..3.0)).collect()).collect();
    DenseMatrix::from_rows(&rows).unwrap()
}

fn names(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("x{i}")).collect()
}

#[test]
fn depth_equation_ranks_power_first() {
    let r = feature_importance(&zoo::get("depth_pv").unwrap().equation).unwrap();
    assert_eq!(r.top().label, "P");
    let p = r.entries.iter().position(|e| e.label == "P").unwrap();
    let v = r.entries.iter().position(|e| e.label == "V").unwrap();
    assert!(p < v);
    let total = 1.5055 + 0.3504 + 2.92e-4 + 7.54e-4 + 2.12e-4;
    assert!((r.entries[0].percent - 1.5055 / total * 100.0).abs() < 1e-12);
}

#[test]
fn depth_synthetic_recovery() {
    let truth = &zoo::get("depth_pv").unwrap().equation;
    let ds = synth_generate(truth, &SynthOptions::default()).unwrap();
    let eq = fit_polynomial(&ds, &FeatureSpec::power_velocity(), Field::Depth, 2).unwrap();
    for (got, want) in eq.coefficients().iter().zip(truth.coefficients()) {
        assert!((got - want).abs() <= 1e-6 * want.abs(), "{got} vs {want}");
    }
    assert!((eq.diagnostics().unwrap().train_r2 - 1.0).abs() <= 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn term_count_is_binomial(d in 1usize..5, n in 1u32..7) {
        prop_assert_eq!(monomial_exponents(d, n).len(), binomial(d + n as usize, n as usize));
    }

    #[test]
    fn zero_noise_recovery(seed in any::<u64>(), d in 1usize..=3, n in 1u32..=4) {
        let mut r = rng(seed);
        let basis = monomial_exponents(d, n);
        let truth = SymbolicEquation::from_coefficients("y", names(d), n, &coefficients(&mut r, basis.len())).unwrap();
        let samples = 3 * basis.len() + 5;
        let x = random_inputs(&mut r, samples, d);
        let y: Vec<f64> = (0..samples).map(|i| truth.evaluate(x.row(i)).unwrap()).collect();
        let fit = fit_design(&x, &y, names(d), "y", n).unwrap();
        for (got, want) in fit.coefficients().iter().zip(truth.coefficients()) {
            prop_assert!((got - want).abs() <= 1e-6 * want.abs(), "{} vs {}", got, want);
        }
    }

    #[test]
    fn train_r2_non_decreasing_in_degree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_inputs(&mut r, 60, 2);
        let y: Vec<f64> = (0..60).map(|i| {
            let row = x.row(i);
            (row[0] * 1.7).sin() * 40.0 + row[1].powi(3) + r.random_range(-1.0..1.0)
        }).collect();
        let r2: Vec<f64> = (2..=6)
            .map(|n| fit_design(&x, &y, names(2), "y", n).unwrap().diagnostics().unwrap().train_r2)
            .collect();
        for w in r2.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9, "{:?}", r2);
        }
    }

    #[test]
    fn equation_matches_design_product(seed in any::<u64>(), n in 1u32..=4) {
        let mut r = rng(seed);
        let x = random_inputs(&mut r, 30, 2);
        let y: Vec<f64> = (0..30).map(|_| r.random_range(0.0..10.0)).collect();
        let eq = fit_design(&x, &y, names(2), "y", n).unwrap();
        let beta = eq.coefficients();
        for i in 0..30 {
            let row = expand_monomials(x.row(i), n).unwrap();
            let product: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            let scale: f64 = row.iter().zip(&beta).map(|(a, b)| (a * b).abs()).sum::<f64>().max(1.0);
            prop_assert!((eq.evaluate(x.row(i)).unwrap() - product).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn importance_invariant_under_target_scaling(seed in any::<u64>(), c in 0.001f64..1000.0) {
        let mut r = rng(seed);
        let coefs = coefficients(&mut r, 10);
        let scaled: Vec<f64> = coefs.iter().map(|v| v * c).collect();
        let a = feature_importance(&SymbolicEquation::from_coefficients("y", names(2), 3, &coefs).unwrap()).unwrap();
        let b = feature_importance(&SymbolicEquation::from_coefficients("y", names(2), 3, &scaled).unwrap()).unwrap();
        let total: f64 = a.entries.iter().map(|e| e.percent).sum();
        prop_assert!((total - 100.0).abs() <= 1e-9);
        for (x, y) in a.entries.iter().zip(&b.entries) {
            prop_assert_eq!(&x.label, &y.label);
            prop_assert!((x.percent - y.percent).abs() <= 1e-9);
        }
    }

    #[test]
    fn json_round_trip_preserves_predictions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let eq = SymbolicEquation::from_coefficients(
            "spatter",
            vec!["Power".into(), "Velocity".into(), "log_Velocity".into()],
            3,
            &coefficients(&mut r, 20),
        ).unwrap();
        let back = SymbolicEquation::from_json(&eq.to_json()).unwrap();
        for _ in 0..1000 {
            let mut x = BTreeMap::new();
            let v = r.random_range(100.0..2000.0);
            x.insert("Power".to_string(), r.random_range(50.0..500.0));
            x.insert("Velocity".to_string(), v);
            x.insert("log_Velocity".to_string(), f64::ln(v));
            let (a, b) = (eq.evaluate_named(&x).unwrap(), back.evaluate_named(&x).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
