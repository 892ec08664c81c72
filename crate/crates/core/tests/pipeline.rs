// Copyright 2026 The QECCD Authors
// SPDX-License-Identifier: Apache-2.0

//! Public-API round trips across modules.

use qeccd_core::channel::{builtin_channel, chi_from_kraus, kraus_from_chi, random_channel};
use qeccd_core::code::{code3, code5};
use qeccd_core::estimation::{characterize, compare, Mode, SamplingPolicy};
use qeccd_core::io::{channel_from_json, channel_to_json, code_from_json, plan_from_json, plan_to_json};
use qeccd_core::protocol::{plan_configurations, simulate_plan, Configuration, Plan};
use qeccd_core::{Complex64, NumericPolicy};

fn uniform() -> Vec<Complex64> {
    vec![Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2]
}

#[test]
fn reconstructed_chi_regenerates_the_channel() {
    let policy = NumericPolicy::default();
    let code = code5();
    let plan = plan_configurations(&code, &policy).unwrap();
    let original = random_channel(31, 2, 2).unwrap();
    let run = characterize(&code, &uniform(), &original, &plan, Mode::Exact, &policy).unwrap();

    // a Kraus set rebuilt from the estimate has the same process matrix
    let rebuilt = kraus_from_chi(&run.reconstruction.chi, code.error_basis(), &policy).unwrap();
    let again = chi_from_kraus(&rebuilt, code.error_basis()).unwrap();
    assert!(compare(&again, &run.oracle).unwrap().frobenius_error < 1e-9);
}

#[test]
fn file_inputs_match_builtins() {
    let policy = NumericPolicy::default();
    let ad = builtin_channel("amplitude-damping", &[0.2]).unwrap();
    let from_file = channel_from_json(&channel_to_json(&ad)).unwrap();

    let code_text = r#"{"n": 3, "k": 1, "generators": ["XIX", "YYZ"], "noisy_coords": [0],
                        "logical_ops": {"X": "-ZXZ", "Z": "YZY"}}"#;
    let code = code_from_json(code_text, &policy).unwrap();
    let builtin = code3();
    for (a, b) in code.logical_basis().iter().zip(builtin.logical_basis()) {
        assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-12);
    }

    let plan = plan_from_json(
        &plan_to_json(&plan_configurations(&builtin, &policy).unwrap(), &builtin),
        &code,
        &policy,
    )
    .unwrap();
    let a = simulate_plan(&code, &uniform(), &from_file, &plan, &policy).unwrap();
    let b = simulate_plan(&builtin, &uniform(), &ad, &plan, &policy).unwrap();
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(&b) {
        for s in builtin.syndrome_table() {
            assert!((ra.frequency(s).unwrap() - rb.frequency(s).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn rotations_alone_leave_chi_undetermined() {
    let policy = NumericPolicy::default();
    let code = code3();
    let mut configs = vec![Configuration::bare()];
    for p in 1..code.error_basis().len() {
        configs.push(Configuration::rotated(&code, 0, p, &policy).unwrap());
    }
    let plan = Plan::from_configurations(&code, configs).unwrap();
    let ch = random_channel(12, 1, 4).unwrap();
    let err = characterize(&code, &uniform(), &ch, &plan, Mode::Exact, &policy).unwrap_err();
    assert!(err.to_string().contains("only one part"), "{err}");
}

#[test]
fn configuration_order_does_not_matter() {
    let policy = NumericPolicy::default();
    let code = code5();
    let mut configs = plan_configurations(&code, &policy).unwrap().configurations;
    configs.reverse();
    let plan = Plan::from_configurations(&code, configs).unwrap();
    let ch = random_channel(12, 2, 6).unwrap();
    let run = characterize(&code, &uniform(), &ch, &plan, Mode::Exact, &policy).unwrap();
    assert!(run.error_report.frobenius_error < 1e-10);
}

#[test]
fn sampled_runs_are_reproducible() {
    let policy = NumericPolicy::default();
    let code = code3();
    let plan = plan_configurations(&code, &policy).unwrap();
    let ch = builtin_channel("phase-damping", &[0.3]).unwrap();
    let mode = Mode::Sampled(SamplingPolicy::new(50_000, 5).unwrap());
    let a = characterize(&code, &uniform(), &ch, &plan, mode, &policy).unwrap();
    let b = characterize(&code, &uniform(), &ch, &plan, mode, &policy).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.reconstruction.chi, b.reconstruction.chi);
    assert!(a.error_report.frobenius_error < 0.05);
}
