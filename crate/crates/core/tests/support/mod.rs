//! Property checks shared by the proptest suite and the acceptance runner.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use switchopt::analysis::fit_power_law;
use switchopt::io::{instance_from_json, instance_to_json};
use switchopt::oracle::generate_solved_instance;
use switchopt::problem::{generate_quadratic_instance, Vector};
use switchopt::solvers::{averaging_weights, read_steps_csv, write_steps_csv, Method, TraceStep};
use switchopt::switching::{RuleKind, SwitchingRule};

pub fn finite() -> impl Strategy<Value = f64> {
    -1e3..1e3f64
}

pub fn vector_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..12).prop_flat_map(|d| {
        (
            prop::collection::vec(finite(), d),
            prop::collection::vec(finite(), d),
        )
    })
}

pub fn polarization((a, b): (Vec<f64>, Vec<f64>)) -> Result<(), TestCaseError> {
    let a = Vector::from_vec(a);
    let b = Vector::from_vec(b);
    let lhs = a.dot(&b);
    let rhs = 0.5 * ((&a + &b).norm_squared() - a.norm_squared() - b.norm_squared());
    // Absolute 1e-9 at unit scale; the identity cancels terms of size ‖a‖‖b‖.
    let scale = 1.0 + a.norm_squared() + b.norm_squared();
    prop_assert!((lhs - rhs).abs() <= 1e-9 * scale, "{lhs} vs {rhs}");
    Ok(())
}

pub fn instance_point() -> impl Strategy<Value = (u64, usize, Vec<f64>)> {
    (0u64..10_000, 1usize..8).prop_flat_map(|(seed, d)| {
        (Just(seed), Just(d), prop::collection::vec(-5.0..5.0f64, d))
    })
}

/// `‖∇h(x)‖² <= 2L(h(x) − h̃)` for both functions of a generated instance.
pub fn lemma2((seed, dim, x): (u64, usize, Vec<f64>)) -> Result<(), TestCaseError> {
    let p = generate_quadratic_instance(dim, seed).unwrap();
    let x = Vector::from_vec(x);
    let l = p.constants.smoothness.unwrap();
    for (h, floor) in [(&p.f, p.constants.f_tilde.unwrap()), (&p.g, p.constants.g_tilde.unwrap())] {
        let lhs = h.grad(&x).unwrap().norm_squared();
        let rhs = 2.0 * l * (h.eval(&x).unwrap() - floor);
        prop_assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
    }
    Ok(())
}

pub fn rule_and_values() -> impl Strategy<Value = (RuleKind, f64, f64, f64, f64)> {
    (
        prop_oneof![
            Just(RuleKind::Hard),
            Just(RuleKind::Sigmoid),
            Just(RuleKind::TrimmedHinge)
        ],
        1e-6..10.0f64,
        1e-3..1e4f64,
        -50.0..50.0f64,
        -50.0..50.0f64,
    )
}

pub fn weight_range_monotone(
    (kind, eps, beta, a, b): (RuleKind, f64, f64, f64, f64),
) -> Result<(), TestCaseError> {
    let rule = SwitchingRule::new(kind, eps, beta).unwrap();
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let (wl, wh) = (rule.weight(lo), rule.weight(hi));
    prop_assert!((0.0..=1.0).contains(&wl) && (0.0..=1.0).contains(&wh));
    prop_assert!(wl <= wh, "weight({lo}) = {wl} > weight({hi}) = {wh}");
    if kind == RuleKind::TrimmedHinge {
        if lo <= eps - 1.0 / beta {
            prop_assert_eq!(wl, 0.0);
        }
        if hi >= eps {
            prop_assert_eq!(wh, 1.0);
        }
    }
    Ok(())
}

pub fn g_values() -> impl Strategy<Value = (f64, f64, Vec<f64>)> {
    (1e-3..2.0f64, 0.1..100.0f64, prop::collection::vec(-3.0..3.0f64, 1..60))
}

fn steps_from_g(rule: &SwitchingRule, gs: &[f64]) -> Vec<TraceStep> {
    gs.iter()
        .enumerate()
        .map(|(i, &g)| TraceStep {
            t: i + 1,
            w: Vector::from_element(2, i as f64),
            f: 0.0,
            g,
            sigma: rule.weight(g),
            in_a: g < rule.epsilon,
            u_norm: 0.0,
        })
        .collect()
}

/// Soft averaging weights are positive, sum to one and do not increase with g.
pub fn soft_average_weights((eps, beta, gs): (f64, f64, Vec<f64>)) -> Result<(), TestCaseError> {
    let rule = SwitchingRule::trimmed_hinge(eps, beta).unwrap();
    let steps = steps_from_g(&rule, &gs);
    let weights = averaging_weights(&steps, Method::Ssgm);
    if weights.is_empty() {
        return Ok(());
    }
    let total: f64 = weights.iter().map(|w| w.1).sum();
    prop_assert!((total - 1.0).abs() <= 1e-12, "sum {total}");
    let mut by_g: Vec<(f64, f64)> = weights
        .iter()
        .map(|&(t, a)| (steps[t - 1].g, a))
        .collect();
    prop_assert!(by_g.iter().all(|&(_, a)| a > 0.0));
    by_g.sort_by(|x, y| x.0.total_cmp(&y.0));
    for pair in by_g.windows(2) {
        prop_assert!(pair[1].1 <= pair[0].1, "weights increase with g: {pair:?}");
    }
    Ok(())
}

pub fn power_law() -> impl Strategy<Value = (f64, f64, usize)> {
    (1e-3..1e3f64, 0.0..3.0f64, 20usize..400)
}

/// Exact power laws are recovered.
pub fn rate_fit_exact((c, alpha, n): (f64, f64, usize)) -> Result<(), TestCaseError> {
    let series: Vec<(f64, f64)> = (1..=n)
        .map(|t| (t as f64, c * (t as f64).powf(-alpha)))
        .collect();
    let fit = fit_power_law(&series, 0.0).unwrap();
    prop_assert!((fit.alpha - alpha).abs() <= 1e-9, "alpha {} vs {alpha}", fit.alpha);
    prop_assert!((fit.c - c).abs() <= 1e-9 * c, "C {} vs {c}", fit.c);
    prop_assert!(fit.r_squared > 1.0 - 1e-9);
    Ok(())
}

pub fn any_f64() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
}

pub fn trace_steps() -> impl Strategy<Value = Vec<TraceStep>> {
    (1usize..5).prop_flat_map(|d| {
        prop::collection::vec(
            (
                prop::collection::vec(any_f64(), d),
                any_f64(),
                any_f64(),
                0.0..=1.0f64,
                any::<bool>(),
                any_f64(),
            ),
            1..20,
        )
        .prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (w, f, g, sigma, in_a, u))| TraceStep {
                    t: i + 1,
                    w: Vector::from_vec(w),
                    f,
                    g,
                    sigma,
                    in_a,
                    u_norm: u.abs(),
                })
                .collect()
        })
    })
}

pub fn csv_round_trip(steps: Vec<TraceStep>) -> Result<(), TestCaseError> {
    let mut buf = Vec::new();
    write_steps_csv(&steps, &mut buf).unwrap();
    let back = read_steps_csv(buf.as_slice()).unwrap();
    prop_assert_eq!(back, steps);
    Ok(())
}

pub fn json_round_trip((seed, dim): (u64, usize)) -> Result<(), TestCaseError> {
    let p = generate_solved_instance(dim, seed).unwrap();
    let back = instance_from_json(&instance_to_json(&p)).unwrap();
    prop_assert_eq!(back, p);
    Ok(())
}
