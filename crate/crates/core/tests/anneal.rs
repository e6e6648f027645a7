mod common;

use alp_core::anneal::{accept, anneal, estimate_initial_temperature, perturb, SAConfig};
use alp_core::{
    feasibility_check, generate_random_instance, GeneratorConfig, Instance, SeparationMode,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use SeparationMode::*;

fn quick(seed: u64, iters: usize) -> SAConfig {
    SAConfig {
        seed,
        max_iterations: iters,
        ..SAConfig::default()
    }
}

fn uniform(targets: &[i64], span: i64, sep: i64) -> Instance {
    let n = targets.len();
    let e: Vec<i64> = targets.iter().map(|t| t - span).collect();
    let l: Vec<i64> = targets.iter().map(|t| t + span).collect();
    let s = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0 } else { sep }).collect())
        .collect();
    Instance::from_columns(&e, targets, &l, &vec![1.0; n], &vec![2.0; n], s).unwrap()
}

/// Fraction of `trials` acceptances; checked against `p` within 3 sigma.
fn assert_rate(delta: f64, temperature: f64, p: f64) {
    let trials = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let hits = (0..trials)
        .filter(|_| accept(delta, temperature, 0.07, &mut rng))
        .count();
    let rate = hits as f64 / trials as f64;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    assert!(
        (rate - p).abs() <= 3.0 * sigma,
        "rate {rate} vs {p} (3 sigma {})",
        3.0 * sigma
    );
}

#[test]
fn frozen_acceptance_is_the_constant() {
    assert_rate(10.0, 0.0, 0.07);
}

#[test]
fn two_stage_acceptance_rate() {
    let t = 7.0;
    assert_rate(t * std::f64::consts::LN_2, t, 0.5 + 0.5 * 0.07);
}

#[test]
fn separated_targets_are_solved_at_iteration_zero() {
    let inst = uniform(&[100, 200, 300, 400], 50, 20);
    let out = anneal(&inst, 1, &quick(1, 1000)).unwrap();
    assert_eq!(out.penalty, 0.0);
    assert_eq!(out.iterations, 0);
    assert_eq!(out.sequence, vec![0, 1, 2, 3]);
}

#[test]
fn zero_variance_instance_terminates() {
    // No separation at all: every sequence lands everyone on target.
    let inst = uniform(&[100, 100, 100, 100, 100], 50, 0);
    assert_eq!(
        estimate_initial_temperature(&inst, 1, AllPairs, 50, 3).unwrap(),
        0.0
    );
    let out = anneal(&inst, 1, &quick(3, 500)).unwrap();
    assert_eq!(out.penalty, 0.0);
}

#[test]
fn temperature_estimate_is_deterministic_and_positive() {
    let inst = generate_random_instance(&GeneratorConfig::new(10, 9)).unwrap();
    let a = estimate_initial_temperature(&inst, 1, AllPairs, 100, 5).unwrap();
    let b = estimate_initial_temperature(&inst, 1, AllPairs, 100, 5).unwrap();
    assert_eq!(a, b);
    assert!(a > 0.0);
    assert!(estimate_initial_temperature(&inst, 1, AllPairs, 1, 5).is_err());
}

#[test]
fn fifty_aircraft_move_four_positions() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let seq: Vec<usize> = (0..50).collect();
    let k = alp_core::anneal::default_perturbation_size(50);
    assert_eq!(k, 4);
    let out = perturb(&seq, k, &mut rng).unwrap();
    assert!(seq.iter().zip(&out).filter(|(a, b)| a != b).count() <= 4);
}

#[test]
fn runs_are_reproducible_and_thread_independent() {
    // Large enough for the parallel path.
    let inst = generate_random_instance(&GeneratorConfig::new(45, 4)).unwrap();
    let cfg = quick(11, 120);
    let a = anneal(&inst, 1, &cfg).unwrap();
    let b = anneal(&inst, 1, &cfg).unwrap();
    let serial = anneal(
        &inst,
        1,
        &SAConfig {
            parallel: false,
            ..cfg.clone()
        },
    )
    .unwrap();
    assert_eq!(a.sequence, b.sequence);
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.sequence, serial.sequence);
    assert_eq!(a.trace, serial.trace);
}

#[test]
fn elite_trace_never_rises_and_matches_the_result() {
    let inst = generate_random_instance(&GeneratorConfig::new(15, 2)).unwrap();
    for runways in [1, 2] {
        let out = anneal(&inst, runways, &quick(5, 400)).unwrap();
        assert!(out
            .trace
            .windows(2)
            .all(|w| w[1].best_penalty <= w[0].best_penalty));
        assert!(out
            .trace
            .windows(2)
            .all(|w| w[1].temperature < w[0].temperature || w[0].temperature == 0.0));
        assert_eq!(out.trace.last().unwrap().best_penalty, out.penalty);
        assert_eq!(out.trace.len(), out.iterations + 1);
        let mut all: Vec<usize> = out
            .solution
            .schedules
            .iter()
            .flat_map(|s| s.sequence.clone())
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..15).collect::<Vec<_>>());
        for s in &out.solution.schedules {
            let r = feasibility_check(&inst, &s.sequence, &s.times, AllPairs).unwrap();
            assert!(r.is_feasible(AllPairs));
        }
    }
}

#[test]
fn early_stop_at_target() {
    let inst = generate_random_instance(&GeneratorConfig::new(12, 8)).unwrap();
    let free = anneal(&inst, 1, &quick(1, 300)).unwrap();
    let cfg = SAConfig {
        target_penalty: Some(free.penalty),
        ..quick(1, 300)
    };
    let stopped = anneal(&inst, 1, &cfg).unwrap();
    assert!(stopped.penalty <= free.penalty);
    assert!(stopped.iterations <= free.iterations);
}

#[test]
fn infeasible_start_is_an_error() {
    // Both windows collapse onto one time but need 10 units of separation.
    let inst = Instance::from_columns(
        &[5, 5],
        &[5, 5],
        &[5, 5],
        &[1.0; 2],
        &[1.0; 2],
        vec![vec![0, 10], vec![10, 0]],
    )
    .unwrap();
    assert!(anneal(&inst, 1, &quick(0, 10)).is_err());
    // Two runways separate them.
    assert_eq!(anneal(&inst, 2, &quick(0, 10)).unwrap().penalty, 0.0);
}

#[test]
fn budget_in_seconds_is_honoured() {
    let inst = generate_random_instance(&GeneratorConfig::new(60, 1)).unwrap();
    let cfg = SAConfig {
        max_seconds: Some(0.3),
        max_iterations: usize::MAX,
        ..quick(2, 0)
    };
    let out = anneal(&inst, 1, &cfg).unwrap();
    assert!(out.elapsed.as_secs_f64() < 3.0);
    assert!(out.iterations > 0);
}

#[test]
fn adjacent_mode_runs() {
    let (inst, _) = common::random_case(8, 3, AdjacentOnly);
    let cfg = SAConfig {
        mode: AdjacentOnly,
        ..quick(3, 200)
    };
    let out = anneal(&inst, 1, &cfg).unwrap();
    assert!(out.solution.certified_optimal());
}
