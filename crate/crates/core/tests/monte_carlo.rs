//! Monte Carlo estimates against exact values, stationarity of the sampled
//! windows, and scheduling independence.

mod common;

use masstransport::birkhoff::{conditional_mean, estimate_a_epsilon, estimate_upper_epsilon, trajectories, AEpsilon};
use masstransport::stats::EstimateCI;
use masstransport::verify::{
    exact_identity, exact_maximal_ergodic, exact_survival, mc_identity, mc_maximal_ergodic, mc_survival,
    ExactConfig, McConfig, Side,
};
use masstransport::Scalar;

const TRIALS: u64 = 100_000;

#[test]
fn identity_estimates_agree_with_exact_values() {
    let cfg = McConfig::new(TRIALS, 2024);
    for name in ["two_point", "two_point_markov", "ma_discrete"] {
        let process = common::load(name);
        let report = mc_identity(&process, 4, &cfg).unwrap();
        assert!(report.all_pass(), "{name}: {report:?}");
        for row in &report.rows {
            let (exact, _) = exact_identity(&process, row.n, &ExactConfig::default()).unwrap();
            for side in [&row.lhs, &row.rhs] {
                let Side::Mc(e) = side else { panic!() };
                // A degenerate side has zero spread and must then match exactly.
                let target = exact.to_f64_lossy();
                assert!(e.within_sigmas(target, 4.0) || (e.std_error == 0.0 && e.mean == target), "{name} n={} {e:?} vs {target}", row.n);
            }
        }
    }
    let report = mc_identity(&common::load("two_point"), 2, &cfg).unwrap();
    let Side::Mc(lhs) = report.rows[1].lhs else { panic!() };
    assert!(lhs.within_sigmas(0.25, 4.0));
}

#[test]
fn identity_passes_for_continuous_processes() {
    let cfg = McConfig::new(TRIALS, 99);
    for name in ["gaussian", "ma_gaussian", "rotation"] {
        let report = mc_identity(&common::load(name), 8, &cfg).unwrap();
        assert!(report.all_pass(), "{name}: {report:#?}");
    }
}

#[test]
fn maximal_and_survival_estimates_agree_with_exact_values() {
    let cfg = McConfig::new(TRIALS, 5);
    let exact = ExactConfig::default();
    for (name, process) in common::bundled() {
        if !process.is_finite_support() {
            continue;
        }
        for big_n in [1u64, 2, 5, 8] {
            let e = mc_maximal_ergodic(&process, big_n, &cfg).unwrap();
            let want = exact_maximal_ergodic(&process, big_n, &exact).unwrap().to_f64_lossy();
            assert!(e.within_sigmas(want, 4.0) || (e.std_error == 0.0 && e.mean == want), "{name} N={big_n}: {e:?} vs {want}");
            let s = mc_survival(&process, big_n, &cfg).unwrap();
            let want = exact_survival(&process, big_n, &exact).unwrap().to_f64_lossy();
            assert!(s.within_sigmas(want, 4.0) || (s.std_error == 0.0 && s.mean == want), "{name} N={big_n}: {s:?} vs {want}");
        }
    }
}

#[test]
fn maximal_ergodic_sign_for_continuous_processes() {
    let cfg = McConfig::new(TRIALS, 17);
    for name in ["gaussian", "ma_gaussian", "rotation", "mixture"] {
        let e = mc_maximal_ergodic(&common::load(name), 16, &cfg).unwrap();
        assert!(e.mean <= 3.0 * e.std_error, "{name}: {e:?}");
    }
}

fn moments(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let fourth = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    (mean, var, fourth)
}

#[test]
fn continuous_windows_are_shift_stationary() {
    for name in ["gaussian", "ma_gaussian", "rotation", "mixture"] {
        let process = common::load(name);
        let windows: Vec<_> = (0..TRIALS).map(|t| process.sample_window(-3, 3, 8, t).unwrap()).collect();
        let columns: Vec<Vec<f64>> = (-2..=3).map(|k| windows.iter().map(|w| *w.x(k)).collect()).collect();
        let (m0, v0, f0) = moments(&columns[0]);
        let n = TRIALS as f64;
        for (i, col) in columns.iter().enumerate().skip(1) {
            let (m, v, _) = moments(col);
            // Differences of two estimates: standard errors add in quadrature.
            let se_mean = (2.0 * v0 / n).sqrt();
            let se_var = (2.0 * (f0 - v0 * v0) / n).sqrt();
            assert!((m - m0).abs() <= 4.0 * se_mean, "{name} k={i}: mean {m} vs {m0}");
            assert!((v - v0).abs() <= 4.0 * se_var + 1e-12, "{name} k={i}: var {v} vs {v0}");
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let process = common::load("ma_gaussian");
    let cfg = McConfig::new(20_000, 3);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            (
                mc_identity(&process, 6, &cfg).unwrap(),
                mc_survival(&process, 64, &cfg).unwrap(),
                mc_maximal_ergodic(&process, 16, &cfg).unwrap(),
                trajectories(&process, 256, 200, 3).unwrap(),
            )
        })
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one, four);
    // Bit-level, not just PartialEq on floats.
    let bits = |e: &EstimateCI| (e.mean.to_bits(), e.std_error.to_bits());
    assert_eq!(bits(&one.1), bits(&four.1));
}

#[test]
fn mixture_component_means_match_exact_means() {
    let process = common::load("deterministic_mixture");
    let targets = conditional_mean(&process).unwrap();
    for (target, component) in targets.components.iter().zip(process.component_means()) {
        assert_eq!(component.exact.unwrap().to_f64_lossy(), target.mean);
        assert_eq!(component.weight, target.weight);
    }
}

#[test]
fn mixture_trajectories_separate_by_component() {
    let process = common::load("mixture");
    let means: Vec<f64> = conditional_mean(&process).unwrap().components.iter().map(|c| c.mean).collect();
    assert!((means[0] - means[1]).abs() > 0.2);
    let global = process.mean();
    let report = trajectories(&process, 1 << 14, 2000, 31).unwrap();
    for row in &report.rows {
        let last = *row.averages.last().unwrap();
        assert!((last - means[row.component]).abs() <= 0.05, "{row:?}");
        assert!((last - global).abs() > 0.05);
    }
}

#[test]
fn negation_swaps_the_tail_events() {
    let event = AEpsilon::new(0.05, 2048);
    let cfg = McConfig::new(2000, 12);
    for name in ["p06_walk", "gaussian", "mixture"] {
        let process = common::load(name);
        let lower_of_negated = estimate_a_epsilon(&process.negated(), &event, &cfg).unwrap();
        let upper = estimate_upper_epsilon(&process, &event, &cfg).unwrap();
        assert_eq!(lower_of_negated, upper, "{name}");
    }
}

#[test]
fn a_epsilon_surrogate_shrinks_with_horizon() {
    let process = common::load("p06_walk");
    let cfg = McConfig::new(4000, 77);
    let small = estimate_a_epsilon(&process, &AEpsilon::new(0.1, 128), &cfg).unwrap();
    let large = estimate_a_epsilon(&process, &AEpsilon::new(0.1, 4096), &cfg).unwrap();
    assert!(small.mean > 0.05, "{small:?}");
    assert!(large.mean < small.mean);
    assert!(large.mean <= 0.01, "{large:?}");
}
