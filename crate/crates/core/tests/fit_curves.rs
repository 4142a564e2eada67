mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sfwm::counts::{simulate_counts, CountModelParams, CountRecord, PARAM_NAMES};
use sfwm::fit::{fit_cost, fit_count_curves, initial_guess, residuals_and_jacobian, CurveSample};

fn synthetic(seed: u64) -> Vec<CountRecord> {
    simulate_counts(&operating_point(), &delay_scan(), PULSES, seed).unwrap()
}

fn samples(records: &[CountRecord]) -> Vec<CurveSample> {
    records.iter().map(CurveSample::from).collect()
}

fn perturbed(rng: &mut ChaCha8Rng) -> CountModelParams {
    let t = operating_point().to_array();
    let mut v: [f64; 8] = std::array::from_fn(|k| t[k] * (1.0 + 0.3 * (2.0 * rng.random::<f64>() - 1.0)));
    v[7] = t[7] + rng.random_range(-0.5..0.5);
    CountModelParams::from_array(v)
}

#[test]
fn analytic_jacobian_matches_central_differences() {
    let data = samples(&synthetic(1));
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let params = perturbed(&mut rng);
        let (_, jac) = residuals_and_jacobian(&data, &params);
        let base = params.to_array();
        for j in 0..8 {
            let h = 1e-6 * base[j].abs().max(1e-3);
            let shifted = |d: f64| {
                let mut v = base;
                v[j] += d;
                residuals_and_jacobian(&data, &CountModelParams::from_array(v)).0
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            let col = jac.column(j);
            let scale = col.amax();
            for (a, n) in col.iter().zip(fd.iter()) {
                let tol = 1e-5 * a.abs().max(1e-3 * scale);
                assert!((a - n).abs() <= tol, "{}: analytic {a} vs numeric {n}", PARAM_NAMES[j]);
            }
        }
    }
}

#[test]
fn fit_reaches_a_stationary_point_below_the_starting_cost() {
    for seed in [2, 3, 4] {
        let records = synthetic(seed);
        let data = samples(&records);
        let start = initial_guess(&data).unwrap();
        let fit = fit_count_curves(&records, None).unwrap();
        assert!(fit_cost(&data, &fit.params).unwrap() <= fit_cost(&data, &start).unwrap());
        let (res, jac) = residuals_and_jacobian(&data, &fit.params);
        for j in 0..8 {
            let col = jac.column(j);
            let projection = col.dot(&res).abs() / (col.norm() * res.norm());
            assert!(projection < 1e-6, "{}: projection {projection:e}", PARAM_NAMES[j]);
        }
        assert!((fit.chi_square - res.norm_squared()).abs() < 1e-9 * fit.chi_square);
        assert_eq!(fit.dof, 3 * records.len() - 8);
    }
}

#[test]
fn covariance_is_symmetric_and_matches_errors() {
    let fit = fit_count_curves(&synthetic(6), None).unwrap();
    for i in 0..8 {
        assert!((fit.std_errors[i] - fit.covariance[i][i].sqrt()).abs() <= 1e-12 * fit.std_errors[i]);
        for j in 0..8 {
            assert_eq!(fit.covariance[i][j], fit.covariance[j][i]);
        }
    }
    let cov = nalgebra::SMatrix::<f64, 8, 8>::from_fn(|i, j| fit.covariance[i][j]);
    let min_eig = cov.symmetric_eigenvalues().min();
    assert!(min_eig >= -1e-12 * cov.amax(), "{min_eig}");
    assert!(fit.reduced_chi_square > 0.5 && fit.reduced_chi_square < 2.0, "{}", fit.reduced_chi_square);
}

#[test]
fn reflecting_the_delay_axis_mirrors_the_peak() {
    let records = synthetic(7);
    let mirror = 0.25;
    let reflected: Vec<CountRecord> =
        records.iter().rev().map(|r| CountRecord { tau_ps: 2.0 * mirror - r.tau_ps, ..*r }).collect();
    let a = fit_count_curves(&records, None).unwrap();
    let b = fit_count_curves(&reflected, None).unwrap();
    assert!((a.chi_square - b.chi_square).abs() <= 1e-8 * a.chi_square, "{} vs {}", a.chi_square, b.chi_square);
    let peak_b = b.params.peak_delay();
    assert!((peak_b - (2.0 * mirror - a.params.peak_delay())).abs() < 1e-5, "{peak_b}");
    let (va, vb) = (a.params.to_array(), b.params.to_array());
    for k in 0..7 {
        assert!((va[k] - vb[k]).abs() <= 1e-5 * va[k].abs(), "{}: {} vs {}", PARAM_NAMES[k], va[k], vb[k]);
    }
}

/// Per parameter, the fraction of trials whose truth lies within three
/// reported standard errors.
fn coverage(trials: u64) -> [f64; 8] {
    let truth = operating_point().to_array();
    let hits: Vec<[bool; 8]> = (0..trials)
        .into_par_iter()
        .map(|seed| {
            let fit = fit_count_curves(&synthetic(1000 + seed), None).unwrap();
            std::array::from_fn(|k| (fit.params.to_array()[k] - truth[k]).abs() <= 3.0 * fit.std_errors[k])
        })
        .collect();
    std::array::from_fn(|k| hits.iter().filter(|h| h[k]).count() as f64 / trials as f64)
}

#[test]
fn recovered_parameters_cover_truth() {
    let cov = coverage(200);
    for (name, c) in PARAM_NAMES.iter().zip(cov) {
        assert!(c >= 0.95, "{name}: coverage {c}");
    }
}
