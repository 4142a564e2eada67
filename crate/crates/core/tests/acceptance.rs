//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sfwm::analysis::{normalize, purity_with_convergence, schmidt_purity};
use sfwm::counts::{expected_counts, simulate_counts, CountModelParams};
use sfwm::faddeeva::complex_erf;
use sfwm::fit::{fit_count_curves, residuals_and_jacobian, CurveSample};
use sfwm::purity::{purity_bounds, MixtureModel, PurityInputs};
use sfwm::spectral::{pair_probability_ratio, GridSpec, JsaModel};
use sfwm::Estimate;

const DEGENERATE_PURITY_RANGE: (f64, f64) = (0.80, 0.86);
const TABLE_TOLERANCE: f64 = 0.05;
const CORRECTION_TOLERANCE: f64 = 0.02;
const CORRECTED_ROWS: [(f64, f64, f64); 3] = [(0.382, 0.66, 0.882), (0.344, 0.62, 0.907), (0.245, 0.50, 0.974)];
const RATIO_REL_TOL: f64 = 1e-6;
const ORACLE_TRIPLES: usize = 10;
const COVERAGE_TRIALS: u64 = 200;
const COVERAGE_MIN: f64 = 0.95;
const COVERAGE_SIGMAS: f64 = 3.0;
const ASYMPTOTE_TOL: f64 = 0.01;
const PEAK_G2_MIN: f64 = 10.0;
const SOUNDNESS_MODELS: usize = 1000;
const ERF_REL_TOL: f64 = 1e-10;
const ERF_POINTS: usize = 100;
const DRIFT_TOL: f64 = 1e-3;
const JACOBIAN_REL_TOL: f64 = 1e-5;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn degenerate_purity() -> Outcome {
    let model = degenerate_model();
    let report = purity_with_convergence(&model, &GridSpec::auto(&model, 256).unwrap()).unwrap();
    let p = report.purity();
    let (lo, hi) = DEGENERATE_PURITY_RANGE;
    outcome((lo..=hi).contains(&p), format!("P = {p:.4} in [{lo}, {hi}] at 256²"))
}

fn table_trend() -> Outcome {
    let mut purities = Vec::new();
    let mut within = true;
    for (_, lambda2, published) in TABLE_ROWS {
        let model = JsaModel::overlap_max(dual_params(lambda2)).unwrap();
        let p = purity_with_convergence(&model, &GridSpec::auto(&model, 256).unwrap()).unwrap().purity();
        within &= (p - published).abs() <= TABLE_TOLERANCE;
        purities.push(p);
    }
    let increasing = purities.windows(2).all(|w| w[1] > w[0]);
    let shown: Vec<String> = purities.iter().map(|p| format!("{p:.4}")).collect();
    outcome(
        within && increasing,
        format!("P(120/150/187 nm) = {} vs 0.884/0.921/0.953 ± {TABLE_TOLERANCE}, increasing = {increasing}", shown.join("/")),
    )
}

fn purity_correction() -> Outcome {
    let zero = Estimate::exact(0.0);
    let mut ok = true;
    let mut shown = Vec::new();
    for (p_raw, r, expected) in CORRECTED_ROWS {
        let b = purity_bounds(&PurityInputs::symmetric(Estimate::exact(p_raw), zero, zero, r, 0.0)).unwrap();
        ok &= b.is_point() && (b.upper.value - expected).abs() <= CORRECTION_TOLERANCE;
        shown.push(format!("{:.3}", b.upper.value));
    }
    outcome(ok, format!("P = {} vs 0.882/0.907/0.974 ± {CORRECTION_TOLERANCE}", shown.join("/")))
}

fn ratio_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..ORACLE_TRIPLES {
        let p = oracle_params(rng.random_range(8.0..40.0), rng.random_range(3.0..20.0), rng.random_range(0.2..2.0));
        let (sigma, tau_p) = (p.sigma(), p.tau_p());
        let tau = -tau_p / 2.0 + rng.random_range(-1.0..1.0) * (tau_p / 2.0 + 1.5 / sigma);
        let expected = walkoff_integral(&p, tau) / walkoff_integral(&p, -tau_p / 2.0);
        let got = pair_probability_ratio(tau, sigma, tau_p).unwrap();
        worst = worst.max((got - expected).abs() / expected);
    }
    outcome(worst < RATIO_REL_TOL, format!("max relative deviation {worst:.2e} < {RATIO_REL_TOL:e} over {ORACLE_TRIPLES} triples"))
}

fn fit_coverage() -> Outcome {
    let truth = operating_point().to_array();
    let hits: Vec<[bool; 8]> = (0..COVERAGE_TRIALS)
        .into_par_iter()
        .map(|seed| {
            let records = simulate_counts(&operating_point(), &delay_scan(), PULSES, 1000 + seed).unwrap();
            match fit_count_curves(&records, None) {
                Ok(fit) => std::array::from_fn(|k| (fit.params.to_array()[k] - truth[k]).abs() <= COVERAGE_SIGMAS * fit.std_errors[k]),
                Err(_) => [false; 8],
            }
        })
        .collect();
    let coverage: Vec<f64> = (0..8).map(|k| hits.iter().filter(|h| h[k]).count() as f64 / COVERAGE_TRIALS as f64).collect();
    let min = coverage.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        min >= COVERAGE_MIN,
        format!("min coverage within {COVERAGE_SIGMAS}σ = {min:.3} ≥ {COVERAGE_MIN} over {COVERAGE_TRIALS} trials"),
    )
}

fn g2_asymptotics() -> Outcome {
    let params = operating_point();
    let g = |tau: f64| expected_counts(&params, tau, PULSES).unwrap().cross_correlation(PULSES);
    let far = [-30.0, -3.0, 3.0, 30.0].map(|t| (g(t) - 1.0).abs()).into_iter().fold(0.0, f64::max);
    let peak = g(params.peak_delay());
    outcome(
        far <= ASYMPTOTE_TOL && peak > PEAK_G2_MIN,
        format!("|g² − 1| = {far:.2e} ≤ {ASYMPTOTE_TOL} at |τ| ≥ 3 ps, peak g² = {peak:.2} > {PEAK_G2_MIN}"),
    )
}

fn bounds_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sound = 0;
    let mut collapsed = 0;
    for _ in 0..SOUNDNESS_MODELS {
        let purity = rng.random_range(0.0..=1.0);
        let purity_spurious = rng.random_range(0.0..=1.0);
        let model = MixtureModel {
            purity,
            purity_spurious,
            purity_detection: rng.random_range(0.0..=1.0),
            w: rng.random_range(0.02..=1.0),
            v_s: rng.random_range(0.0..0.9),
            v_s2: rng.random_range(0.0..0.9),
            overlap: rng.random_range(0.0..=1.0) * (purity * purity_spurious).sqrt(),
        };
        let inputs = model.purity_inputs().unwrap();
        let b = purity_bounds(&inputs).unwrap();
        if b.lower.value <= purity + 1e-12 && purity <= b.upper.value + 1e-12 {
            sound += 1;
        }
        let quiet = PurityInputs { t_s: Estimate::exact(0.0), t_s2: Estimate::exact(0.0), ..inputs };
        let matched = PurityInputs { p_noise: Estimate::exact(inputs.u_s.value * inputs.u_s2.value * inputs.p_det.value), ..inputs };
        if purity_bounds(&quiet).unwrap().is_point() && purity_bounds(&matched).unwrap().is_point() {
            collapsed += 1;
        }
    }
    outcome(
        sound == SOUNDNESS_MODELS && collapsed == SOUNDNESS_MODELS,
        format!("P inside bounds for {sound}/{SOUNDNESS_MODELS}, collapse at t = 0 and P_noise = u²P_det for {collapsed}/{SOUNDNESS_MODELS}"),
    )
}

/// Maclaurin series of erf, summed until the terms stop contributing.
fn erf_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut power = z;
    let mut sum = z;
    let mut n = 0.0;
    loop {
        n += 1.0;
        power *= -z2 / n;
        let term = power / (2.0 * n + 1.0);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

fn jacobian_deviation() -> f64 {
    let records = simulate_counts(&operating_point(), &delay_scan(), PULSES, 1).unwrap();
    let data: Vec<CurveSample> = records.iter().map(CurveSample::from).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let t = operating_point().to_array();
        let mut base: [f64; 8] = std::array::from_fn(|k| t[k] * (1.0 + 0.3 * (2.0 * rng.random::<f64>() - 1.0)));
        base[7] = t[7] + rng.random_range(-0.5..0.5);
        let (_, jac) = residuals_and_jacobian(&data, &CountModelParams::from_array(base));
        for j in 0..8 {
            let h = 1e-6 * base[j].abs().max(1e-3);
            let at = |d: f64| {
                let mut v = base;
                v[j] += d;
                residuals_and_jacobian(&data, &CountModelParams::from_array(v)).0
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            let col = jac.column(j);
            let floor = 1e-3 * col.amax();
            for (a, n) in col.iter().zip(fd.iter()) {
                worst = worst.max((a - n).abs() / a.abs().max(floor));
            }
        }
    }
    worst
}

fn numerical_hygiene() -> Outcome {
    let mut erf_worst: f64 = 0.0;
    for k in 0..ERF_POINTS {
        let radius = 0.05 + 1.95 * (k / 10) as f64 / 9.0;
        let angle = std::f64::consts::TAU * ((k % 10) as f64 + 0.37) / 10.0;
        let z = Complex64::from_polar(radius, angle);
        let exact = erf_series(z);
        erf_worst = erf_worst.max((complex_erf(z).unwrap() - exact).norm() / exact.norm());
    }
    let mut drift: f64 = 0.0;
    let models = [degenerate_model()]
        .into_iter()
        .chain(TABLE_ROWS.iter().map(|row| JsaModel::overlap_max(dual_params(row.1)).unwrap()));
    for model in models {
        let grid = GridSpec::auto(&model, 256).unwrap();
        let coarse = schmidt_purity(&normalize(&model.evaluate(&grid)).unwrap()).unwrap().purity;
        let fine = schmidt_purity(&normalize(&model.evaluate(&grid.resampled(512).unwrap())).unwrap()).unwrap().purity;
        drift = drift.max((coarse - fine).abs());
    }
    let jac = jacobian_deviation();
    outcome(
        erf_worst <= ERF_REL_TOL && drift < DRIFT_TOL && jac < JACOBIAN_REL_TOL,
        format!(
            "erf {erf_worst:.1e} ≤ {ERF_REL_TOL:e} on {ERF_POINTS} points; 256→512 drift {drift:.1e} < {DRIFT_TOL:e}; Jacobian {jac:.1e} < {JACOBIAN_REL_TOL:e}"
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 8] = [
        ("1 degenerate-pump purity", degenerate_purity, Duration::from_secs(10)),
        ("2 detuning purity trend", table_trend, Duration::from_secs(60)),
        ("3 noise-free purity correction", purity_correction, Duration::from_secs(1)),
        ("4 pair probability vs quadrature", ratio_oracle, Duration::from_secs(30)),
        ("5 fit coverage", fit_coverage, Duration::from_secs(300)),
        ("6 g² asymptotics", g2_asymptotics, Duration::from_secs(10)),
        ("7 purity bounds soundness", bounds_soundness, Duration::from_secs(30)),
        ("8 numerical hygiene", numerical_hygiene, Duration::from_secs(120)),
    ];
    let mut failures = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let passed = result.passed && elapsed <= limit;
        failures += usize::from(!passed);
        println!(
            "{} {name}: {}; {:.2} s (limit {} s)",
            if passed { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
