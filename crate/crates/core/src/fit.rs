//! Joint Levenberg–Marquardt fit of the singles and coincidence curves.
//!
//! Residuals are Poisson-weighted, `(y − m)/√max(v, 1)` with `v` the model
//! variance (`scale·m` for singles, `m` for coincidences). The optimizer
//! works on transformed parameters so that every iterate is valid:
//! logarithms for `N_s`, `N_i`, `σ`, `τ_p`, logits for the efficiencies and
//! for `p_max/0.1`, and `τ_c` unchanged.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::counts::{CountModelParams, CountRecord, MAX_PAIR_PROBABILITY};
use crate::spectral::erf_difference;
use crate::{Error, Result};

const NPAR: usize = 8;
/// Fewest records accepted by the fit.
pub const MIN_RECORDS: usize = 12;

/// One point of the three curves. Counts are real-valued so that exact
/// model means can be fitted as well as integer data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub tau_ps: f64,
    /// Recorded signal singles (before scaling).
    pub c_s: f64,
    pub c_i: f64,
    pub c_si: f64,
    pub r: f64,
    pub scale: f64,
}

impl From<&CountRecord> for CurveSample {
    fn from(rec: &CountRecord) -> Self {
        CurveSample {
            tau_ps: rec.tau_ps,
            c_s: rec.c_s as f64,
            c_i: rec.c_i as f64,
            c_si: rec.c_si as f64,
            r: rec.r as f64,
            scale: rec.scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Stop once an accepted step lowers the cost by less than this fraction.
    pub rel_cost_tol: f64,
    /// Stop once the gradient of the cost in transformed parameters is this small.
    pub gradient_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_iterations: 500, rel_cost_tol: 1e-10, gradient_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: CountModelParams,
    /// Standard errors in the order of [`crate::counts::PARAM_NAMES`].
    pub std_errors: [f64; NPAR],
    pub covariance: [[f64; NPAR]; NPAR],
    /// Sum of squared weighted residuals.
    pub chi_square: f64,
    pub dof: usize,
    pub reduced_chi_square: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

impl FitResult {
    /// `(value, std_err)` of each parameter.
    pub fn estimates(&self) -> [(f64, f64); NPAR] {
        let v = self.params.to_array();
        std::array::from_fn(|k| (v[k], self.std_errors[k]))
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn to_internal(p: &CountModelParams) -> [f64; NPAR] {
    [
        p.n_s.ln(),
        p.n_i.ln(),
        logit(p.eta_s),
        logit(p.eta_i),
        logit(p.p_max / MAX_PAIR_PROBABILITY),
        p.sigma.ln(),
        p.tau_p.ln(),
        p.tau_c,
    ]
}

fn from_internal(t: &[f64]) -> CountModelParams {
    CountModelParams {
        n_s: t[0].exp(),
        n_i: t[1].exp(),
        eta_s: sigmoid(t[2]),
        eta_i: sigmoid(t[3]),
        p_max: MAX_PAIR_PROBABILITY * sigmoid(t[4]),
        sigma: t[5].exp(),
        tau_p: t[6].exp(),
        tau_c: t[7],
    }
}

/// `d(physical)/d(internal)` for each parameter.
fn chain_factors(p: &CountModelParams) -> [f64; NPAR] {
    let frac = p.p_max / MAX_PAIR_PROBABILITY;
    [
        p.n_s,
        p.n_i,
        p.eta_s * (1.0 - p.eta_s),
        p.eta_i * (1.0 - p.eta_i),
        p.p_max * (1.0 - frac),
        p.sigma,
        p.tau_p,
        1.0,
    ]
}

fn erf_slope(x: f64) -> f64 {
    2.0 / PI.sqrt() * (-x * x).exp()
}

/// `p(τ)/p_max` and its derivatives with respect to `(σ, τ_p, τ_c)`.
fn ratio_with_gradient(tau: f64, sigma: f64, tau_p: f64) -> (f64, [f64; 3]) {
    let a = sigma * (tau + tau_p) / SQRT_2;
    let b = sigma * tau / SQRT_2;
    let c = sigma * tau_p / (2.0 * SQRT_2);
    let num = erf_difference(a, b);
    let den = erf_difference(c, -c);
    let (ea, eb, ec) = (erf_slope(a), erf_slope(b), erf_slope(c));
    let dnum = [
        (ea * (tau + tau_p) - eb * tau) / SQRT_2,
        ea * sigma / SQRT_2,
        -(ea - eb) * sigma / SQRT_2,
    ];
    let dden = [ec * tau_p / SQRT_2, ec * sigma / SQRT_2, 0.0];
    let q = num / den;
    (q, std::array::from_fn(|k| (dnum[k] - q * dden[k]) / den))
}

/// Model means `(C_s, C_i, C_si)` and their gradients in physical parameters.
fn model_with_gradient(p: &CountModelParams, tau_exp: f64, r: f64) -> ([f64; 3], [[f64; NPAR]; 3]) {
    let (q, dq) = ratio_with_gradient(tau_exp - p.tau_c, p.sigma, p.tau_p);
    let pair = p.p_max * q;
    let CountModelParams { n_s, n_i, eta_s, eta_i, .. } = *p;
    let m_s = n_s + eta_s * pair * r;
    let m_i = n_i + eta_i * pair * r;
    let m_si = n_s * n_i / r + (1.0 - eta_s) * pair * n_i + (1.0 - eta_i) * pair * n_s + eta_s * eta_i * pair * r;

    // d(pair)/d(p_max, σ, τ_p, τ_c)
    let dpair = [q, p.p_max * dq[0], p.p_max * dq[1], p.p_max * dq[2]];
    let with_pair = |direct: [f64; 5], slope: f64| -> [f64; NPAR] {
        [direct[0], direct[1], direct[2], direct[3], direct[4] + slope * dpair[0], slope * dpair[1], slope * dpair[2], slope * dpair[3]]
    };
    let g_s = with_pair([1.0, 0.0, pair * r, 0.0, 0.0], eta_s * r);
    let g_i = with_pair([0.0, 1.0, 0.0, pair * r, 0.0], eta_i * r);
    let slope_si = (1.0 - eta_s) * n_i + (1.0 - eta_i) * n_s + eta_s * eta_i * r;
    let g_si = with_pair(
        [
            n_i / r + (1.0 - eta_i) * pair,
            n_s / r + (1.0 - eta_s) * pair,
            -pair * n_i + eta_i * pair * r,
            -pair * n_s + eta_s * pair * r,
            0.0,
        ],
        slope_si,
    );
    ([m_s, m_i, m_si], [g_s, g_i, g_si])
}

/// Weighted residual of one observation and its derivative factor
/// `dr/dm` (including the model-dependent weight).
fn weighted_residual(y: f64, m: f64, var_scale: f64) -> (f64, f64) {
    let var = var_scale * m;
    if var > 1.0 {
        let sd = var.sqrt();
        ((y - m) / sd, -1.0 / sd - (y - m) * var_scale / (2.0 * var * sd))
    } else {
        (y - m, -1.0)
    }
}

/// Residual vector (C_s, C_i, C_si interleaved per sample) and its
/// Jacobian with respect to the physical parameters.
pub fn residuals_and_jacobian(samples: &[CurveSample], params: &CountModelParams) -> (DVector<f64>, DMatrix<f64>) {
    let n = samples.len();
    let mut res = DVector::zeros(3 * n);
    let mut jac = DMatrix::zeros(3 * n, NPAR);
    for (k, s) in samples.iter().enumerate() {
        let (m, g) = model_with_gradient(params, s.tau_ps, s.r);
        let obs = [(s.scale * s.c_s, s.scale), (s.scale * s.c_i, s.scale), (s.c_si, 1.0)];
        for curve in 0..3 {
            let (r, drdm) = weighted_residual(obs[curve].0, m[curve], obs[curve].1);
            let row = 3 * k + curve;
            res[row] = r;
            for j in 0..NPAR {
                jac[(row, j)] = drdm * g[curve][j];
            }
        }
    }
    (res, jac)
}

/// Sum of squared weighted residuals.
pub fn fit_cost(samples: &[CurveSample], params: &CountModelParams) -> Result<f64> {
    params.validate()?;
    Ok(residuals_and_jacobian(samples, params).0.norm_squared())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn smooth3(values: &[f64]) -> Vec<f64> {
    (0..values.len())
        .map(|k| {
            let lo = k.saturating_sub(1);
            let hi = (k + 1).min(values.len() - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

fn sorted_by_delay(samples: &[CurveSample]) -> Vec<CurveSample> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.tau_ps.total_cmp(&b.tau_ps));
    sorted
}

struct PeakSummary {
    base: [f64; 3],
    excess: [f64; 3],
    peak_index: usize,
    width: f64,
}

/// Baselines from the outer 20% of the scan, peak from the smoothed
/// coincidence curve, width from its half-maximum crossings.
fn summarize(sorted: &[CurveSample]) -> Result<PeakSummary> {
    let n = sorted.len();
    let outer = (n / 10).max(1);
    let curves: [Vec<f64>; 3] = [
        sorted.iter().map(|s| s.scale * s.c_s).collect(),
        sorted.iter().map(|s| s.scale * s.c_i).collect(),
        sorted.iter().map(|s| s.c_si).collect(),
    ];
    let base: [f64; 3] = std::array::from_fn(|c| {
        let mut edge: Vec<f64> = curves[c][..outer].iter().chain(&curves[c][n - outer..]).copied().collect();
        median(&mut edge)
    });
    let smoothed: [Vec<f64>; 3] = std::array::from_fn(|c| smooth3(&curves[c]));
    let peak_index = (0..n).max_by(|&a, &b| smoothed[2][a].total_cmp(&smoothed[2][b])).expect("non-empty");
    let excess: [f64; 3] = std::array::from_fn(|c| smoothed[c][peak_index] - base[c]);

    let noise = base[2].max(1.0).sqrt();
    if !(excess[2] > 3.0 * noise) {
        return Err(Error::Identifiability(format!(
            "no coincidence peak above baseline at 3σ (excess {:.3}, baseline {:.3})",
            excess[2], base[2]
        )));
    }
    if peak_index == 0 || peak_index == n - 1 {
        return Err(Error::Identifiability("coincidence peak lies at the edge of the delay scan".into()));
    }

    let half = base[2] + excess[2] / 2.0;
    let crossing = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        for k in range {
            let (a, b) = (smoothed[2][k], smoothed[2][k + 1]);
            if (a - half) * (b - half) <= 0.0 && a != b {
                let (ta, tb) = (sorted[k].tau_ps, sorted[k + 1].tau_ps);
                return Some(ta + (half - a) / (b - a) * (tb - ta));
            }
        }
        None
    };
    let left = crossing(&mut (0..peak_index).rev());
    let right = crossing(&mut (peak_index..n - 1));
    let step = (sorted[n - 1].tau_ps - sorted[0].tau_ps) / (n - 1) as f64;
    let width = match (left, right) {
        (Some(l), Some(r)) => (r - l).max(step),
        _ => return Err(Error::Identifiability("coincidence peak is not resolved inside the delay scan".into())),
    };
    Ok(PeakSummary { base, excess, peak_index, width })
}

/// Starting point for the fit, from the shape of the data alone.
///
/// The excess amplitudes of the three curves fix `η_s·p`, `η_i·p` and a
/// quadratic in `p`; the root on the high-noise branch is taken (see
/// [`alternate_solution`]).
pub fn initial_guess(samples: &[CurveSample]) -> Result<CountModelParams> {
    check_samples(samples)?;
    let sorted = sorted_by_delay(samples);
    let summary = summarize(&sorted)?;
    let peak = &sorted[summary.peak_index];
    let r = peak.r;
    let n_s = summary.base[0].max(1.0);
    let n_i = summary.base[1].max(1.0);
    let a = summary.excess[0].max(1.0) / r;
    let b = summary.excess[1].max(1.0) / r;
    let excess_si = summary.excess[2];
    // (N_s + N_i)p² − (ΔC_si + aN_i + bN_s)p + abR = 0
    let alpha = n_s + n_i;
    let linear = excess_si + a * n_i + b * n_s;
    let disc = (linear * linear - 4.0 * alpha * a * b * r).max(0.0);
    let high = (linear + disc.sqrt()) / (2.0 * alpha);
    let low = 2.0 * a * b * r / (linear + disc.sqrt());
    let valid = |p: f64| p < 0.9 * MAX_PAIR_PROBABILITY && a / p < 0.95 && b / p < 0.95;
    let p_max = if valid(high) { high } else { low }.clamp(1e-7, 0.9 * MAX_PAIR_PROBABILITY);
    let tau_p = summary.width;
    Ok(CountModelParams {
        n_s,
        n_i,
        eta_s: (a / p_max).clamp(1e-3, 0.95),
        eta_i: (b / p_max).clamp(1e-3, 0.95),
        p_max,
        sigma: 4.0 / summary.width,
        tau_p,
        tau_c: peak.tau_ps + tau_p / 2.0,
    })
}

/// The other parameter set that produces exactly the same mean curves.
///
/// The coincidence model depends on `p_max` only through
/// `p(N_s + N_i) + η_sη_i p R` at fixed `η_s p`, `η_i p`, so
/// `p' = η_sη_i p R/(N_s + N_i)` with `η' = η p/p'` is indistinguishable
/// from the data. Returns `None` if the mirror leaves the valid range. The
/// fit reports the branch with `N_s + N_i ≥ η_sη_i R` (larger `p_max`)
/// whenever that branch is valid.
pub fn alternate_solution(params: &CountModelParams, r: f64) -> Option<CountModelParams> {
    let alpha = params.n_s + params.n_i;
    if !(alpha > 0.0) || params.p_max <= 0.0 {
        return None;
    }
    let p_alt = params.eta_s * params.eta_i * params.p_max * r / alpha;
    let scale = params.p_max / p_alt;
    let alt = CountModelParams { p_max: p_alt, eta_s: params.eta_s * scale, eta_i: params.eta_i * scale, ..*params };
    let strictly_inside = alt.eta_s < 1.0 && alt.eta_i < 1.0 && alt.p_max < MAX_PAIR_PROBABILITY && alt.p_max > 0.0;
    strictly_inside.then_some(alt)
}

fn check_samples(samples: &[CurveSample]) -> Result<()> {
    if samples.len() < MIN_RECORDS {
        return Err(Error::Identifiability(format!("need at least {MIN_RECORDS} records, got {}", samples.len())));
    }
    for s in samples {
        let finite = [s.tau_ps, s.c_s, s.c_i, s.c_si, s.r, s.scale].iter().all(|v| v.is_finite());
        if !finite || s.r <= 0.0 || s.scale <= 0.0 || s.c_s < 0.0 || s.c_i < 0.0 || s.c_si < 0.0 {
            return Err(Error::InconsistentData(format!("invalid record at τ = {} ps", s.tau_ps)));
        }
    }
    Ok(())
}

/// Fits integer count records; see [`fit_samples`].
pub fn fit_count_curves(records: &[CountRecord], guess: Option<CountModelParams>) -> Result<FitResult> {
    for rec in records {
        rec.validate()?;
    }
    let samples: Vec<CurveSample> = records.iter().map(CurveSample::from).collect();
    fit_samples(&samples, guess, &FitOptions::default())
}

fn internal_system(samples: &[CurveSample], theta: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let params = from_internal(theta);
    let (res, mut jac) = residuals_and_jacobian(samples, &params);
    for (j, f) in chain_factors(&params).iter().enumerate() {
        jac.column_mut(j).scale_mut(*f);
    }
    (res, jac)
}

/// Joint fit of all three curves over the eight shared parameters.
pub fn fit_samples(samples: &[CurveSample], guess: Option<CountModelParams>, opts: &FitOptions) -> Result<FitResult> {
    check_samples(samples)?;
    let start = match guess {
        Some(g) => {
            g.validate()?;
            g
        }
        None => initial_guess(samples)?,
    };
    let internal_ok = start.n_s > 0.0 && start.n_i > 0.0 && start.eta_s > 0.0 && start.eta_s < 1.0
        && start.eta_i > 0.0 && start.eta_i < 1.0 && start.p_max > 0.0 && start.p_max < MAX_PAIR_PROBABILITY;
    if !internal_ok {
        return Err(Error::domain("initial guess must lie strictly inside the parameter bounds"));
    }

    let mut theta = to_internal(&start).to_vec();
    let (mut res, mut jac) = internal_system(samples, &theta);
    let mut cost = res.norm_squared();
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut gradient_norm;
    loop {
        let grad = jac.transpose() * &res;
        gradient_norm = grad.norm();
        if gradient_norm < opts.gradient_tol {
            break;
        }
        if iterations >= opts.max_iterations {
            return Err(Error::NonConvergence {
                iterations,
                cost,
                gradient_norm,
                last: from_internal(&theta).to_array(),
            });
        }
        iterations += 1;

        let normal = jac.transpose() * &jac;
        let mut accepted = false;
        let mut stalled = false;
        while !accepted {
            let mut damped = normal.clone();
            for j in 0..NPAR {
                damped[(j, j)] += lambda * normal[(j, j)].max(1e-12);
            }
            let step = match damped.cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, d)| t + d).collect();
            let (trial_res, trial_jac) = internal_system(samples, &trial);
            let trial_cost = trial_res.norm_squared();
            if trial_cost.is_finite() && trial_cost <= cost {
                let rel_change = (cost - trial_cost) / cost.max(f64::MIN_POSITIVE);
                theta = trial;
                res = trial_res;
                jac = trial_jac;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if rel_change < opts.rel_cost_tol {
                    stalled = true;
                }
            } else {
                lambda *= 4.0;
                if lambda > 1e16 {
                    // no descent direction left at working precision
                    stalled = true;
                    break;
                }
            }
        }
        if stalled {
            gradient_norm = (jac.transpose() * &res).norm();
            break;
        }
    }

    let mut params = from_internal(&theta);
    if let Some(alt) = common_pulse_count(samples).and_then(|r| alternate_solution(&params, r)) {
        if alt.p_max > params.p_max {
            params = alt;
        }
    }
    let (res_phys, jac_phys) = residuals_and_jacobian(samples, &params);
    let dof = res_phys.len().saturating_sub(NPAR).max(1);
    let chi_square = res_phys.norm_squared();
    let reduced = chi_square / dof as f64;
    let covariance = covariance(&jac_phys, reduced)?;
    let std_errors = std::array::from_fn(|k| covariance[k][k].max(0.0).sqrt());
    Ok(FitResult { params, std_errors, covariance, chi_square, dof, reduced_chi_square: reduced, iterations, gradient_norm })
}

/// The two solutions are exact mirrors only when every record shares one `R`.
fn common_pulse_count(samples: &[CurveSample]) -> Option<f64> {
    let r = samples[0].r;
    samples.iter().all(|s| s.r == r).then_some(r)
}

/// `s²(JᵀJ)⁻¹` with column equilibration for conditioning.
fn covariance(jac: &DMatrix<f64>, scale: f64) -> Result<[[f64; NPAR]; NPAR]> {
    let norms: Vec<f64> = jac.column_iter().map(|c| c.norm()).collect();
    if norms.iter().any(|n| !(*n > 0.0)) {
        return Err(Error::Identifiability("a parameter has no influence on the data".into()));
    }
    let mut scaled = jac.clone();
    for (j, n) in norms.iter().enumerate() {
        scaled.column_mut(j).unscale_mut(*n);
    }
    let inv = (scaled.transpose() * &scaled)
        .try_inverse()
        .ok_or_else(|| Error::Identifiability("normal matrix is singular".into()))?;
    let mut cov = [[0.0; NPAR]; NPAR];
    for i in 0..NPAR {
        for j in 0..NPAR {
            let v = scale * inv[(i, j)] / (norms[i] * norms[j]);
            cov[i][j] = v;
        }
    }
    // enforce exact symmetry
    for i in 0..NPAR {
        for j in 0..i {
            let v = (cov[i][j] + cov[j][i]) / 2.0;
            cov[i][j] = v;
            cov[j][i] = v;
        }
    }
    Ok(cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::expected_counts;
    use approx::assert_relative_eq;

    fn truth() -> CountModelParams {
        CountModelParams { n_s: 1.0e4, n_i: 1.4e7, eta_s: 0.134, eta_i: 0.107, p_max: 6.0e-3, sigma: 10.7, tau_p: 0.43, tau_c: 0.5 }
    }

    fn exact_samples(p: &CountModelParams) -> Vec<CurveSample> {
        (0..41)
            .map(|k| {
                let tau = -3.0 + 0.15 * k as f64;
                let e = expected_counts(p, tau, 800_000_000).unwrap();
                CurveSample { tau_ps: tau, c_s: e.c_s, c_i: e.c_i, c_si: e.c_si, r: 8e8, scale: 1.0 }
            })
            .collect()
    }

    #[test]
    fn transforms_round_trip() {
        let p = truth();
        let back = from_internal(&to_internal(&p));
        for (a, b) in p.to_array().iter().zip(back.to_array()) {
            assert_relative_eq!(*a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn ratio_gradient_matches_differences() {
        for (tau, sigma, tau_p) in [(0.1, 10.7, 0.43), (-0.4, 5.0, 1.2), (0.9, 20.0, 0.3)] {
            let (_, g) = ratio_with_gradient(tau, sigma, tau_p);
            let h = 1e-6;
            let num = [
                (ratio_with_gradient(tau, sigma + h, tau_p).0 - ratio_with_gradient(tau, sigma - h, tau_p).0) / (2.0 * h),
                (ratio_with_gradient(tau, sigma, tau_p + h).0 - ratio_with_gradient(tau, sigma, tau_p - h).0) / (2.0 * h),
                (ratio_with_gradient(tau - h, sigma, tau_p).0 - ratio_with_gradient(tau + h, sigma, tau_p).0) / (2.0 * h),
            ];
            for k in 0..3 {
                assert!((g[k] - num[k]).abs() < 1e-6 * (1.0 + g[k].abs()), "{k}: {} vs {}", g[k], num[k]);
            }
        }
    }

    #[test]
    fn noiseless_recovery_from_guess() {
        let samples = exact_samples(&truth());
        let fit = fit_samples(&samples, None, &FitOptions::default()).unwrap();
        for (name, (a, b)) in crate::counts::PARAM_NAMES.iter().zip(fit.params.to_array().iter().zip(truth().to_array())) {
            assert!((a - b).abs() <= 1e-6 * b.abs(), "{name}: {a} vs {b}");
        }
    }

    #[test]
    fn too_few_records() {
        let samples = exact_samples(&truth());
        assert!(matches!(fit_samples(&samples[..11], None, &FitOptions::default()), Err(Error::Identifiability(_))));
    }

    #[test]
    fn flat_data_is_not_identifiable() {
        let flat = CountModelParams { p_max: 1e-9, ..truth() };
        let samples = exact_samples(&flat);
        assert!(matches!(initial_guess(&samples), Err(Error::Identifiability(_))));
    }

    #[test]
    fn iteration_cap_reports_last_iterate() {
        let samples = exact_samples(&truth());
        let opts = FitOptions { max_iterations: 1, ..FitOptions::default() };
        match fit_samples(&samples, None, &opts) {
            Err(Error::NonConvergence { iterations, last, .. }) => {
                assert_eq!(iterations, 1);
                assert!(last.iter().all(|v| v.is_finite()));
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
