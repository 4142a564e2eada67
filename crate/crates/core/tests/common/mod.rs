#![allow(dead_code)]

use sfwm::counts::CountModelParams;
use sfwm::dispersion::FiberSpec;
use sfwm::spectral::{process_params, JsaModel, ProcessParams, PumpPulse};
use std::f64::consts::PI;

pub const FIBER_LENGTH_MM: f64 = 16.0;
pub const BIREFRINGENCE: f64 = 3.5e-4;
pub const DEGENERATE_PUMP_NM: f64 = 715.0;
pub const DEGENERATE_FWHM_NM: f64 = 1.75;
pub const PUMP1_NM: f64 = 772.0;
pub const PUMP1_FWHM_NM: f64 = 8.0;
pub const PUMP2_FWHM_NM: f64 = 3.0;
/// (detuning nm, pump-2 wavelength nm, published theory purity)
pub const TABLE_ROWS: [(f64, f64, f64); 3] = [(120.0, 652.0, 0.884), (150.0, 622.0, 0.921), (187.0, 585.0, 0.953)];
pub const PULSES: u64 = 800_000_000;

pub fn fiber() -> FiberSpec {
    FiberSpec::pm_silica(FIBER_LENGTH_MM, BIREFRINGENCE).unwrap()
}

pub fn degenerate_params() -> ProcessParams {
    let pump = PumpPulse::from_fwhm_nm(DEGENERATE_PUMP_NM, DEGENERATE_FWHM_NM).unwrap();
    process_params(&fiber(), &pump, &pump).unwrap()
}

pub fn degenerate_model() -> JsaModel {
    let p = degenerate_params();
    JsaModel::degenerate(p.sigma1(), p.sigma2(), p.tau_s(), p.tau_i()).unwrap()
}

pub fn dual_params(pump2_nm: f64) -> ProcessParams {
    let p1 = PumpPulse::from_fwhm_nm(PUMP1_NM, PUMP1_FWHM_NM).unwrap();
    let p2 = PumpPulse::from_fwhm_nm(pump2_nm, PUMP2_FWHM_NM).unwrap();
    process_params(&fiber(), &p1, &p2).unwrap()
}

/// Synthetic operating point matching the published fit and peak g².
pub fn operating_point() -> CountModelParams {
    CountModelParams { n_s: 1.0e4, n_i: 1.4e7, eta_s: 0.134, eta_i: 0.107, p_max: 6.0e-3, sigma: 10.7, tau_p: 0.43, tau_c: 0.5 }
}

pub fn delay_scan() -> Vec<f64> {
    (0..41).map(|k| -3.0 + 0.15 * k as f64).collect()
}

// 8-point Gauss–Legendre on [−1, 1]
const GL_NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
const WALKOFF_CUTOFF: f64 = 1000.0;
const PANEL: f64 = 0.125;

pub fn oracle_params(sigma1: f64, sigma2: f64, tau_p: f64) -> ProcessParams {
    // T_s, T_i only set the Jacobian of the change of variables, which cancels
    ProcessParams::from_delays((2400.0, 2300.0), (0.9, -0.4, tau_p), (sigma1, sigma2), 16.0).unwrap()
}

/// ∬|F|² over the walk-off coordinate `X` only: `|F|²` factorises into a
/// τ-independent Gaussian in `ν_s+ν_i` and a window in `X`, so the ratio
/// of double integrals equals the ratio of these line integrals.
pub fn walkoff_integral(p: &ProcessParams, tau: f64) -> f64 {
    let model = JsaModel::dual(*p, tau).unwrap();
    let scale = p.sigma() * p.tau_p() / (p.t_s() - p.t_i());
    let density = |x: f64| model.amplitude(scale * x, -scale * x).norm_sqr();
    let panels = (2.0 * WALKOFF_CUTOFF / PANEL) as usize;
    let mut sum = 0.0;
    for k in 0..panels {
        let mid = -WALKOFF_CUTOFF + (k as f64 + 0.5) * PANEL;
        let half = PANEL / 2.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            sum += w * half * (density(mid - half * x) + density(mid + half * x));
        }
    }
    // |F|² ~ (e^{−2a²} + e^{−2b²})/(πX²) beyond the cutoff; the cross term oscillates away
    let a = p.sigma() * (tau + p.tau_p()) / 2.0;
    let b = p.sigma() * tau / 2.0;
    sum + 2.0 * ((-2.0 * a * a).exp() + (-2.0 * b * b).exp()) / (PI * WALKOFF_CUTOFF)
}
