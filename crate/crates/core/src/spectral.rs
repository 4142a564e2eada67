//! Joint spectral amplitudes of dual-pump and degenerate-pump SFWM.
//!
//! Detunings `ν_s`, `ν_i` are measured in rad/ps from the phasematched
//! carriers. Every JSA here is unnormalized; [`crate::analysis::normalize`]
//! computes the normalization numerically on the grid for all variants alike.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{inverse_group_velocity, solve_phasematching, Axis, FiberSpec, VALIDITY_WINDOW_NM};
use crate::faddeeva::{erf, erf_window, erfc};
use crate::units::{omega_from_wavelength, sigma_from_fwhm_nm};
use crate::{Error, Result};

/// Points per axis of the automatic grid.
pub const DEFAULT_GRID_POINTS: usize = 256;
/// Points per axis of the coarse pass used to size the automatic grid.
pub const PREPASS_POINTS: usize = 64;
/// Half-width of the automatic grid in marginal standard deviations.
pub const AUTO_SPAN_STDS: f64 = 6.0;

/// A pump pulse: carrier wavelength and amplitude bandwidth σ of
/// `exp(-ν²/σ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpPulse {
    pub wavelength_nm: f64,
    /// Amplitude bandwidth, rad/ps.
    pub sigma: f64,
    /// Average power in mW; informational only.
    pub power_mw: Option<f64>,
}

impl PumpPulse {
    pub fn new(wavelength_nm: f64, sigma: f64) -> Result<Self> {
        let pump = PumpPulse { wavelength_nm, sigma, power_mw: None };
        pump.validate()?;
        Ok(pump)
    }

    /// Pump specified by its intensity FWHM in nm.
    pub fn from_fwhm_nm(wavelength_nm: f64, fwhm_nm: f64) -> Result<Self> {
        if !(fwhm_nm.is_finite() && fwhm_nm > 0.0) {
            return Err(Error::domain(format!("pump FWHM must be positive, got {fwhm_nm} nm")));
        }
        Self::new(wavelength_nm, sigma_from_fwhm_nm(wavelength_nm, fwhm_nm))
    }

    pub fn with_power(mut self, power_mw: f64) -> Self {
        self.power_mw = Some(power_mw);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = VALIDITY_WINDOW_NM;
        if !(self.wavelength_nm >= lo && self.wavelength_nm <= hi) {
            return Err(Error::domain(format!("pump wavelength {} nm outside [{lo}, {hi}] nm", self.wavelength_nm)));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::domain(format!("pump bandwidth must be positive, got {} rad/ps", self.sigma)));
        }
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        omega_from_wavelength(self.wavelength_nm)
    }
}

/// Carriers, group delays and bandwidths that parameterize the JSA.
///
/// `sigma`, `t_s` and `t_i` are derived from the other fields on
/// construction and cannot drift out of sync.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    omega_s: f64,
    omega_i: f64,
    tau_s: f64,
    tau_i: f64,
    tau_p: f64,
    t_s: f64,
    t_i: f64,
    sigma: f64,
    sigma1: f64,
    sigma2: f64,
    length_mm: f64,
}

impl ProcessParams {
    /// Builds the parameter set from the group delays and pump bandwidths.
    pub fn from_delays(
        (omega_s, omega_i): (f64, f64),
        (tau_s, tau_i, tau_p): (f64, f64, f64),
        (sigma1, sigma2): (f64, f64),
        length_mm: f64,
    ) -> Result<Self> {
        if !(sigma1 > 0.0 && sigma2 > 0.0 && sigma1.is_finite() && sigma2.is_finite()) {
            return Err(Error::domain("pump bandwidths must be positive"));
        }
        if ![tau_s, tau_i, tau_p, omega_s, omega_i, length_mm].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("process parameters must be finite"));
        }
        let sum = sigma1 * sigma1 + sigma2 * sigma2;
        let sigma = sigma1 * sigma2 / sum.sqrt();
        let skew = (sigma1 * sigma1 - sigma2 * sigma2) / sum * tau_p / 2.0;
        Ok(ProcessParams {
            omega_s,
            omega_i,
            tau_s,
            tau_i,
            tau_p,
            t_s: tau_s + skew,
            t_i: tau_i + skew,
            sigma,
            sigma1,
            sigma2,
            length_mm,
        })
    }

    pub fn omega_s(&self) -> f64 {
        self.omega_s
    }
    pub fn omega_i(&self) -> f64 {
        self.omega_i
    }
    /// Signal delay relative to the mean pump delay, ps.
    pub fn tau_s(&self) -> f64 {
        self.tau_s
    }
    pub fn tau_i(&self) -> f64 {
        self.tau_i
    }
    /// Pump-pump walk-off accumulated over the fiber, ps.
    pub fn tau_p(&self) -> f64 {
        self.tau_p
    }
    pub fn t_s(&self) -> f64 {
        self.t_s
    }
    pub fn t_i(&self) -> f64 {
        self.t_i
    }
    /// Combined bandwidth `σ₁σ₂/√(σ₁²+σ₂²)`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
    pub fn length_mm(&self) -> f64 {
        self.length_mm
    }

    /// The same process with the signal and idler roles exchanged.
    pub fn with_swapped_arms(&self) -> Self {
        ProcessParams {
            omega_s: self.omega_i,
            omega_i: self.omega_s,
            tau_s: self.tau_i,
            tau_i: self.tau_s,
            t_s: self.t_i,
            t_i: self.t_s,
            ..*self
        }
    }

    fn require_walkoff(&self) -> Result<()> {
        if self.tau_p == 0.0 {
            Err(Error::DegenerateConfiguration)
        } else {
            Ok(())
        }
    }
}

/// Phasematches the pump pair and collects all group delays.
pub fn process_params(fiber: &FiberSpec, pump1: &PumpPulse, pump2: &PumpPulse) -> Result<ProcessParams> {
    fiber.validate()?;
    pump1.validate()?;
    pump2.validate()?;
    let (omega_p1, omega_p2) = (pump1.omega(), pump2.omega());
    let (omega_s, omega_i) = solve_phasematching(fiber, omega_p1, omega_p2)?;
    let pump_axis = fiber.pump_axis();
    let kp1 = inverse_group_velocity(fiber, omega_p1, pump_axis)?;
    let kp2 = inverse_group_velocity(fiber, omega_p2, pump_axis)?;
    let ks = inverse_group_velocity(fiber, omega_s, Axis::Fast)?;
    let ki = inverse_group_velocity(fiber, omega_i, Axis::Fast)?;
    let length = fiber.length_mm;
    let mean_pump = (kp1 + kp2) / 2.0;
    ProcessParams::from_delays(
        (omega_s, omega_i),
        (length * (mean_pump - ks), length * (mean_pump - ki), length * (kp1 - kp2)),
        (pump1.sigma, pump2.sigma),
        length,
    )
}

/// Uniform frequency axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreqAxis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl FreqAxis {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::domain(format!("axis needs at least 2 points, got {len}")));
        }
        if !(step.is_finite() && step > 0.0 && start.is_finite()) {
            return Err(Error::domain(format!("axis step must be positive and finite, got {step}")));
        }
        Ok(FreqAxis { start, step, len })
    }

    /// `len` points spanning `[-half_width, half_width]`.
    pub fn centered(half_width: f64, len: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::domain(format!("axis half-width must be positive, got {half_width}")));
        }
        if len < 2 {
            return Err(Error::domain(format!("axis needs at least 2 points, got {len}")));
        }
        Self::new(-half_width, 2.0 * half_width / (len - 1) as f64, len)
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.start + self.step * idx as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|k| self.value(k))
    }

    pub fn end(&self) -> f64 {
        self.value(self.len - 1)
    }

    /// Same span, `len` points.
    pub fn resampled(&self, len: usize) -> Result<Self> {
        let span = self.end() - self.start;
        Self::new(self.start, span / (len.max(2) - 1) as f64, len)
    }

    pub fn matches(&self, other: &FreqAxis) -> bool {
        let tol = 1e-12 * (self.step.abs() + self.start.abs());
        self.len == other.len && (self.start - other.start).abs() <= tol && (self.step - other.step).abs() <= tol
    }
}

/// Signal × idler grid on which a JSA is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub signal: FreqAxis,
    pub idler: FreqAxis,
}

impl GridSpec {
    pub fn new(signal: FreqAxis, idler: FreqAxis) -> Self {
        GridSpec { signal, idler }
    }

    /// Square grid `[-h, h]²` with `n` points per axis.
    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        let axis = FreqAxis::centered(half_width, n)?;
        Ok(GridSpec { signal: axis, idler: axis })
    }

    pub fn resampled(&self, n: usize) -> Result<Self> {
        Ok(GridSpec { signal: self.signal.resampled(n)?, idler: self.idler.resampled(n)? })
    }

    /// Sizes a grid for `model` from a coarse pre-pass.
    ///
    /// The pre-pass window is grown until it holds `1.5 × AUTO_SPAN_STDS`
    /// marginal standard deviations; the final grid then spans
    /// `|mean| + AUTO_SPAN_STDS·std` around zero on each axis.
    pub fn auto(model: &JsaModel, n: usize) -> Result<Self> {
        let mut half = 4.0 * model.energy_bandwidth();
        let mut moments = None;
        for _ in 0..5 {
            let coarse = model.evaluate(&GridSpec::square(half, PREPASS_POINTS)?);
            let m = MarginalMoments::of(&coarse)?;
            half = 1.5 * AUTO_SPAN_STDS * m.std_s.max(m.std_i) + m.mean_s.abs().max(m.mean_i.abs());
            moments = Some(m);
        }
        let m = moments.expect("pre-pass ran");
        Ok(GridSpec {
            signal: FreqAxis::centered(m.mean_s.abs() + AUTO_SPAN_STDS * m.std_s, n)?,
            idler: FreqAxis::centered(m.mean_i.abs() + AUTO_SPAN_STDS * m.std_i, n)?,
        })
    }
}

struct MarginalMoments {
    mean_s: f64,
    std_s: f64,
    mean_i: f64,
    std_i: f64,
}

impl MarginalMoments {
    fn of(grid: &JsaGrid) -> Result<Self> {
        let intensity = grid.amplitudes.map(|a| a.norm_sqr());
        let total: f64 = intensity.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::DegenerateInput("JSA vanishes on the sizing pre-pass".into()));
        }
        let row_sums: Vec<f64> = intensity.row_iter().map(|r| r.sum()).collect();
        let col_sums: Vec<f64> = intensity.column_iter().map(|c| c.sum()).collect();
        let moments = |axis: &FreqAxis, weights: &[f64]| {
            let mean = axis.values().zip(weights).map(|(x, w)| x * w).sum::<f64>() / total;
            let var = axis.values().zip(weights).map(|(x, w)| (x - mean).powi(2) * w).sum::<f64>() / total;
            (mean, var.sqrt())
        };
        let (mean_s, std_s) = moments(&grid.signal, &row_sums);
        let (mean_i, std_i) = moments(&grid.idler, &col_sums);
        Ok(MarginalMoments { mean_s, std_s, mean_i, std_i })
    }
}

/// A discretized complex JSA: rows follow the signal axis, columns the idler.
#[derive(Debug, Clone, PartialEq)]
pub struct JsaGrid {
    pub signal: FreqAxis,
    pub idler: FreqAxis,
    pub amplitudes: DMatrix<Complex64>,
    pub normalized: bool,
}

impl JsaGrid {
    pub fn new(signal: FreqAxis, idler: FreqAxis, amplitudes: DMatrix<Complex64>, normalized: bool) -> Result<Self> {
        if amplitudes.nrows() != signal.len || amplitudes.ncols() != idler.len {
            return Err(Error::domain(format!(
                "amplitude matrix is {}×{}, axes are {}×{}",
                amplitudes.nrows(),
                amplitudes.ncols(),
                signal.len,
                idler.len
            )));
        }
        Ok(JsaGrid { signal, idler, amplitudes, normalized })
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec { signal: self.signal, idler: self.idler }
    }

    pub fn cell_area(&self) -> f64 {
        self.signal.step * self.idler.step
    }

    /// `Σ|f|²·Δν_s·Δν_i`, summed row by row in a fixed order.
    pub fn norm_squared(&self) -> f64 {
        let mut total = 0.0;
        for r in 0..self.amplitudes.nrows() {
            let mut row = 0.0;
            for c in 0..self.amplitudes.ncols() {
                row += self.amplitudes[(r, c)].norm_sqr();
            }
            total += row;
        }
        total * self.cell_area()
    }

    /// Joint spectral density `|f|²`.
    pub fn intensity(&self) -> DMatrix<f64> {
        self.amplitudes.map(|a| a.norm_sqr())
    }

    /// Exchanges the signal and idler axes.
    pub fn transposed(&self) -> JsaGrid {
        JsaGrid {
            signal: self.idler,
            idler: self.signal,
            amplitudes: self.amplitudes.transpose(),
            normalized: self.normalized,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> JsaGrid {
        JsaGrid { amplitudes: self.amplitudes.map(|a| a * factor), normalized: false, ..self.clone() }
    }
}

/// The analytic JSA families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JsaModel {
    /// Dual-pump amplitude at pump delay `tau` (ps).
    Dual { params: ProcessParams, tau: f64 },
    /// Single-pump Gaussian × sinc amplitude.
    Degenerate { sigma1: f64, sigma2: f64, tau_s: f64, tau_i: f64 },
    /// Complete-collision limit `στ_p ≫ 1`: two Gaussians.
    Asymptotic { params: ProcessParams },
}

impl JsaModel {
    pub fn dual(params: ProcessParams, tau: f64) -> Result<Self> {
        params.require_walkoff()?;
        if !tau.is_finite() {
            return Err(Error::domain("pump delay must be finite"));
        }
        Ok(JsaModel::Dual { params, tau })
    }

    /// Dual-pump amplitude at the delay of maximal mid-fiber overlap, `τ = −τ_p/2`.
    pub fn overlap_max(params: ProcessParams) -> Result<Self> {
        params.require_walkoff()?;
        Ok(JsaModel::Dual { params, tau: -params.tau_p / 2.0 })
    }

    pub fn degenerate(sigma1: f64, sigma2: f64, tau_s: f64, tau_i: f64) -> Result<Self> {
        if !(sigma1 > 0.0 && sigma2 > 0.0 && sigma1.is_finite() && sigma2.is_finite()) {
            return Err(Error::domain("pump bandwidths must be positive"));
        }
        if !(tau_s.is_finite() && tau_i.is_finite()) {
            return Err(Error::domain("group delays must be finite"));
        }
        Ok(JsaModel::Degenerate { sigma1, sigma2, tau_s, tau_i })
    }

    pub fn asymptotic(params: ProcessParams) -> Result<Self> {
        params.require_walkoff()?;
        Ok(JsaModel::Asymptotic { params })
    }

    /// Width scale of the energy-conservation factor, `√(σ₁²+σ₂²)`.
    fn energy_bandwidth(&self) -> f64 {
        match self {
            JsaModel::Dual { params, .. } | JsaModel::Asymptotic { params } => {
                (params.sigma1.powi(2) + params.sigma2.powi(2)).sqrt()
            }
            JsaModel::Degenerate { sigma1, sigma2, .. } => (sigma1.powi(2) + sigma2.powi(2)).sqrt(),
        }
    }

    /// Unnormalized amplitude at detunings `(ν_s, ν_i)` in rad/ps.
    pub fn amplitude(&self, nu_s: f64, nu_i: f64) -> Complex64 {
        match *self {
            JsaModel::Dual { params: p, tau } => {
                let energy = (-(nu_s + nu_i).powi(2) / (p.sigma1.powi(2) + p.sigma2.powi(2))).exp();
                let walkoff = (p.t_s * nu_s + p.t_i * nu_i) / (p.sigma * p.tau_p);
                let upper = p.sigma * (tau + p.tau_p) / 2.0;
                let lower = p.sigma * tau / 2.0;
                energy * erf_window(upper, lower, walkoff)
            }
            JsaModel::Degenerate { sigma1, sigma2, tau_s, tau_i } => {
                let energy = (-(nu_s + nu_i).powi(2) / (sigma1 * sigma1 + sigma2 * sigma2)).exp();
                Complex64::new(energy * sinc(tau_s * nu_s + tau_i * nu_i), 0.0)
            }
            JsaModel::Asymptotic { params: p } => {
                let energy = -(nu_s + nu_i).powi(2) / (p.sigma1.powi(2) + p.sigma2.powi(2));
                let walkoff = (p.t_s * nu_s + p.t_i * nu_i) / (p.sigma * p.tau_p);
                Complex64::new((energy - walkoff * walkoff).exp(), 0.0)
            }
        }
    }

    /// Samples the model on `grid`. Rows are computed in parallel; each
    /// entry depends only on its own coordinates, so the result is identical
    /// to a serial evaluation.
    pub fn evaluate(&self, grid: &GridSpec) -> JsaGrid {
        let (rows, cols) = (grid.signal.len, grid.idler.len);
        let data: Vec<Vec<Complex64>> = (0..rows)
            .into_par_iter()
            .map(|r| {
                let nu_s = grid.signal.value(r);
                (0..cols).map(|c| self.amplitude(nu_s, grid.idler.value(c))).collect()
            })
            .collect();
        let amplitudes = DMatrix::from_fn(rows, cols, |r, c| data[r][c]);
        JsaGrid { signal: grid.signal, idler: grid.idler, amplitudes, normalized: false }
    }
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Dual-pump JSA at pump delay `tau` (ps).
pub fn jsa_dual(params: &ProcessParams, tau: f64, grid: &GridSpec) -> Result<JsaGrid> {
    Ok(JsaModel::dual(*params, tau)?.evaluate(grid))
}

/// Dual-pump JSA at maximal pump overlap, `τ = −τ_p/2`.
pub fn jsa_overlap_max(params: &ProcessParams, grid: &GridSpec) -> Result<JsaGrid> {
    Ok(JsaModel::overlap_max(*params)?.evaluate(grid))
}

/// Single-pump JSA: Gaussian energy factor times `sinc(τ_sν_s + τ_iν_i)`.
pub fn jsa_degenerate(sigma1: f64, sigma2: f64, tau_s: f64, tau_i: f64, grid: &GridSpec) -> Result<JsaGrid> {
    Ok(JsaModel::degenerate(sigma1, sigma2, tau_s, tau_i)?.evaluate(grid))
}

/// Two-Gaussian JSA of the complete-collision regime.
pub fn jsa_asymptotic(params: &ProcessParams, grid: &GridSpec) -> Result<JsaGrid> {
    Ok(JsaModel::asymptotic(*params)?.evaluate(grid))
}

/// `erf(x₁) − erf(x₀)` without cancellation when both arguments sit in the
/// same tail.
pub(crate) fn erf_difference(x1: f64, x0: f64) -> f64 {
    if x1 >= 0.0 && x0 >= 0.0 {
        erfc(x0) - erfc(x1)
    } else if x1 <= 0.0 && x0 <= 0.0 {
        erfc(-x1) - erfc(-x0)
    } else {
        erf(x1) - erf(x0)
    }
}

/// Pair-generation probability relative to its maximum, `p(τ)/p_max`.
pub fn pair_probability_ratio(tau: f64, sigma: f64, tau_p: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::domain(format!("σ must be positive, got {sigma}")));
    }
    if tau_p == 0.0 {
        return Err(Error::DegenerateConfiguration);
    }
    if !(tau.is_finite() && tau_p.is_finite()) {
        return Err(Error::domain("delays must be finite"));
    }
    let root2 = std::f64::consts::SQRT_2;
    let numerator = erf_difference(sigma * (tau + tau_p) / root2, sigma * tau / root2);
    let half = sigma * tau_p / (2.0 * root2);
    let denominator = erf_difference(half, -half);
    Ok((numerator / denominator).max(0.0))
}

/// Correlation metric `(σ₁²+σ₂²)T_sT_i + (στ_p)²`; zero means the
/// asymptotic JSA factorizes.
pub fn factorability_metric(params: &ProcessParams) -> f64 {
    (params.sigma1.powi(2) + params.sigma2.powi(2)) * params.t_s * params.t_i + (params.sigma * params.tau_p).powi(2)
}
