//! Fiber dispersion: Sellmeier index, wavenumbers, inverse group velocities
//! and the birefringent phasematching solver.
//!
//! The pumps travel on the slow axis and the signal/idler on the fast axis,
//! so the slow-axis wavenumber is the fast-axis one plus `Δn·ω/c` with a
//! wavelength-independent birefringence `Δn`.

use serde::{Deserialize, Serialize};

use crate::units::{omega_from_wavelength, wavelength_from_omega, SPEED_OF_LIGHT};
use crate::{Error, Result};

/// Wavelength window (nm) over which a Sellmeier model may be evaluated.
pub const VALIDITY_WINDOW_NM: (f64, f64) = (300.0, 2000.0);

/// Relative central-difference step used for `dk/dω`.
pub const DEFAULT_DIFF_STEP: f64 = 1e-6;

/// Three-term Sellmeier model `n² = 1 + Σ Bⱼ λ² / (λ² − Cⱼ²)`, λ in µm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SellmeierModel {
    /// Resonance strengths `Bⱼ` (dimensionless).
    pub strengths: [f64; 3],
    /// Resonance wavelengths `Cⱼ` in µm.
    pub resonances_um: [f64; 3],
}

impl SellmeierModel {
    /// Fused silica (Malitson 1965).
    pub const FUSED_SILICA: SellmeierModel = SellmeierModel {
        strengths: [0.696_166_3, 0.407_942_6, 0.897_479_4],
        resonances_um: [0.068_404_3, 0.116_241_4, 9.896_161],
    };

    pub fn new(strengths: [f64; 3], resonances_um: [f64; 3]) -> Result<Self> {
        let model = SellmeierModel { strengths, resonances_um };
        model.validate()?;
        Ok(model)
    }

    /// Checks positivity of every coefficient and `n > 1` on 400–1700 nm.
    pub fn validate(&self) -> Result<()> {
        let coeffs = self.strengths.iter().chain(self.resonances_um.iter());
        if coeffs.clone().any(|c| !c.is_finite() || *c <= 0.0) {
            return Err(Error::domain("Sellmeier coefficients must be finite and strictly positive"));
        }
        for lambda in (400..=1700).map(f64::from) {
            let n2 = self.index_squared(lambda);
            if !n2.is_finite() || n2 <= 1.0 {
                return Err(Error::domain(format!(
                    "Sellmeier model gives n² = {n2} at {lambda} nm; expected a real index above 1"
                )));
            }
        }
        Ok(())
    }

    fn index_squared(&self, lambda_nm: f64) -> f64 {
        let l2 = (lambda_nm * 1e-3).powi(2);
        1.0 + self
            .strengths
            .iter()
            .zip(&self.resonances_um)
            .map(|(b, c)| b * l2 / (l2 - c * c))
            .sum::<f64>()
    }
}

impl Default for SellmeierModel {
    fn default() -> Self {
        SellmeierModel::FUSED_SILICA
    }
}

/// Polarization axis of the birefringent fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Fast,
    Slow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec {
    pub length_mm: f64,
    pub birefringence: f64,
    pub dispersion: SellmeierModel,
    /// Pumps polarized along the slow axis (signal and idler on the fast axis).
    pub pumps_on_slow_axis: bool,
}

impl FiberSpec {
    pub fn new(length_mm: f64, birefringence: f64, dispersion: SellmeierModel) -> Result<Self> {
        let fiber = FiberSpec { length_mm, birefringence, dispersion, pumps_on_slow_axis: true };
        fiber.validate()?;
        Ok(fiber)
    }

    /// Polarization-maintaining fused-silica fiber with the given length.
    pub fn pm_silica(length_mm: f64, birefringence: f64) -> Result<Self> {
        Self::new(length_mm, birefringence, SellmeierModel::FUSED_SILICA)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_mm.is_finite() && self.length_mm > 0.0) {
            return Err(Error::domain(format!("fiber length must be positive, got {} mm", self.length_mm)));
        }
        if !(self.birefringence.is_finite() && self.birefringence >= 0.0) {
            return Err(Error::domain(format!("birefringence must be non-negative, got {}", self.birefringence)));
        }
        self.dispersion.validate()
    }

    pub fn pump_axis(&self) -> Axis {
        if self.pumps_on_slow_axis {
            Axis::Slow
        } else {
            Axis::Fast
        }
    }

    fn axis_offset(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Fast => 0.0,
            Axis::Slow => self.birefringence,
        }
    }
}

/// Fast-axis refractive index at `lambda_nm`.
pub fn refractive_index(model: &SellmeierModel, lambda_nm: f64) -> Result<f64> {
    let (lo, hi) = VALIDITY_WINDOW_NM;
    if !(lambda_nm >= lo && lambda_nm <= hi) {
        return Err(Error::domain(format!("wavelength {lambda_nm} nm outside [{lo}, {hi}] nm")));
    }
    Ok(model.index_squared(lambda_nm).sqrt())
}

/// `k = n(ω)·ω/c` in rad/mm; the slow axis adds `Δn·ω/c`.
pub fn wavenumber(fiber: &FiberSpec, omega: f64, axis: Axis) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(format!("angular frequency must be positive, got {omega} rad/ps")));
    }
    let n = refractive_index(&fiber.dispersion, wavelength_from_omega(omega))?;
    Ok((n + fiber.axis_offset(axis)) * omega / SPEED_OF_LIGHT)
}

/// Inverse group velocity `dk/dω` in ps/mm, by central difference.
pub fn inverse_group_velocity(fiber: &FiberSpec, omega: f64, axis: Axis) -> Result<f64> {
    inverse_group_velocity_with_step(fiber, omega, axis, DEFAULT_DIFF_STEP)
}

/// As [`inverse_group_velocity`] with an explicit relative step `h/ω`.
pub fn inverse_group_velocity_with_step(fiber: &FiberSpec, omega: f64, axis: Axis, rel_step: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(format!("angular frequency must be positive, got {omega} rad/ps")));
    }
    let h = rel_step * omega;
    let up = wavenumber(fiber, omega + h, Axis::Fast)?;
    let down = wavenumber(fiber, omega - h, Axis::Fast)?;
    Ok((up - down) / (2.0 * h) + fiber.axis_offset(axis) / SPEED_OF_LIGHT)
}

/// Knobs of the phasematching root finder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bracketing scan step in signal wavelength, nm.
    pub scan_step_nm: f64,
    /// Bisection stops when the bracket is below this fraction of `ω_s`.
    pub rel_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { scan_step_nm: 0.5, rel_tol: 1e-12 }
    }
}

/// Phase mismatch `Δk` (rad/mm) for the pump pair and a trial signal
/// frequency; the idler follows from energy conservation.
pub fn phase_mismatch(fiber: &FiberSpec, omega_p1: f64, omega_p2: f64, omega_s: f64) -> Result<f64> {
    let omega_i = omega_p1 + omega_p2 - omega_s;
    let pump_axis = fiber.pump_axis();
    Ok(wavenumber(fiber, omega_p1, pump_axis)? + wavenumber(fiber, omega_p2, pump_axis)?
        - wavenumber(fiber, omega_s, Axis::Fast)?
        - wavenumber(fiber, omega_i, Axis::Fast)?)
}

/// Solves `Δk(ω_s) = 0` with `ω_i = ω_p1 + ω_p2 − ω_s` and `ω_s > ω_i`.
/// Returns `(ω_s, ω_i)` in rad/ps.
pub fn solve_phasematching(fiber: &FiberSpec, omega_p1: f64, omega_p2: f64) -> Result<(f64, f64)> {
    solve_phasematching_with(fiber, omega_p1, omega_p2, SolverOptions::default())
}

pub fn solve_phasematching_with(
    fiber: &FiberSpec,
    omega_p1: f64,
    omega_p2: f64,
    opts: SolverOptions,
) -> Result<(f64, f64)> {
    let (lo_nm, hi_nm) = VALIDITY_WINDOW_NM;
    for omega in [omega_p1, omega_p2] {
        let lambda = wavelength_from_omega(omega);
        if !(omega > 0.0 && (lo_nm..=hi_nm).contains(&lambda)) {
            return Err(Error::domain(format!("pump carrier at {lambda} nm outside [{lo_nm}, {hi_nm}] nm")));
        }
    }
    let total = omega_p1 + omega_p2;
    let mismatch = |omega_s: f64| phase_mismatch(fiber, omega_p1, omega_p2, omega_s);
    let idler_in_window = |omega_s: f64| wavelength_from_omega(total - omega_s) <= hi_nm;

    let lambda_mid = wavelength_from_omega(total / 2.0);
    let mut prev_omega = total / 2.0;
    let mut prev = mismatch(prev_omega)?;
    // ω_s = ω_i is always a trivial root when Δk vanishes there
    if prev <= 0.0 {
        return Err(Error::NoPhasematch(format!(
            "Δk = {prev:.3e} rad/mm at the degenerate point; no root with ω_s > ω_i"
        )));
    }
    let mut step = 1;
    let bracket = loop {
        let lambda_s = lambda_mid - opts.scan_step_nm * step as f64;
        step += 1;
        if lambda_s < lo_nm {
            break None;
        }
        let omega_s = omega_from_wavelength(lambda_s);
        if !idler_in_window(omega_s) {
            break None;
        }
        let dk = mismatch(omega_s)?;
        if dk == 0.0 {
            return Ok((omega_s, total - omega_s));
        }
        if dk.signum() != prev.signum() {
            break Some((prev_omega, prev, omega_s));
        }
        prev_omega = omega_s;
        prev = dk;
    };
    let Some((mut lo, mut f_lo, mut hi)) = bracket else {
        return Err(Error::NoPhasematch(format!(
            "Δk keeps one sign for signal wavelengths below {lambda_mid:.2} nm within the validity window"
        )));
    };

    for _ in 0..200 {
        if (hi - lo).abs() <= opts.rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = mismatch(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let omega_s = 0.5 * (lo + hi);
    Ok((omega_s, total - omega_s))
}
