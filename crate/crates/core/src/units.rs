//! Unit constants and conversions.
//!
//! Everything inside the crate runs in ps / mm / rad·ps⁻¹. Wavelengths cross
//! the API in nm.

use std::f64::consts::PI;

/// Speed of light in vacuum, mm/ps.
pub const SPEED_OF_LIGHT: f64 = 0.299_792_458;

const NM_PER_MM: f64 = 1.0e6;

/// Vacuum wavelength (nm) to angular frequency (rad/ps).
pub fn omega_from_wavelength(lambda_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * NM_PER_MM / lambda_nm
}

/// Angular frequency (rad/ps) to vacuum wavelength (nm).
pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * NM_PER_MM / omega
}

/// Converts a wavelength FWHM (nm) at carrier `lambda_nm` into an
/// angular-frequency FWHM (rad/ps), `Δω = 2πc·Δλ/λ²`.
pub fn fwhm_nm_to_omega(lambda_nm: f64, fwhm_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * NM_PER_MM * fwhm_nm / (lambda_nm * lambda_nm)
}

/// Intensity FWHM (rad/ps) to the amplitude bandwidth σ of `exp(-ν²/σ²)`.
///
/// The intensity `exp(-2ν²/σ²)` falls to half at `ν = σ·sqrt(ln2 / 2)`, so
/// `FWHM = σ·sqrt(2 ln 2)`.
pub fn sigma_from_fwhm(fwhm_omega: f64) -> f64 {
    fwhm_omega / (2.0 * std::f64::consts::LN_2).sqrt()
}

pub fn fwhm_from_sigma(sigma: f64) -> f64 {
    sigma * (2.0 * std::f64::consts::LN_2).sqrt()
}

/// Amplitude bandwidth σ (rad/ps) of a pump with the given wavelength FWHM.
pub fn sigma_from_fwhm_nm(lambda_nm: f64, fwhm_nm: f64) -> f64 {
    sigma_from_fwhm(fwhm_nm_to_omega(lambda_nm, fwhm_nm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wavelength_round_trip() {
        for lambda in [400.0, 772.0, 1550.0] {
            assert_relative_eq!(wavelength_from_omega(omega_from_wavelength(lambda)), lambda, max_relative = 1e-14);
        }
    }

    #[test]
    fn fwhm_convention_halves_intensity() {
        let sigma = 3.7;
        let half = fwhm_from_sigma(sigma) / 2.0;
        let intensity = (-2.0 * half * half / (sigma * sigma)).exp();
        assert_relative_eq!(intensity, 0.5, max_relative = 1e-14);
        assert_relative_eq!(sigma_from_fwhm(fwhm_from_sigma(sigma)), sigma, max_relative = 1e-14);
    }

    #[test]
    fn eight_nm_at_772() {
        // 2πc·Δλ/λ² with c in nm/ps
        let d = fwhm_nm_to_omega(772.0, 8.0);
        assert_relative_eq!(d, 2.0 * PI * 299_792.458 * 8.0 / (772.0 * 772.0), max_relative = 1e-14);
    }
}
