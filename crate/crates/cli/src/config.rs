//! Run configuration (TOML). Every dimensioned key carries its unit in the
//! key name.
//!
//! ```toml
//! seed = 7
//! output_dir = "out"
//!
//! [fiber]
//! length_mm = 16.0
//! birefringence = 3.5e-4
//!
//! [grid]
//! points = 256
//!
//! [[jsd]]
//! label = "detuned-187"
//! pump1 = { wavelength_nm = 772.0, fwhm_nm = 8.0 }
//! pump2 = { wavelength_nm = 585.0, fwhm_nm = 3.0 }
//!
//! [simulate]
//! r_pulses = 800000000
//! tau_start_ps = -3.0
//! tau_stop_ps = 3.0
//! tau_points = 41
//! model = { n_s = 1.0e4, n_i = 1.4e7, eta_s = 0.134, eta_i = 0.107, p_max = 6.0e-3,
//!           sigma_rad_per_ps = 10.7, tau_p_ps = 0.43, tau_c_ps = 0.5 }
//! ```

use std::collections::HashSet;
use std::path::PathBuf;

use serde::Deserialize;
use sfwm::counts::CountModelParams;
use sfwm::dispersion::{FiberSpec, SellmeierModel};
use sfwm::spectral::{PumpPulse, DEFAULT_GRID_POINTS};

use crate::CliError;

/// Smallest accepted grid side.
pub const MIN_GRID_POINTS: usize = 8;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub fiber: FiberConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub jsd: Vec<JsdEntry>,
    pub simulate: Option<SimulateConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberConfig {
    pub length_mm: f64,
    pub birefringence: f64,
    /// Overrides the built-in fused-silica coefficients.
    pub sellmeier: Option<SellmeierConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierConfig {
    pub strengths: [f64; 3],
    pub resonances_um: [f64; 3],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { points: DEFAULT_GRID_POINTS }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    pub wavelength_nm: f64,
    pub fwhm_nm: Option<f64>,
    pub sigma_rad_per_ps: Option<f64>,
    pub power_mw: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsdEntry {
    pub label: String,
    pub pump1: PumpConfig,
    /// Omitted for a single (degenerate) pump.
    pub pump2: Option<PumpConfig>,
    /// Pump delay; the overlap maximum when omitted.
    pub delay_ps: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub r_pulses: u64,
    pub tau_start_ps: f64,
    pub tau_stop_ps: f64,
    pub tau_points: usize,
    pub model: ModelConfig,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n_s: f64,
    pub n_i: f64,
    pub eta_s: f64,
    pub eta_i: f64,
    pub p_max: f64,
    pub sigma_rad_per_ps: f64,
    pub tau_p_ps: f64,
    pub tau_c_ps: f64,
}

impl ModelConfig {
    pub fn params(&self) -> CountModelParams {
        CountModelParams {
            n_s: self.n_s,
            n_i: self.n_i,
            eta_s: self.eta_s,
            eta_i: self.eta_i,
            p_max: self.p_max,
            sigma: self.sigma_rad_per_ps,
            tau_p: self.tau_p_ps,
            tau_c: self.tau_c_ps,
        }
    }
}

impl PumpConfig {
    pub fn pulse(&self, key: &str) -> Result<PumpPulse, CliError> {
        let pulse = match (self.fwhm_nm, self.sigma_rad_per_ps) {
            (Some(fwhm), None) => PumpPulse::from_fwhm_nm(self.wavelength_nm, fwhm),
            (None, Some(sigma)) => PumpPulse::new(self.wavelength_nm, sigma),
            _ => return Err(CliError::schema(format!("{key}: give exactly one of fwhm_nm or sigma_rad_per_ps"))),
        }
        .map_err(|e| CliError::schema(format!("{key}: {e}")))?;
        Ok(match self.power_mw {
            Some(p) => pulse.with_power(p),
            None => pulse,
        })
    }
}

impl SimulateConfig {
    pub fn delays(&self) -> Vec<f64> {
        if self.tau_points == 1 {
            return vec![self.tau_start_ps];
        }
        let step = (self.tau_stop_ps - self.tau_start_ps) / (self.tau_points - 1) as f64;
        (0..self.tau_points).map(|k| self.tau_start_ps + step * k as f64).collect()
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::schema(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn fiber_spec(&self) -> Result<FiberSpec, CliError> {
        let dispersion = match &self.fiber.sellmeier {
            Some(s) => SellmeierModel::new(s.strengths, s.resonances_um)
                .map_err(|e| CliError::schema(format!("fiber.sellmeier: {e}")))?,
            None => SellmeierModel::FUSED_SILICA,
        };
        FiberSpec::new(self.fiber.length_mm, self.fiber.birefringence, dispersion)
            .map_err(|e| CliError::schema(format!("fiber: {e}")))
    }

    fn validate(&self) -> Result<(), CliError> {
        self.fiber_spec()?;
        if self.grid.points < MIN_GRID_POINTS {
            return Err(CliError::schema(format!("grid.points: need at least {MIN_GRID_POINTS}, got {}", self.grid.points)));
        }
        let mut labels = HashSet::new();
        for (k, entry) in self.jsd.iter().enumerate() {
            let key = format!("jsd[{k}]");
            let safe = !entry.label.is_empty()
                && entry.label.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
                && !entry.label.starts_with('.');
            if !safe {
                return Err(CliError::schema(format!("{key}.label: {:?} must be non-empty ASCII [A-Za-z0-9._-]", entry.label)));
            }
            if !labels.insert(entry.label.as_str()) {
                return Err(CliError::schema(format!("{key}.label: duplicate label {:?}", entry.label)));
            }
            entry.pump1.pulse(&format!("{key}.pump1"))?;
            if let Some(p2) = &entry.pump2 {
                p2.pulse(&format!("{key}.pump2"))?;
            }
            if entry.delay_ps.is_some_and(|d| !d.is_finite()) {
                return Err(CliError::schema(format!("{key}.delay_ps: must be finite")));
            }
        }
        if let Some(sim) = &self.simulate {
            if sim.r_pulses == 0 {
                return Err(CliError::schema("simulate.r_pulses: must be positive"));
            }
            if sim.tau_points == 0 || !sim.tau_start_ps.is_finite() || !sim.tau_stop_ps.is_finite() {
                return Err(CliError::schema("simulate: the delay scan needs finite bounds and at least one point"));
            }
            sim.model.params().validate().map_err(|e| CliError::schema(format!("simulate.model: {e}")))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[fiber]\nlength_mm = 16.0\nbirefringence = 3.5e-4\n";

    #[test]
    fn minimal_config_uses_defaults() {
        let c = RunConfig::parse(BASE).unwrap();
        assert_eq!(c.grid.points, DEFAULT_GRID_POINTS);
        assert!(c.jsd.is_empty() && c.simulate.is_none());
    }

    #[test]
    fn both_bandwidths_are_rejected_with_key() {
        let text = format!("{BASE}[[jsd]]\nlabel = \"a\"\npump1 = {{ wavelength_nm = 715.0, fwhm_nm = 1.0, sigma_rad_per_ps = 2.0 }}\n");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("jsd[0].pump1"), "{err}");
    }

    #[test]
    fn unknown_keys_report_their_line() {
        let text = format!("{BASE}wavelength = 3\n");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("line 4") && err.contains("wavelength"), "{err}");
    }

    #[test]
    fn delay_scan_is_inclusive() {
        let sim = SimulateConfig {
            r_pulses: 1,
            tau_start_ps: -3.0,
            tau_stop_ps: 3.0,
            tau_points: 41,
            model: ModelConfig {
                n_s: 0.0,
                n_i: 0.0,
                eta_s: 0.1,
                eta_i: 0.1,
                p_max: 0.0,
                sigma_rad_per_ps: 1.0,
                tau_p_ps: 1.0,
                tau_c_ps: 0.0,
            },
        };
        let d = sim.delays();
        assert_eq!(d.len(), 41);
        assert_eq!(d[0], -3.0);
        assert!((d[40] - 3.0).abs() < 1e-12);
    }
}
