//! `sfwm purity`: noise-corrected purity bounds from a bundle of
//! signal-arm autocorrelation counts.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sfwm::purity::{noise_fractions, purity_bounds, AutoCounts, PurityBounds, PurityInputs};
use sfwm::Estimate;

use crate::output::{json_with_provenance, write_atomic, Provenance};
use crate::CliError;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct Window {
    #[serde(rename = "C_s")]
    c_s: u64,
    #[serde(rename = "C_s'")]
    c_s2: u64,
    #[serde(rename = "C_ss'")]
    c_ss2: u64,
    /// Overrides the bundle-level pulse count.
    #[serde(rename = "R")]
    r: Option<u64>,
}

/// Counts at the correlation peak, far from it, and with the pump blocked.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct Bundle {
    #[serde(rename = "R")]
    r: Option<u64>,
    tau0: Window,
    far: Window,
    dark: Window,
}

impl Bundle {
    fn window(&self, w: &Window, key: &str) -> Result<AutoCounts, CliError> {
        let r = w.r.or(self.r).ok_or_else(|| CliError::schema(format!("{key}: no R given here or at the top level")))?;
        if r == 0 {
            return Err(CliError::schema(format!("{key}.R must be positive")));
        }
        Ok(AutoCounts { c_s: w.c_s, c_s2: w.c_s2, c_ss2: w.c_ss2, r })
    }
}

pub fn parse_bundle(bytes: &[u8]) -> Result<[AutoCounts; 3], CliError> {
    let b: Bundle = serde_json::from_slice(bytes).map_err(|e| CliError::schema(format!("purity bundle: {e}")))?;
    Ok([b.window(&b.tau0, "tau0")?, b.window(&b.far, "far")?, b.window(&b.dark, "dark")?])
}

#[derive(Debug, Clone, Serialize)]
pub struct PurityReport {
    pub counts: [AutoCounts; 3],
    pub inputs: PurityInputs,
    pub r: Estimate,
    pub bounds: PurityBounds,
}

impl PurityReport {
    /// One table row: `P_raw  P_noise  r  P`, where `P` is a point estimate
    /// or a `[lower, upper]` interval.
    pub fn row(&self) -> String {
        let e = |x: &Estimate| format!("{:.3}({:.0})", x.value, (x.std_err * 1e3).round());
        let b = &self.bounds;
        let p = if b.is_point() { e(&b.upper) } else { format!("[{}, {}]", e(&b.lower), e(&b.upper)) };
        let mut row = format!("{:<14} {:<14} {:<14} {}", e(&self.inputs.p_raw), e(&self.inputs.p_noise), e(&self.r), p);
        if b.clamped {
            row.push_str("  (noise term clamped at zero)");
        }
        if b.exceeds_unity {
            row.push_str("  (upper bound exceeds one)");
        }
        row
    }
}

pub const ROW_HEADER: &str = "P_raw          P_noise        r              P";

pub fn run(bytes: &[u8], provenance: &Provenance, out: Option<&Path>) -> Result<PurityReport, CliError> {
    let counts = parse_bundle(bytes)?;
    let [peak, far, dark] = counts;
    let inputs = noise_fractions(&peak, &far, &dark)?;
    let bounds = purity_bounds(&inputs)?;
    let report = PurityReport { counts, inputs, r: inputs.r_estimate(), bounds };
    if let Some(dir) = out {
        write_atomic(&dir.join("purity.json"), &json_with_provenance(provenance, &report)?)?;
    }
    Ok(report)
}
