//! Purity, Schmidt number, fidelity, overlap and marginals of discretized JSAs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::{GridSpec, JsaGrid, JsaModel};
use crate::{Error, Result};

/// Tolerance on `Σ|f|²ΔΔ = 1` for a grid to count as normalized.
const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtResult {
    /// Singular values of `f·√(Δν_sΔν_i)`, descending.
    pub singular_values: Vec<f64>,
    pub purity: f64,
    pub schmidt_number: f64,
}

/// Purity together with its value at half resolution, so the
/// discretization error is visible next to the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityReport {
    pub grid: GridSpec,
    pub schmidt: SchmidtResult,
    pub purity_half_resolution: f64,
}

impl PurityReport {
    pub fn purity(&self) -> f64 {
        self.schmidt.purity
    }

    pub fn discretization_drift(&self) -> f64 {
        (self.schmidt.purity - self.purity_half_resolution).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginals {
    /// Probability per signal bin.
    pub signal: Vec<f64>,
    /// Probability per idler bin.
    pub idler: Vec<f64>,
}

pub fn normalize(grid: &JsaGrid) -> Result<JsaGrid> {
    let norm = grid.norm_squared();
    if !(norm > 0.0) {
        return Err(Error::DegenerateInput("JSA is identically zero".into()));
    }
    if !norm.is_finite() {
        return Err(Error::DegenerateInput("JSA norm is not finite".into()));
    }
    let scale = norm.sqrt().recip();
    let mut out = grid.scaled(Complex64::new(scale, 0.0));
    out.normalized = true;
    Ok(out)
}

fn require_normalized(grid: &JsaGrid) -> Result<()> {
    if !grid.normalized || (grid.norm_squared() - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized);
    }
    Ok(())
}

fn require_same_axes(a: &JsaGrid, b: &JsaGrid) -> Result<()> {
    if !a.signal.matches(&b.signal) {
        return Err(Error::AxisMismatch(format!("signal axes {:?} vs {:?}", a.signal, b.signal)));
    }
    if !a.idler.matches(&b.idler) {
        return Err(Error::AxisMismatch(format!("idler axes {:?} vs {:?}", a.idler, b.idler)));
    }
    Ok(())
}

fn weighted(grid: &JsaGrid) -> DMatrix<Complex64> {
    let w = grid.cell_area().sqrt();
    grid.amplitudes.map(|a| a * w)
}

pub fn schmidt_purity(grid: &JsaGrid) -> Result<SchmidtResult> {
    require_normalized(grid)?;
    let svd = weighted(grid).svd(false, false);
    let mut singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = singular_values.iter().map(|s| s * s).sum();
    let purity = singular_values.iter().map(|s| s.powi(4)).sum::<f64>() / (total * total);
    Ok(SchmidtResult { singular_values, purity, schmidt_number: 1.0 / purity })
}

/// Evaluates `model` on `grid` and at half resolution, returning both purities.
pub fn purity_with_convergence(model: &JsaModel, grid: &GridSpec) -> Result<PurityReport> {
    let full = normalize(&model.evaluate(grid))?;
    let half_grid = grid.resampled(grid.signal.len.max(grid.idler.len) / 2)?;
    let half = normalize(&model.evaluate(&half_grid))?;
    Ok(PurityReport {
        grid: *grid,
        schmidt: schmidt_purity(&full)?,
        purity_half_resolution: schmidt_purity(&half)?.purity,
    })
}

/// Spectral fidelity `∬√(|a|²|b|²)`.
pub fn jsd_fidelity(a: &JsaGrid, b: &JsaGrid) -> Result<f64> {
    require_normalized(a)?;
    require_normalized(b)?;
    require_same_axes(a, b)?;
    let sum: f64 = a.amplitudes.iter().zip(b.amplitudes.iter()).map(|(x, y)| x.norm() * y.norm()).sum();
    Ok((sum * a.cell_area()).clamp(0.0, 1.0))
}

/// Reduced signal density matrix `ρ = ÂÂ†` on the signal grid, with `Â`
/// the bin-weighted amplitude matrix.
pub fn reduced_signal_state(grid: &JsaGrid) -> Result<DMatrix<Complex64>> {
    require_normalized(grid)?;
    let a = weighted(grid);
    Ok(&a * a.adjoint())
}

/// `Tr(ρ_aρ_b)` of the two reduced signal states.
pub fn state_overlap(a: &JsaGrid, b: &JsaGrid) -> Result<f64> {
    require_same_axes(a, b)?;
    let rho_a = reduced_signal_state(a)?;
    let rho_b = reduced_signal_state(b)?;
    // Tr(AB) = Σ_jk A_jk B_kj; both are Hermitian so B_kj = conj(B_jk)
    let trace: f64 = rho_a.iter().zip(rho_b.iter()).map(|(x, y)| (x * y.conj()).re).sum();
    Ok(trace.max(0.0))
}

pub fn marginals(grid: &JsaGrid) -> Result<Marginals> {
    require_normalized(grid)?;
    let area = grid.cell_area();
    let intensity = grid.intensity();
    Ok(Marginals {
        signal: intensity.row_iter().map(|r| r.sum() * area).collect(),
        idler: intensity.column_iter().map(|c| c.sum() * area).collect(),
    })
}
