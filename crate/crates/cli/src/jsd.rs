//! `sfwm jsd`: joint spectral densities, marginals and purity reports.

use std::fmt::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use sfwm::analysis::{marginals, normalize, purity_with_convergence, Marginals};
use sfwm::jsa_io::write_jsd_csv;
use sfwm::spectral::{factorability_metric, process_params, GridSpec, JsaModel, ProcessParams, PumpPulse};
use sfwm::units::wavelength_from_omega;

use crate::config::{JsdEntry, RunConfig};
use crate::output::{json_with_provenance, write_atomic, Provenance};
use crate::{svg, CliError};

/// Leading Schmidt coefficients listed in the report.
const REPORTED_MODES: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct JsdReport {
    pub label: String,
    pub pump1: PumpPulse,
    pub pump2: PumpPulse,
    pub detuning_nm: f64,
    pub degenerate: bool,
    pub delay_ps: Option<f64>,
    pub signal_nm: f64,
    pub idler_nm: f64,
    pub process: ProcessParams,
    pub grid: GridSpec,
    pub purity: f64,
    pub schmidt_number: f64,
    pub purity_half_resolution: f64,
    pub discretization_drift: f64,
    /// `(σ₁²+σ₂²)T_sT_i + (στ_p)²`; absent for a single pump.
    pub correlation_metric: Option<f64>,
    pub leading_schmidt_coefficients: Vec<f64>,
}

struct Computed {
    report: JsdReport,
    jsd_csv: Vec<u8>,
    marginals: Marginals,
    intensity: Vec<Vec<f64>>,
}

fn compute(config: &RunConfig, entry: &JsdEntry, points: usize, k: usize) -> Result<Computed, CliError> {
    let fiber = config.fiber_spec()?;
    let pump1 = entry.pump1.pulse(&format!("jsd[{k}].pump1"))?;
    let pump2 = match &entry.pump2 {
        Some(p) => p.pulse(&format!("jsd[{k}].pump2"))?,
        None => pump1,
    };
    let params = process_params(&fiber, &pump1, &pump2)?;
    let degenerate = params.tau_p() == 0.0;
    let model = if degenerate {
        JsaModel::degenerate(params.sigma1(), params.sigma2(), params.tau_s(), params.tau_i())?
    } else {
        match entry.delay_ps {
            Some(tau) => JsaModel::dual(params, tau)?,
            None => JsaModel::overlap_max(params)?,
        }
    };
    let grid = GridSpec::auto(&model, points)?;
    let purity = purity_with_convergence(&model, &grid)?;
    let jsa = normalize(&model.evaluate(&grid))?;
    let mut jsd_csv = Vec::new();
    write_jsd_csv(&jsa, &mut jsd_csv).map_err(|e| CliError::Output(e.to_string()))?;
    let intensity: Vec<Vec<f64>> = jsa.intensity().row_iter().map(|r| r.iter().cloned().collect()).collect();
    let s = &purity.schmidt;
    let report = JsdReport {
        label: entry.label.clone(),
        pump1,
        pump2,
        detuning_nm: (pump1.wavelength_nm - pump2.wavelength_nm).abs(),
        degenerate,
        delay_ps: if degenerate { None } else { Some(entry.delay_ps.unwrap_or(-params.tau_p() / 2.0)) },
        signal_nm: wavelength_from_omega(params.omega_s()),
        idler_nm: wavelength_from_omega(params.omega_i()),
        process: params,
        grid,
        purity: purity.purity(),
        schmidt_number: s.schmidt_number,
        purity_half_resolution: purity.purity_half_resolution,
        discretization_drift: purity.discretization_drift(),
        correlation_metric: (!degenerate).then(|| factorability_metric(&params)),
        leading_schmidt_coefficients: s.singular_values.iter().take(REPORTED_MODES).cloned().collect(),
    };
    Ok(Computed { report, jsd_csv, marginals: marginals(&jsa)?, intensity })
}

fn marginals_csv(provenance: &Provenance, report: &JsdReport, m: &Marginals) -> String {
    let mut out = provenance.csv_header();
    out.push_str("arm,detuning_rad_per_ps,wavelength_nm,probability\n");
    let arms = [("signal", &report.grid.signal, report.process.omega_s(), &m.signal), ("idler", &report.grid.idler, report.process.omega_i(), &m.idler)];
    for (arm, axis, carrier, probs) in arms {
        for (k, p) in probs.iter().enumerate() {
            let nu = axis.value(k);
            let _ = writeln!(out, "{arm},{nu:e},{:e},{p:e}", wavelength_from_omega(carrier + nu));
        }
    }
    out
}

/// Runs every configured entry (in parallel) and writes
/// `<out>/<label>/{jsd.csv, marginals.csv, report.json[, jsd.svg]}` plus
/// `<out>/summary.csv`.
pub fn run(config: &RunConfig, provenance: &Provenance, out: &Path, points: usize, svg_plots: bool) -> Result<Vec<JsdReport>, CliError> {
    if config.jsd.is_empty() {
        return Err(CliError::schema("jsd: the config lists no [[jsd]] entries"));
    }
    let computed: Vec<Computed> = config
        .jsd
        .par_iter()
        .enumerate()
        .map(|(k, entry)| compute(config, entry, points, k))
        .collect::<Result<_, _>>()?;
    computed.par_iter().try_for_each(|c| -> Result<(), CliError> {
        let dir = out.join(&c.report.label);
        let mut jsd = provenance.csv_header().into_bytes();
        jsd.extend_from_slice(&c.jsd_csv);
        write_atomic(&dir.join("jsd.csv"), &jsd)?;
        write_atomic(&dir.join("marginals.csv"), marginals_csv(provenance, &c.report, &c.marginals).as_bytes())?;
        write_atomic(&dir.join("report.json"), &json_with_provenance(provenance, &c.report)?)?;
        if svg_plots {
            let g = &c.report.grid;
            let plot = svg::heatmap(&c.intensity, (g.signal.start, g.signal.end()), (g.idler.start, g.idler.end()), "ν_s (rad/ps)", "ν_i (rad/ps)");
            write_atomic(&dir.join("jsd.svg"), plot.as_bytes())?;
        }
        Ok(())
    })?;
    let mut summary = provenance.csv_header();
    summary.push_str("label,detuning_nm,signal_nm,idler_nm,purity,schmidt_number,discretization_drift,correlation_metric\n");
    for c in &computed {
        let r = &c.report;
        let metric = r.correlation_metric.map(|m| format!("{m:e}")).unwrap_or_default();
        let _ = writeln!(
            summary,
            "{},{},{:.4},{:.4},{:.6},{:.6},{:.2e},{metric}",
            r.label, r.detuning_nm, r.signal_nm, r.idler_nm, r.purity, r.schmidt_number, r.discretization_drift
        );
    }
    write_atomic(&out.join("summary.csv"), summary.as_bytes())?;
    Ok(computed.into_iter().map(|c| c.report).collect())
}
