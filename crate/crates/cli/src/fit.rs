//! `sfwm fit`: joint fit of a count-record CSV.

use std::fmt::Write;
use std::path::Path;

use serde::Serialize;
use sfwm::counts::{cross_correlation, expected_counts, CountModelParams, CountRecord, PARAM_NAMES};
use sfwm::fit::{alternate_solution, fit_count_curves, FitResult};

use crate::output::{json_with_provenance, write_atomic, Provenance};
use crate::simulate::COUNTS_HEADER;
use crate::{svg, CliError};

/// Reads a count-record CSV. `#` lines are comments; the header must name
/// `tau_ps, C_s, C_i, C_si, R` and may add `scale`.
pub fn read_records(bytes: &[u8]) -> Result<Vec<CountRecord>, CliError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(bytes);
    let headers = reader.headers().map_err(|e| CliError::schema(format!("counts CSV: {e}")))?.clone();
    for required in ["tau_ps", "C_s", "C_i", "C_si", "R"] {
        if !headers.iter().any(|h| h == required) {
            return Err(CliError::schema(format!("counts CSV: header must contain {COUNTS_HEADER}; missing {required:?}")));
        }
    }
    let mut records = Vec::new();
    for (k, row) in reader.deserialize::<CountRecord>().enumerate() {
        let rec = row.map_err(|e| CliError::schema(format!("counts CSV record {}: {e}", k + 1)))?;
        rec.validate().map_err(|e| CliError::schema(format!("counts CSV record {}: {e}", k + 1)))?;
        records.push(rec);
    }
    if records.is_empty() {
        return Err(CliError::schema("counts CSV: no records"));
    }
    Ok(records)
}

#[derive(Debug, Clone, Serialize)]
struct ParamEstimate {
    name: &'static str,
    value: f64,
    std_err: f64,
}

#[derive(Debug, Clone, Serialize)]
struct FitReport<'a> {
    records: usize,
    parameters: Vec<ParamEstimate>,
    fit: &'a FitResult,
    /// The parameter set giving identical mean curves on the other branch.
    alternate_solution: Option<CountModelParams>,
}

pub fn run(records: &[CountRecord], provenance: &Provenance, out: &Path, svg_plots: bool) -> Result<FitResult, CliError> {
    let fit = fit_count_curves(records, None)?;
    let parameters = PARAM_NAMES
        .iter()
        .zip(fit.estimates())
        .map(|(name, (value, std_err))| ParamEstimate { name, value, std_err })
        .collect();
    let report = FitReport {
        records: records.len(),
        parameters,
        fit: &fit,
        alternate_solution: alternate_solution(&fit.params, records[0].r as f64),
    };
    write_atomic(&out.join("fit.json"), &json_with_provenance(provenance, &report)?)?;

    let mut sorted = records.to_vec();
    sorted.sort_by(|a, b| a.tau_ps.total_cmp(&b.tau_ps));
    let mut overlay = provenance.csv_header();
    overlay.push_str("tau_ps,C_s,C_s_model,C_i,C_i_model,C_si,C_si_model\n");
    let mut g2 = provenance.csv_header();
    g2.push_str("tau_ps,g2_data,g2_data_err,g2_model\n");
    let mut curves: [(Vec<f64>, Vec<f64>); 4] = Default::default();
    for rec in &sorted {
        let m = expected_counts(&fit.params, rec.tau_ps, rec.r)?;
        let (cs, ci) = (rec.singles_signal(), rec.singles_idler());
        let _ = writeln!(overlay, "{},{cs},{:e},{ci},{:e},{},{:e}", rec.tau_ps, m.c_s, m.c_i, rec.c_si, m.c_si);
        let g_model = m.cross_correlation(rec.r);
        let g_data = cross_correlation(rec).ok();
        let (gv, ge) = g_data.map_or((String::new(), String::new()), |g| (format!("{:e}", g.value), format!("{:e}", g.std_err)));
        let _ = writeln!(g2, "{},{gv},{ge},{g_model:e}", rec.tau_ps);
        let rows = [(cs, m.c_s), (ci, m.c_i), (rec.c_si as f64, m.c_si), (g_data.map_or(f64::NAN, |g| g.value), g_model)];
        for (curve, (d, model)) in curves.iter_mut().zip(rows) {
            curve.0.push(d);
            curve.1.push(model);
        }
    }
    write_atomic(&out.join("overlay.csv"), overlay.as_bytes())?;
    write_atomic(&out.join("g2.csv"), g2.as_bytes())?;
    if svg_plots {
        let taus: Vec<f64> = sorted.iter().map(|r| r.tau_ps).collect();
        let labels = ["C_s", "C_i", "C_si", "g²_si"];
        let panels: Vec<svg::Panel> = labels
            .iter()
            .zip(&curves)
            .map(|(label, (data, model))| svg::Panel { label, x: &taus, data, model })
            .collect();
        write_atomic(&out.join("fit.svg"), svg::panels(&panels, "τ (ps)").as_bytes())?;
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_records_with_comments_and_default_scale() {
        let text = "# sfwm 0.1.0 input-sha256=00\ntau_ps,C_s,C_i,C_si,R\n-1.0,10,20,1,1000\n0.5, 12, 22, 3, 1000\n";
        let recs = read_records(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].c_si, 3);
        assert_eq!(recs[0].scale, 1.0);
    }

    #[test]
    fn schema_violations_are_reported() {
        assert!(matches!(read_records(b""), Err(CliError::Schema(_))));
        assert!(matches!(read_records(b"tau_ps,C_s,C_i,C_si,R,scale\n"), Err(CliError::Schema(_))));
        assert!(matches!(read_records(b"tau_ps,C_s,C_i,R\n0,1,1,1\n"), Err(CliError::Schema(_))));
        let bad = b"tau_ps,C_s,C_i,C_si,R\n0,1,1,x,1\n";
        assert!(read_records(bad).unwrap_err().to_string().contains("record 1"));
        let over = b"tau_ps,C_s,C_i,C_si,R\n0,1,1,5,10\n";
        assert!(matches!(read_records(over), Err(CliError::Schema(_))));
    }
}
