//! `sfwm simulate`: synthetic count records from the count model.

use std::path::Path;

use sfwm::counts::{simulate_counts, CountRecord};

use crate::config::RunConfig;
use crate::output::{write_atomic, Provenance};
use crate::CliError;

pub const COUNTS_HEADER: &str = "tau_ps,C_s,C_i,C_si,R,scale";

pub fn records_csv(provenance: &Provenance, records: &[CountRecord]) -> Result<Vec<u8>, CliError> {
    let mut out = provenance.csv_header().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for rec in records {
            w.serialize(rec).map_err(|e| CliError::Output(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::Output(e.to_string()))?;
    }
    Ok(out)
}

/// Writes `<out>/counts.csv`; record `k` draws from sub-stream `k` of `seed`.
pub fn run(config: &RunConfig, provenance: &Provenance, out: &Path, seed: u64) -> Result<Vec<CountRecord>, CliError> {
    let sim = config.simulate.as_ref().ok_or_else(|| CliError::schema("simulate: the config has no [simulate] table"))?;
    let records = simulate_counts(&sim.model.params(), &sim.delays(), sim.r_pulses, seed)?;
    write_atomic(&out.join("counts.csv"), &records_csv(provenance, &records)?)?;
    Ok(records)
}
