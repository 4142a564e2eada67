//! Provenance headers and atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Identifies the tool version and the input that produced an output file.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub input_sha256: String,
}

impl Provenance {
    pub fn of_input(bytes: &[u8]) -> Self {
        Provenance { tool: "sfwm", version: env!("CARGO_PKG_VERSION"), input_sha256: format!("{:x}", Sha256::digest(bytes)) }
    }

    /// Comment line opening every CSV output.
    pub fn csv_header(&self) -> String {
        format!("# {} {} input-sha256={}\n", self.tool, self.version, self.input_sha256)
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// JSON document with the provenance block first.
pub fn json_with_provenance<T: Serialize>(provenance: &Provenance, body: &T) -> Result<Vec<u8>, CliError> {
    let mut value = serde_json::to_value(body).map_err(|e| CliError::Output(e.to_string()))?;
    let mut doc = serde_json::Map::new();
    doc.insert("provenance".into(), serde_json::to_value(provenance).map_err(|e| CliError::Output(e.to_string()))?);
    if let Some(obj) = value.as_object_mut() {
        doc.append(obj);
    } else {
        doc.insert("result".into(), value);
    }
    let mut out = serde_json::to_vec_pretty(&serde_json::Value::Object(doc)).map_err(|e| CliError::Output(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}
