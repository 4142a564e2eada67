//! Plain-text serialization of [`JsaGrid`].
//!
//! ```text
//! # sfwm-jsa v1
//! # signal start=-40 step=0.3137 count=256 unit=rad/ps
//! # idler start=-40 step=0.3137 count=256 unit=rad/ps
//! # normalized=true
//! re,im
//! 1.2e-3,-4.5e-4
//! ...
//! ```
//!
//! Amplitudes follow in row-major order (signal index outer). Floats are
//! written in shortest round-trip form, so a read-back is bit-exact. Other
//! `#` lines are ignored, which lets callers prepend provenance headers.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::spectral::{FreqAxis, JsaGrid};
use crate::{Error, Result};

const MAGIC: &str = "sfwm-jsa v1";

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(format!("I/O: {e}"))
}

pub fn write_jsa<W: Write>(grid: &JsaGrid, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# {MAGIC}")?;
    for (name, axis) in [("signal", &grid.signal), ("idler", &grid.idler)] {
        writeln!(out, "# {name} start={:e} step={:e} count={} unit=rad/ps", axis.start, axis.step, axis.len)?;
    }
    writeln!(out, "# normalized={}", grid.normalized)?;
    writeln!(out, "re,im")?;
    for r in 0..grid.signal.len {
        for c in 0..grid.idler.len {
            let a = grid.amplitudes[(r, c)];
            writeln!(out, "{:e},{:e}", a.re, a.im)?;
        }
    }
    Ok(())
}

fn parse_axis(fields: &str, line_no: usize) -> Result<FreqAxis> {
    let mut start = None;
    let mut step = None;
    let mut count = None;
    for kv in fields.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {line_no}: expected key=value, got `{kv}`")))?;
        let bad = |_| Error::Parse(format!("line {line_no}: bad value for `{k}`: `{v}`"));
        match k {
            "start" => start = Some(v.parse::<f64>().map_err(bad)?),
            "step" => step = Some(v.parse::<f64>().map_err(bad)?),
            "count" => count = Some(v.parse::<usize>().map_err(|_| Error::Parse(format!("line {line_no}: bad count `{v}`")))?),
            "unit" if v == "rad/ps" => {}
            "unit" => return Err(Error::Parse(format!("line {line_no}: unsupported unit `{v}`"))),
            _ => return Err(Error::Parse(format!("line {line_no}: unknown axis key `{k}`"))),
        }
    }
    match (start, step, count) {
        (Some(a), Some(d), Some(n)) => FreqAxis::new(a, d, n).map_err(|e| Error::Parse(format!("line {line_no}: {e}"))),
        _ => Err(Error::Parse(format!("line {line_no}: axis needs start, step and count"))),
    }
}

pub fn read_jsa<R: BufRead>(input: R) -> Result<JsaGrid> {
    let mut signal = None;
    let mut idler = None;
    let mut normalized = None;
    let mut seen_magic = false;
    let mut seen_columns = false;
    let mut values = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(io_err)?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if comment == MAGIC {
                seen_magic = true;
            } else if let Some(rest) = comment.strip_prefix("signal ") {
                signal = Some(parse_axis(rest, line_no)?);
            } else if let Some(rest) = comment.strip_prefix("idler ") {
                idler = Some(parse_axis(rest, line_no)?);
            } else if let Some(flag) = comment.strip_prefix("normalized=") {
                normalized = Some(flag.parse::<bool>().map_err(|_| Error::Parse(format!("line {line_no}: bad flag `{flag}`")))?);
            }
            continue;
        }
        if !seen_columns {
            if line != "re,im" {
                return Err(Error::Parse(format!("line {line_no}: expected column header `re,im`")));
            }
            seen_columns = true;
            continue;
        }
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {line_no}: expected `re,im`")))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("line {line_no}: bad number `{s}`")));
        values.push(Complex64::new(parse(re)?, parse(im)?));
    }
    if !seen_magic {
        return Err(Error::Parse(format!("missing `# {MAGIC}` header")));
    }
    let (signal, idler, normalized) = match (signal, idler, normalized) {
        (Some(s), Some(i), Some(n)) => (s, i, n),
        _ => return Err(Error::Parse("header needs signal, idler and normalized lines".into())),
    };
    if values.len() != signal.len * idler.len {
        return Err(Error::Parse(format!("expected {} amplitudes, found {}", signal.len * idler.len, values.len())));
    }
    let amplitudes = DMatrix::from_row_slice(signal.len, idler.len, &values);
    JsaGrid::new(signal, idler, amplitudes, normalized)
}

/// Joint spectral density `|f|²` as `nu_s,nu_i,jsd` rows for heatmaps.
pub fn write_jsd_csv<W: Write>(grid: &JsaGrid, mut out: W) -> std::io::Result<()> {
    writeln!(out, "nu_s,nu_i,jsd")?;
    for r in 0..grid.signal.len {
        let nu_s = grid.signal.value(r);
        for c in 0..grid.idler.len {
            writeln!(out, "{:e},{:e},{:e}", nu_s, grid.idler.value(c), grid.amplitudes[(r, c)].norm_sqr())?;
        }
    }
    Ok(())
}
