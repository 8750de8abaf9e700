//! CSV and spectrum text formats.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::estimator::SpectrumGrid2D;
use crate::harness::{ExperimentConfig, SweepPoint, SweepResult};

pub const CSV_COLUMNS: [&str; 15] = [
    "snr_db",
    "L",
    "n_x",
    "n_y",
    "trials",
    "failures",
    "nmse_db_proposed",
    "nmse_db_oracle",
    "se_proposed",
    "se_oracle",
    "theta_err_deg",
    "phi_err_deg",
    "psi_err_deg",
    "gain_err_rel",
    "seed",
];

impl SweepResult {
    /// CSV text: `#`-prefixed config header, the column row, one row per point.
    /// SE columns are bits/s/Hz (log base 2); NMSE columns are dB.
    pub fn to_csv(&self, cfg: &ExperimentConfig) -> String {
        let mut out = String::new();
        out.push_str("# ris-chest sweep; se in bits/s/Hz (log2), nmse in dB, angle errors mean |deg|\n");
        for line in cfg.to_toml_string().lines() {
            let _ = writeln!(out, "# {line}");
        }
        out.push_str(&CSV_COLUMNS.join(","));
        out.push('\n');
        for r in &self.rows {
            let p = &r.point;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                p.snr_db,
                p.soundings,
                p.n_x,
                p.n_y,
                r.trials,
                r.failures,
                r.nmse_db_proposed,
                r.nmse_db_oracle,
                r.se_proposed,
                r.se_oracle,
                r.angle_errors_deg[0],
                r.angle_errors_deg[1],
                r.angle_errors_deg[2],
                r.gain_err_rel,
                r.seed,
            );
        }
        out
    }
}

pub fn write_csv(path: &Path, result: &SweepResult, cfg: &ExperimentConfig) -> Result<()> {
    fs::write(path, result.to_csv(cfg)).map_err(|e| Error::io(path, e))
}

/// Writes the spectrum as a whitespace-separated matrix: the first row holds the
/// ψ axis (degrees) after a `nan` corner cell, the first column holds the φ axis.
pub fn write_spectrum(path: &Path, grid: &SpectrumGrid2D, point: &SweepPoint, seed: u64, trial: u64) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# ris-chest pseudo-spectrum; rows phi (deg), columns psi (deg)");
    let _ = writeln!(
        out,
        "# snr_db={} L={} n_x={} n_y={} seed={} trial={}",
        point.snr_db, point.soundings, point.n_x, point.n_y, seed, trial
    );
    out.push_str("nan");
    for j in 0..grid.psi_axis.len() {
        let _ = write!(out, " {}", grid.psi_axis.degrees_at(j));
    }
    out.push('\n');
    for i in 0..grid.phi_axis.len() {
        let _ = write!(out, "{}", grid.phi_axis.degrees_at(i));
        for j in 0..grid.psi_axis.len() {
            let _ = write!(out, " {:e}", grid.values[(i, j)]);
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Parsed spectrum dump: axes in degrees and the value matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumDump {
    pub phi_deg: Vec<f64>,
    pub psi_deg: Vec<f64>,
    pub values: DMatrix<f64>,
}

pub fn read_spectrum(path: &Path) -> Result<SpectrumDump> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty spectrum file".into()))?;
    let parse = |tok: &str| tok.parse::<f64>().map_err(|e| bad(format!("{tok}: {e}")));
    let psi_deg = header
        .split_whitespace()
        .skip(1)
        .map(parse)
        .collect::<Result<Vec<_>>>()?;
    let mut phi_deg = Vec::new();
    let mut flat = Vec::new();
    for line in lines {
        let mut toks = line.split_whitespace();
        phi_deg.push(parse(toks.next().unwrap_or_default())?);
        let row = toks.map(parse).collect::<Result<Vec<_>>>()?;
        if row.len() != psi_deg.len() {
            return Err(bad(format!("row has {} values, expected {}", row.len(), psi_deg.len())));
        }
        flat.extend(row);
    }
    let values = DMatrix::from_row_slice(phi_deg.len(), psi_deg.len(), &flat);
    Ok(SpectrumDump {
        phi_deg,
        psi_deg,
        values,
    })
}
