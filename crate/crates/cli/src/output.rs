//! Output tables. Every CSV has a fixed header; cells that a run did not compute are
//! empty. Floats are written in shortest round-trip form.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CUMULANTS_CSV: &str = "cumulants.csv";
pub const QUASIPROB_CSV: &str = "quasiprob.csv";
pub const PN_CSV: &str = "pn.csv";
pub const PURITY_CSV: &str = "purity.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const MANIFEST_JSON: &str = "manifest.json";

/// Dynamical cumulants `k1..k4` of the counted mode, the Bloch vector, and the
/// matching oracle and projective-FCS values where requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantRow {
    pub state: String,
    pub t: f64,
    pub mode: usize,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub k3: Option<f64>,
    pub k4: Option<f64>,
    pub sx: Option<f64>,
    pub sy: Option<f64>,
    pub sz: Option<f64>,
    pub oracle_k1: Option<f64>,
    pub oracle_k2: Option<f64>,
    pub oracle_sx: Option<f64>,
    pub oracle_sy: Option<f64>,
    pub oracle_sz: Option<f64>,
    pub fcs_k1: Option<f64>,
    pub fcs_k2: Option<f64>,
}

impl CumulantRow {
    pub fn new(state: &str, t: f64, mode: usize) -> Self {
        CumulantRow {
            state: state.to_string(),
            t,
            mode,
            k1: None,
            k2: None,
            k3: None,
            k4: None,
            sx: None,
            sy: None,
            sz: None,
            oracle_k1: None,
            oracle_k2: None,
            oracle_sx: None,
            oracle_sy: None,
            oracle_sz: None,
            fcs_k1: None,
            fcs_k2: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiRow {
    pub state: String,
    pub t: f64,
    pub dn: i64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PnRow {
    pub state: String,
    pub t: f64,
    pub n: i64,
    pub p: f64,
    pub oracle_p: Option<f64>,
}

/// Closed-form purity against the oracle's reduced density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityRow {
    pub state: String,
    pub t: f64,
    pub purity_prft: f64,
    pub purity_oracle: Option<f64>,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    r.deserialize().map(|row| row.map_err(|e| CliError::Io(e.to_string()))).collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<serde_json::Value, CliError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
