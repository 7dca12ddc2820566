//! File formats: operator and polynomial JSON, grid and trace CSV.

use anyhow::{bail, Context, Result};
use constrank::exactnum::GaussianRational;
use constrank::multipoly::MultiPoly;
use constrank::opcore::{Operator, SymbolMatrix};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

pub type GPoly = MultiPoly<GaussianRational>;

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => {
            fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?
        }
        None => println!("{text}"),
    }
    Ok(())
}

pub fn read_operator(path: &Path) -> Result<Operator> {
    read_json(path)
}

/// A `d x l` system of polynomials (`entries[i][j] = p_ij`), the orientation
/// of the certificate machinery. Operator JSON is also accepted: its symbol
/// (equations as rows) is the transposed layout and is adapted on entry.
#[derive(Serialize, Deserialize)]
pub struct SystemJson {
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<GPoly>>,
}

/// Reads either a system JSON or an operator JSON into the equations-as-rows
/// symbol matrix used by the library.
pub fn read_system(path: &Path) -> Result<SymbolMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("dim_domain").is_some() {
        let op: Operator = serde_json::from_value(value)?;
        return Ok(op.symbol());
    }
    let sys: SystemJson = serde_json::from_value(value)?;
    if sys.entries.len() != sys.rows || sys.entries.iter().any(|r| r.len() != sys.cols) {
        bail!("system entries must be a {} x {} matrix", sys.rows, sys.cols);
    }
    // transpose: file rows are domain components i, columns are equations j
    let rows: Vec<Vec<GPoly>> = (0..sys.cols)
        .map(|j| (0..sys.rows).map(|i| sys.entries[i][j].clone()).collect())
        .collect();
    SymbolMatrix::from_rows(sys.n, rows)
        .map_err(|e| anyhow::anyhow!("invalid system in {}: {e}", path.display()))
}

pub fn read_poly_list(path: &Path) -> Result<Vec<GPoly>> {
    read_json(path)
}

pub fn read_poly(path: &Path) -> Result<GPoly> {
    read_json(path)
}

pub use constrank::poincare2d::csv::{read_grid_csv, read_traces_csv, write_grid_csv};
