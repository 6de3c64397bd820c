//! Side-input JSON files for the gauge, deform, and derivation
//! commands. Polynomial fields use the manifest's symbol table, so
//! declared variable names and parameters work here too.

use crate::InputError;
use ptx_core::manifest::Manifest;
use ptx_core::parse::{parse_poly_with, SymbolTable};
use ptx_core::{ExtDerivation, FiberElem, FormTensor, GaugeData, Poly, TripleData};
use serde::Deserialize;
use std::path::Path;

/// Gauge file: `mu` lists the translation values on `dx_1..dx_n`
/// (fiber coordinates), `phi11` and `phi11_inv` are k-by-k matrices in
/// row-major order. Missing `mu` means no translation; a missing
/// matrix means the identity.
#[derive(Deserialize)]
struct GaugeSpec {
    #[serde(default)]
    mu: Option<Vec<Vec<String>>>,
    #[serde(default)]
    phi11: Option<Vec<Vec<String>>>,
    #[serde(default)]
    phi11_inv: Option<Vec<Vec<String>>>,
}

/// Cocycle file: sparse rank-2 entries, key `"i,j"` (1-based), value a
/// fiber coordinate vector.
#[derive(Deserialize)]
struct CocycleSpec {
    entries: std::collections::BTreeMap<String, Vec<String>>,
}

/// Derivation file: block values on generators. Missing blocks are
/// zero. `x11` is a k-by-k matrix in row-major order.
#[derive(Deserialize)]
struct DerivationSpec {
    #[serde(default)]
    x00: Option<Vec<String>>,
    #[serde(default)]
    x01: Option<Vec<String>>,
    #[serde(default)]
    x10: Option<Vec<Vec<String>>>,
    #[serde(default)]
    x11: Option<Vec<Vec<String>>>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| InputError::Json {
        path: path.display().to_string(),
        source,
    })
}

fn bad(path: &Path, msg: impl Into<String>) -> InputError {
    InputError::Bad {
        what: path.display().to_string(),
        msg: msg.into(),
    }
}

fn parse_field(
    path: &Path,
    symbols: &SymbolTable,
    field: &str,
    text: &str,
) -> Result<Poly, InputError> {
    parse_poly_with(text, symbols).map_err(|e| bad(path, format!("{field}: {e}")))
}

fn parse_fiber(
    path: &Path,
    symbols: &SymbolTable,
    field: &str,
    coords: &[String],
    n: usize,
    k: usize,
) -> Result<FiberElem, InputError> {
    if coords.len() != k {
        return Err(bad(
            path,
            format!("{field}: expected {k} coordinates, got {}", coords.len()),
        ));
    }
    let polys = coords
        .iter()
        .map(|c| parse_field(path, symbols, field, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FiberElem::new(n, polys))
}

fn parse_matrix_cols(
    path: &Path,
    symbols: &SymbolTable,
    field: &str,
    rows: &[Vec<String>],
    n: usize,
    k: usize,
) -> Result<Vec<FiberElem>, InputError> {
    if rows.len() != k || rows.iter().any(|r| r.len() != k) {
        return Err(bad(path, format!("{field}: expected a {k}x{k} matrix")));
    }
    let mut cols = Vec::with_capacity(k);
    for b in 0..k {
        let coords = rows
            .iter()
            .map(|row| parse_field(path, symbols, field, &row[b]))
            .collect::<Result<Vec<_>, _>>()?;
        cols.push(FiberElem::new(n, coords));
    }
    Ok(cols)
}

pub fn load_gauge(
    path: &Path,
    manifest: &Manifest,
    triple: &TripleData,
) -> Result<GaugeData, InputError> {
    let spec: GaugeSpec = read_json(path)?;
    let symbols = manifest.symbols()?;
    let n = triple.nvars();
    let k = triple.fiber_rank();

    let mu = match &spec.mu {
        None => vec![FiberElem::zero(n, k); n],
        Some(rows) => {
            if rows.len() != n {
                return Err(bad(
                    path,
                    format!("mu: expected {n} entries, got {}", rows.len()),
                ));
            }
            rows.iter()
                .map(|coords| parse_fiber(path, &symbols, "mu", coords, n, k))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let identity: Vec<FiberElem> = (0..k).map(|b| FiberElem::basis(n, k, b)).collect();
    let phi11 = match &spec.phi11 {
        None => identity.clone(),
        Some(rows) => parse_matrix_cols(path, &symbols, "phi11", rows, n, k)?,
    };
    let phi11_inv = match &spec.phi11_inv {
        None => identity,
        Some(rows) => parse_matrix_cols(path, &symbols, "phi11_inv", rows, n, k)?,
    };
    GaugeData::new(n, k, mu, phi11, phi11_inv).map_err(|e| bad(path, e.to_string()))
}

pub fn load_cocycle_form(
    path: &Path,
    manifest: &Manifest,
    triple: &TripleData,
) -> Result<FormTensor, InputError> {
    let spec: CocycleSpec = read_json(path)?;
    let symbols = manifest.symbols()?;
    let n = triple.nvars();
    let k = triple.fiber_rank();
    let mut items = Vec::new();
    for (key, coords) in &spec.entries {
        let parts: Vec<&str> = key.split(',').collect();
        let parse_idx = |s: &str| -> Option<usize> {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v >= 1 && v <= n)
                .map(|v| v - 1)
        };
        let (Some(i), Some(j)) = (
            parts.first().and_then(|s| parse_idx(s)),
            parts.get(1).and_then(|s| parse_idx(s)),
        ) else {
            return Err(bad(
                path,
                format!("entry key {key:?}: expected \"i,j\" with 1-based indices"),
            ));
        };
        if parts.len() != 2 {
            return Err(bad(path, format!("entry key {key:?}: expected \"i,j\"")));
        }
        let val = parse_fiber(path, &symbols, "entries", coords, n, k)?;
        items.push((vec![i, j], val));
    }
    FormTensor::new(n, k, 2, items).map_err(|e| bad(path, e.to_string()))
}

pub fn load_derivation(
    path: &Path,
    manifest: &Manifest,
    triple: &TripleData,
) -> Result<ExtDerivation, InputError> {
    let spec: DerivationSpec = read_json(path)?;
    let symbols = manifest.symbols()?;
    let n = triple.nvars();
    let k = triple.fiber_rank();

    let x00 = match &spec.x00 {
        None => vec![Poly::zero(n); n],
        Some(rows) => {
            if rows.len() != n {
                return Err(bad(path, format!("x00: expected {n} values")));
            }
            rows.iter()
                .map(|s| parse_field(path, &symbols, "x00", s))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let x01 = match &spec.x01 {
        None => vec![Poly::zero(n); k],
        Some(rows) => {
            if rows.len() != k {
                return Err(bad(path, format!("x01: expected {k} values")));
            }
            rows.iter()
                .map(|s| parse_field(path, &symbols, "x01", s))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let x10 = match &spec.x10 {
        None => vec![FiberElem::zero(n, k); n],
        Some(rows) => {
            if rows.len() != n {
                return Err(bad(path, format!("x10: expected {n} entries")));
            }
            rows.iter()
                .map(|coords| parse_fiber(path, &symbols, "x10", coords, n, k))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let x11 = match &spec.x11 {
        None => vec![FiberElem::zero(n, k); k],
        Some(rows) => parse_matrix_cols(path, &symbols, "x11", rows, n, k)?,
    };
    Ok(ExtDerivation::new(n, k, x00, x01, x10, x11))
}
