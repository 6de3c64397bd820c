//! JSON manifests describing a base bracket and a structure triple.
//!
//! Polynomial fields are grammar-conformant strings; sparse index keys
//! are 1-based strings like `"1,2"` (base entries) and `"3;1,2"`
//! (tensor entries, output index before the semicolon). Named rational
//! parameters are substituted at load time, so the built structures
//! carry concrete coefficients only.

use crate::base::{BaseError, PoissonBase};
use crate::fiber::{TripleData, TripleError};
use crate::parse::{parse_poly_with, ParseError, SymbolTable};
use crate::poly::Rat;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

type TensorEntries = Vec<((usize, usize, usize), crate::poly::Poly)>;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("parameter {name}: {value:?} is not a rational")]
    BadParam { name: String, value: String },
    #[error("variable name {name:?} is reserved or duplicated")]
    BadVariableName { name: String },
    #[error("field {field}, key {key:?}: expected {expect}")]
    BadKey {
        field: &'static str,
        key: String,
        expect: &'static str,
    },
    #[error("field {field}, key {key:?}: index out of range")]
    KeyOutOfRange { field: &'static str, key: String },
    #[error("field {field}, key {key:?}: {source}")]
    Parse {
        field: &'static str,
        key: String,
        source: ParseError,
    },
    #[error(transparent)]
    Base(#[from] BaseError),
    #[error(transparent)]
    Triple(#[from] TripleError),
}

/// Serialized description of a base bracket plus structure triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub meta: String,
    pub variables: Vec<String>,
    pub fiber_rank: usize,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default)]
    pub poisson: BTreeMap<String, String>,
    #[serde(default)]
    pub fiber_bracket: BTreeMap<String, String>,
    #[serde(default)]
    pub connection: BTreeMap<String, String>,
    #[serde(default)]
    pub k_tensor: BTreeMap<String, String>,
}

impl Manifest {
    pub fn from_json(src: &str) -> Result<Self, ManifestError> {
        Ok(serde_json::from_str(src)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ManifestError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Manifest::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// The symbol table induced by the declared variable names and
    /// parameters.
    pub fn symbols(&self) -> Result<SymbolTable, ManifestError> {
        let mut table = SymbolTable::canonical(self.variables.len());
        for (i, name) in self.variables.iter().enumerate() {
            if name.is_empty()
                || !name.chars().next().unwrap().is_ascii_alphabetic() && !name.starts_with('_')
                || table.vars.insert(name.clone(), i).is_some()
            {
                return Err(ManifestError::BadVariableName { name: name.clone() });
            }
        }
        for (name, value) in &self.params {
            if table.vars.contains_key(name) {
                return Err(ManifestError::BadVariableName { name: name.clone() });
            }
            let rat = Rat::from_str(value).map_err(|_| ManifestError::BadParam {
                name: name.clone(),
                value: value.clone(),
            })?;
            table.params.insert(name.clone(), rat);
        }
        Ok(table)
    }

    /// Build the canonical structures, substituting parameters.
    pub fn build(&self) -> Result<(PoissonBase, TripleData), ManifestError> {
        let n = self.variables.len();
        let k = self.fiber_rank;
        let symbols = self.symbols()?;

        let mut pi_entries = Vec::new();
        for (key, text) in &self.poisson {
            let (i, j) = parse_key2("poisson", key)?;
            if i >= n || j >= n {
                return Err(ManifestError::KeyOutOfRange {
                    field: "poisson",
                    key: key.clone(),
                });
            }
            let p = parse_poly_with(text, &symbols).map_err(|source| ManifestError::Parse {
                field: "poisson",
                key: key.clone(),
                source,
            })?;
            pi_entries.push(((i, j), p));
        }
        let base = PoissonBase::new(n, pi_entries)?;

        let parse_tensor =
            |field: &'static str,
             map: &BTreeMap<String, String>,
             in_range: &dyn Fn(usize, usize, usize) -> bool|
             -> Result<TensorEntries, ManifestError> {
                let mut out = Vec::new();
                for (key, text) in map {
                    let (a, i, j) = parse_key3(field, key)?;
                    if !in_range(a, i, j) {
                        return Err(ManifestError::KeyOutOfRange {
                            field,
                            key: key.clone(),
                        });
                    }
                    let p =
                        parse_poly_with(text, &symbols).map_err(|source| ManifestError::Parse {
                            field,
                            key: key.clone(),
                            source,
                        })?;
                    out.push(((a, i, j), p));
                }
                Ok(out)
            };

        let c_entries = parse_tensor("fiber_bracket", &self.fiber_bracket, &|a, b, g| {
            a < k && b < k && g < k
        })?;
        let gamma_entries = parse_tensor("connection", &self.connection, &|a, i, b| {
            a < k && i < n && b < k
        })?;
        let kk_entries = parse_tensor("k_tensor", &self.k_tensor, &|a, i, j| {
            a < k && i < n && j < n
        })?;

        let triple = TripleData::new(base.clone(), k, c_entries, gamma_entries, kk_entries)?;
        Ok((base, triple))
    }

    /// Serialize structures back into a manifest with canonical
    /// variable names and no parameters (they were substituted at
    /// load). Round trip: building the result reproduces the
    /// structures exactly.
    pub fn from_structures(triple: &TripleData, meta: &str) -> Manifest {
        let n = triple.nvars();
        let k = triple.fiber_rank();
        let mut poisson = BTreeMap::new();
        for (&(i, j), p) in triple.base().entries() {
            poisson.insert(format!("{},{}", i + 1, j + 1), p.to_string());
        }
        let mut fiber_bracket = BTreeMap::new();
        for a in 0..k {
            for b in 0..k {
                for g in b + 1..k {
                    let v = triple.c_at(a, b, g);
                    if !v.is_zero() {
                        fiber_bracket
                            .insert(format!("{};{},{}", a + 1, b + 1, g + 1), v.to_string());
                    }
                }
            }
        }
        let mut connection = BTreeMap::new();
        for a in 0..k {
            for i in 0..n {
                for b in 0..k {
                    let v = triple.gamma_at(a, i, b);
                    if !v.is_zero() {
                        connection.insert(format!("{};{},{}", a + 1, i + 1, b + 1), v.to_string());
                    }
                }
            }
        }
        let mut k_tensor = BTreeMap::new();
        for a in 0..k {
            for i in 0..n {
                for j in i + 1..n {
                    let v = triple.kk_at(a, i, j);
                    if !v.is_zero() {
                        k_tensor.insert(format!("{};{},{}", a + 1, i + 1, j + 1), v.to_string());
                    }
                }
            }
        }
        Manifest {
            meta: meta.to_string(),
            variables: (1..=n).map(|i| format!("x{i}")).collect(),
            fiber_rank: k,
            params: BTreeMap::new(),
            poisson,
            fiber_bracket,
            connection,
            k_tensor,
        }
    }
}

/// Load a manifest file and build its structures.
pub fn load(path: impl AsRef<Path>) -> Result<(PoissonBase, TripleData), ManifestError> {
    Manifest::from_path(path)?.build()
}

fn parse_key2(field: &'static str, key: &str) -> Result<(usize, usize), ManifestError> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() == 2 {
        if let (Ok(i), Ok(j)) = (
            parts[0].trim().parse::<usize>(),
            parts[1].trim().parse::<usize>(),
        ) {
            if i >= 1 && j >= 1 {
                return Ok((i - 1, j - 1));
            }
        }
    }
    Err(ManifestError::BadKey {
        field,
        key: key.to_string(),
        expect: "\"i,j\" with 1-based indices",
    })
}

fn parse_key3(field: &'static str, key: &str) -> Result<(usize, usize, usize), ManifestError> {
    let parts: Vec<&str> = key.split(';').collect();
    if parts.len() == 2 {
        if let Ok(a) = parts[0].trim().parse::<usize>() {
            if a >= 1 {
                if let Ok((i, j)) = parse_key2(field, parts[1]) {
                    return Ok((a - 1, i, j));
                }
            }
        }
    }
    Err(ManifestError::BadKey {
        field,
        key: key.to_string(),
        expect: "\"a;i,j\" with 1-based indices",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::poly::rat;

    #[test]
    fn bundled_so3_matches_constructor() {
        let manifest = Manifest::from_json(fixtures::SO3_JSON).unwrap();
        let (base, triple) = manifest.build().unwrap();
        assert_eq!(base, fixtures::so3_base());
        assert_eq!(triple, fixtures::so3_triple(rat(1, 2)));
    }

    #[test]
    fn bundled_so3_with_overridden_parameter() {
        let mut manifest = Manifest::from_json(fixtures::SO3_JSON).unwrap();
        manifest.params.insert("eps".into(), "1".into());
        let (_, triple) = manifest.build().unwrap();
        assert_eq!(triple, fixtures::so3_triple(rat(1, 1)));

        manifest.params.insert("eps".into(), "0".into());
        let (_, triple) = manifest.build().unwrap();
        assert_eq!(triple, fixtures::so3_triple(rat(0, 1)));
    }

    #[test]
    fn bundled_matrix2_matches_constructor() {
        let manifest = Manifest::from_json(fixtures::MATRIX2_JSON).unwrap();
        let (_, triple) = manifest.build().unwrap();
        assert_eq!(
            triple,
            fixtures::matrix_module_triple(2, fixtures::so3_base())
        );
    }

    #[test]
    fn bundled_base_only_has_no_fiber() {
        let manifest = Manifest::from_json(fixtures::SO3_BASE_ONLY_JSON).unwrap();
        let (base, triple) = manifest.build().unwrap();
        assert_eq!(base, fixtures::so3_base());
        assert_eq!(triple.fiber_rank(), 0);
    }

    #[test]
    fn empty_maps_build_zero_structures() {
        let manifest =
            Manifest::from_json(r#"{"variables": ["x1", "x2"], "fiber_rank": 2}"#).unwrap();
        let (base, triple) = manifest.build().unwrap();
        assert_eq!(base, PoissonBase::zero(2));
        assert_eq!(triple, TripleData::zero(PoissonBase::zero(2), 2));
    }

    #[test]
    fn save_load_round_trip() {
        for (_, triple) in [
            Manifest::from_json(fixtures::SO3_JSON)
                .unwrap()
                .build()
                .unwrap(),
            Manifest::from_json(fixtures::MATRIX2_JSON)
                .unwrap()
                .build()
                .unwrap(),
        ] {
            let saved = Manifest::from_structures(&triple, "round trip");
            let (_, rebuilt) = Manifest::from_json(&saved.to_json())
                .unwrap()
                .build()
                .unwrap();
            assert_eq!(rebuilt, triple);
        }
    }

    #[test]
    fn error_paths() {
        let bad_key = r#"{"variables": ["x1"], "fiber_rank": 1, "poisson": {"1;2": "x1"}}"#;
        assert!(matches!(
            Manifest::from_json(bad_key).unwrap().build(),
            Err(ManifestError::BadKey {
                field: "poisson",
                ..
            })
        ));

        let out_of_range =
            r#"{"variables": ["x1", "x2"], "fiber_rank": 1, "poisson": {"1,3": "x1"}}"#;
        assert!(matches!(
            Manifest::from_json(out_of_range).unwrap().build(),
            Err(ManifestError::KeyOutOfRange { .. })
        ));

        let bad_poly =
            r#"{"variables": ["x1", "x2"], "fiber_rank": 1, "poisson": {"1,2": "x1/(x2)"}}"#;
        assert!(matches!(
            Manifest::from_json(bad_poly).unwrap().build(),
            Err(ManifestError::Parse { .. })
        ));

        let bad_param = r#"{"variables": ["x1"], "fiber_rank": 0, "params": {"eps": "half"}}"#;
        assert!(matches!(
            Manifest::from_json(bad_param).unwrap().build(),
            Err(ManifestError::BadParam { .. })
        ));

        assert!(Manifest::from_json("{not json").is_err());
    }
}
