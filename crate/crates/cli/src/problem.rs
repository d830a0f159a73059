//! Problem-file schema.
//!
//! Every file is a JSON object with `schema_version` and `kind`; the rest of
//! the fields depend on the kind. Unknown fields are rejected so typos surface
//! as schema errors instead of silently falling back to defaults.

use std::collections::BTreeMap;

use qalloc_core::allocation::Hypergraph;
use qalloc_core::bell::ProjectorSource;
use qalloc_core::equitability::KnapsackProblem;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Allocation,
    Equitable,
    Robustness,
    BellVerify,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Allocation => "allocation",
            Kind::Equitable => "equitable",
            Kind::Robustness => "robustness",
            Kind::BellVerify => "bell-verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Fairness,
    Reliability,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationProblem {
    pub schema_version: u64,
    pub kind: Kind,
    pub hypergraph: Hypergraph,
    /// Local qudit dimension.
    pub d: usize,
    /// Defaults to fairness, plus reliability when priors are given.
    #[serde(default)]
    pub objectives: Vec<Objective>,
    /// Per-vertex success probabilities.
    #[serde(default)]
    pub priors: Option<BTreeMap<String, f64>>,
    /// Alternative allocation (one value per edge, in edge order) to score and
    /// compare against the optimal one.
    #[serde(default)]
    pub compare: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Builder {
    Monogamy {
        lambda: f64,
        #[serde(default)]
        nu1: Option<f64>,
        #[serde(default)]
        nu2: Option<f64>,
    },
    Exclusivity {
        gap_n: f64,
        gap_m: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquitableProblem {
    pub schema_version: u64,
    pub kind: Kind,
    /// Explicit instance; exclusive with `builder`.
    #[serde(default)]
    pub problem: Option<KnapsackProblem>,
    #[serde(default)]
    pub builder: Option<Builder>,
}

/// A matrix entry: a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

pub type MatrixSpec = Vec<Vec<Entry>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum AssemblySpec {
    /// Computational and Fourier bases in dimension `d`.
    MubPair {
        d: usize,
        #[serde(default = "one")]
        visibility: f64,
    },
    /// Product unbiased bases on `sites` qudits, restricted to `keep`
    /// (all sites when omitted).
    ProductMub {
        sites: usize,
        d: usize,
        #[serde(default)]
        keep: Option<Vec<usize>>,
        #[serde(default = "one")]
        visibility: f64,
    },
    /// One list of elements per setting.
    Explicit { povms: Vec<Vec<MatrixSpec>> },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessProblem {
    pub schema_version: u64,
    pub kind: Kind,
    pub assembly: AssemblySpec,
    #[serde(default)]
    pub s_max: Option<f64>,
    #[serde(default)]
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub feasibility_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellVerifyProblem {
    pub schema_version: u64,
    pub kind: Kind,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub source: Option<ProjectorSource>,
}

/// Parse `text` as a problem of `expected` kind. Returns the typed problem and
/// the raw JSON for echoing.
pub fn parse<T: DeserializeOwned>(text: &str, expected: Kind) -> Result<(T, Value), CliError> {
    let raw: Value = serde_json::from_str(text).map_err(|e| CliError::schema("$", e.to_string()))?;
    let obj = raw
        .as_object()
        .ok_or_else(|| CliError::schema("$", "problem file must be a JSON object"))?;
    match obj.get("schema_version") {
        None => return Err(CliError::schema("schema_version", "missing field")),
        Some(v) if v.as_u64() != Some(SCHEMA_VERSION) => {
            return Err(CliError::schema(
                "schema_version",
                format!("unsupported version {v}, expected {SCHEMA_VERSION}"),
            ))
        }
        _ => {}
    }
    match obj.get("kind").and_then(Value::as_str) {
        None => return Err(CliError::schema("kind", "missing or not a string")),
        Some(k) if k != expected.as_str() => {
            return Err(CliError::schema(
                "kind",
                format!("expected {:?}, found {k:?}", expected.as_str()),
            ))
        }
        _ => {}
    }
    let typed = serde_path_to_error::deserialize(&raw).map_err(|e| {
        let path = e.path().to_string();
        CliError::schema(if path == "." { "$" } else { &path }, e.into_inner().to_string())
    })?;
    Ok((typed, raw))
}
