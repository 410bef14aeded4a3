use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Codebook, CodebookEntry};
use crate::quantum::{BasisSpec, Complex, PureState, UnitaryOp, INPUT_TOL};

/// JSON document describing a codebook. Complex numbers are `[re, im]`
/// pairs; amplitude vectors are lexicographic (qubit 0 = most significant
/// bit); matrices are row-major lists of rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpecDoc {
    pub name: String,
    pub num_qubits: usize,
    pub message_bits: usize,
    pub initial_state: Vec<[f64; 2]>,
    pub entries: Vec<ChannelEntryDoc>,
    #[serde(default)]
    pub home_qubits: Vec<usize>,
    pub measurement_basis: BasisDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelEntryDoc {
    pub bits: String,
    pub targets: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// Either one of the named bases ("computational", "bell", "bell_plus_z",
/// "ghz_like") or inline orthonormal vectors with outcome labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisDoc {
    Named(String),
    Inline {
        vectors: Vec<Vec<[f64; 2]>>,
        labels: Vec<String>,
    },
}

#[derive(Debug, Error)]
pub enum ChannelSpecError {
    #[error("cannot read channel spec: {0}")]
    Io(#[from] std::io::Error),
    #[error("channel spec parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("channel spec invalid: {0}")]
    Invalid(String),
}

fn complexify(pairs: &[[f64; 2]]) -> Vec<Complex> {
    pairs.iter().map(|&[re, im]| Complex::new(re, im)).collect()
}

fn resolve_basis(doc: &BasisDoc, travel: usize) -> Result<BasisSpec, ChannelSpecError> {
    match doc {
        BasisDoc::Named(name) => match name.as_str() {
            "computational" => Ok(BasisSpec::computational(travel)),
            "bell" => {
                if travel != 2 {
                    return Err(ChannelSpecError::Invalid(format!(
                        "basis \"bell\" needs exactly 2 travel qubits, found {travel}"
                    )));
                }
                Ok(BasisSpec::bell())
            }
            "bell_plus_z" => BasisSpec::bell_plus_z(travel).map_err(|e| {
                ChannelSpecError::Invalid(format!("basis \"bell_plus_z\": {e}"))
            }),
            "ghz_like" => {
                if travel != 3 {
                    return Err(ChannelSpecError::Invalid(format!(
                        "basis \"ghz_like\" needs exactly 3 travel qubits, found {travel}"
                    )));
                }
                Ok(BasisSpec::ghz_like())
            }
            other => Err(ChannelSpecError::Invalid(format!(
                "unknown basis {other:?}; expected \"computational\", \"bell\", \"bell_plus_z\", \"ghz_like\" or inline vectors"
            ))),
        },
        BasisDoc::Inline { vectors, labels } => {
            let dim = 1usize << travel;
            if vectors.len() != dim {
                return Err(ChannelSpecError::Invalid(format!(
                    "inline basis has {} vector(s); {travel} travel qubit(s) need {dim}",
                    vectors.len()
                )));
            }
            let states = vectors
                .iter()
                .map(|v| PureState::new(travel, complexify(v)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ChannelSpecError::Invalid(format!("inline basis vector: {e}")))?;
            BasisSpec::with_tolerance("inline", states, labels.clone(), INPUT_TOL)
                .map_err(|e| ChannelSpecError::Invalid(format!("inline basis: {e}")))
        }
    }
}

/// Builds a codebook from a parsed document, validating matrices (unitary
/// to 1e-9), state dimensions and decodability.
pub fn codebook_from_doc(doc: &ChannelSpecDoc) -> Result<Codebook, ChannelSpecError> {
    let initial = PureState::new(doc.num_qubits, complexify(&doc.initial_state))
        .map_err(|e| ChannelSpecError::Invalid(format!("initial_state: {e}")))?;
    let mut entries = Vec::with_capacity(doc.entries.len());
    for (i, e) in doc.entries.iter().enumerate() {
        let arity = e.targets.len();
        let dim = 1usize << arity;
        if e.matrix.len() != dim || e.matrix.iter().any(|row| row.len() != dim) {
            return Err(ChannelSpecError::Invalid(format!(
                "entry {i} ({:?}): matrix must be {dim}x{dim} for {arity} target(s)",
                e.bits
            )));
        }
        let flat: Vec<Complex> = e.matrix.iter().flat_map(|row| complexify(row)).collect();
        let op = UnitaryOp::with_tolerance(arity, flat, INPUT_TOL)
            .map_err(|err| ChannelSpecError::Invalid(format!("entry {i} ({:?}): {err}", e.bits)))?;
        entries.push(CodebookEntry {
            bits: e.bits.clone(),
            op,
            targets: e.targets.clone(),
        });
    }
    let travel = doc
        .num_qubits
        .checked_sub(doc.home_qubits.len())
        .ok_or_else(|| {
            ChannelSpecError::Invalid(format!(
                "{} home qubit(s) listed for a {}-qubit register",
                doc.home_qubits.len(),
                doc.num_qubits
            ))
        })?;
    let basis = resolve_basis(&doc.measurement_basis, travel)?;
    let cb = Codebook::build(
        doc.name.clone(),
        doc.num_qubits,
        doc.message_bits,
        initial,
        entries,
        basis,
        doc.home_qubits.clone(),
    )
    .map_err(|e| ChannelSpecError::Invalid(e.to_string()))?;
    let report = cb.validate(INPUT_TOL);
    if !report.orthonormal {
        return Err(ChannelSpecError::Invalid(format!(
            "encoded states are not pairwise orthogonal (max overlap {:.3e}); messages would not be decodable",
            report.max_cross_overlap
        )));
    }
    Ok(cb)
}

/// Parses a JSON channel spec from a string. Parse errors carry the line
/// and column reported by the JSON parser.
pub fn parse_channel_spec(text: &str) -> Result<Codebook, ChannelSpecError> {
    let doc: ChannelSpecDoc = serde_json::from_str(text).map_err(|e| ChannelSpecError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    codebook_from_doc(&doc)
}

/// Reads and parses a JSON channel spec file.
pub fn load_channel_spec(path: impl AsRef<Path>) -> Result<Codebook, ChannelSpecError> {
    let text = std::fs::read_to_string(path)?;
    parse_channel_spec(&text)
}
