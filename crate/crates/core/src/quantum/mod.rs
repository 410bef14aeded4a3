//! Dense pure-state register math.
//!
//! Conventions used throughout the crate:
//!
//! * Qubit 0 is the leftmost ket symbol and the most significant bit of a
//!   basis index, so amplitudes are stored in lexicographic order
//!   |00..0>, |00..1>, ..., |11..1>.
//! * States are kept normalized; constructors renormalize and reject
//!   (near-)zero vectors.
//! * Two-qubit entangled pair states are numbered `psi+`, `phi+`, `psi-`,
//!   `phi-` in that order: (|00>+|11>)/sqrt2, (|01>+|10>)/sqrt2,
//!   (|00>-|11>)/sqrt2, (|01>-|10>)/sqrt2.
//! * The `iY` operator is the real matrix [[0, 1], [-1, 0]], so
//!   iY|0> = -|1> and iY|1> = |0>.

mod basis;
mod measure;
mod state;
mod unitary;

pub use basis::BasisSpec;
pub use measure::{measure, measure_collapse, outcome_probability, MeasurementRecord};
pub use state::{
    bell, bell_label, computational_state, ghz_like, ket0, ket1, minus, plus, PureState,
};
pub use unitary::{apply_unitary, UnitaryOp};

use thiserror::Error;

/// Tolerance for internally derived quantities (unitarity defects,
/// normalization drift, orthogonality of built-in bases).
pub const EXACT_TOL: f64 = 1e-12;

/// Tolerance applied to user-supplied numeric data such as channel-spec
/// matrices and state vectors.
pub const INPUT_TOL: f64 = 1e-9;

pub type Complex = num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("state vector has (near-)zero norm")]
    ZeroVector,
    #[error("bad target qubits: {0}")]
    BadTargets(String),
    #[error("basis is not a complete orthonormal set: {0}")]
    IncompleteBasis(String),
    #[error("matrix is not unitary: {0}")]
    NotUnitary(String),
}

/// Checks that `targets` are distinct, in range for an `n`-qubit register,
/// and exactly `arity` many. Shared by unitary application and measurement.
pub(crate) fn check_targets(n: usize, targets: &[usize], arity: usize) -> Result<(), QuantumError> {
    if targets.len() != arity {
        return Err(QuantumError::BadTargets(format!(
            "operator acts on {arity} qubit(s) but {} target(s) given",
            targets.len()
        )));
    }
    let mut seen = vec![false; n];
    for &t in targets {
        if t >= n {
            return Err(QuantumError::BadTargets(format!(
                "qubit {t} out of range for a {n}-qubit register"
            )));
        }
        if seen[t] {
            return Err(QuantumError::BadTargets(format!("qubit {t} listed twice")));
        }
        seen[t] = true;
    }
    Ok(())
}

/// Splits a register into (targets, rest) index maps: returns the ascending
/// list of non-target qubits.
pub(crate) fn rest_qubits(n: usize, targets: &[usize]) -> Vec<usize> {
    (0..n).filter(|q| !targets.contains(q)).collect()
}

/// Composes a full basis index from a target-group index `g` (bit j of `g`
/// is the value of qubit `targets[j]`) and a rest-group index `r` (bits in
/// ascending qubit order).
pub(crate) fn compose_index(n: usize, targets: &[usize], rest: &[usize], g: usize, r: usize) -> usize {
    let mut i = 0usize;
    for (j, &q) in targets.iter().enumerate() {
        let bit = (g >> (targets.len() - 1 - j)) & 1;
        i |= bit << (n - 1 - q);
    }
    for (j, &q) in rest.iter().enumerate() {
        let bit = (r >> (rest.len() - 1 - j)) & 1;
        i |= bit << (n - 1 - q);
    }
    i
}
