//! Message-to-unitary encoding tables and outcome decoding.
//!
//! A [`Codebook`] couples a shared initial register state with one encoding
//! entry per message bit string and the measurement the receiver uses for
//! decoding. The two built-in codebooks cover the direct-communication
//! protocol variants:
//!
//! * [`Codebook::dsqc1`] — two bits per three-qubit register; qubit 0 stays
//!   home with the sender, qubits 1 and 2 travel; the receiver pair-measures
//!   the travel qubits and combines with the sender's announced home bit.
//! * [`Codebook::dsqc2`] — three bits per register; all qubits travel and
//!   the receiver measures in the eight-member entangled basis.
//!
//! Arbitrary codebooks can be loaded from JSON channel specs (see
//! [`load_channel_spec`]) and inspected with [`Codebook::validate`].

mod channel_spec;

pub use channel_spec::{load_channel_spec, parse_channel_spec, ChannelSpecError};

use thiserror::Error;

use crate::quantum::{
    apply_unitary, bell, ghz_like, ket0, ket1, outcome_probability, BasisSpec, Complex,
    MeasurementRecord, PureState, QuantumError, UnitaryOp, EXACT_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodebookError {
    #[error("unknown message bits {0:?}")]
    UnknownMessage(String),
    #[error("expected {expected} measurement record(s), got {actual}")]
    RecordCountMismatch { expected: usize, actual: usize },
    #[error("record {index} was measured in basis {actual:?}, expected {expected:?}")]
    BasisMismatch {
        index: usize,
        expected: String,
        actual: String,
    },
    #[error("outcome combination is inconsistent with every message in the codebook")]
    InconsistentOutcome,
    #[error("outcome combination is consistent with more than one message")]
    AmbiguousOutcome,
    #[error("codebook construction: {0}")]
    Construction(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// One encoding rule: the unitary applied to `targets` when sending `bits`.
#[derive(Debug, Clone)]
pub struct CodebookEntry {
    pub bits: String,
    pub op: UnitaryOp,
    pub targets: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Codebook {
    name: String,
    num_qubits: usize,
    message_bits: usize,
    initial_state: PureState,
    entries: Vec<CodebookEntry>,
    encoded: Vec<PureState>,
    measurement_basis: BasisSpec,
    home_qubits: Vec<usize>,
    travel_qubits: Vec<usize>,
}

/// Health report for a codebook; see [`Codebook::validate`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ValidationReport {
    pub orthonormal: bool,
    pub unitaries_valid: bool,
    pub max_cross_overlap: f64,
    pub operator_arity: usize,
    pub register_size: usize,
    pub dense_coding_capable: bool,
    pub classification_note: String,
}

impl Codebook {
    /// Assembles a codebook and precomputes every encoded state. Entry `i`
    /// must carry the bit string for message index `i`; targets must be
    /// valid for the register; the measurement basis must cover exactly the
    /// travel qubits.
    pub fn build(
        name: impl Into<String>,
        num_qubits: usize,
        message_bits: usize,
        initial_state: PureState,
        entries: Vec<CodebookEntry>,
        measurement_basis: BasisSpec,
        home_qubits: Vec<usize>,
    ) -> Result<Self, CodebookError> {
        let name = name.into();
        if initial_state.num_qubits() != num_qubits {
            return Err(CodebookError::Construction(format!(
                "initial state has {} qubit(s), declared {num_qubits}",
                initial_state.num_qubits()
            )));
        }
        let count = 1usize << message_bits;
        if entries.len() != count {
            return Err(CodebookError::Construction(format!(
                "{} entries for {message_bits} message bit(s); need {count}",
                entries.len()
            )));
        }
        for (i, e) in entries.iter().enumerate() {
            let expected = format!("{i:0message_bits$b}");
            if e.bits != expected {
                return Err(CodebookError::Construction(format!(
                    "entry {i} labelled {:?}, expected {expected:?} (entries must be in message order)",
                    e.bits
                )));
            }
        }
        let mut seen_home = vec![false; num_qubits];
        for &h in &home_qubits {
            if h >= num_qubits {
                return Err(CodebookError::Construction(format!(
                    "home qubit {h} out of range for {num_qubits} qubit(s)"
                )));
            }
            if seen_home[h] {
                return Err(CodebookError::Construction(format!(
                    "home qubit {h} listed twice"
                )));
            }
            seen_home[h] = true;
        }
        let travel_qubits: Vec<usize> =
            (0..num_qubits).filter(|q| !home_qubits.contains(q)).collect();
        if measurement_basis.num_qubits() != travel_qubits.len() {
            return Err(CodebookError::Construction(format!(
                "measurement basis covers {} qubit(s) but {} travel",
                measurement_basis.num_qubits(),
                travel_qubits.len()
            )));
        }
        let mut encoded = Vec::with_capacity(count);
        for e in &entries {
            encoded.push(apply_unitary(&initial_state, &e.op, &e.targets)?);
        }
        Ok(Self {
            name,
            num_qubits,
            message_bits,
            initial_state,
            entries,
            encoded,
            measurement_basis,
            home_qubits,
            travel_qubits,
        })
    }

    /// Two-bits-per-register codebook over the shared state
    /// (|0>|phi+> + |1>|psi+>)/sqrt2, encoding on qubits (0,1):
    /// 00 -> X(x)I, 01 -> I(x)I, 10 -> I(x)Z, 11 -> I(x)iY.
    /// Qubit 0 stays home; the receiver pair-measures qubits (1,2).
    pub fn dsqc1() -> Self {
        let i1 = UnitaryOp::identity(1);
        let entries = vec![
            entry("00", UnitaryOp::pauli_x().kron(&i1)),
            entry("01", i1.kron(&i1)),
            entry("10", i1.kron(&UnitaryOp::pauli_z())),
            entry("11", i1.kron(&UnitaryOp::pauli_iy())),
        ];
        let cb = Self::build(
            "dsqc1",
            3,
            2,
            ghz_like(1, 0),
            entries,
            BasisSpec::bell(),
            vec![0],
        )
        .expect("built-in codebook");
        debug_assert!(cb.validate(EXACT_TOL).orthonormal);
        cb
    }

    /// Three-bits-per-register codebook over the shared state
    /// (|psi+>|0> + |psi->|1>)/sqrt2, encoding on qubits (0,1):
    /// 000 -> I(x)I, 001 -> X(x)X, 010 -> Z(x)I, 011 -> iY(x)I,
    /// 100 -> I(x)X, 101 -> X(x)I, 110 -> I(x)iY, 111 -> iY(x)X.
    /// All three qubits travel; the receiver measures in the eight-member
    /// entangled basis.
    pub fn dsqc2() -> Self {
        let i1 = UnitaryOp::identity(1);
        let x = UnitaryOp::pauli_x();
        let z = UnitaryOp::pauli_z();
        let iy = UnitaryOp::pauli_iy();
        let entries = vec![
            entry("000", i1.kron(&i1)),
            entry("001", x.kron(&x)),
            entry("010", z.kron(&i1)),
            entry("011", iy.kron(&i1)),
            entry("100", i1.kron(&x)),
            entry("101", x.kron(&i1)),
            entry("110", i1.kron(&iy)),
            entry("111", iy.kron(&x)),
        ];
        let cb = Self::build(
            "dsqc2",
            3,
            3,
            ghz_like(0, 2),
            entries,
            BasisSpec::ghz_like(),
            vec![],
        )
        .expect("built-in codebook");
        debug_assert!(cb.validate(EXACT_TOL).orthonormal);
        cb
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn message_bits(&self) -> usize {
        self.message_bits
    }

    pub fn initial_state(&self) -> &PureState {
        &self.initial_state
    }

    pub fn entries(&self) -> &[CodebookEntry] {
        &self.entries
    }

    pub fn measurement_basis(&self) -> &BasisSpec {
        &self.measurement_basis
    }

    pub fn home_qubits(&self) -> &[usize] {
        &self.home_qubits
    }

    pub fn travel_qubits(&self) -> &[usize] {
        &self.travel_qubits
    }

    pub fn message_index(&self, bits: &str) -> Result<usize, CodebookError> {
        if bits.len() != self.message_bits || !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(CodebookError::UnknownMessage(bits.to_string()));
        }
        Ok(usize::from_str_radix(bits, 2).unwrap())
    }

    pub fn bits_of_index(&self, index: usize) -> String {
        format!("{index:0width$b}", width = self.message_bits)
    }

    /// The register state carrying `bits`.
    pub fn encode(&self, bits: &str) -> Result<&PureState, CodebookError> {
        Ok(&self.encoded[self.message_index(bits)?])
    }

    pub fn encoded_states(&self) -> &[PureState] {
        &self.encoded
    }

    /// The measurements the decoder performs, in record order: the home
    /// qubits jointly in the computational basis (when any stay home),
    /// then the travel qubits in the codebook's measurement basis.
    pub fn decode_measurements(&self) -> Vec<(BasisSpec, Vec<usize>)> {
        let mut decls = Vec::new();
        if !self.home_qubits.is_empty() {
            decls.push((
                BasisSpec::computational(self.home_qubits.len()),
                self.home_qubits.clone(),
            ));
        }
        decls.push((self.measurement_basis.clone(), self.travel_qubits.clone()));
        decls
    }

    /// Recovers the unique message consistent with the observed outcomes of
    /// the declared decode measurements (records in declaration order).
    /// An outcome combination no encoded state can produce yields
    /// `InconsistentOutcome`.
    pub fn decode(&self, records: &[MeasurementRecord]) -> Result<String, CodebookError> {
        let decls = self.decode_measurements();
        if records.len() != decls.len() {
            return Err(CodebookError::RecordCountMismatch {
                expected: decls.len(),
                actual: records.len(),
            });
        }
        for (i, ((basis, _), rec)) in decls.iter().zip(records).enumerate() {
            if rec.basis_name != basis.name() {
                return Err(CodebookError::BasisMismatch {
                    index: i,
                    expected: basis.name().to_string(),
                    actual: rec.basis_name.clone(),
                });
            }
        }
        // Probabilities this small can only be float noise on an impossible
        // branch; real branches in well-formed codebooks are >= 2^-register.
        const CONSISTENCY_TOL: f64 = 1e-9;
        let mut consistent = Vec::new();
        'messages: for (m, enc) in self.encoded.iter().enumerate() {
            let mut state = Some(enc.clone());
            let mut live: Vec<usize> = (0..self.num_qubits).collect();
            let mut joint = 1.0;
            for ((basis, targets), rec) in decls.iter().zip(records) {
                let cur = match &state {
                    Some(s) => s,
                    None => continue 'messages,
                };
                let local: Vec<usize> = targets
                    .iter()
                    .map(|t| live.iter().position(|q| q == t).expect("live qubit"))
                    .collect();
                let (p, post) = outcome_probability(cur, basis, &local, rec.outcome_index)?;
                joint *= p;
                if joint <= CONSISTENCY_TOL {
                    continue 'messages;
                }
                live.retain(|q| !targets.contains(q));
                state = post;
            }
            consistent.push(m);
        }
        match consistent[..] {
            [m] => Ok(self.bits_of_index(m)),
            [] => Err(CodebookError::InconsistentOutcome),
            _ => Err(CodebookError::AmbiguousOutcome),
        }
    }

    /// Checks decodability: pairwise orthogonality of the encoded states,
    /// unitarity of every entry, and whether the codebook retains the
    /// dense-coding property of moving more bits than the operators touch
    /// qubits.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut max_cross: f64 = 0.0;
        for i in 0..self.encoded.len() {
            for j in (i + 1)..self.encoded.len() {
                let overlap = self.encoded[i]
                    .inner_product(&self.encoded[j])
                    .expect("equal dims")
                    .norm();
                max_cross = max_cross.max(overlap);
            }
        }
        let orthonormal = max_cross <= tol;
        let unitaries_valid = self.entries.iter().all(|e| {
            UnitaryOp::with_tolerance(e.op.num_qubits(), e.op.matrix().to_vec(), tol).is_ok()
        });
        let operator_arity = self
            .entries
            .iter()
            .map(|e| e.op.num_qubits())
            .max()
            .unwrap_or(0);
        let dense_coding_capable = orthonormal && operator_arity < self.num_qubits;
        let classification_note = if !orthonormal {
            format!(
                "encoded states overlap (max |<i|j>| = {max_cross:.3e}); messages are not reliably distinguishable"
            )
        } else if dense_coding_capable {
            format!(
                "{} bit(s) ride on operators touching {operator_arity} of {} qubits; dense-coding-style advantage present",
                self.message_bits, self.num_qubits
            )
        } else {
            format!(
                "operators act on the full {}-qubit register; messages are distinguishable but there is no dense-coding advantage",
                self.num_qubits
            )
        };
        ValidationReport {
            orthonormal,
            unitaries_valid,
            max_cross_overlap: max_cross,
            operator_arity,
            register_size: self.num_qubits,
            dense_coding_capable,
            classification_note,
        }
    }
}

fn entry(bits: &str, op: UnitaryOp) -> CodebookEntry {
    CodebookEntry {
        bits: bits.to_string(),
        op,
        targets: vec![0, 1],
    }
}

/// Decode table for the home-qubit codebook: (home outcome, pair outcome,
/// message). The receiver's pair outcome alone never determines the
/// message; the home bit disambiguates.
pub const DSQC1_DECODE_TABLE: [(&str, &str, &str); 8] = [
    ("0", "psi+", "00"),
    ("0", "phi+", "01"),
    ("0", "psi-", "11"),
    ("0", "phi-", "10"),
    ("1", "psi+", "01"),
    ("1", "phi+", "00"),
    ("1", "psi-", "10"),
    ("1", "phi-", "11"),
];

/// Looks up the message for a (home outcome, pair outcome) pair.
pub fn dsqc1_table_lookup(home: &str, pair: &str) -> Option<&'static str> {
    DSQC1_DECODE_TABLE
        .iter()
        .find(|(h, p, _)| *h == home && *p == pair)
        .map(|(_, _, m)| *m)
}

/// Unitary mapping the eight-member entangled basis onto the product basis
/// "pair basis on qubits (0,1), computational on qubit 2", preserving
/// outcome indices. Rotating by this and measuring the product basis is the
/// circuit-level realization of the entangled-basis measurement.
pub fn ghz_to_bell_z_rotation() -> UnitaryOp {
    let ghz = BasisSpec::ghz_like();
    let bpz = BasisSpec::bell_plus_z(3).expect("three qubits");
    let dim = 8;
    let mut mat = vec![Complex::new(0.0, 0.0); dim * dim];
    for m in 0..dim {
        let u = bpz.vector(m).amplitudes();
        let w = ghz.vector(m).amplitudes();
        for r in 0..dim {
            for c in 0..dim {
                mat[r * dim + c] += u[r] * w[c].conj();
            }
        }
    }
    UnitaryOp::new(3, mat).expect("change of basis between orthonormal bases")
}

/// Measures a three-qubit register in the eight-member entangled basis by
/// the rotation route: rotate with [`ghz_to_bell_z_rotation`], pair-measure
/// qubits (0,1), then measure qubit 2 computationally. Returns the
/// entangled-basis outcome index together with the two product records.
pub fn ghz_outcome_via_bell_z<R: rand::Rng + ?Sized>(
    state: &PureState,
    rng: &mut R,
) -> Result<(usize, [MeasurementRecord; 2]), CodebookError> {
    let rotated = apply_unitary(state, &ghz_to_bell_z_rotation(), &[0, 1, 2])?;
    let pair_rec = crate::quantum::measure(&rotated, &BasisSpec::bell(), &[0, 1], rng)?;
    let last = pair_rec
        .post_state
        .clone()
        .expect("one qubit remains after the pair measurement");
    let z_rec = crate::quantum::measure(&last, &BasisSpec::z(), &[0], rng)?;
    let outcome = pair_rec.outcome_index * 2 + z_rec.outcome_index;
    Ok((outcome, [pair_rec, z_rec]))
}

/// Named four-qubit states from the worked sharing example: "omega" (a
/// pair state shared inside a four-qubit register) and the two codeword
/// states "q4" and "q5".
pub fn example_states() -> Vec<(String, PureState)> {
    let half = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let omega = {
        let t0 = ket0().tensor(&bell(1)).tensor(&ket0());
        let t1 = ket1().tensor(&bell(3)).tensor(&ket1());
        PureState::superpose(&[(half, &t0), (half, &t1)]).unwrap()
    };
    let mut q4 = vec![0.0; 16];
    for i in [0b0000, 0b0101, 0b1000, 0b1110] {
        q4[i] = 1.0;
    }
    let mut q5 = vec![0.0; 16];
    for i in [0b0000, 0b1011, 0b1101, 0b1110] {
        q5[i] = 1.0;
    }
    vec![
        ("omega".to_string(), omega),
        ("q4".to_string(), PureState::from_reals(4, &q4).unwrap()),
        ("q5".to_string(), PureState::from_reals(4, &q5).unwrap()),
    ]
}
