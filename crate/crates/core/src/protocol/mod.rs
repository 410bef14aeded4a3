//! Seeded end-to-end protocol sessions.
//!
//! Four protocols share one machinery: registers are prepared and encoded
//! from a codebook, travel qubits are interleaved with single-qubit decoys
//! at random positions, the channel (optionally occupied by an
//! eavesdropper) delivers them, the receiver checks the decoys against an
//! error threshold and either aborts or decodes. Every classical exchange
//! and measurement lands in a replayable [`SessionTranscript`]; identical
//! configurations reproduce byte-identical transcripts.
//!
//! * `dsqc1` — two bits per three-qubit register; qubit 0 never leaves the
//!   sender, qubits 1-2 travel (one round), register order is scrambled and
//!   disclosed afterwards together with the sender's home-qubit bits.
//! * `dsqc2` — three bits per register; all qubits travel (one round) with
//!   order scrambling; decoding needs no announcements beyond the order.
//! * `qsdc` — three bits per register; qubits travel one per round over
//!   three rounds, each round guarded by its own decoy check; nothing about
//!   the payload is ever announced.
//! * `qkd` — draws a random payload and runs one of the above as carrier,
//!   turning direct communication into key agreement.

mod decoy;
mod order;
mod run;
mod transcript;

pub use decoy::{
    insert_decoys, sift_and_score, DecoyBasis, DecoyCheckOutcome, DecoySlot, DecoySpec,
    TransportSlot,
};
pub use order::OrderPermutation;
pub use run::{run_dsqc1, run_dsqc2, run_qkd, run_qsdc, run_session};
pub use transcript::{Actor, Event, EventBody, EveTouch, SessionTranscript};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codebook::CodebookError;
use crate::quantum::QuantumError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Dsqc1,
    Dsqc2,
    Qsdc,
    Qkd,
}

impl Protocol {
    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::Dsqc1 => "dsqc1",
            Protocol::Dsqc2 => "dsqc2",
            Protocol::Qsdc => "qsdc",
            Protocol::Qkd => "qkd",
        }
    }

    /// Message bits carried by `n` registers (for the key-agreement
    /// wrapper: capacity of its carrier).
    pub fn capacity(&self, n: usize, qkd_carrier: Protocol) -> usize {
        match self {
            Protocol::Dsqc1 => 2 * n,
            Protocol::Dsqc2 | Protocol::Qsdc => 3 * n,
            Protocol::Qkd => qkd_carrier.capacity(n, Protocol::Dsqc2),
        }
    }

    /// Travel qubits per register.
    pub fn travel_qubits(&self, qkd_carrier: Protocol) -> usize {
        match self {
            Protocol::Dsqc1 => 2,
            Protocol::Dsqc2 | Protocol::Qsdc => 3,
            Protocol::Qkd => qkd_carrier.travel_qubits(Protocol::Dsqc2),
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A uniformly random bit string, drawn from the given stream.
pub fn random_bits<R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> String {
    (0..len).map(|_| if rng.gen::<bool>() { '1' } else { '0' }).collect()
}

/// How many decoys to scatter into each transmission: the convention used
/// by the protocol descriptions (as many decoys as travel qubits in the
/// transmission) or a fixed per-transmission count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoyPolicy {
    Paper,
    Custom(usize),
}

impl DecoyPolicy {
    fn count(&self, travel_qubits_in_round: usize) -> usize {
        match self {
            DecoyPolicy::Paper => travel_qubits_in_round,
            DecoyPolicy::Custom(m) => *m,
        }
    }
}

/// How the decoy check talks: `Sift` has the receiver measure each decoy in
/// a random basis and keep basis matches; `AnnounceBasis` has the sender
/// announce each preparation basis so every decoy is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoyDialogue {
    Sift,
    AnnounceBasis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub protocol: Protocol,
    /// Number of three-qubit registers.
    pub n: usize,
    /// Payload bits; must be `None` for the key-agreement wrapper, which
    /// draws its own.
    pub message: Option<String>,
    pub seed: u64,
    /// Abort when a decoy check's error rate strictly exceeds this.
    pub error_threshold: f64,
    /// Scramble register transmission order. `None` picks the protocol
    /// default (on where the protocol defines it, off for `qsdc`).
    pub reorder: Option<bool>,
    pub decoy_policy: DecoyPolicy,
    pub decoy_dialogue: DecoyDialogue,
    /// Carrier protocol for `qkd`.
    pub qkd_carrier: Protocol,
}

impl SessionConfig {
    pub fn new(
        protocol: Protocol,
        n: usize,
        message: Option<&str>,
        seed: u64,
    ) -> Result<Self, ProtocolError> {
        let cfg = Self {
            protocol,
            n,
            message: message.map(str::to_string),
            seed,
            error_threshold: 0.0,
            reorder: None,
            decoy_policy: DecoyPolicy::Paper,
            decoy_dialogue: DecoyDialogue::Sift,
            qkd_carrier: Protocol::Dsqc2,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn capacity(&self) -> usize {
        self.protocol.capacity(self.n, self.qkd_carrier)
    }

    /// Whether this session scrambles transmission order, after applying
    /// protocol defaults.
    pub fn reorder_enabled(&self) -> bool {
        match (self.protocol, self.reorder) {
            (Protocol::Qsdc, _) => false,
            (Protocol::Qkd, r) => match self.qkd_carrier {
                Protocol::Qsdc => false,
                _ => r.unwrap_or(true),
            },
            (_, r) => r.unwrap_or(true),
        }
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.n == 0 {
            return Err(ProtocolError::InvalidConfig(
                "need at least one register".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.error_threshold) {
            return Err(ProtocolError::InvalidConfig(format!(
                "error threshold {} outside [0, 1]",
                self.error_threshold
            )));
        }
        if self.protocol == Protocol::Qkd && self.qkd_carrier == Protocol::Qkd {
            return Err(ProtocolError::InvalidConfig(
                "qkd cannot carry itself".into(),
            ));
        }
        let three_step = self.protocol == Protocol::Qsdc
            || (self.protocol == Protocol::Qkd && self.qkd_carrier == Protocol::Qsdc);
        if three_step && self.reorder == Some(true) {
            return Err(ProtocolError::InvalidConfig(
                "qsdc never scrambles transmission order; its security comes from per-round decoy checks".into(),
            ));
        }
        match (self.protocol, &self.message) {
            (Protocol::Qkd, Some(_)) => Err(ProtocolError::InvalidConfig(
                "qkd draws its own random payload; do not supply a message".into(),
            )),
            (Protocol::Qkd, None) => Ok(()),
            (_, None) => Err(ProtocolError::InvalidConfig(
                "this protocol needs a message".into(),
            )),
            (_, Some(msg)) => {
                if !msg.bytes().all(|b| b == b'0' || b == b'1') {
                    return Err(ProtocolError::MessageAlphabet);
                }
                let expected = self.capacity();
                if msg.len() != expected {
                    return Err(ProtocolError::MessageLength {
                        expected,
                        actual: msg.len(),
                        context: format!("{} with n = {}", self.protocol, self.n),
                    });
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AbortReason {
    ErrorRateExceeded,
    LengthMismatch,
}

impl AbortReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            AbortReason::ErrorRateExceeded => "error_rate_exceeded",
            AbortReason::LengthMismatch => "length_mismatch",
        }
    }
}

/// What a session produced. The transcript carries the full event history;
/// the other fields summarize it.
#[derive(Debug, Clone)]
pub struct SessionResult {
    pub protocol: Protocol,
    pub decoded_message: Option<String>,
    pub aborted: bool,
    pub abort_reason: Option<AbortReason>,
    /// Errors over sifted decoys, pooled across rounds (0 when nothing was
    /// sifted).
    pub observed_error_rate: f64,
    pub sifted_decoy_count: usize,
    /// Key-agreement wrapper only: the payload the sender drew.
    pub alice_key: Option<String>,
    /// The eavesdropper's guess at the payload, when the model emits one.
    pub eve_inference: Option<String>,
    pub transcript: SessionTranscript,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("message length {actual} does not match capacity {expected} ({context})")]
    MessageLength {
        expected: usize,
        actual: usize,
        context: String,
    },
    #[error("message must be a bit string over 0 and 1")]
    MessageAlphabet,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no sifted decoys: {m} decoy(s) checked but none in the preparation basis")]
    NoSiftedDecoys { m: usize },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Codebook(#[from] CodebookError),
}
