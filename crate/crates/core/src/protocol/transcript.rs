use serde::{Deserialize, Serialize};

/// Who acts: the sender, the receiver, the eavesdropper, or the channel
/// itself (receipt checks, transport).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    Alice,
    Bob,
    Eve,
    Channel,
}

/// One transcript line. Serializes to a single JSON object with stable
/// field order `step_index`, `actor`, `event_kind`, `payload`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub step_index: usize,
    pub actor: Actor,
    #[serde(flatten)]
    pub body: EventBody,
}

/// A qubit the eavesdropper acted on: its slot position in the transmitted
/// sequence and, for message qubits, which register and which qubit of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EveTouch {
    pub position: usize,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event_kind", content = "payload", rename_all = "snake_case")]
pub enum EventBody {
    SessionStart {
        protocol: String,
        n: usize,
        seed: u64,
        threshold: f64,
        reorder: bool,
    },
    /// Key-agreement wrapper only: the sender draws a fresh random payload.
    KeyDraw { bits: usize },
    Prepare {
        units: usize,
        qubits_per_unit: usize,
        codebook: String,
    },
    Encode { unit: usize, bits: String },
    /// Transmission order of the registers: `permutation[j]` is the original
    /// index of the register sent in slot block `j`.
    Reorder { permutation: Vec<usize> },
    InsertDecoys {
        round: usize,
        count: usize,
        positions: Vec<usize>,
    },
    Transmit { round: usize, slots: usize },
    EveIntercept {
        round: usize,
        attack: String,
        touched: Vec<EveTouch>,
    },
    LengthCheck {
        round: usize,
        expected: usize,
        received: usize,
    },
    DecoyPositions { round: usize, positions: Vec<usize> },
    DecoyCheck {
        round: usize,
        position: usize,
        basis: String,
        outcome: usize,
    },
    SiftSummary {
        round: usize,
        sifted: usize,
        errors: usize,
        error_rate: f64,
    },
    Abort { reason: String },
    /// Classical disclosure of the transmission order, one bit per travel
    /// qubit by the accounting convention used throughout.
    OrderDisclosure { bits: usize, permutation: Vec<usize> },
    /// The sender's computational-basis result on a stay-home qubit,
    /// announced classically (one bit).
    HomeAnnouncement { unit: usize, outcome: usize },
    DecodeMeasurement {
        unit: usize,
        basis: String,
        outcome: String,
    },
    /// Cross-check of the two decode routes: direct entangled-basis
    /// measurement vs rotate-then-product-measure on the collapsed register.
    DualDecodeCheck {
        unit: usize,
        primary: String,
        rotated: String,
        agree: bool,
    },
    EveInference { bits: String },
    Decode { message: String },
}

impl EventBody {
    /// The `event_kind` tag this body serializes under.
    pub fn kind_name(&self) -> &'static str {
        match self {
            EventBody::SessionStart { .. } => "session_start",
            EventBody::KeyDraw { .. } => "key_draw",
            EventBody::Prepare { .. } => "prepare",
            EventBody::Encode { .. } => "encode",
            EventBody::Reorder { .. } => "reorder",
            EventBody::InsertDecoys { .. } => "insert_decoys",
            EventBody::Transmit { .. } => "transmit",
            EventBody::EveIntercept { .. } => "eve_intercept",
            EventBody::LengthCheck { .. } => "length_check",
            EventBody::DecoyPositions { .. } => "decoy_positions",
            EventBody::DecoyCheck { .. } => "decoy_check",
            EventBody::SiftSummary { .. } => "sift_summary",
            EventBody::Abort { .. } => "abort",
            EventBody::OrderDisclosure { .. } => "order_disclosure",
            EventBody::HomeAnnouncement { .. } => "home_announcement",
            EventBody::DecodeMeasurement { .. } => "decode_measurement",
            EventBody::DualDecodeCheck { .. } => "dual_decode_check",
            EventBody::EveInference { .. } => "eve_inference",
            EventBody::Decode { .. } => "decode",
        }
    }
}

/// Ordered, replayable record of everything observable in a session.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SessionTranscript {
    events: Vec<Event>,
}

impl SessionTranscript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, actor: Actor, body: EventBody) {
        let step_index = self.events.len();
        self.events.push(Event {
            step_index,
            actor,
            body,
        });
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// One JSON object per line, in step order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("transcript events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let mut events = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            events.push(serde_json::from_str(line)?);
        }
        Ok(Self { events })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_order_is_stable() {
        let mut t = SessionTranscript::new();
        t.push(
            Actor::Alice,
            EventBody::Encode {
                unit: 0,
                bits: "01".into(),
            },
        );
        let line = t.to_jsonl();
        assert_eq!(
            line.trim_end(),
            r#"{"step_index":0,"actor":"alice","event_kind":"encode","payload":{"unit":0,"bits":"01"}}"#
        );
    }

    #[test]
    fn jsonl_round_trip() {
        let mut t = SessionTranscript::new();
        t.push(
            Actor::Alice,
            EventBody::SessionStart {
                protocol: "dsqc1".into(),
                n: 2,
                seed: 7,
                threshold: 0.0,
                reorder: true,
            },
        );
        t.push(
            Actor::Eve,
            EventBody::EveIntercept {
                round: 1,
                attack: "intercept_resend_fake".into(),
                touched: vec![EveTouch {
                    position: 3,
                    kind: "message".into(),
                    unit: Some(1),
                    qubit: Some(2),
                }],
            },
        );
        t.push(
            Actor::Bob,
            EventBody::Decode {
                message: "0110".into(),
            },
        );
        let text = t.to_jsonl();
        let back = SessionTranscript::from_jsonl(&text).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn kind_names_match_serialization() {
        let body = EventBody::SiftSummary {
            round: 1,
            sifted: 3,
            errors: 1,
            error_rate: 1.0 / 3.0,
        };
        let json = serde_json::to_string(&Event {
            step_index: 0,
            actor: Actor::Alice,
            body: body.clone(),
        })
        .unwrap();
        assert!(json.contains(&format!("\"event_kind\":\"{}\"", body.kind_name())));
    }
}
