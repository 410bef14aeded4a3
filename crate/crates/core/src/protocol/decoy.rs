use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::quantum::{ket0, ket1, minus, plus, BasisSpec, PureState};

use super::ProtocolError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoyBasis {
    Z,
    X,
}

impl DecoyBasis {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.gen::<bool>() {
            DecoyBasis::X
        } else {
            DecoyBasis::Z
        }
    }

    pub fn spec(&self) -> BasisSpec {
        match self {
            DecoyBasis::Z => BasisSpec::z(),
            DecoyBasis::X => BasisSpec::x(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DecoyBasis::Z => "z",
            DecoyBasis::X => "x",
        }
    }
}

/// A decoy preparation: eigenstate `bit` of `basis`, i.e. one of
/// |0>, |1>, |+>, |->.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoySpec {
    pub basis: DecoyBasis,
    pub bit: usize,
}

impl DecoySpec {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            basis: DecoyBasis::random(rng),
            bit: usize::from(rng.gen::<bool>()),
        }
    }

    pub fn state(&self) -> PureState {
        match (self.basis, self.bit) {
            (DecoyBasis::Z, 0) => ket0(),
            (DecoyBasis::Z, _) => ket1(),
            (DecoyBasis::X, 0) => plus(),
            (DecoyBasis::X, _) => minus(),
        }
    }

    pub fn label(&self) -> &'static str {
        match (self.basis, self.bit) {
            (DecoyBasis::Z, 0) => "0",
            (DecoyBasis::Z, _) => "1",
            (DecoyBasis::X, 0) => "+",
            (DecoyBasis::X, _) => "-",
        }
    }
}

/// A decoy as placed into a transmitted sequence: where it sits and what
/// was prepared there. Only the preparer knows the contents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoySlot {
    pub position: usize,
    pub spec: DecoySpec,
}

/// One slot of a transmitted qubit sequence: either payload or a decoy.
#[derive(Debug, Clone, PartialEq)]
pub enum TransportSlot<T> {
    Message(T),
    Decoy(usize),
}

/// Scatters `m` freshly drawn decoys into `items` at uniformly random
/// positions, preserving the relative order of the payload. Returns the
/// extended sequence (decoys referenced by index) and the decoy register.
pub fn insert_decoys<T, R: Rng + ?Sized>(
    items: Vec<T>,
    m: usize,
    rng: &mut R,
) -> (Vec<TransportSlot<T>>, Vec<DecoySlot>) {
    let total = items.len() + m;
    let mut positions = rand::seq::index::sample(rng, total, m).into_vec();
    positions.sort_unstable();
    let mut decoys = Vec::with_capacity(m);
    let mut slots = Vec::with_capacity(total);
    let mut payload = items.into_iter();
    let mut next_decoy = positions.iter().peekable();
    for pos in 0..total {
        if next_decoy.peek() == Some(&&pos) {
            next_decoy.next();
            let spec = DecoySpec::random(rng);
            decoys.push(DecoySlot {
                position: pos,
                spec,
            });
            slots.push(TransportSlot::Decoy(decoys.len() - 1));
        } else {
            slots.push(TransportSlot::Message(payload.next().expect("payload count")));
        }
    }
    debug_assert!(payload.next().is_none());
    (slots, decoys)
}

/// The receiver's announcement for one decoy: where it sat, which basis
/// they chose, what they saw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoyCheckOutcome {
    pub position: usize,
    pub basis: DecoyBasis,
    pub outcome: usize,
}

/// Keeps the checks whose measurement basis matches the preparation basis
/// and scores them: returns (sifted count, error rate). Errors are sifted
/// outcomes that differ from the prepared eigenstate. A sequence with
/// decoys but no basis matches carries no evidence and is reported as
/// `NoSiftedDecoys`.
pub fn sift_and_score(
    slots: &[DecoySlot],
    checks: &[DecoyCheckOutcome],
) -> Result<(usize, f64), ProtocolError> {
    if slots.len() != checks.len() {
        return Err(ProtocolError::InvalidConfig(format!(
            "{} decoy check(s) for {} decoy(s)",
            checks.len(),
            slots.len()
        )));
    }
    let mut sifted = 0usize;
    let mut errors = 0usize;
    for (slot, check) in slots.iter().zip(checks) {
        if slot.position != check.position {
            return Err(ProtocolError::InvalidConfig(format!(
                "decoy check at position {} does not match decoy at position {}",
                check.position, slot.position
            )));
        }
        if slot.spec.basis == check.basis {
            sifted += 1;
            if slot.spec.bit != check.outcome {
                errors += 1;
            }
        }
    }
    if sifted == 0 {
        if slots.is_empty() {
            return Ok((0, 0.0));
        }
        return Err(ProtocolError::NoSiftedDecoys { m: slots.len() });
    }
    Ok((sifted, errors as f64 / sifted as f64))
}
