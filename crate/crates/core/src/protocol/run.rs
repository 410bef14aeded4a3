use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adversary::{EveKind, EveModel};
use crate::codebook::{dsqc1_table_lookup, ghz_outcome_via_bell_z, Codebook};
use crate::quantum::{measure, measure_collapse, BasisSpec, PureState};

use super::decoy::{insert_decoys, DecoyBasis, DecoyCheckOutcome, DecoySlot, DecoySpec, TransportSlot};
use super::order::OrderPermutation;
use super::transcript::{Actor, EventBody, EveTouch, SessionTranscript};
use super::{
    AbortReason, Protocol, ProtocolError, SessionConfig, SessionResult,
};

/// One payload qubit in a transmitted sequence: which register it belongs
/// to (original index) and which qubit of that register it is.
#[derive(Debug, Clone, Copy)]
struct SlotRef {
    unit: usize,
    qubit: usize,
}

/// What the intercepting eavesdropper is holding: the payload slots she
/// captured, in transmitted order.
#[derive(Default)]
struct EveStore {
    message_slots: Vec<(usize, usize, usize)>, // (position, unit, qubit)
}

/// Runs any protocol session under the given eavesdropper model.
pub fn run_session(config: &SessionConfig, eve: &EveModel) -> Result<SessionResult, ProtocolError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut transcript = SessionTranscript::new();
    transcript.push(
        Actor::Alice,
        EventBody::SessionStart {
            protocol: config.protocol.as_str().to_string(),
            n: config.n,
            seed: config.seed,
            threshold: config.error_threshold,
            reorder: config.reorder_enabled(),
        },
    );
    match config.protocol {
        Protocol::Dsqc1 | Protocol::Dsqc2 => {
            let message = config.message.clone().expect("validated");
            run_dsqc_variant(config, eve, &mut rng, transcript, &message, config.protocol)
        }
        Protocol::Qsdc => {
            let message = config.message.clone().expect("validated");
            run_three_step(config, eve, &mut rng, transcript, &message)
        }
        Protocol::Qkd => run_key_agreement(config, eve, &mut rng, transcript),
    }
}

pub fn run_dsqc1(config: &SessionConfig, eve: &EveModel) -> Result<SessionResult, ProtocolError> {
    expect_protocol(config, Protocol::Dsqc1)?;
    run_session(config, eve)
}

pub fn run_dsqc2(config: &SessionConfig, eve: &EveModel) -> Result<SessionResult, ProtocolError> {
    expect_protocol(config, Protocol::Dsqc2)?;
    run_session(config, eve)
}

pub fn run_qsdc(config: &SessionConfig, eve: &EveModel) -> Result<SessionResult, ProtocolError> {
    expect_protocol(config, Protocol::Qsdc)?;
    run_session(config, eve)
}

pub fn run_qkd(config: &SessionConfig, eve: &EveModel) -> Result<SessionResult, ProtocolError> {
    expect_protocol(config, Protocol::Qkd)?;
    run_session(config, eve)
}

fn expect_protocol(config: &SessionConfig, expected: Protocol) -> Result<(), ProtocolError> {
    if config.protocol != expected {
        return Err(ProtocolError::InvalidConfig(format!(
            "config is for {}, this entry point runs {expected}",
            config.protocol
        )));
    }
    Ok(())
}

/// Receipt confirmation: records the length check and, on mismatch, the
/// abort. Our channel models never drop qubits, but the check is part of
/// the dialogue.
fn receipt_check(
    round: usize,
    expected: usize,
    received: usize,
    transcript: &mut SessionTranscript,
) -> Option<AbortReason> {
    transcript.push(
        Actor::Channel,
        EventBody::LengthCheck {
            round,
            expected,
            received,
        },
    );
    if expected != received {
        transcript.push(
            Actor::Bob,
            EventBody::Abort {
                reason: AbortReason::LengthMismatch.as_str().to_string(),
            },
        );
        return Some(AbortReason::LengthMismatch);
    }
    None
}

fn encode_units(
    cb: &Codebook,
    n: usize,
    message: &str,
    transcript: &mut SessionTranscript,
) -> Result<Vec<PureState>, ProtocolError> {
    transcript.push(
        Actor::Alice,
        EventBody::Prepare {
            units: n,
            qubits_per_unit: cb.num_qubits(),
            codebook: cb.name().to_string(),
        },
    );
    let k = cb.message_bits();
    let mut units = Vec::with_capacity(n);
    for i in 0..n {
        let bits = &message[i * k..(i + 1) * k];
        units.push(cb.encode(bits)?.clone());
        transcript.push(
            Actor::Alice,
            EventBody::Encode {
                unit: i,
                bits: bits.to_string(),
            },
        );
    }
    Ok(units)
}

/// The eavesdropper's channel action for one transmitted sequence.
#[allow(clippy::too_many_arguments)]
fn eve_on_channel<R: Rng + ?Sized>(
    eve: &EveModel,
    active: bool,
    round: usize,
    slots: &[TransportSlot<SlotRef>],
    units: &mut [PureState],
    decoy_states: &mut [PureState],
    fakes: &mut [Vec<Option<PureState>>],
    store: &mut EveStore,
    rng: &mut R,
    transcript: &mut SessionTranscript,
) -> Result<(), ProtocolError> {
    if !active {
        return Ok(());
    }
    match eve.kind {
        EveKind::None => {}
        EveKind::DecoyMeasureResend => {
            let mut touched = Vec::with_capacity(slots.len());
            for (pos, slot) in slots.iter().enumerate() {
                match slot {
                    TransportSlot::Decoy(d) => {
                        let basis = DecoyBasis::random(rng);
                        let rec = measure(&decoy_states[*d], &basis.spec(), &[0], rng)?;
                        decoy_states[*d] = DecoySpec {
                            basis,
                            bit: rec.outcome_index,
                        }
                        .state();
                        touched.push(EveTouch {
                            position: pos,
                            kind: "decoy".to_string(),
                            unit: None,
                            qubit: None,
                        });
                    }
                    TransportSlot::Message(r) => {
                        let basis = DecoyBasis::random(rng);
                        let (_, collapsed) =
                            measure_collapse(&units[r.unit], &basis.spec(), &[r.qubit], rng)?;
                        units[r.unit] = collapsed;
                        touched.push(EveTouch {
                            position: pos,
                            kind: "message".to_string(),
                            unit: Some(r.unit),
                            qubit: Some(r.qubit),
                        });
                    }
                }
            }
            transcript.push(
                Actor::Eve,
                EventBody::EveIntercept {
                    round,
                    attack: eve.kind.as_str().to_string(),
                    touched,
                },
            );
        }
        EveKind::InterceptResendFake => {
            let mut touched = Vec::with_capacity(slots.len());
            for (pos, slot) in slots.iter().enumerate() {
                match slot {
                    TransportSlot::Decoy(d) => {
                        // She keeps the real decoy (worthless to her) and
                        // forwards a substitute.
                        decoy_states[*d] = eve.fake_qubit(rng);
                        touched.push(EveTouch {
                            position: pos,
                            kind: "decoy".to_string(),
                            unit: None,
                            qubit: None,
                        });
                    }
                    TransportSlot::Message(r) => {
                        fakes[r.unit][r.qubit] = Some(eve.fake_qubit(rng));
                        store.message_slots.push((pos, r.unit, r.qubit));
                        touched.push(EveTouch {
                            position: pos,
                            kind: "message".to_string(),
                            unit: Some(r.unit),
                            qubit: Some(r.qubit),
                        });
                    }
                }
            }
            transcript.push(
                Actor::Eve,
                EventBody::EveIntercept {
                    round,
                    attack: eve.kind.as_str().to_string(),
                    touched,
                },
            );
        }
    }
    Ok(())
}

/// After the decoy positions are announced the intercepting eavesdropper
/// knows which captured slots are payload; she measures each captured
/// register and commits to a guess. For the home-qubit variant she
/// pair-measures the two travel qubits and reads the decode table with her
/// assumed home bit; for the all-travel variant she measures the full
/// register in the entangled basis.
fn eve_inference_after_announcement<R: Rng + ?Sized>(
    eve: &EveModel,
    variant: Protocol,
    cb: &Codebook,
    store: &EveStore,
    units: &mut [PureState],
    rng: &mut R,
    transcript: &mut SessionTranscript,
) -> Result<Option<String>, ProtocolError> {
    if eve.kind != EveKind::InterceptResendFake || store.message_slots.is_empty() {
        return Ok(None);
    }
    let tq = cb.travel_qubits().len();
    let mut inferred = String::new();
    for block in store.message_slots.chunks(tq) {
        let unit = block[0].1;
        debug_assert!(block.iter().all(|&(_, u, _)| u == unit));
        match variant {
            Protocol::Dsqc1 => {
                let (rec, collapsed) =
                    measure_collapse(&units[unit], &BasisSpec::bell(), &[1, 2], rng)?;
                units[unit] = collapsed;
                let home = if eve.assumed_home_outcome == 0 { "0" } else { "1" };
                inferred += dsqc1_table_lookup(home, &rec.outcome_label)
                    .expect("decode table covers every outcome pair");
            }
            _ => {
                let (rec, collapsed) =
                    measure_collapse(&units[unit], &BasisSpec::ghz_like(), &[0, 1, 2], rng)?;
                units[unit] = collapsed;
                inferred += &rec.outcome_label;
            }
        }
    }
    transcript.push(
        Actor::Eve,
        EventBody::EveInference {
            bits: inferred.clone(),
        },
    );
    Ok(Some(inferred))
}

/// The receiver's view of one register at decode time: the real register
/// tensored with any substitute qubits, plus where his travel qubits live
/// in that composite.
fn compose_receiver_unit(
    real: &PureState,
    fakes: &[Option<PureState>],
    travel: &[usize],
) -> (PureState, Vec<usize>) {
    let mut composite = real.clone();
    let mut targets = Vec::with_capacity(travel.len());
    let mut next = composite.num_qubits();
    for &q in travel {
        match &fakes[q] {
            Some(f) => {
                composite = composite.tensor(f);
                targets.push(next);
                next += 1;
            }
            None => targets.push(q),
        }
    }
    (composite, targets)
}

struct RoundOutcome {
    sifted: usize,
    errors: usize,
}

fn abort_result(
    config: &SessionConfig,
    reason: AbortReason,
    sifted: usize,
    errors: usize,
    eve_inference: Option<String>,
    transcript: SessionTranscript,
) -> SessionResult {
    SessionResult {
        protocol: config.protocol,
        decoded_message: None,
        aborted: true,
        abort_reason: Some(reason),
        observed_error_rate: if sifted == 0 {
            0.0
        } else {
            errors as f64 / sifted as f64
        },
        sifted_decoy_count: sifted,
        alice_key: None,
        eve_inference,
        transcript,
    }
}

/// Single-round variants: the home-qubit codebook (two bits per register,
/// qubits 1-2 travel) and the all-travel codebook (three bits, everything
/// travels), with order scrambling and the post-check disclosures.
fn run_dsqc_variant<R: Rng + ?Sized>(
    config: &SessionConfig,
    eve: &EveModel,
    rng: &mut R,
    mut transcript: SessionTranscript,
    message: &str,
    variant: Protocol,
) -> Result<SessionResult, ProtocolError> {
    let cb = match variant {
        Protocol::Dsqc1 => Codebook::dsqc1(),
        _ => Codebook::dsqc2(),
    };
    let n = config.n;
    let mut units = encode_units(&cb, n, message, &mut transcript)?;

    let perm = if config.reorder_enabled() {
        let p = OrderPermutation::random(n, rng);
        transcript.push(
            Actor::Alice,
            EventBody::Reorder {
                permutation: p.forward().to_vec(),
            },
        );
        p
    } else {
        OrderPermutation::identity(n)
    };

    let travel = cb.travel_qubits().to_vec();
    let mut payload = Vec::with_capacity(n * travel.len());
    for &u in perm.forward() {
        for &q in &travel {
            payload.push(SlotRef { unit: u, qubit: q });
        }
    }
    let m = config.decoy_policy.count(payload.len());
    let (slots, decoys) = insert_decoys(payload, m, rng);
    transcript.push(
        Actor::Alice,
        EventBody::InsertDecoys {
            round: 1,
            count: decoys.len(),
            positions: decoys.iter().map(|d| d.position).collect(),
        },
    );
    let mut decoy_states: Vec<PureState> = decoys.iter().map(|d| d.spec.state()).collect();
    let mut fakes: Vec<Vec<Option<PureState>>> = vec![vec![None; cb.num_qubits()]; n];
    let mut store = EveStore::default();

    transcript.push(
        Actor::Channel,
        EventBody::Transmit {
            round: 1,
            slots: slots.len(),
        },
    );
    eve_on_channel(
        eve,
        true,
        1,
        &slots,
        &mut units,
        &mut decoy_states,
        &mut fakes,
        &mut store,
        rng,
        &mut transcript,
    )?;
    if let Some(reason) = receipt_check(1, slots.len(), slots.len(), &mut transcript) {
        return Ok(abort_result(config, reason, 0, 0, None, transcript));
    }

    // Alice announces where the decoys sit; from here the eavesdropper can
    // tell payload from decoys and measures what she captured, regardless
    // of how the check below turns out.
    transcript.push(
        Actor::Alice,
        EventBody::DecoyPositions {
            round: 1,
            positions: decoys.iter().map(|d| d.position).collect(),
        },
    );
    let eve_inference = eve_inference_after_announcement(
        eve,
        variant,
        &cb,
        &store,
        &mut units,
        rng,
        &mut transcript,
    )?;

    let (sifted, errors) = decoy_check_inline(
        1,
        &decoys,
        &decoy_states,
        config.decoy_dialogue,
        rng,
        &mut transcript,
    )?;
    let rate = if sifted == 0 {
        0.0
    } else {
        errors as f64 / sifted as f64
    };
    if rate > config.error_threshold {
        transcript.push(
            Actor::Alice,
            EventBody::Abort {
                reason: AbortReason::ErrorRateExceeded.as_str().to_string(),
            },
        );
        return Ok(abort_result(
            config,
            AbortReason::ErrorRateExceeded,
            sifted,
            errors,
            eve_inference,
            transcript,
        ));
    }

    if config.reorder_enabled() {
        transcript.push(
            Actor::Alice,
            EventBody::OrderDisclosure {
                bits: travel.len() * n,
                permutation: perm.forward().to_vec(),
            },
        );
    }

    let mut decoded = String::new();
    for i in 0..n {
        let (composite, targets) = compose_receiver_unit(&units[i], &fakes[i], &travel);
        match variant {
            Protocol::Dsqc1 => {
                let (home_rec, after) =
                    measure_collapse(&composite, &BasisSpec::computational(1), &[0], rng)?;
                transcript.push(
                    Actor::Alice,
                    EventBody::HomeAnnouncement {
                        unit: i,
                        outcome: home_rec.outcome_index,
                    },
                );
                let pair_rec = measure(&after, &BasisSpec::bell(), &targets, rng)?;
                transcript.push(
                    Actor::Bob,
                    EventBody::DecodeMeasurement {
                        unit: i,
                        basis: pair_rec.basis_name.clone(),
                        outcome: pair_rec.outcome_label.clone(),
                    },
                );
                decoded += &cb.decode(&[home_rec, pair_rec])?;
            }
            _ => {
                let ghz = BasisSpec::ghz_like();
                let (rec, _) = measure_collapse(&composite, &ghz, &targets, rng)?;
                transcript.push(
                    Actor::Bob,
                    EventBody::DecodeMeasurement {
                        unit: i,
                        basis: rec.basis_name.clone(),
                        outcome: rec.outcome_label.clone(),
                    },
                );
                // Cross-check: rerun the measurement on the collapsed travel
                // register by the rotate-then-product route.
                let collapsed_travel = ghz.vector(rec.outcome_index).clone();
                let (alt, _) = ghz_outcome_via_bell_z(&collapsed_travel, rng)?;
                transcript.push(
                    Actor::Bob,
                    EventBody::DualDecodeCheck {
                        unit: i,
                        primary: rec.outcome_label.clone(),
                        rotated: cb.bits_of_index(alt),
                        agree: alt == rec.outcome_index,
                    },
                );
                decoded += &cb.decode(&[rec])?;
            }
        }
    }
    transcript.push(
        Actor::Bob,
        EventBody::Decode {
            message: decoded.clone(),
        },
    );

    Ok(SessionResult {
        protocol: config.protocol,
        decoded_message: Some(decoded),
        aborted: false,
        abort_reason: None,
        observed_error_rate: rate,
        sifted_decoy_count: sifted,
        alice_key: None,
        eve_inference,
        transcript,
    })
}

/// Three-step variant: registers are encoded up front, then qubit 0 of
/// every register travels in round 1, qubit 1 in round 2, qubit 2 in round
/// 3, each round guarded by its own decoy check. Nothing about order or
/// home bits is ever announced. The intercepting eavesdropper model
/// captures round 1 (one qubit per register — provably useless alone);
/// the measure-resend model disturbs every round.
fn run_three_step<R: Rng + ?Sized>(
    config: &SessionConfig,
    eve: &EveModel,
    rng: &mut R,
    mut transcript: SessionTranscript,
    message: &str,
) -> Result<SessionResult, ProtocolError> {
    let cb = Codebook::dsqc2();
    let n = config.n;
    let mut units = encode_units(&cb, n, message, &mut transcript)?;
    let mut fakes: Vec<Vec<Option<PureState>>> = vec![vec![None; cb.num_qubits()]; n];
    let mut store = EveStore::default();
    let mut total = RoundOutcome {
        sifted: 0,
        errors: 0,
    };

    for round in 1..=3 {
        let qubit = round - 1;
        let payload: Vec<SlotRef> = (0..n).map(|unit| SlotRef { unit, qubit }).collect();
        let m = config.decoy_policy.count(payload.len());
        let (slots, decoys) = insert_decoys(payload, m, rng);
        transcript.push(
            Actor::Alice,
            EventBody::InsertDecoys {
                round,
                count: decoys.len(),
                positions: decoys.iter().map(|d| d.position).collect(),
            },
        );
        let mut decoy_states: Vec<PureState> = decoys.iter().map(|d| d.spec.state()).collect();
        transcript.push(
            Actor::Channel,
            EventBody::Transmit {
                round,
                slots: slots.len(),
            },
        );
        let eve_active = match eve.kind {
            EveKind::InterceptResendFake => round == 1,
            _ => true,
        };
        eve_on_channel(
            eve,
            eve_active,
            round,
            &slots,
            &mut units,
            &mut decoy_states,
            &mut fakes,
            &mut store,
            rng,
            &mut transcript,
        )?;
        if let Some(reason) = receipt_check(round, slots.len(), slots.len(), &mut transcript) {
            return Ok(abort_result(
                config,
                reason,
                total.sifted,
                total.errors,
                None,
                transcript,
            ));
        }
        transcript.push(
            Actor::Alice,
            EventBody::DecoyPositions {
                round,
                positions: decoys.iter().map(|d| d.position).collect(),
            },
        );
        let (sifted, errors) = decoy_check_inline(
            round,
            &decoys,
            &decoy_states,
            config.decoy_dialogue,
            rng,
            &mut transcript,
        )?;
        total.sifted += sifted;
        total.errors += errors;
        let rate = if sifted == 0 {
            0.0
        } else {
            errors as f64 / sifted as f64
        };
        if rate > config.error_threshold {
            transcript.push(
                Actor::Alice,
                EventBody::Abort {
                    reason: AbortReason::ErrorRateExceeded.as_str().to_string(),
                },
            );
            return Ok(abort_result(
                config,
                AbortReason::ErrorRateExceeded,
                total.sifted,
                total.errors,
                None,
                transcript,
            ));
        }
    }

    let travel = cb.travel_qubits().to_vec();
    let mut decoded = String::new();
    for i in 0..n {
        let (composite, targets) = compose_receiver_unit(&units[i], &fakes[i], &travel);
        let (rec, _) = measure_collapse(&composite, &BasisSpec::ghz_like(), &targets, rng)?;
        transcript.push(
            Actor::Bob,
            EventBody::DecodeMeasurement {
                unit: i,
                basis: rec.basis_name.clone(),
                outcome: rec.outcome_label.clone(),
            },
        );
        decoded += &cb.decode(&[rec])?;
    }
    transcript.push(
        Actor::Bob,
        EventBody::Decode {
            message: decoded.clone(),
        },
    );

    Ok(SessionResult {
        protocol: config.protocol,
        decoded_message: Some(decoded),
        aborted: false,
        abort_reason: None,
        observed_error_rate: if total.sifted == 0 {
            0.0
        } else {
            total.errors as f64 / total.sifted as f64
        },
        sifted_decoy_count: total.sifted,
        alice_key: None,
        eve_inference: None,
        transcript,
    })
}

/// Key agreement: the sender draws a uniformly random payload and ships it
/// over the chosen carrier protocol; a completed session leaves both sides
/// holding the same fresh key.
fn run_key_agreement<R: Rng + ?Sized>(
    config: &SessionConfig,
    eve: &EveModel,
    rng: &mut R,
    mut transcript: SessionTranscript,
) -> Result<SessionResult, ProtocolError> {
    let bits = config.qkd_carrier.capacity(config.n, Protocol::Dsqc2);
    let key = super::random_bits(bits, rng);
    transcript.push(Actor::Alice, EventBody::KeyDraw { bits });

    let mut sub = config.clone();
    sub.protocol = config.qkd_carrier;
    sub.message = Some(key.clone());
    sub.validate()?;

    let mut result = match sub.protocol {
        Protocol::Qsdc => run_three_step(&sub, eve, rng, transcript, &key)?,
        variant => run_dsqc_variant(&sub, eve, rng, transcript, &key, variant)?,
    };
    result.protocol = Protocol::Qkd;
    result.alice_key = Some(key);
    Ok(result)
}

/// Bob measures every decoy (random basis under the sifting dialogue, the
/// announced basis otherwise) and the pair score the round. The positions
/// announcement is pushed by the caller, since the single-round variants
/// let the eavesdropper act between the announcement and the check.
fn decoy_check_inline<R: Rng + ?Sized>(
    round: usize,
    decoys: &[DecoySlot],
    decoy_states: &[PureState],
    dialogue: super::DecoyDialogue,
    rng: &mut R,
    transcript: &mut SessionTranscript,
) -> Result<(usize, usize), ProtocolError> {
    let mut checks = Vec::with_capacity(decoys.len());
    for (d, slot) in decoys.iter().enumerate() {
        let basis = match dialogue {
            super::DecoyDialogue::Sift => DecoyBasis::random(rng),
            super::DecoyDialogue::AnnounceBasis => slot.spec.basis,
        };
        let rec = measure(&decoy_states[d], &basis.spec(), &[0], rng)?;
        transcript.push(
            Actor::Bob,
            EventBody::DecoyCheck {
                round,
                position: slot.position,
                basis: basis.as_str().to_string(),
                outcome: rec.outcome_index,
            },
        );
        checks.push(DecoyCheckOutcome {
            position: slot.position,
            basis,
            outcome: rec.outcome_index,
        });
    }
    let (sifted, errors) = match super::decoy::sift_and_score(decoys, &checks) {
        Ok((sifted, rate)) => (sifted, (rate * sifted as f64).round() as usize),
        // No basis matches: no evidence either way, the session proceeds.
        Err(ProtocolError::NoSiftedDecoys { .. }) => (0, 0),
        Err(e) => return Err(e),
    };
    let rate = if sifted == 0 {
        0.0
    } else {
        errors as f64 / sifted as f64
    };
    transcript.push(
        Actor::Alice,
        EventBody::SiftSummary {
            round,
            sifted,
            errors,
            error_rate: rate,
        },
    );
    Ok((sifted, errors))
}
