//! End-to-end session behavior: faithful decoding without an adversary,
//! deterministic transcripts, abort discipline under attack, and the
//! transcript invariants the adversary models must respect.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dsqc_core::adversary::EveModel;
use dsqc_core::protocol::{
    random_bits, run_session, DecoyPolicy, EventBody, Protocol, ProtocolError, SessionConfig,
    SessionTranscript,
};

fn config_with(
    protocol: Protocol,
    n: usize,
    message: Option<&str>,
    seed: u64,
) -> SessionConfig {
    SessionConfig::new(protocol, n, message, seed).unwrap()
}

#[test]
fn every_protocol_round_trips_without_an_adversary() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for protocol in [Protocol::Dsqc1, Protocol::Dsqc2, Protocol::Qsdc] {
        for n in [1usize, 4] {
            for _ in 0..5 {
                let message = random_bits(protocol.capacity(n, Protocol::Dsqc2), &mut rng);
                let config = config_with(protocol, n, Some(&message), rng.gen());
                let result = run_session(&config, &EveModel::none()).unwrap();
                assert!(!result.aborted, "{protocol} n={n} must not abort");
                assert_eq!(result.decoded_message.as_deref(), Some(message.as_str()));
                assert_eq!(result.observed_error_rate, 0.0);
                assert_eq!(result.eve_inference, None);
            }
        }
    }
}

#[test]
fn key_agreement_round_trips_over_every_carrier() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for carrier in [Protocol::Dsqc1, Protocol::Dsqc2, Protocol::Qsdc] {
        for _ in 0..5 {
            let mut config = config_with(Protocol::Qkd, 2, None, rng.gen());
            config.qkd_carrier = carrier;
            config.validate().unwrap();
            let result = run_session(&config, &EveModel::none()).unwrap();
            assert!(!result.aborted);
            let key = result.alice_key.expect("sender drew a key");
            assert_eq!(result.decoded_message, Some(key.clone()));
            assert_eq!(key.len(), carrier.capacity(2, Protocol::Dsqc2));
            assert_eq!(result.protocol, Protocol::Qkd);
        }
    }
}

#[test]
fn identical_configurations_replay_byte_identical_transcripts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for protocol in [Protocol::Dsqc1, Protocol::Dsqc2, Protocol::Qsdc, Protocol::Qkd] {
        let message = (protocol != Protocol::Qkd)
            .then(|| random_bits(protocol.capacity(4, Protocol::Dsqc2), &mut rng));
        let config = config_with(protocol, 4, message.as_deref(), 123_456);
        let a = run_session(&config, &EveModel::decoy_measure_resend()).unwrap();
        let b = run_session(&config, &EveModel::decoy_measure_resend()).unwrap();
        assert_eq!(
            a.transcript.to_jsonl(),
            b.transcript.to_jsonl(),
            "{protocol}: same seed, same transcript"
        );

        let mut other = config.clone();
        other.seed = 654_321;
        let c = run_session(&other, &EveModel::decoy_measure_resend()).unwrap();
        assert_ne!(a.transcript.to_jsonl(), c.transcript.to_jsonl());
    }
}

#[test]
fn transcripts_round_trip_through_jsonl() {
    let config = config_with(Protocol::Dsqc1, 3, Some("101010"), 9);
    let result = run_session(&config, &EveModel::intercept_resend_fake()).unwrap();
    let text = result.transcript.to_jsonl();
    let parsed = SessionTranscript::from_jsonl(&text).unwrap();
    assert_eq!(parsed.len(), result.transcript.len());
    assert_eq!(parsed.to_jsonl(), text);
}

#[test]
fn scrambling_can_be_disabled_and_still_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for protocol in [Protocol::Dsqc1, Protocol::Dsqc2] {
        let message = random_bits(protocol.capacity(3, Protocol::Dsqc2), &mut rng);
        let mut config = config_with(protocol, 3, Some(&message), rng.gen());
        config.reorder = Some(false);
        let result = run_session(&config, &EveModel::none()).unwrap();
        assert_eq!(result.decoded_message.as_deref(), Some(message.as_str()));
        let disclosures = result
            .transcript
            .events()
            .iter()
            .filter(|e| matches!(e.body, EventBody::OrderDisclosure { .. }))
            .count();
        assert_eq!(disclosures, 0, "no scrambling, no disclosure");
    }
}

#[test]
fn dual_decode_routes_always_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10 {
        let message = random_bits(12, &mut rng);
        let config = config_with(Protocol::Dsqc2, 4, Some(&message), rng.gen());
        let result = run_session(&config, &EveModel::none()).unwrap();
        let mut seen = 0;
        for event in result.transcript.events() {
            if let EventBody::DualDecodeCheck {
                primary,
                rotated,
                agree,
                ..
            } = &event.body
            {
                assert!(agree, "routes disagreed: {primary} vs {rotated}");
                assert_eq!(primary, rotated);
                seen += 1;
            }
        }
        assert_eq!(seen, 4, "one cross-check per register");
    }
}

#[test]
fn intercepting_adversary_reads_unscrambled_sessions_but_trips_the_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut aborts = 0;
    let trials = 200;
    for _ in 0..trials {
        let message = random_bits(6, &mut rng);
        let mut config = config_with(Protocol::Dsqc2, 2, Some(&message), rng.gen());
        config.reorder = Some(false);
        let result = run_session(&config, &EveModel::intercept_resend_fake()).unwrap();
        assert_eq!(
            result.eve_inference.as_deref(),
            Some(message.as_str()),
            "all-travel registers are perfectly readable without scrambling"
        );
        if result.aborted {
            aborts += 1;
            let has_abort_event = result
                .transcript
                .events()
                .iter()
                .any(|e| matches!(e.body, EventBody::Abort { .. }));
            assert!(has_abort_event);
            assert_eq!(result.decoded_message, None);
        }
    }
    // Six decoys, half sift on average: detection ~ 1 - (3/4)^6 ~ 0.82.
    assert!(
        (0.70..=0.95).contains(&(aborts as f64 / trials as f64)),
        "abort fraction {aborts}/{trials} outside the expected band"
    );
}

#[test]
fn three_step_sessions_stop_transmitting_after_an_abort() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut aborted_seen = 0;
    for _ in 0..300 {
        let message = random_bits(3, &mut rng);
        let config = config_with(Protocol::Qsdc, 1, Some(&message), rng.gen());
        let result = run_session(&config, &EveModel::intercept_resend_fake()).unwrap();
        if !result.aborted {
            continue;
        }
        aborted_seen += 1;
        let abort_index = result
            .transcript
            .events()
            .iter()
            .position(|e| matches!(e.body, EventBody::Abort { .. }))
            .expect("aborted session records the abort");
        for event in result.transcript.events() {
            if let EventBody::Transmit { round, .. } = event.body {
                assert!(
                    round == 1 || event.step_index < abort_index,
                    "transmission after the abort"
                );
                assert_eq!(round, 1, "the round-1 attacker must be caught in round 1");
            }
        }
    }
    assert!(aborted_seen > 50, "attack should often be caught");
}

#[test]
fn adversaries_never_touch_home_qubits() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for eve in [
        EveModel::intercept_resend_fake(),
        EveModel::decoy_measure_resend(),
    ] {
        for _ in 0..20 {
            let message = random_bits(8, &mut rng);
            let mut config = config_with(Protocol::Dsqc1, 4, Some(&message), rng.gen());
            config.error_threshold = 1.0;
            let result = run_session(&config, &eve).unwrap();
            for event in result.transcript.events() {
                if let EventBody::EveIntercept { touched, .. } = &event.body {
                    for touch in touched {
                        assert_ne!(touch.qubit, Some(0), "home qubit left the sender?");
                    }
                }
            }
        }
    }
}

#[test]
fn sessions_without_decoys_proceed_on_no_evidence() {
    let mut config = config_with(Protocol::Dsqc2, 2, Some("110011"), 31);
    config.decoy_policy = DecoyPolicy::Custom(0);
    let result = run_session(&config, &EveModel::none()).unwrap();
    assert!(!result.aborted);
    assert_eq!(result.sifted_decoy_count, 0);
    assert_eq!(result.decoded_message.as_deref(), Some("110011"));
}

#[test]
fn key_agreement_under_attack_yields_no_shared_key() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut aborts = 0;
    for _ in 0..50 {
        let config = config_with(Protocol::Qkd, 4, None, rng.gen());
        let result = run_session(&config, &EveModel::decoy_measure_resend()).unwrap();
        if result.aborted {
            aborts += 1;
            assert_eq!(result.decoded_message, None, "no key on abort");
        }
    }
    // Twelve decoys, half sifting, 1/4 error each: detection 1 - (7/8)^12 ~ 0.80.
    assert!((30..=48).contains(&aborts), "abort count {aborts}/50 outside the expected band");
}

#[test]
fn configuration_validation_rejects_malformed_requests() {
    assert!(matches!(
        SessionConfig::new(Protocol::Dsqc1, 2, Some("10102"), 1),
        Err(ProtocolError::MessageAlphabet)
    ));
    assert!(matches!(
        SessionConfig::new(Protocol::Dsqc1, 2, Some("101"), 1),
        Err(ProtocolError::MessageLength { expected: 4, .. })
    ));
    assert!(matches!(
        SessionConfig::new(Protocol::Qkd, 2, Some("1010"), 1),
        Err(ProtocolError::InvalidConfig(_))
    ));
    assert!(SessionConfig::new(Protocol::Qkd, 2, None, 1).is_ok());
    let mut qsdc = SessionConfig::new(Protocol::Qsdc, 1, Some("101"), 1).unwrap();
    qsdc.reorder = Some(true);
    assert!(qsdc.validate().is_err(), "the three-step flow has no order to scramble");
}
