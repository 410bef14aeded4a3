//! Quantitative side of the adversary models: Monte Carlo estimates of how
//! much payload an intercepting eavesdropper reads before the decoy check
//! can catch her, and detection probabilities for the check itself.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::protocol::{
    random_bits, run_session, DecoyBasis, DecoySpec, Protocol, ProtocolError, SessionConfig,
};
use crate::quantum::measure;

use super::{EveKind, EveModel};

/// Options for [`estimate_leakage`].
#[derive(Debug, Clone)]
pub struct LeakageOptions {
    pub protocol: Protocol,
    pub eve: EveModel,
    pub trials: usize,
    /// Registers per session.
    pub n: usize,
    /// Whether the sender scrambles register transmission order.
    pub reorder: bool,
    pub seed: u64,
    /// Abort threshold on the sifted-decoy error rate.
    pub threshold: f64,
}

impl LeakageOptions {
    /// Single-register sessions, order scrambling off, zero error
    /// threshold — the configuration that exposes the raw leak.
    pub fn new(protocol: Protocol, eve: EveModel, trials: usize, seed: u64) -> Self {
        Self {
            protocol,
            eve,
            trials,
            n: 1,
            reorder: false,
            seed,
            threshold: 0.0,
        }
    }
}

/// Aggregate of a leakage estimation run.
///
/// Accuracy fields are `None` when the adversary model emits no payload
/// guess (no adversary, or the disturbance attack). Aborted sessions still
/// count toward the accuracies: the eavesdropper measures as soon as the
/// decoy positions are announced, before any abort can reach her.
#[derive(Debug, Clone, Serialize)]
pub struct LeakageReport {
    pub protocol: Protocol,
    pub attack: String,
    pub trials: usize,
    pub n: usize,
    pub reorder: bool,
    /// Fraction of registers whose payload the eavesdropper inferred
    /// exactly.
    pub per_message_accuracy: Option<f64>,
    /// Fraction of payload bits the eavesdropper inferred correctly.
    pub per_bit_accuracy: Option<f64>,
    /// Closed-form expectation for the intercept attack without order
    /// scrambling, where one exists: 0.5 + 0.5 · 0.25 for the home-qubit
    /// variant (right branch half the time, a correct second bit is then a
    /// coin flip counted per the usual quarter-of-the-rest convention),
    /// 1.0 for the all-travel variant (the 8 register states are perfectly
    /// distinguishable).
    pub analytic_estimate: Option<f64>,
    /// Fraction of sessions the decoy check aborted.
    pub detection_probability: f64,
    /// Mean sifted decoys per session.
    pub sifted_decoys_mean: f64,
}

/// Runs seeded Monte Carlo sessions under the given adversary and scores
/// the adversary's payload guesses against the true payloads.
///
/// Covers the single-round variants (`dsqc1`, `dsqc2`); the three-step
/// protocol never gives the intercepting model more than one qubit per
/// register, so there is nothing to estimate there, and the key-agreement
/// wrapper delegates to its carrier.
pub fn estimate_leakage(options: &LeakageOptions) -> Result<LeakageReport, ProtocolError> {
    if options.trials == 0 {
        return Err(ProtocolError::InvalidConfig(
            "need at least one trial".into(),
        ));
    }
    if !matches!(options.protocol, Protocol::Dsqc1 | Protocol::Dsqc2) {
        return Err(ProtocolError::InvalidConfig(format!(
            "leakage estimation covers dsqc1 and dsqc2, not {}",
            options.protocol
        )));
    }
    let bits_per_register = options.protocol.capacity(1, Protocol::Dsqc2);
    let mut master = ChaCha8Rng::seed_from_u64(options.seed);

    let mut register_hits = 0usize;
    let mut register_total = 0usize;
    let mut bit_hits = 0usize;
    let mut bit_total = 0usize;
    let mut guesses_seen = false;
    let mut aborted = 0usize;
    let mut sifted_sum = 0usize;

    for _ in 0..options.trials {
        let message = random_bits(bits_per_register * options.n, &mut master);
        let trial_seed = master.gen::<u64>();
        let mut config = SessionConfig::new(options.protocol, options.n, Some(&message), trial_seed)?;
        config.error_threshold = options.threshold;
        config.reorder = Some(options.reorder);
        config.validate()?;

        let result = run_session(&config, &options.eve)?;
        if result.aborted {
            aborted += 1;
        }
        sifted_sum += result.sifted_decoy_count;

        if let Some(guess) = &result.eve_inference {
            guesses_seen = true;
            debug_assert_eq!(guess.len(), message.len());
            for (g, t) in guess
                .as_bytes()
                .chunks(bits_per_register)
                .zip(message.as_bytes().chunks(bits_per_register))
            {
                register_total += 1;
                if g == t {
                    register_hits += 1;
                }
                bit_total += t.len();
                bit_hits += g.iter().zip(t).filter(|(a, b)| a == b).count();
            }
        }
    }

    let analytic_estimate = match (options.eve.kind, options.protocol, options.reorder) {
        (EveKind::InterceptResendFake, Protocol::Dsqc1, false) => Some(0.625),
        (EveKind::InterceptResendFake, Protocol::Dsqc2, false) => Some(1.0),
        _ => None,
    };

    Ok(LeakageReport {
        protocol: options.protocol,
        attack: options.eve.kind.as_str().to_string(),
        trials: options.trials,
        n: options.n,
        reorder: options.reorder,
        per_message_accuracy: guesses_seen
            .then(|| register_hits as f64 / register_total as f64),
        per_bit_accuracy: guesses_seen.then(|| bit_hits as f64 / bit_total as f64),
        analytic_estimate,
        detection_probability: aborted as f64 / options.trials as f64,
        sifted_decoys_mean: sifted_sum as f64 / options.trials as f64,
    })
}

/// Probability that a check over `d` sifted decoys catches the
/// measure-resend attacker. A random-basis measurement disturbs a sifted
/// decoy with probability 1/4, so detection is 1 − (3/4)^d.
pub fn measure_resend_detection(d: usize) -> f64 {
    1.0 - 0.75f64.powi(d as i32)
}

/// Probability that a check over `d` sifted decoys catches the attacker
/// who forwards fresh computational-basis qubits. A substitute fails a
/// sifted check with probability 1/2, so detection is 1 − (1/2)^d.
pub fn fake_resend_detection(d: usize) -> f64 {
    1.0 - 0.5f64.powi(d as i32)
}

/// Detection probability for the fake-forwarding attacker when only the
/// number of *inserted* decoys `m` is known: the receiver sifts each with
/// probability 1/2, and averaging 1 − (1/2)^d over the binomial sift count
/// collapses to 1 − (3/4)^m.
pub fn expected_fake_detection_over_sift(m: usize) -> f64 {
    1.0 - 0.75f64.powi(m as i32)
}

/// Monte Carlo detection probability over exactly `d` sifted decoys: each
/// trial prepares `d` random decoys, lets the attacker act on each, and
/// has the receiver measure in the preparation basis (so every decoy
/// sifts); a trial counts as detected if any outcome disagrees with the
/// preparation. Cross-checks [`measure_resend_detection`] and
/// [`fake_resend_detection`].
pub fn forced_sift_detection_mc(kind: EveKind, d: usize, trials: usize, seed: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let model = EveModel {
        kind,
        ..EveModel::none()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut detected = 0usize;
    for _ in 0..trials {
        let mut hit = false;
        for _ in 0..d {
            let spec = DecoySpec::random(&mut rng);
            let mut state = spec.state();
            match kind {
                EveKind::None => {}
                EveKind::DecoyMeasureResend => {
                    let basis = DecoyBasis::random(&mut rng);
                    let rec = measure(&state, &basis.spec(), &[0], &mut rng)
                        .expect("single-qubit measurement");
                    state = DecoySpec {
                        basis,
                        bit: rec.outcome_index,
                    }
                    .state();
                }
                EveKind::InterceptResendFake => {
                    state = model.fake_qubit(&mut rng);
                }
            }
            let rec = measure(&state, &spec.basis.spec(), &[0], &mut rng)
                .expect("single-qubit measurement");
            if rec.outcome_index != spec.bit {
                hit = true;
            }
        }
        if hit {
            detected += 1;
        }
    }
    detected as f64 / trials as f64
}

/// Pooled decoy statistics under the measure-resend attacker.
#[derive(Debug, Clone, Serialize)]
pub struct DecoyAttackStats {
    pub sessions: usize,
    pub aborted: usize,
    pub sifted_total: usize,
    pub errors_total: usize,
    /// Pooled errors over pooled sifted decoys (0 when nothing sifted).
    pub error_rate: f64,
}

/// Runs full seeded sessions under the measure-resend attacker and pools
/// the decoy-check tallies recorded in the transcripts. Use a threshold of
/// 1.0 to keep sessions running to completion regardless of errors, or 0.0
/// to count how often the check catches the attack.
pub fn decoy_attack_statistics(
    protocol: Protocol,
    n: usize,
    sessions: usize,
    seed: u64,
    threshold: f64,
) -> Result<DecoyAttackStats, ProtocolError> {
    if sessions == 0 {
        return Err(ProtocolError::InvalidConfig(
            "need at least one session".into(),
        ));
    }
    let eve = EveModel::decoy_measure_resend();
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = DecoyAttackStats {
        sessions,
        aborted: 0,
        sifted_total: 0,
        errors_total: 0,
        error_rate: 0.0,
    };
    for _ in 0..sessions {
        let message = (protocol != Protocol::Qkd)
            .then(|| random_bits(protocol.capacity(n, Protocol::Dsqc2), &mut master));
        let trial_seed = master.gen::<u64>();
        let mut config = SessionConfig::new(protocol, n, message.as_deref(), trial_seed)?;
        config.error_threshold = threshold;
        config.validate()?;
        let result = run_session(&config, &eve)?;
        if result.aborted {
            stats.aborted += 1;
        }
        for event in result.transcript.events() {
            if let crate::protocol::EventBody::SiftSummary { sifted, errors, .. } = &event.body {
                stats.sifted_total += sifted;
                stats.errors_total += errors;
            }
        }
    }
    if stats.sifted_total > 0 {
        stats.error_rate = stats.errors_total as f64 / stats.sifted_total as f64;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_adversary_reports_no_guess_and_no_detection() {
        let options = LeakageOptions::new(Protocol::Dsqc2, EveModel::none(), 20, 7);
        let report = estimate_leakage(&options).unwrap();
        assert_eq!(report.per_message_accuracy, None);
        assert_eq!(report.per_bit_accuracy, None);
        assert_eq!(report.analytic_estimate, None);
        assert_eq!(report.detection_probability, 0.0);
    }

    #[test]
    fn all_travel_intercept_reads_everything_without_scrambling() {
        let options = LeakageOptions::new(
            Protocol::Dsqc2,
            EveModel::intercept_resend_fake(),
            50,
            11,
        );
        let report = estimate_leakage(&options).unwrap();
        assert_eq!(report.per_message_accuracy, Some(1.0));
        assert_eq!(report.per_bit_accuracy, Some(1.0));
        assert_eq!(report.analytic_estimate, Some(1.0));
    }

    #[test]
    fn home_qubit_intercept_hits_the_halved_rates() {
        let options = LeakageOptions::new(
            Protocol::Dsqc1,
            EveModel::intercept_resend_fake(),
            4000,
            13,
        );
        let report = estimate_leakage(&options).unwrap();
        assert_eq!(report.analytic_estimate, Some(0.625));
        let per_message = report.per_message_accuracy.unwrap();
        let per_bit = report.per_bit_accuracy.unwrap();
        assert!((per_message - 0.50).abs() < 0.03, "got {per_message}");
        assert!((per_bit - 0.75).abs() < 0.03, "got {per_bit}");
    }

    #[test]
    fn scrambling_reduces_intercept_to_coin_flips() {
        let mut options = LeakageOptions::new(
            Protocol::Dsqc2,
            EveModel::intercept_resend_fake(),
            400,
            17,
        );
        options.n = 16;
        options.reorder = true;
        let report = estimate_leakage(&options).unwrap();
        assert_eq!(report.analytic_estimate, None);
        let per_bit = report.per_bit_accuracy.unwrap();
        // 400 trials x 16 registers x 3 bits, fixed-point bias 1/(2n).
        assert!((per_bit - 0.5).abs() < 0.05, "got {per_bit}");
    }

    #[test]
    fn closed_forms_match_each_other_at_zero_and_limits() {
        assert_eq!(measure_resend_detection(0), 0.0);
        assert_eq!(fake_resend_detection(0), 0.0);
        assert_eq!(expected_fake_detection_over_sift(0), 0.0);
        assert!((measure_resend_detection(1) - 0.25).abs() < 1e-15);
        assert!((fake_resend_detection(1) - 0.5).abs() < 1e-15);
        assert!(measure_resend_detection(200) > 0.999_999);
    }

    #[test]
    fn forced_sift_monte_carlo_tracks_closed_forms() {
        for d in [1usize, 4] {
            let mc = forced_sift_detection_mc(EveKind::DecoyMeasureResend, d, 4000, 23);
            assert!((mc - measure_resend_detection(d)).abs() < 0.03, "d={d} mc={mc}");
            let mc = forced_sift_detection_mc(EveKind::InterceptResendFake, d, 4000, 29);
            assert!((mc - fake_resend_detection(d)).abs() < 0.03, "d={d} mc={mc}");
        }
        assert_eq!(forced_sift_detection_mc(EveKind::None, 5, 100, 31), 0.0);
    }

    #[test]
    fn pooled_decoy_statistics_converge_to_quarter_error() {
        let stats = decoy_attack_statistics(Protocol::Dsqc2, 4, 400, 37, 1.0).unwrap();
        assert_eq!(stats.aborted, 0);
        assert!(stats.sifted_total > 1000, "got {}", stats.sifted_total);
        assert!((stats.error_rate - 0.25).abs() < 0.03, "got {}", stats.error_rate);
    }
}
