//! Eavesdropper models and leak-before-detection estimators.
//!
//! Two attacks are modeled. `InterceptResendFake` captures every
//! transmitted qubit, forwards substitutes so the receiver notices nothing
//! until the decoy check, then measures the captured registers once the
//! decoy positions are announced — quantifying what leaks *before* any
//! abort. `DecoyMeasureResend` measures each passing qubit in a random
//! single-qubit basis and forwards the collapsed state, the classic
//! disturbance attack the decoy check is designed to catch.

mod leakage;

pub use leakage::{
    decoy_attack_statistics, estimate_leakage, expected_fake_detection_over_sift,
    fake_resend_detection, forced_sift_detection_mc, measure_resend_detection,
    DecoyAttackStats, LeakageOptions, LeakageReport,
};

use rand::Rng;

use crate::quantum::{ket0, ket1, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EveKind {
    None,
    InterceptResendFake,
    DecoyMeasureResend,
}

impl EveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EveKind::None => "none",
            EveKind::InterceptResendFake => "intercept_resend_fake",
            EveKind::DecoyMeasureResend => "decoy_measure_resend",
        }
    }
}

/// What the intercepting eavesdropper forwards in place of captured
/// qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FakePolicy {
    RandomComputational,
    FixedZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EveModel {
    pub kind: EveKind,
    /// For the home-qubit protocol the intercepting eavesdropper never sees
    /// the home bit; she decodes as if it were this value.
    pub assumed_home_outcome: usize,
    pub fake_policy: FakePolicy,
}

impl Default for EveModel {
    fn default() -> Self {
        Self::none()
    }
}

impl EveModel {
    pub fn none() -> Self {
        Self {
            kind: EveKind::None,
            assumed_home_outcome: 1,
            fake_policy: FakePolicy::RandomComputational,
        }
    }

    pub fn intercept_resend_fake() -> Self {
        Self {
            kind: EveKind::InterceptResendFake,
            ..Self::none()
        }
    }

    pub fn decoy_measure_resend() -> Self {
        Self {
            kind: EveKind::DecoyMeasureResend,
            ..Self::none()
        }
    }

    pub fn is_active(&self) -> bool {
        self.kind != EveKind::None
    }

    /// A substitute qubit drawn per the fake policy.
    pub fn fake_qubit<R: Rng + ?Sized>(&self, rng: &mut R) -> PureState {
        match self.fake_policy {
            FakePolicy::FixedZero => ket0(),
            FakePolicy::RandomComputational => {
                if rng.gen::<bool>() {
                    ket1()
                } else {
                    ket0()
                }
            }
        }
    }
}
