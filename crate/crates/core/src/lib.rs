//! Simulator and analysis toolkit for secure direct communication over
//! GHZ-like three-qubit channel states.
//!
//! The crate is organised around five subsystems:
//!
//! * [`quantum`] — dense pure-state register math: tensor products, unitary
//!   application on arbitrary qubit subsets, projective measurement in
//!   arbitrary orthonormal bases, global-phase-aware comparison.
//! * [`codebook`] — message-to-unitary encoding tables (the two built-in
//!   direct-communication codebooks plus user-supplied channel specs loaded
//!   from JSON) and outcome decoding.
//! * [`protocol`] — seeded end-to-end session drivers for the two
//!   direct-communication variants, the three-step direct protocol and the
//!   key-distribution reduction, with decoy insertion, order scrambling and
//!   abort discipline, producing replayable transcripts.
//! * [`adversary`] — eavesdropper models (intercept-and-resend with fake
//!   injection, decoy-level measure-resend) and Monte Carlo estimators for
//!   what leaks before detection.
//! * [`metrics`] — qubit-efficiency accounting with exact rationals and the
//!   protocol comparison table.

pub mod adversary;
pub mod codebook;
pub mod metrics;
pub mod protocol;
pub mod quantum;

pub use quantum::{BasisSpec, MeasurementRecord, PureState, QuantumError, UnitaryOp};
