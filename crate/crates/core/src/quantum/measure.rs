use rand::Rng;

use super::basis::BasisSpec;
use super::state::PureState;
use super::{check_targets, compose_index, rest_qubits, Complex, QuantumError, EXACT_TOL};

/// Outcome of a projective measurement. `post_state` holds the normalized
/// state of the qubits that were *not* measured, re-indexed in ascending
/// original order; it is absent when the whole register was measured.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub basis_name: String,
    pub outcome_index: usize,
    pub outcome_label: String,
    pub post_state: Option<PureState>,
}

/// Unnormalized remainder amplitudes and probability for one outcome:
/// c_{k,r} = sum_g conj(v_k[g]) * amp[compose(g, r)], p_k = sum_r |c_{k,r}|^2.
fn outcome_components(
    state: &PureState,
    basis: &BasisSpec,
    targets: &[usize],
    rest: &[usize],
    outcome: usize,
) -> (f64, Vec<Complex>) {
    let n = state.num_qubits();
    let gdim = 1usize << targets.len();
    let rdim = 1usize << rest.len();
    let v = basis.vector(outcome).amplitudes();
    let amps = state.amplitudes();
    let mut c = vec![Complex::new(0.0, 0.0); rdim];
    for (r, cr) in c.iter_mut().enumerate() {
        let mut acc = Complex::new(0.0, 0.0);
        for g in 0..gdim {
            if v[g].norm_sqr() == 0.0 {
                continue;
            }
            acc += v[g].conj() * amps[compose_index(n, targets, rest, g, r)];
        }
        *cr = acc;
    }
    let p = c.iter().map(|a| a.norm_sqr()).sum();
    (p, c)
}

fn validate_measurement(
    state: &PureState,
    basis: &BasisSpec,
    targets: &[usize],
) -> Result<(), QuantumError> {
    check_targets(state.num_qubits(), targets, basis.num_qubits())
}

/// Probability of a specific outcome plus, for partial measurements, the
/// normalized remainder state. Returns probability 0 with no remainder for
/// impossible outcomes. Deterministic companion to [`measure`].
pub fn outcome_probability(
    state: &PureState,
    basis: &BasisSpec,
    targets: &[usize],
    outcome: usize,
) -> Result<(f64, Option<PureState>), QuantumError> {
    validate_measurement(state, basis, targets)?;
    if outcome >= basis.len() {
        return Err(QuantumError::IncompleteBasis(format!(
            "outcome {outcome} out of range for basis {}",
            basis.name()
        )));
    }
    let rest = rest_qubits(state.num_qubits(), targets);
    let (p, c) = outcome_components(state, basis, targets, &rest, outcome);
    if rest.is_empty() || p <= EXACT_TOL {
        return Ok((p, None));
    }
    Ok((p, Some(PureState::new(rest.len(), c)?)))
}

/// Projective measurement of `targets` in `basis`, consuming randomness
/// from `rng`. The record's `post_state` is the remainder register (absent
/// when every qubit was measured).
pub fn measure<R: Rng + ?Sized>(
    state: &PureState,
    basis: &BasisSpec,
    targets: &[usize],
    rng: &mut R,
) -> Result<MeasurementRecord, QuantumError> {
    let (record, _) = measure_collapse(state, basis, targets, rng)?;
    Ok(record)
}

/// Like [`measure`] but also returns the collapsed state of the *full*
/// register (measured qubits left in the observed basis vector). Used where
/// a register keeps travelling after one of its qubits is measured.
pub fn measure_collapse<R: Rng + ?Sized>(
    state: &PureState,
    basis: &BasisSpec,
    targets: &[usize],
    rng: &mut R,
) -> Result<(MeasurementRecord, PureState), QuantumError> {
    validate_measurement(state, basis, targets)?;
    let n = state.num_qubits();
    let rest = rest_qubits(n, targets);

    let mut components = Vec::with_capacity(basis.len());
    let mut total = 0.0;
    for k in 0..basis.len() {
        let (p, c) = outcome_components(state, basis, targets, &rest, k);
        total += p;
        components.push((p, c));
    }
    debug_assert!(
        (total - 1.0).abs() < 1e-9,
        "outcome probabilities sum to {total}"
    );

    let draw: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut outcome = components.len() - 1;
    for (k, (p, _)) in components.iter().enumerate() {
        acc += p;
        if draw < acc {
            outcome = k;
            break;
        }
    }
    // Guard against landing past the last nonzero bucket through float slop.
    if components[outcome].0 <= 0.0 {
        outcome = components
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .map(|(k, _)| k)
            .unwrap();
    }

    let (p, c) = &components[outcome];
    let post_state = if rest.is_empty() {
        None
    } else {
        Some(PureState::new(rest.len(), c.clone())?)
    };

    // Full-register collapsed state: sum_r (c_{k,r}/sqrt p) |v_k>_targets |r>_rest
    let v = basis.vector(outcome).amplitudes();
    let gdim = 1usize << targets.len();
    let rdim = 1usize << rest.len();
    let mut full = vec![Complex::new(0.0, 0.0); state.dim()];
    let scale = 1.0 / p.sqrt();
    for (r, cr) in c.iter().enumerate().take(rdim) {
        for g in 0..gdim {
            full[compose_index(n, targets, &rest, g, r)] = v[g] * cr * scale;
        }
    }
    let collapsed = PureState::new(n, full)?;

    Ok((
        MeasurementRecord {
            basis_name: basis.name().to_string(),
            outcome_index: outcome,
            outcome_label: basis.label(outcome).to_string(),
            post_state,
        },
        collapsed,
    ))
}
