use super::{Complex, QuantumError, EXACT_TOL};

/// A normalized pure state of `num_qubits` qubits, stored as a dense
/// amplitude vector in lexicographic basis order (qubit 0 = most
/// significant bit).
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amps: Vec<Complex>,
}

impl PureState {
    /// Builds a state from raw amplitudes, renormalizing. The amplitude
    /// count must be exactly 2^`num_qubits` and the vector must not be
    /// (near-)zero.
    pub fn new(num_qubits: usize, amps: Vec<Complex>) -> Result<Self, QuantumError> {
        let dim = 1usize << num_qubits;
        if amps.len() != dim {
            return Err(QuantumError::DimensionMismatch {
                expected: dim,
                actual: amps.len(),
            });
        }
        let norm = l2_norm(&amps);
        if norm <= EXACT_TOL {
            return Err(QuantumError::ZeroVector);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { num_qubits, amps })
    }

    /// Convenience constructor from real amplitudes.
    pub fn from_reals(num_qubits: usize, reals: &[f64]) -> Result<Self, QuantumError> {
        Self::new(num_qubits, reals.iter().map(|&r| Complex::new(r, 0.0)).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Euclidean norm of the amplitude vector; 1 up to rounding, since
    /// construction normalizes.
    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    /// Kronecker product: `self` occupies the high-order qubits of the
    /// result, `other` the low-order ones.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        PureState {
            num_qubits: self.num_qubits + other.num_qubits,
            amps,
        }
    }

    /// Inner product <self|other> (antilinear in `self`).
    pub fn inner_product(&self, other: &PureState) -> Result<Complex, QuantumError> {
        if self.dim() != other.dim() {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// True when the states differ only by a global phase: since both are
    /// normalized this is |<self|other>| > 1 - tol.
    pub fn equal_up_to_global_phase(
        &self,
        other: &PureState,
        tol: f64,
    ) -> Result<bool, QuantumError> {
        Ok(self.inner_product(other)?.norm() > 1.0 - tol)
    }

    /// Normalized linear combination of equally sized states. Fails with
    /// `ZeroVector` if the terms cancel.
    pub fn superpose(terms: &[(Complex, &PureState)]) -> Result<PureState, QuantumError> {
        let first = terms
            .first()
            .ok_or(QuantumError::ZeroVector)?
            .1;
        let mut amps = vec![Complex::new(0.0, 0.0); first.dim()];
        for (coeff, state) in terms {
            if state.dim() != first.dim() {
                return Err(QuantumError::DimensionMismatch {
                    expected: first.dim(),
                    actual: state.dim(),
                });
            }
            for (acc, a) in amps.iter_mut().zip(&state.amps) {
                *acc += coeff * a;
            }
        }
        PureState::new(first.num_qubits, amps)
    }
}

pub(crate) fn l2_norm(amps: &[Complex]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Computational basis state |index> of an `n`-qubit register.
pub fn computational_state(num_qubits: usize, index: usize) -> PureState {
    let dim = 1usize << num_qubits;
    assert!(index < dim, "basis index {index} out of range for {num_qubits} qubit(s)");
    let mut amps = vec![Complex::new(0.0, 0.0); dim];
    amps[index] = Complex::new(1.0, 0.0);
    PureState { num_qubits, amps }
}

pub fn ket0() -> PureState {
    computational_state(1, 0)
}

pub fn ket1() -> PureState {
    computational_state(1, 1)
}

pub fn plus() -> PureState {
    PureState::from_reals(1, &[1.0, 1.0]).unwrap()
}

pub fn minus() -> PureState {
    PureState::from_reals(1, &[1.0, -1.0]).unwrap()
}

/// The four maximally entangled pair states in this crate's fixed order:
/// index 0 `psi+`, 1 `phi+`, 2 `psi-`, 3 `phi-`.
pub fn bell(index: usize) -> PureState {
    let amps = match index {
        0 => [1.0, 0.0, 0.0, 1.0],
        1 => [0.0, 1.0, 1.0, 0.0],
        2 => [1.0, 0.0, 0.0, -1.0],
        3 => [0.0, 1.0, -1.0, 0.0],
        _ => panic!("pair-state index {index} out of range 0..4"),
    };
    PureState::from_reals(2, &amps).unwrap()
}

pub fn bell_label(index: usize) -> &'static str {
    match index {
        0 => "psi+",
        1 => "phi+",
        2 => "psi-",
        3 => "phi-",
        _ => panic!("pair-state index {index} out of range 0..4"),
    }
}

/// Three-qubit family (|bell_i>|0> + |bell_j>|1>)/sqrt2. Members of this
/// family serve as the shared channel states of the protocols in this
/// crate.
pub fn ghz_like(i: usize, j: usize) -> PureState {
    let half = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let t0 = bell(i).tensor(&ket0());
    let t1 = bell(j).tensor(&ket1());
    PureState::superpose(&[(half, &t0), (half, &t1)]).unwrap()
}
