use super::state::{bell, bell_label, computational_state, minus, plus, PureState};
use super::{Complex, QuantumError, EXACT_TOL};

/// A complete orthonormal measurement basis with human-readable outcome
/// labels. Construction verifies completeness (2^n vectors) and pairwise
/// orthonormality.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    name: String,
    num_qubits: usize,
    vectors: Vec<PureState>,
    labels: Vec<String>,
}

impl BasisSpec {
    pub fn new(
        name: impl Into<String>,
        vectors: Vec<PureState>,
        labels: Vec<String>,
    ) -> Result<Self, QuantumError> {
        Self::with_tolerance(name, vectors, labels, EXACT_TOL)
    }

    pub fn with_tolerance(
        name: impl Into<String>,
        vectors: Vec<PureState>,
        labels: Vec<String>,
        tol: f64,
    ) -> Result<Self, QuantumError> {
        let name = name.into();
        let first = vectors
            .first()
            .ok_or_else(|| QuantumError::IncompleteBasis("no vectors given".into()))?;
        let num_qubits = first.num_qubits();
        let dim = 1usize << num_qubits;
        if vectors.len() != dim {
            return Err(QuantumError::IncompleteBasis(format!(
                "{name}: {} vector(s) for a {num_qubits}-qubit space (need {dim})",
                vectors.len()
            )));
        }
        if labels.len() != vectors.len() {
            return Err(QuantumError::IncompleteBasis(format!(
                "{name}: {} label(s) for {} vector(s)",
                labels.len(),
                vectors.len()
            )));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.num_qubits() != num_qubits {
                return Err(QuantumError::DimensionMismatch {
                    expected: dim,
                    actual: v.dim(),
                });
            }
            for (j, w) in vectors.iter().enumerate().skip(i + 1) {
                let overlap = v.inner_product(w).unwrap().norm();
                if overlap > tol {
                    return Err(QuantumError::IncompleteBasis(format!(
                        "{name}: vectors {i} and {j} overlap by {overlap:.3e}"
                    )));
                }
            }
        }
        Ok(Self {
            name,
            num_qubits,
            vectors,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, outcome: usize) -> &PureState {
        &self.vectors[outcome]
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    pub fn label(&self, outcome: usize) -> &str {
        &self.labels[outcome]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Index of the outcome carrying the given label.
    pub fn outcome_of_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Single-qubit computational basis {|0>, |1>}.
    pub fn z() -> Self {
        Self::computational(1)
    }

    /// Single-qubit diagonal basis {|+>, |->}.
    pub fn x() -> Self {
        Self::new("x", vec![plus(), minus()], vec!["+".into(), "-".into()]).unwrap()
    }

    /// Computational basis of an `n`-qubit register with bit-string labels.
    pub fn computational(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let vectors = (0..dim).map(|i| computational_state(num_qubits, i)).collect();
        let labels = (0..dim).map(|i| format!("{i:0num_qubits$b}")).collect();
        let name = if num_qubits == 1 { "z".to_string() } else { "computational".to_string() };
        Self {
            name,
            num_qubits,
            vectors,
            labels,
        }
    }

    /// The four entangled pair states `psi+`, `phi+`, `psi-`, `phi-`.
    pub fn bell() -> Self {
        let vectors = (0..4).map(bell).collect();
        let labels = (0..4).map(|i| bell_label(i).to_string()).collect();
        Self::new("bell", vectors, labels).unwrap()
    }

    /// The eight-member entangled three-qubit basis used by the
    /// all-qubits-travel protocol variant; outcome labels are the decoded
    /// bit strings "000".."111".
    pub fn ghz_like() -> Self {
        let half = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mhalf = -half;
        // (pair index paired with |0>, its sign, pair index paired with |1>,
        // its sign) per outcome
        let spec: [(usize, Complex, usize, Complex); 8] = [
            (0, half, 2, half),   // (psi+ 0 + psi- 1)
            (0, half, 2, mhalf),  // (psi+ 0 - psi- 1)
            (2, half, 0, half),   // (psi- 0 + psi+ 1)
            (3, mhalf, 1, half),  // (phi+ 1 - phi- 0)
            (1, half, 3, half),   // (phi+ 0 + phi- 1)
            (1, half, 3, mhalf),  // (phi+ 0 - phi- 1)
            (3, half, 1, half),   // (phi- 0 + phi+ 1)
            (2, mhalf, 0, half),  // (psi+ 1 - psi- 0)
        ];
        let zero = super::state::ket0();
        let one = super::state::ket1();
        let vectors = spec
            .iter()
            .map(|&(i, sign_i, j, sign_j)| {
                let t0 = bell(i).tensor(&zero);
                let t1 = bell(j).tensor(&one);
                PureState::superpose(&[(sign_i, &t0), (sign_j, &t1)]).unwrap()
            })
            .collect();
        let labels = (0..8).map(|m| format!("{m:03b}")).collect();
        Self::new("ghz_like", vectors, labels).unwrap()
    }

    /// Product basis: entangled pair basis on the first two qubits,
    /// computational on the rest. For two qubits this is exactly the pair
    /// basis. Labels join the parts with a comma, e.g. "phi+,0".
    pub fn bell_plus_z(num_qubits: usize) -> Result<Self, QuantumError> {
        if num_qubits < 2 {
            return Err(QuantumError::IncompleteBasis(
                "bell_plus_z needs at least two qubits".into(),
            ));
        }
        if num_qubits == 2 {
            return Ok(Self::bell());
        }
        let rest = num_qubits - 2;
        let rest_dim = 1usize << rest;
        let mut vectors = Vec::with_capacity(4 * rest_dim);
        let mut labels = Vec::with_capacity(4 * rest_dim);
        for b in 0..4 {
            for r in 0..rest_dim {
                vectors.push(bell(b).tensor(&computational_state(rest, r)));
                labels.push(format!("{},{r:0rest$b}", bell_label(b)));
            }
        }
        Self::new("bell_plus_z", vectors, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_like_basis_is_orthonormal_and_complete() {
        let b = BasisSpec::ghz_like();
        assert_eq!(b.len(), 8);
        for i in 0..8 {
            for j in 0..8 {
                let ip = b.vector(i).inner_product(b.vector(j)).unwrap().norm();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < EXACT_TOL, "gram({i},{j}) = {ip}");
            }
        }
        assert_eq!(b.label(5), "101");
        assert_eq!(b.outcome_of_label("110"), Some(6));
    }

    #[test]
    fn incomplete_basis_rejected() {
        let err = BasisSpec::new(
            "half",
            vec![super::super::state::ket0()],
            vec!["0".into()],
        )
        .unwrap_err();
        assert!(matches!(err, QuantumError::IncompleteBasis(_)));
    }

    #[test]
    fn non_orthogonal_basis_rejected() {
        let err = BasisSpec::new(
            "skew",
            vec![super::super::state::ket0(), super::super::state::plus()],
            vec!["a".into(), "b".into()],
        )
        .unwrap_err();
        assert!(matches!(err, QuantumError::IncompleteBasis(_)));
    }

    #[test]
    fn bell_plus_z_three_qubits() {
        let b = BasisSpec::bell_plus_z(3).unwrap();
        assert_eq!(b.len(), 8);
        assert_eq!(b.label(0), "psi+,0");
        assert_eq!(b.label(7), "phi-,1");
        // spot-check: vector for (phi+, 1) is (|011>+|101>)/sqrt2
        let idx = b.outcome_of_label("phi+,1").unwrap();
        let expected =
            PureState::from_reals(3, &[0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(b.vector(idx).equal_up_to_global_phase(&expected, EXACT_TOL).unwrap());
    }

    #[test]
    fn computational_basis_labels() {
        let b = BasisSpec::computational(3);
        assert_eq!(b.label(0), "000");
        assert_eq!(b.label(6), "110");
    }
}
