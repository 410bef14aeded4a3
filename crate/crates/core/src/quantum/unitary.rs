use super::state::PureState;
use super::{check_targets, compose_index, rest_qubits, Complex, QuantumError, EXACT_TOL};

/// A unitary operator on `num_qubits` qubits, stored as a dense row-major
/// matrix. Construction verifies U†U = I to the given tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    num_qubits: usize,
    mat: Vec<Complex>,
}

impl UnitaryOp {
    pub fn new(num_qubits: usize, mat: Vec<Complex>) -> Result<Self, QuantumError> {
        Self::with_tolerance(num_qubits, mat, EXACT_TOL)
    }

    pub fn with_tolerance(
        num_qubits: usize,
        mat: Vec<Complex>,
        tol: f64,
    ) -> Result<Self, QuantumError> {
        let dim = 1usize << num_qubits;
        if mat.len() != dim * dim {
            return Err(QuantumError::DimensionMismatch {
                expected: dim * dim,
                actual: mat.len(),
            });
        }
        // U†U = I, column by column.
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex::new(0.0, 0.0);
                for k in 0..dim {
                    acc += mat[k * dim + i].conj() * mat[k * dim + j];
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                if (acc - Complex::new(expected, 0.0)).norm() > tol {
                    return Err(QuantumError::NotUnitary(format!(
                        "U†U deviates from identity at ({i},{j}) by {:.3e}",
                        (acc - Complex::new(expected, 0.0)).norm()
                    )));
                }
            }
        }
        Ok(Self { num_qubits, mat })
    }

    pub fn from_reals(num_qubits: usize, rows: &[f64]) -> Result<Self, QuantumError> {
        Self::new(num_qubits, rows.iter().map(|&r| Complex::new(r, 0.0)).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits
    }

    pub fn matrix(&self) -> &[Complex] {
        &self.mat
    }

    pub fn identity(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let mut mat = vec![Complex::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            mat[i * dim + i] = Complex::new(1.0, 0.0);
        }
        Self { num_qubits, mat }
    }

    pub fn pauli_x() -> Self {
        Self::from_reals(1, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    /// The real rotation iY = [[0, 1], [-1, 0]]: maps |0> to -|1> and |1>
    /// to |0>.
    pub fn pauli_iy() -> Self {
        Self::from_reals(1, &[0.0, 1.0, -1.0, 0.0]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_reals(1, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_reals(1, &[h, h, h, -h]).unwrap()
    }

    /// Kronecker product; `self` acts on the high-order qubits of the
    /// combined operator.
    pub fn kron(&self, other: &UnitaryOp) -> UnitaryOp {
        let (da, db) = (self.dim(), other.dim());
        let dim = da * db;
        let mut mat = vec![Complex::new(0.0, 0.0); dim * dim];
        for ra in 0..da {
            for ca in 0..da {
                let a = self.mat[ra * da + ca];
                for rb in 0..db {
                    for cb in 0..db {
                        mat[(ra * db + rb) * dim + (ca * db + cb)] = a * other.mat[rb * db + cb];
                    }
                }
            }
        }
        UnitaryOp {
            num_qubits: self.num_qubits + other.num_qubits,
            mat,
        }
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn compose(&self, other: &UnitaryOp) -> Result<UnitaryOp, QuantumError> {
        if self.num_qubits != other.num_qubits {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        let dim = self.dim();
        let mut mat = vec![Complex::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.mat[i * dim + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    mat[i * dim + j] += a * other.mat[k * dim + j];
                }
            }
        }
        Ok(UnitaryOp {
            num_qubits: self.num_qubits,
            mat,
        })
    }

    /// Scales the whole matrix by a phase/sign factor of unit modulus.
    /// Handy for expressing algebraic identities like (iY)(iY) = -I.
    pub fn scaled(&self, factor: Complex) -> UnitaryOp {
        UnitaryOp {
            num_qubits: self.num_qubits,
            mat: self.mat.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn approx_eq(&self, other: &UnitaryOp, tol: f64) -> bool {
        self.num_qubits == other.num_qubits
            && self
                .mat
                .iter()
                .zip(&other.mat)
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// Applies `op` to the listed target qubits of `state` (targets[j] is the
/// j-th qubit the operator acts on), leaving the rest untouched.
pub fn apply_unitary(
    state: &PureState,
    op: &UnitaryOp,
    targets: &[usize],
) -> Result<PureState, QuantumError> {
    let n = state.num_qubits();
    check_targets(n, targets, op.num_qubits())?;
    let rest = rest_qubits(n, targets);
    let gdim = op.dim();
    let rdim = 1usize << rest.len();
    let amps = state.amplitudes();
    let mut out = vec![Complex::new(0.0, 0.0); amps.len()];
    let mat = op.matrix();
    for r in 0..rdim {
        for gout in 0..gdim {
            let mut acc = Complex::new(0.0, 0.0);
            for gin in 0..gdim {
                let m = mat[gout * gdim + gin];
                if m.norm_sqr() == 0.0 {
                    continue;
                }
                acc += m * amps[compose_index(n, targets, &rest, gin, r)];
            }
            out[compose_index(n, targets, &rest, gout, r)] = acc;
        }
    }
    PureState::new(n, out)
}
