//! Slow reference engine: every gate is lifted to a full `d^t × d^t` matrix by
//! explicit Kronecker products and applied by plain matrix-vector products.
//!
//! Only for validating the strided kernels and the compiled qubit circuits.
//! The CNOT lift evaluates the mode arithmetic itself instead of going through
//! [`crate::gates::cnot_permutation`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::{CnotMode, GateSpec};
use crate::matrix::Matrix;
use crate::state::{RegisterShape, StateVector};

/// Largest register the oracle will expand.
pub const MAX_ORACLE_DIM: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    shape: RegisterShape,
    matrix: Matrix,
}

impl DenseOperator {
    pub fn identity(shape: RegisterShape) -> Result<Self> {
        check_size(shape)?;
        Ok(Self { shape, matrix: Matrix::identity(shape.len()) })
    }

    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `self · other`, i.e. `other` acts first.
    pub fn compose(&self, other: &DenseOperator) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch);
        }
        Ok(Self { shape: self.shape, matrix: &self.matrix * &other.matrix })
    }

    /// Product of a gate sequence, first gate applied first.
    pub fn from_sequence<'a>(shape: RegisterShape, gates: impl IntoIterator<Item = &'a GateSpec>) -> Result<Self> {
        gates
            .into_iter()
            .try_fold(Self::identity(shape)?, |acc, g| lift_gate(shape, g)?.compose(&acc))
    }
}

fn check_size(shape: RegisterShape) -> Result<()> {
    if shape.len() > MAX_ORACLE_DIM {
        Err(Error::RegisterTooLarge { d: shape.d(), t: shape.t(), max: MAX_ORACLE_DIM })
    } else {
        Ok(())
    }
}

/// `I ⊗ … ⊗ gate ⊗ … ⊗ I` with `gate` in slot `qudit` (slot 0 leftmost).
pub fn lift_single(shape: RegisterShape, qudit: usize, gate: &Matrix) -> Result<DenseOperator> {
    check_size(shape)?;
    shape.check_qudit(qudit)?;
    if gate.dim() != shape.d() {
        return Err(Error::GateShapeMismatch { expected: shape.d(), got: gate.dim() });
    }
    let id = Matrix::identity(shape.d());
    let mut full = if qudit == 0 { gate.clone() } else { id.clone() };
    for slot in 1..shape.t() {
        full = full.kron(if slot == qudit { gate } else { &id });
    }
    Ok(DenseOperator { shape, matrix: full })
}

fn lift_cnot(shape: RegisterShape, control: usize, target: usize, mode: CnotMode) -> Result<DenseOperator> {
    check_size(shape)?;
    shape.check_qudit(control)?;
    shape.check_qudit(target)?;
    if control == target {
        return Err(Error::SelfControlledGate(control));
    }
    let d = shape.d();
    if mode == CnotMode::Xor && !d.is_power_of_two() {
        return Err(Error::XorRequiresPowerOfTwo(d));
    }
    let mut m = Matrix::zeros(shape.len());
    for col in 0..shape.len() {
        let mut digits = shape.digits_of(col);
        let (c, x) = (digits[control], digits[target]);
        digits[target] = match mode {
            CnotMode::Add => (x + c) % d,
            CnotMode::Sub => (x + d - c) % d,
            CnotMode::Xor => x ^ c,
        };
        m[(shape.index_of(&digits)?, col)] = Complex64::new(1.0, 0.0);
    }
    Ok(DenseOperator { shape, matrix: m })
}

/// The full-register matrix of `gate`.
pub fn lift_gate(shape: RegisterShape, gate: &GateSpec) -> Result<DenseOperator> {
    match *gate {
        GateSpec::Cnot { control, target, mode } => lift_cnot(shape, control, target, mode),
        _ => {
            let (qudit, m) = gate.single_qudit_matrix(shape.d())?.expect("single-qudit gate");
            lift_single(shape, qudit, &m)
        }
    }
}

/// Plain matrix-vector product.
pub fn apply_dense(op: &DenseOperator, state: &StateVector) -> Result<StateVector> {
    if op.shape != state.shape() {
        return Err(Error::ShapeMismatch);
    }
    let amps = op.matrix.mul_vec(state.amplitudes());
    StateVector::from_amplitudes(state.shape(), amps)
}
