//! Unitaries used by the reconstruction protocol: the QFT over `Z_d` and its
//! inverse, the diagonal phase operator `U_{0,s}`, and three flavours of
//! d-level CNOT.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::state::{Permutation, StateVector};

/// `ω^e` with `ω = e^{2πi/d}`.
///
/// The exponent is reduced mod `d` in integer arithmetic before taking the
/// angle, so large exponents carry no accumulated rounding.
pub fn omega_pow(d: usize, exponent: usize) -> Complex64 {
    let e = exponent % d;
    Complex64::from_polar(1.0, TAU * e as f64 / d as f64)
}

pub fn is_power_of_two(d: usize) -> bool {
    d.is_power_of_two()
}

fn check_dimension(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// `QFT|j⟩ = (1/√d) Σ_k ω^{jk} |k⟩`; entry `(k, j)` is `ω^{jk}/√d`.
pub fn qft_matrix(d: usize) -> Result<Matrix> {
    check_dimension(d)?;
    let norm = 1.0 / (d as f64).sqrt();
    Ok(Matrix::from_fn(d, |k, j| omega_pow(d, (j * k) % d) * norm))
}

/// Adjoint of [`qft_matrix`]; maps the phase ramp `(1/√d) Σ_k ω^{sk}|k⟩` to `|s mod d⟩`.
pub fn inv_qft_matrix(d: usize) -> Result<Matrix> {
    check_dimension(d)?;
    let norm = 1.0 / (d as f64).sqrt();
    // ω^{-jk} = ω^{d - jk mod d}
    Ok(Matrix::from_fn(d, |k, j| omega_pow(d, d - (j * k) % d) * norm))
}

/// `U_{0,s} = Σ_k ω^{sk} |k⟩⟨k|`. `s` is reduced mod `d`.
pub fn pauli_u0s_matrix(d: usize, s: usize) -> Result<Matrix> {
    check_dimension(d)?;
    let s = s % d;
    let diag: Vec<Complex64> = (0..d).map(|k| omega_pow(d, (s * k) % d)).collect();
    Ok(Matrix::diagonal(&diag))
}

/// Target update rule of a d-level CNOT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CnotMode {
    /// `x -> (x + c) mod d`
    Add,
    /// `x -> (x - c) mod d`
    Sub,
    /// `x -> x ⊕ c`, only for `d = 2^n`
    Xor,
}

impl CnotMode {
    /// The mode that undoes this one.
    pub fn inverse(self) -> Self {
        match self {
            CnotMode::Add => CnotMode::Sub,
            CnotMode::Sub => CnotMode::Add,
            CnotMode::Xor => CnotMode::Xor,
        }
    }
}

impl fmt::Display for CnotMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CnotMode::Add => "add",
            CnotMode::Sub => "sub",
            CnotMode::Xor => "xor",
        })
    }
}

pub fn cnot_permutation(d: usize, mode: CnotMode) -> Result<Permutation> {
    check_dimension(d)?;
    match mode {
        CnotMode::Add => Permutation::from_fn(d, |c, x| (x + c) % d),
        CnotMode::Sub => Permutation::from_fn(d, |c, x| (x + d - c) % d),
        CnotMode::Xor if is_power_of_two(d) => Permutation::from_fn(d, |c, x| x ^ c),
        CnotMode::Xor => Err(Error::XorRequiresPowerOfTwo(d)),
    }
}

/// A protocol gate bound to the qudits it acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateSpec {
    Qft { qudit: usize },
    InverseQft { qudit: usize },
    /// Diagonal phase `U_{0,s}`.
    Phase { qudit: usize, s: usize },
    Cnot { control: usize, target: usize, mode: CnotMode },
}

impl GateSpec {
    /// The `d x d` matrix of a single-qudit gate, `None` for CNOT.
    pub fn single_qudit_matrix(&self, d: usize) -> Result<Option<(usize, Matrix)>> {
        Ok(match *self {
            GateSpec::Qft { qudit } => Some((qudit, qft_matrix(d)?)),
            GateSpec::InverseQft { qudit } => Some((qudit, inv_qft_matrix(d)?)),
            GateSpec::Phase { qudit, s } => Some((qudit, pauli_u0s_matrix(d, s)?)),
            GateSpec::Cnot { .. } => None,
        })
    }

    /// Applies the gate through the strided kernels.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        let d = state.shape().d();
        match *self {
            GateSpec::Cnot { control, target, mode } => {
                state.apply_two_qudit_permutation(control, target, &cnot_permutation(d, mode)?)
            }
            _ => {
                let (qudit, m) = self.single_qudit_matrix(d)?.expect("single-qudit gate");
                state.apply_single_qudit_gate(qudit, &m)
            }
        }
    }
}
