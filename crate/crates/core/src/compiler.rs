//! Compilation of the protocol to qubit gates for `d = 2^n`.
//!
//! Qudit `r` is encoded in the qubit block `[r·n, (r+1)·n)`, least significant
//! bit first: qubit `r·n + k` holds bit `k` of the qudit value. The qubit
//! register itself is an ordinary `d = 2` [`StateVector`] with qubit 0 as the
//! most significant position of the flat index.

use std::f64::consts::TAU;
use std::fmt::{self, Write as _};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::{cnot_permutation, qft_matrix, CnotMode};
use crate::matrix::Matrix;
use crate::protocol::{ProtocolConfig, Stage};
use crate::state::{RegisterShape, StateVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitGate {
    H(usize),
    /// `diag(1, e^{iθ})`
    Phase { theta: f64, qubit: usize },
    Cx { control: usize, target: usize },
    /// `diag(1, 1, 1, e^{iθ})`, symmetric in its qubits.
    CPhase { theta: f64, a: usize, b: usize },
    Swap(usize, usize),
}

impl QubitGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            QubitGate::H(q) | QubitGate::Phase { qubit: q, .. } => vec![q],
            QubitGate::Cx { control, target } => vec![control, target],
            QubitGate::CPhase { a, b, .. } | QubitGate::Swap(a, b) => vec![a, b],
        }
    }

    /// The adjoint gate.
    pub fn inverse(&self) -> Self {
        match *self {
            QubitGate::Phase { theta, qubit } => QubitGate::Phase { theta: -theta, qubit },
            QubitGate::CPhase { theta, a, b } => QubitGate::CPhase { theta: -theta, a, b },
            other => other,
        }
    }

    fn validate(&self, qubit_count: usize) -> Result<()> {
        let qubits = self.qubits();
        if let Some(&index) = qubits.iter().find(|&&q| q >= qubit_count) {
            return Err(Error::QubitIndexOutOfRange { index, len: qubit_count });
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::RepeatedQubit(qubits[0]));
        }
        match *self {
            QubitGate::Phase { theta, .. } | QubitGate::CPhase { theta, .. } if !theta.is_finite() => {
                Err(Error::NonFiniteAngle)
            }
            _ => Ok(()),
        }
    }

    /// Applies the gate to a qubit register (`d = 2`).
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        let shape = state.shape();
        if shape.d() != 2 {
            return Err(Error::GateShapeMismatch { expected: 2, got: shape.d() });
        }
        self.validate(shape.t())?;
        match *self {
            QubitGate::H(q) => state.apply_single_qudit_gate(q, &qft_matrix(2)?),
            QubitGate::Phase { theta, qubit } => {
                let m = Matrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, theta)]);
                state.apply_single_qudit_gate(qubit, &m)
            }
            QubitGate::Cx { control, target } => {
                state.apply_two_qudit_permutation(control, target, &cnot_permutation(2, CnotMode::Xor)?)
            }
            QubitGate::CPhase { theta, a, b } => {
                let phase = Complex64::from_polar(1.0, theta);
                let mask = shape.stride(a) | shape.stride(b);
                for (index, amp) in state.amplitudes_mut().iter_mut().enumerate() {
                    if index & mask == mask {
                        *amp *= phase;
                    }
                }
                Ok(())
            }
            QubitGate::Swap(a, b) => {
                let (sa, sb) = (shape.stride(a), shape.stride(b));
                let amps = state.amplitudes_mut();
                for index in 0..amps.len() {
                    if index & sa != 0 && index & sb == 0 {
                        amps.swap(index, index - sa + sb);
                    }
                }
                Ok(())
            }
        }
    }
}

fn fmt_angle(theta: f64) -> String {
    format!("{theta:.12}")
}

impl fmt::Display for QubitGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            QubitGate::H(q) => write!(f, "H q{q}"),
            QubitGate::Phase { theta, qubit } => write!(f, "P({}) q{qubit}", fmt_angle(theta)),
            QubitGate::Cx { control, target } => write!(f, "CX q{control} q{target}"),
            QubitGate::CPhase { theta, a, b } => write!(f, "CP({}) q{a} q{b}", fmt_angle(theta)),
            QubitGate::Swap(a, b) => write!(f, "SWAP q{a} q{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitCircuit {
    qubit_count: usize,
    gates: Vec<QubitGate>,
}

impl QubitCircuit {
    pub fn new(qubit_count: usize) -> Self {
        Self { qubit_count, gates: Vec::new() }
    }

    pub fn from_gates(qubit_count: usize, gates: impl IntoIterator<Item = QubitGate>) -> Result<Self> {
        let mut circuit = Self::new(qubit_count);
        circuit.extend(gates)?;
        Ok(circuit)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[QubitGate] {
        &self.gates
    }

    pub fn push(&mut self, gate: QubitGate) -> Result<()> {
        gate.validate(self.qubit_count)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = QubitGate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    /// Reversed gate order with every gate replaced by its adjoint.
    pub fn inverse(&self) -> Self {
        Self { qubit_count: self.qubit_count, gates: self.gates.iter().rev().map(QubitGate::inverse).collect() }
    }

    /// Simulates the circuit on `state` in place.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        if state.shape().d() != 2 || state.shape().t() != self.qubit_count {
            return Err(Error::ShapeMismatch);
        }
        self.gates.iter().try_for_each(|g| g.apply(state))
    }

    /// Runs the circuit from `|0…0⟩`.
    pub fn simulate(&self) -> Result<StateVector> {
        let mut state = StateVector::zero(RegisterShape::new(2, self.qubit_count)?);
        self.apply(&mut state)?;
        Ok(state)
    }

    /// Text form: a `qubits <count>` header, then one gate per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.qubit_count);
        for gate in &self.gates {
            writeln!(out, "{gate}").unwrap();
        }
        out
    }

    /// Parses [`QubitCircuit::to_text`] output. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line, reason: &str| Error::CircuitParse { line, reason: reason.to_string() };

        let (line, header) = lines.next().ok_or_else(|| err(1, "empty circuit"))?;
        let count = header
            .strip_prefix("qubits ")
            .and_then(|n| n.trim().parse::<usize>().ok())
            .ok_or_else(|| err(line, "expected `qubits <count>` header"))?;
        let mut circuit = Self::new(count);

        for (line, text) in lines {
            let mut parts = text.split_whitespace();
            let op = parts.next().unwrap_or_default();
            let qubits = parts
                .map(|p| p.strip_prefix('q').and_then(|n| n.parse::<usize>().ok()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| err(line, "qubit operands must look like `q<index>`"))?;
            let (name, theta) = match op.split_once('(') {
                Some((name, rest)) => {
                    let angle = rest
                        .strip_suffix(')')
                        .and_then(|a| a.parse::<f64>().ok())
                        .ok_or_else(|| err(line, "malformed angle"))?;
                    (name, Some(angle))
                }
                None => (op, None),
            };
            let gate = match (name, theta, qubits.as_slice()) {
                ("H", None, &[q]) => QubitGate::H(q),
                ("P", Some(theta), &[qubit]) => QubitGate::Phase { theta, qubit },
                ("CX", None, &[control, target]) => QubitGate::Cx { control, target },
                ("CP", Some(theta), &[a, b]) => QubitGate::CPhase { theta, a, b },
                ("SWAP", None, &[a, b]) => QubitGate::Swap(a, b),
                _ => return Err(err(line, &format!("unrecognised gate `{text}`"))),
            };
            circuit.push(gate).map_err(|e| err(line, &e.to_string()))?;
        }
        Ok(circuit)
    }
}

/// Translation between qudit digit strings and qubit basis states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisMap {
    n: usize,
    t: usize,
    qudits: RegisterShape,
    qubits: RegisterShape,
}

impl BasisMap {
    pub fn new(d: usize, t: usize) -> Result<Self> {
        let n = bits_per_qudit(d)?;
        Ok(Self { n, t, qudits: RegisterShape::new(d, t)?, qubits: RegisterShape::new(2, n * t)? })
    }

    /// Bits per qudit.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn qudit_shape(&self) -> RegisterShape {
        self.qudits
    }

    pub fn qubit_shape(&self) -> RegisterShape {
        self.qubits
    }

    /// Qubit indices encoding `qudit`, least significant bit first.
    pub fn block(&self, qudit: usize) -> Vec<usize> {
        (qudit * self.n..(qudit + 1) * self.n).collect()
    }

    pub fn bits(&self, digits: &[usize]) -> Result<Vec<usize>> {
        self.qudits.index_of(digits)?;
        Ok(digits.iter().flat_map(|&x| (0..self.n).map(move |k| (x >> k) & 1)).collect())
    }

    /// Flat qubit basis index of a qudit digit string.
    pub fn qubit_index(&self, digits: &[usize]) -> Result<usize> {
        self.qubits.index_of(&self.bits(digits)?)
    }

    /// Qudit digits of a flat qubit basis index.
    pub fn digits(&self, qubit_index: usize) -> Vec<usize> {
        let bits = self.qubits.digits_of(qubit_index);
        bits.chunks(self.n)
            .map(|block| block.iter().enumerate().map(|(k, &b)| b << k).sum())
            .collect()
    }

    /// Bit string with the highest-numbered qubit leftmost.
    pub fn display(&self, digits: &[usize]) -> Result<String> {
        Ok(self.bits(digits)?.iter().rev().map(|&b| if b == 1 { '1' } else { '0' }).collect())
    }

    /// Re-indexes a qubit register state as a qudit register state.
    pub fn pull_back(&self, qubit_state: &StateVector) -> Result<StateVector> {
        if qubit_state.shape() != self.qubits {
            return Err(Error::ShapeMismatch);
        }
        let src = qubit_state.amplitudes();
        let amps = (0..self.qudits.len())
            .map(|i| self.qubit_index(&self.qudits.digits_of(i)).map(|q| src[q]))
            .collect::<Result<Vec<_>>>()?;
        StateVector::from_amplitudes(self.qudits, amps)
    }

    /// Re-indexes a qudit register state as a qubit register state.
    pub fn push_forward(&self, qudit_state: &StateVector) -> Result<StateVector> {
        if qudit_state.shape() != self.qudits {
            return Err(Error::ShapeMismatch);
        }
        let src = qudit_state.amplitudes();
        let amps = (0..self.qubits.len())
            .map(|q| self.qudits.index_of(&self.digits(q)).map(|i| src[i]))
            .collect::<Result<Vec<_>>>()?;
        StateVector::from_amplitudes(self.qubits, amps)
    }
}

/// `log2 d`, or an error if `d` is not a power of two (or below 2).
pub fn bits_per_qudit(d: usize) -> Result<usize> {
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::RequiresPowerOfTwo(d));
    }
    Ok(d.trailing_zeros() as usize)
}

/// Per-bit angles `θ_k = 2π·s·2^k/d` whose phase gates multiply to `U_{0,s}`.
pub fn decompose_phase_gate(d: usize, s: usize) -> Result<Vec<f64>> {
    let n = bits_per_qudit(d)?;
    let s = s % d;
    Ok((0..n).map(|k| TAU * (s << k) as f64 / d as f64).collect())
}

/// QFT over `Z_{2^n}` on `block` (LSB first), ending in explicit swaps.
pub fn qft_gates(block: &[usize]) -> Result<Vec<QubitGate>> {
    let n = block.len();
    if n == 0 {
        return Err(Error::InvalidBitCount);
    }
    let mut gates = Vec::new();
    for i in (0..n).rev() {
        gates.push(QubitGate::H(block[i]));
        for j in (0..i).rev() {
            let theta = TAU / (1u64 << (i - j + 1)) as f64;
            gates.push(QubitGate::CPhase { theta, a: block[j], b: block[i] });
        }
    }
    for k in 0..n / 2 {
        gates.push(QubitGate::Swap(block[k], block[n - 1 - k]));
    }
    Ok(gates)
}

/// Inverse QFT: [`qft_gates`] reversed with negated phases.
pub fn inverse_qft_gates(block: &[usize]) -> Result<Vec<QubitGate>> {
    Ok(qft_gates(block)?.iter().rev().map(QubitGate::inverse).collect())
}

/// QFT fragment on qubits `0..n`.
pub fn qft_qubit_circuit(n: usize) -> Result<QubitCircuit> {
    let block: Vec<usize> = (0..n).collect();
    QubitCircuit::from_gates(n, qft_gates(&block)?)
}

/// One qubit CNOT per bit position: the XOR d-CNOT between two blocks.
pub fn cnot_d_transversal(control_block: &[usize], target_block: &[usize]) -> Result<Vec<QubitGate>> {
    if control_block.len() != target_block.len() {
        return Err(Error::BlockLengthMismatch(control_block.len(), target_block.len()));
    }
    if control_block.is_empty() {
        return Err(Error::InvalidBitCount);
    }
    if control_block.iter().any(|q| target_block.contains(q)) {
        return Err(Error::OverlappingBlocks);
    }
    Ok(control_block.iter().zip(target_block).map(|(&control, &target)| QubitGate::Cx { control, target }).collect())
}

/// Qubit gates of each protocol stage.
///
/// The CNOT fan-out and fan-in are always the transversal XOR form; parties
/// with a zero shadow contribute no phase gates.
pub fn compile_protocol_stages(config: &ProtocolConfig) -> Result<Vec<(Stage, Vec<QubitGate>)>> {
    config.validate()?;
    let map = BasisMap::new(config.shape.d(), config.shape.t())?;
    let d = config.shape.d();
    let reconstructor = map.block(0);

    let mut fan = Vec::new();
    for r in 1..map.t() {
        fan.extend(cnot_d_transversal(&reconstructor, &map.block(r))?);
    }

    let mut entangle = qft_gates(&reconstructor)?;
    entangle.extend(fan.iter().copied());

    let mut phase = Vec::new();
    for (r, &s) in config.shadows.values().iter().enumerate() {
        if s == 0 {
            continue;
        }
        let angles = decompose_phase_gate(d, s)?;
        phase.extend(map.block(r).into_iter().zip(angles).map(|(qubit, theta)| QubitGate::Phase { theta, qubit }));
    }

    let disentangle = if config.disentangle { fan } else { Vec::new() };

    Ok(vec![
        (Stage::Entangle, entangle),
        (Stage::Phase, phase),
        (Stage::Disentangle, disentangle),
        (Stage::Recover, inverse_qft_gates(&reconstructor)?),
    ])
}

/// The whole protocol as one qubit circuit over `n·t` qubits.
pub fn compile_protocol(config: &ProtocolConfig) -> Result<QubitCircuit> {
    let map = BasisMap::new(config.shape.d(), config.shape.t())?;
    let gates = compile_protocol_stages(config)?.into_iter().flat_map(|(_, g)| g);
    QubitCircuit::from_gates(map.qubit_shape().t(), gates)
}
