use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: qudits need at least two levels")]
    InvalidDimension(usize),
    #[error("register must hold at least one qudit")]
    EmptyRegister,
    #[error("register of {t} qudits with dimension {d} exceeds the {max} amplitude cap")]
    RegisterTooLarge { d: usize, t: usize, max: usize },
    #[error("basis digit {digit} at position {position} is out of range for dimension {d}")]
    InvalidBasisDigit { position: usize, digit: usize, d: usize },
    #[error("expected {expected} basis digits, got {got}")]
    DigitCountMismatch { expected: usize, got: usize },
    #[error("gate is {got}x{got} but the register dimension is {expected}")]
    GateShapeMismatch { expected: usize, got: usize },
    #[error("qudit index {index} out of range for a register of {len}")]
    QuditIndexOutOfRange { index: usize, len: usize },
    #[error("permutation row for control value {control} is not a bijection")]
    InvalidPermutation { control: usize },
    #[error("control and target are the same qudit ({0})")]
    SelfControlledGate(usize),
    #[error("amplitudes have squared norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("state shapes do not match")]
    ShapeMismatch,
    #[error("XOR mode needs a power-of-two dimension, got {0}")]
    XorRequiresPowerOfTwo(usize),
    #[error("dimension {0} is not a power of two")]
    RequiresPowerOfTwo(usize),
    #[error("secret {secret} out of range for dimension {d}")]
    InvalidSecret { secret: usize, d: usize },
    #[error("ShamirRequiresPrime: dimension {0} is not prime")]
    ShamirRequiresPrime(usize),
    #[error("evaluation points must be distinct and nonzero mod {d}: {reason}")]
    InvalidEvaluationPoints { d: usize, reason: String },
    #[error("expected {expected} polynomial coefficients, got {got}")]
    CoefficientCountMismatch { expected: usize, got: usize },
    #[error("invalid protocol configuration: {0}")]
    Config(String),
    #[error("qubit blocks need at least one bit")]
    InvalidBitCount,
    #[error("qubit blocks have different lengths ({0} vs {1})")]
    BlockLengthMismatch(usize, usize),
    #[error("control and target qubit blocks overlap")]
    OverlappingBlocks,
    #[error("qubit index {index} out of range for a circuit of {len}")]
    QubitIndexOutOfRange { index: usize, len: usize },
    #[error("two-qubit gate uses qubit {0} twice")]
    RepeatedQubit(usize),
    #[error("non-finite gate angle")]
    NonFiniteAngle,
    #[error("circuit text line {line}: {reason}")]
    CircuitParse { line: usize, reason: String },
}
