//! Reconstruction phase of the threshold d-level secret sharing scheme.
//!
//! Qudit 0 belongs to the reconstructor. Starting from `|0⟩^⊗t`:
//!
//! 1. QFT on qudit 0, then CNOT fan-out from qudit 0 to every other qudit,
//!    giving `(1/√d) Σ_k |k⟩^⊗t` (`phi2`).
//! 2. Every participant applies `U_{0,s_r}` to its qudit (`phi3`).
//! 3. The reconstructor repeats the fan-out with the inverse CNOT, returning
//!    qudits `1..t` to `|0⟩` (`phi4`).
//! 4. Inverse QFT on qudit 0 turns the phase ramp `ω^{(Σ s_r)k}` into
//!    `|Σ s_r mod d⟩` (`phi5`), which is then measured.
//!
//! Without step 3 qudit 0 stays entangled with the others and the inverse QFT
//! no longer yields a basis state; [`ProtocolConfig::disentangle`] can switch
//! the step off to observe that.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::compiler::{self, BasisMap, QubitCircuit};
use crate::dealing::ShadowSet;
use crate::error::{Error, Result};
use crate::gates::{CnotMode, GateSpec};
use crate::state::{RegisterShape, StateVector};

/// Which CNOT pair entangles and disentangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CnotScheme {
    /// Modular add to entangle, modular subtract to disentangle. Any `d`.
    #[default]
    AddSub,
    /// Bitwise XOR both ways. `d = 2^n` only.
    Xor,
}

impl CnotScheme {
    pub fn entangle_mode(self) -> CnotMode {
        match self {
            CnotScheme::AddSub => CnotMode::Add,
            CnotScheme::Xor => CnotMode::Xor,
        }
    }

    pub fn disentangle_mode(self) -> CnotMode {
        self.entangle_mode().inverse()
    }
}

impl fmt::Display for CnotScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CnotScheme::AddSub => "add-sub",
            CnotScheme::Xor => "xor",
        })
    }
}

impl FromStr for CnotScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "add-sub" => Ok(CnotScheme::AddSub),
            "xor" => Ok(CnotScheme::Xor),
            other => Err(format!("unknown CNOT scheme `{other}` (expected add-sub or xor)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    /// Native d-level simulation.
    #[default]
    Qudit,
    /// Compile to qubit gates and simulate those; `d = 2^n` only.
    Qubit,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Qudit => "qudit",
            Backend::Qubit => "qubit",
        })
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "qudit" => Ok(Backend::Qudit),
            "qubit" => Ok(Backend::Qubit),
            other => Err(format!("unknown backend `{other}` (expected qudit or qubit)")),
        }
    }
}

/// Labeled checkpoints of the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    /// After the QFT and CNOT fan-out.
    Entangle,
    /// After every party's phase operator.
    Phase,
    /// After the disentangling CNOTs.
    Disentangle,
    /// After the inverse QFT.
    Recover,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Entangle, Stage::Phase, Stage::Disentangle, Stage::Recover];

    /// Trace label: `phi2` … `phi5`.
    pub fn label(self) -> &'static str {
        match self {
            Stage::Entangle => "phi2",
            Stage::Phase => "phi3",
            Stage::Disentangle => "phi4",
            Stage::Recover => "phi5",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub shape: RegisterShape,
    pub shadows: ShadowSet,
    pub cnot: CnotScheme,
    pub backend: Backend,
    pub seed: u64,
    /// Run the disentangling CNOTs. Only switched off for diagnostics.
    pub disentangle: bool,
}

impl ProtocolConfig {
    /// Qudit backend, add/sub CNOTs, seed 0, register sized from the shadows.
    pub fn new(shadows: ShadowSet) -> Result<Self> {
        let shape = RegisterShape::new(shadows.d(), shadows.t())?;
        Ok(Self { shape, shadows, cnot: CnotScheme::default(), backend: Backend::default(), seed: 0, disentangle: true })
    }

    pub fn with_cnot(mut self, cnot: CnotScheme) -> Self {
        self.cnot = cnot;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn without_disentanglement(mut self) -> Self {
        self.disentangle = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (d, t) = (self.shape.d(), self.shape.t());
        if self.shadows.d() != d {
            return Err(Error::Config(format!("shadows are mod {} but the register has d = {d}", self.shadows.d())));
        }
        if self.shadows.t() != t {
            return Err(Error::Config(format!("{} shadows given for t = {t} parties", self.shadows.t())));
        }
        if !d.is_power_of_two() {
            if self.cnot == CnotScheme::Xor {
                return Err(Error::Config(format!("xor CNOTs need a power-of-two d, got {d}")));
            }
            if self.backend == Backend::Qubit {
                return Err(Error::Config(format!("the qubit backend needs a power-of-two d, got {d}")));
            }
        }
        Ok(())
    }
}

/// Gate sequence of each stage, in application order.
pub fn protocol_gates(config: &ProtocolConfig) -> Result<Vec<(Stage, Vec<GateSpec>)>> {
    config.validate()?;
    let t = config.shape.t();
    let fan = |mode| (1..t).map(move |target| GateSpec::Cnot { control: 0, target, mode });

    let entangle = std::iter::once(GateSpec::Qft { qudit: 0 }).chain(fan(config.cnot.entangle_mode())).collect();
    let phase = config
        .shadows
        .values()
        .iter()
        .enumerate()
        .map(|(qudit, &s)| GateSpec::Phase { qudit, s })
        .collect();
    let disentangle = if config.disentangle { fan(config.cnot.disentangle_mode()).collect() } else { Vec::new() };
    let recover = vec![GateSpec::InverseQft { qudit: 0 }];

    Ok(vec![
        (Stage::Entangle, entangle),
        (Stage::Phase, phase),
        (Stage::Disentangle, disentangle),
        (Stage::Recover, recover),
    ])
}

/// Register states after each stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub phi2: StateVector,
    pub phi3: StateVector,
    pub phi4: StateVector,
    pub phi5: StateVector,
}

impl Trace {
    pub fn get(&self, stage: Stage) -> &StateVector {
        match stage {
            Stage::Entangle => &self.phi2,
            Stage::Phase => &self.phi3,
            Stage::Disentangle => &self.phi4,
            Stage::Recover => &self.phi5,
        }
    }

    fn from_stages(mut states: Vec<StateVector>) -> Self {
        assert_eq!(states.len(), 4);
        let phi5 = states.pop().unwrap();
        let phi4 = states.pop().unwrap();
        let phi3 = states.pop().unwrap();
        let phi2 = states.pop().unwrap();
        Self { phi2, phi3, phi4, phi5 }
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub trace: Trace,
    /// Outcome probabilities for the reconstructor's qudit.
    pub distribution: Vec<f64>,
    /// Most likely outcome of the reconstructor's measurement.
    pub reconstructed: usize,
    /// Seeded measurement of every qudit, reconstructor first.
    pub readout: Vec<usize>,
    /// Measured register as a qubit bit string, highest qubit leftmost. Qubit backend only.
    pub display: Option<String>,
}

/// Runs reconstruction end to end on the configured backend.
pub fn run_tdqss(config: &ProtocolConfig) -> Result<ProtocolResult> {
    let stages = match config.backend {
        Backend::Qudit => run_qudit_stages(config)?,
        Backend::Qubit => run_qubit_stages(config)?,
    };
    let trace = Trace::from_stages(stages);
    let distribution = trace.phi5.measurement_distribution(0)?;
    let reconstructed = argmax(&distribution);
    let readout = read_register(&trace.phi5, config.seed)?;
    let display = match config.backend {
        Backend::Qubit => Some(BasisMap::new(config.shape.d(), config.shape.t())?.display(&readout)?),
        Backend::Qudit => None,
    };
    Ok(ProtocolResult { trace, distribution, reconstructed, readout, display })
}

fn run_qudit_stages(config: &ProtocolConfig) -> Result<Vec<StateVector>> {
    let mut state = StateVector::zero(config.shape);
    let mut snapshots = Vec::with_capacity(4);
    for (_, gates) in protocol_gates(config)? {
        for gate in &gates {
            gate.apply(&mut state)?;
        }
        snapshots.push(state.clone());
    }
    Ok(snapshots)
}

fn run_qubit_stages(config: &ProtocolConfig) -> Result<Vec<StateVector>> {
    let map = BasisMap::new(config.shape.d(), config.shape.t())?;
    let mut state = StateVector::zero(map.qubit_shape());
    let mut snapshots = Vec::with_capacity(4);
    for (_, gates) in compiler::compile_protocol_stages(config)? {
        for gate in &gates {
            gate.apply(&mut state)?;
        }
        snapshots.push(map.pull_back(&state)?);
    }
    Ok(snapshots)
}

/// Final state and readout of a qubit circuit interpreted as `t` qudits of dimension `d`.
#[derive(Debug, Clone)]
pub struct CircuitRun {
    pub final_state: StateVector,
    pub distribution: Vec<f64>,
    pub reconstructed: usize,
    pub readout: Vec<usize>,
    pub display: String,
}

/// Simulates `circuit` from `|0…0⟩` and reads it out like [`run_tdqss`] would.
pub fn run_compiled(circuit: &QubitCircuit, d: usize, t: usize, seed: u64) -> Result<CircuitRun> {
    let map = BasisMap::new(d, t)?;
    if circuit.qubit_count() != map.qubit_shape().t() {
        return Err(Error::Config(format!(
            "circuit has {} qubits but d = {d}, t = {t} needs {}",
            circuit.qubit_count(),
            map.qubit_shape().t()
        )));
    }
    let final_state = map.pull_back(&circuit.simulate()?)?;
    let distribution = final_state.measurement_distribution(0)?;
    let reconstructed = argmax(&distribution);
    let readout = read_register(&final_state, seed)?;
    let display = map.display(&readout)?;
    Ok(CircuitRun { final_state, distribution, reconstructed, readout, display })
}

/// Measures qudit 0, then the rest in order, each on the collapsed state.
fn read_register(state: &StateVector, seed: u64) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = state.clone();
    let mut outcomes = Vec::with_capacity(state.shape().t());
    for qudit in 0..state.shape().t() {
        let record = current.measure_qudit(qudit, &mut rng)?;
        outcomes.push(record.outcome);
        current = record.post_state;
    }
    Ok(outcomes)
}

fn argmax(dist: &[f64]) -> usize {
    dist.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &p)| if p > best.1 { (i, p) } else { best })
        .0
}
