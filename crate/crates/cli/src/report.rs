//! JSON/plain report for `tdqss run`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tdqss_core::{RegisterShape, StateVector};

/// Amplitudes below this are dropped from stage summaries.
const TERM_CUTOFF: f64 = 1e-12;

/// Components this small are roundoff and serialize as zero.
const ZERO_SNAP: f64 = 1e-14;

/// Rounds to 12 significant digits; roundoff-sized values and `-0.0` become `0.0`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    if x.abs() < ZERO_SNAP {
        return 0.0;
    }
    let v: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub d: usize,
    pub t: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shadows: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secret: Option<usize>,
    pub cnot: String,
    pub backend: String,
    pub seed: u64,
    pub disentangle: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub digits: Vec<usize>,
    /// `[re, im]`
    pub amplitude: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub label: String,
    /// Basis states with nonzero amplitude, before truncation to `terms`.
    pub support: usize,
    /// Largest-magnitude terms first, ties broken by basis order.
    pub terms: Vec<Term>,
}

impl StageSummary {
    pub fn new(label: &str, state: &StateVector, top: usize) -> Self {
        let shape: RegisterShape = state.shape();
        let mut terms: Vec<(f64, usize)> = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > TERM_CUTOFF)
            .map(|(i, a)| (round_sig(a.norm()), i))
            .collect();
        let support = terms.len();
        terms.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let terms = terms
            .into_iter()
            .take(top)
            .map(|(_, i)| {
                let a = state.amplitudes()[i];
                Term { digits: shape.digits_of(i), amplitude: [round_sig(a.re), round_sig(a.im)] }
            })
            .collect();
        Self { label: label.to_string(), support, terms }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<StageSummary>,
    pub distribution: Vec<f64>,
    pub reconstructed: usize,
    pub readout: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

fn join<T: ToString>(values: &[T], sep: &str) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Human-readable form. The last line is the reconstructed value alone.
    pub fn to_plain(&self) -> String {
        let c = &self.config;
        let mut out = format!("d={} t={}", c.d, c.t);
        if let Some(shadows) = &c.shadows {
            write!(out, " shadows={}", join(shadows, ",")).unwrap();
        }
        if let Some(path) = &c.circuit {
            write!(out, " circuit={path}").unwrap();
        }
        writeln!(out, " cnot={} backend={} seed={} disentangle={}", c.cnot, c.backend, c.seed, c.disentangle).unwrap();
        for stage in &self.stages {
            writeln!(out, "{} ({} terms):", stage.label, stage.support).unwrap();
            for term in &stage.terms {
                let [re, im] = term.amplitude;
                writeln!(out, "  |{}>  {re:+.12} {im:+.12}i", join(&term.digits, ",")).unwrap();
            }
        }
        let dist: Vec<String> = self.distribution.iter().map(|p| format!("{p:.12}")).collect();
        writeln!(out, "distribution: {}", dist.join(" ")).unwrap();
        writeln!(out, "readout: {}", join(&self.readout, ",")).unwrap();
        if let Some(display) = &self.display {
            writeln!(out, "display: {display}").unwrap();
        }
        if let Some(ms) = self.elapsed_ms {
            writeln!(out, "elapsed: {ms:.3} ms").unwrap();
        }
        writeln!(out, "{}", self.reconstructed).unwrap();
        out
    }
}
