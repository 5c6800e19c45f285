//! Dense state vectors over registers of `t` qudits of dimension `d`.
//!
//! Flat basis index convention: qudit 0 is the most significant digit, so the
//! ket `|x_0, x_1, ..., x_{t-1}⟩` lives at `Σ_r x_r · d^(t-1-r)`. Gates are
//! applied in place by strided kernels; the full `d^t × d^t` operator is never
//! formed (see [`crate::oracle`] for the slow path that does).

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Largest register the simulator accepts, in amplitudes.
pub const MAX_AMPLITUDES: usize = 1 << 26;

/// Tolerance on `Σ|a|² = 1` for states built from caller-supplied amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-10;

// Probabilities at or below this are roundoff, never sampled.
const SAMPLING_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegisterShape {
    d: usize,
    t: usize,
    len: usize,
}

impl RegisterShape {
    pub fn new(d: usize, t: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if t < 1 {
            return Err(Error::EmptyRegister);
        }
        let len = u32::try_from(t)
            .ok()
            .and_then(|t32| d.checked_pow(t32))
            .filter(|&len| len <= MAX_AMPLITUDES)
            .ok_or(Error::RegisterTooLarge { d, t, max: MAX_AMPLITUDES })?;
        Ok(Self { d, t, len })
    }

    /// Levels per qudit.
    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of qudits.
    #[inline]
    pub fn t(&self) -> usize {
        self.t
    }

    /// `d^t`.
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance in the flat index between neighbouring values of `qudit`.
    #[inline]
    pub fn stride(&self, qudit: usize) -> usize {
        self.d.pow((self.t - 1 - qudit) as u32)
    }

    pub fn check_qudit(&self, qudit: usize) -> Result<()> {
        if qudit < self.t {
            Ok(())
        } else {
            Err(Error::QuditIndexOutOfRange { index: qudit, len: self.t })
        }
    }

    /// Flat index of a digit sequence.
    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.t {
            return Err(Error::DigitCountMismatch { expected: self.t, got: digits.len() });
        }
        digits.iter().enumerate().try_fold(0usize, |acc, (position, &digit)| {
            if digit >= self.d {
                Err(Error::InvalidBasisDigit { position, digit, d: self.d })
            } else {
                Ok(acc * self.d + digit)
            }
        })
    }

    /// Digit sequence of a flat index. Panics if `index >= len()`.
    pub fn digits_of(&self, index: usize) -> Vec<usize> {
        assert!(index < self.len, "basis index {index} out of range");
        let mut digits = vec![0; self.t];
        let mut rest = index;
        for slot in digits.iter_mut().rev() {
            *slot = rest % self.d;
            rest /= self.d;
        }
        digits
    }

    #[inline]
    pub fn digit_at(&self, index: usize, qudit: usize) -> usize {
        (index / self.stride(qudit)) % self.d
    }
}

/// Two-qudit basis permutation `(c, x) -> (c, table(c, x))`.
///
/// Each row (fixed control value) must be a bijection on `[0, d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    d: usize,
    table: Vec<usize>,
}

impl Permutation {
    pub fn from_fn(d: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let mut table = Vec::with_capacity(d * d);
        for c in 0..d {
            let mut seen = vec![false; d];
            for x in 0..d {
                let image = f(c, x);
                if image >= d || std::mem::replace(&mut seen[image], true) {
                    return Err(Error::InvalidPermutation { control: c });
                }
                table.push(image);
            }
        }
        Ok(Self { d, table })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::from_fn(d, |_, x| x)
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn apply(&self, control: usize, target: usize) -> usize {
        self.table[control * self.d + target]
    }
}

#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub qudit: usize,
    pub outcome: usize,
    pub probability: f64,
    pub post_state: StateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    shape: RegisterShape,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The basis state `|digits⟩`.
    pub fn basis(shape: RegisterShape, digits: &[usize]) -> Result<Self> {
        let index = shape.index_of(digits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); shape.len()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { shape, amps })
    }

    /// `|0...0⟩`.
    pub fn zero(shape: RegisterShape) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); shape.len()];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { shape, amps }
    }

    /// Wraps caller amplitudes, which must already be unit norm within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(shape: RegisterShape, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != shape.len() {
            return Err(Error::ShapeMismatch);
        }
        let state = Self { shape, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Scales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(shape: RegisterShape, mut amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != shape.len() {
            return Err(Error::ShapeMismatch);
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { shape, amps })
    }

    #[inline]
    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.shape.index_of(digits)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `gate` to one qudit: `(I ⊗ … ⊗ gate ⊗ … ⊗ I)|ψ⟩`.
    pub fn apply_single_qudit_gate(&mut self, qudit: usize, gate: &Matrix) -> Result<()> {
        let d = self.shape.d;
        if gate.dim() != d {
            return Err(Error::GateShapeMismatch { expected: d, got: gate.dim() });
        }
        self.shape.check_qudit(qudit)?;
        let stride = self.shape.stride(qudit);

        if gate.is_diagonal() {
            let diag: Vec<Complex64> = (0..d).map(|k| gate[(k, k)]).collect();
            for (block, chunk) in self.amps.chunks_mut(stride).enumerate() {
                let phase = diag[block % d];
                chunk.iter_mut().for_each(|a| *a *= phase);
            }
            return Ok(());
        }

        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        for outer in self.amps.chunks_mut(stride * d) {
            for inner in 0..stride {
                for (j, slot) in buf.iter_mut().enumerate() {
                    *slot = outer[inner + j * stride];
                }
                for r in 0..d {
                    outer[inner + r * stride] =
                        gate.row(r).iter().zip(&buf).map(|(g, a)| g * a).sum();
                }
            }
        }
        Ok(())
    }

    /// Moves the amplitude of `|…c…x…⟩` to `|…c…perm(c,x)…⟩`.
    pub fn apply_two_qudit_permutation(
        &mut self,
        control: usize,
        target: usize,
        perm: &Permutation,
    ) -> Result<()> {
        self.shape.check_qudit(control)?;
        self.shape.check_qudit(target)?;
        if control == target {
            return Err(Error::SelfControlledGate(control));
        }
        if perm.d() != self.shape.d {
            return Err(Error::GateShapeMismatch { expected: self.shape.d, got: perm.d() });
        }
        let t_stride = self.shape.stride(target);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (index, &amp) in self.amps.iter().enumerate() {
            let c = self.shape.digit_at(index, control);
            let x = self.shape.digit_at(index, target);
            let image = perm.apply(c, x);
            out[index - x * t_stride + image * t_stride] = amp;
        }
        self.amps = out;
        Ok(())
    }

    /// Outcome probabilities for a computational-basis measurement of `qudit`.
    pub fn measurement_distribution(&self, qudit: usize) -> Result<Vec<f64>> {
        self.shape.check_qudit(qudit)?;
        let mut dist = vec![0.0; self.shape.d];
        for (index, a) in self.amps.iter().enumerate() {
            dist[self.shape.digit_at(index, qudit)] += a.norm_sqr();
        }
        Ok(dist)
    }

    /// Samples a measurement of `qudit` and returns the collapsed state.
    ///
    /// Outcomes with probability below roundoff are never drawn, so a point-mass
    /// distribution yields its outcome for every seed.
    pub fn measure_qudit<R: Rng + ?Sized>(&self, qudit: usize, rng: &mut R) -> Result<MeasurementRecord> {
        let dist = self.measurement_distribution(qudit)?;
        let support: f64 = dist.iter().filter(|&&p| p > SAMPLING_FLOOR).sum();
        let draw = rng.gen::<f64>() * support;
        let mut acc = 0.0;
        let mut outcome = None;
        for (m, &p) in dist.iter().enumerate() {
            if p <= SAMPLING_FLOOR {
                continue;
            }
            outcome = Some(m);
            acc += p;
            if draw < acc {
                break;
            }
        }
        let outcome = outcome.ok_or(Error::NotNormalized(support))?;
        let probability = dist[outcome];

        let scale = 1.0 / probability.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(index, &a)| {
                if self.shape.digit_at(index, qudit) == outcome {
                    a * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok(MeasurementRecord {
            qudit,
            outcome,
            probability,
            post_state: StateVector { shape: self.shape, amps },
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch);
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`, clamped to `[0, 1]`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().clamp(0.0, 1.0))
    }

    /// Largest per-amplitude distance after rotating `other` by the global
    /// phase that best aligns it with `self`.
    pub fn max_abs_diff_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        let overlap = other.inner(self)?;
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch);
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}
