//! Producing shadow sets whose sum is the secret mod `d`.

use rand::Rng;

use crate::error::{Error, Result};

/// The classical shares `s_1..s_t` held by the participants, each reduced mod `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShadowSet {
    d: usize,
    shadows: Vec<usize>,
}

impl ShadowSet {
    pub fn new(d: usize, shadows: impl IntoIterator<Item = usize>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let shadows: Vec<usize> = shadows.into_iter().map(|s| s % d).collect();
        if shadows.is_empty() {
            return Err(Error::EmptyRegister);
        }
        Ok(Self { d, shadows })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of participants.
    pub fn t(&self) -> usize {
        self.shadows.len()
    }

    pub fn values(&self) -> &[usize] {
        &self.shadows
    }
}

/// `(Σ s_r) mod d`, the value the reconstructor reads out.
pub fn expected_secret(shadows: &ShadowSet) -> usize {
    shadows.values().iter().fold(0, |acc, &s| (acc + s) % shadows.d())
}

/// `t` uniform shadows with the last one chosen so that they sum to `secret`.
pub fn make_shadows_random<R: Rng + ?Sized>(d: usize, t: usize, secret: usize, rng: &mut R) -> Result<ShadowSet> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if t < 1 {
        return Err(Error::EmptyRegister);
    }
    if secret >= d {
        return Err(Error::InvalidSecret { secret, d });
    }
    let mut shadows: Vec<usize> = (0..t - 1).map(|_| rng.gen_range(0..d)).collect();
    let partial = shadows.iter().fold(0, |acc, &s| (acc + s) % d);
    shadows.push((secret + d - partial) % d);
    ShadowSet::new(d, shadows)
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut k = 3;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

fn mul_mod(a: u128, b: u128, p: u128) -> u128 {
    a * b % p
}

fn pow_mod(mut base: u128, mut exp: u128, p: u128) -> u128 {
    let mut acc = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

// Fermat inverse; `p` prime, `a` nonzero mod p.
fn inv_mod(a: u128, p: u128) -> u128 {
    pow_mod(a, p - 2, p)
}

/// Shamir dealing over GF(d) folded into additive shadows.
///
/// With `f(x) = secret + Σ_j coefficients[j]·x^{j+1}` the share of party `r`
/// is `λ_r·f(x_r)`, where `λ_r = Π_{q≠r} x_q (x_q − x_r)^{-1}` is its Lagrange
/// weight at zero, so the shadows sum to `f(0) = secret`.
pub fn make_shadows_shamir(d: usize, secret: usize, coefficients: &[usize], xs: &[usize]) -> Result<ShadowSet> {
    if !is_prime(d) {
        return Err(Error::ShamirRequiresPrime(d));
    }
    if secret >= d {
        return Err(Error::InvalidSecret { secret, d });
    }
    let t = xs.len();
    if t == 0 {
        return Err(Error::EmptyRegister);
    }
    if coefficients.len() + 1 != t {
        return Err(Error::CoefficientCountMismatch { expected: t - 1, got: coefficients.len() });
    }
    let xs_mod: Vec<usize> = xs.iter().map(|x| x % d).collect();
    for (i, &x) in xs_mod.iter().enumerate() {
        if x == 0 {
            return Err(Error::InvalidEvaluationPoints { d, reason: format!("x = {} is zero", xs[i]) });
        }
        if xs_mod[..i].contains(&x) {
            return Err(Error::InvalidEvaluationPoints { d, reason: format!("x = {} is repeated", xs[i]) });
        }
    }

    let p = d as u128;
    let eval = |x: u128| {
        // Horner, highest degree first
        let mut acc = 0u128;
        for &c in coefficients.iter().rev() {
            acc = (mul_mod(acc, x, p) + c as u128 % p) % p;
        }
        (mul_mod(acc, x, p) + secret as u128) % p
    };
    let shadows = xs_mod.iter().enumerate().map(|(r, &xr)| {
        let xr = xr as u128;
        let lambda = xs_mod
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != r)
            .fold(1u128, |acc, (_, &xq)| {
                let xq = xq as u128;
                mul_mod(acc, mul_mod(xq, inv_mod((xq + p - xr) % p, p), p), p)
            });
        mul_mod(lambda, eval(xr), p) as usize
    });
    ShadowSet::new(d, shadows.collect::<Vec<_>>())
}
