//! Exact integer polynomials and the Hermite families built on them.
//!
//! Coefficients are arbitrary precision so that high codimensions (m = 52 and
//! beyond) keep exact coefficients. Floating evaluation goes through
//! [`FloatPoly`], which supports both plain and compensated Horner.
//!
//! The pseudo-Hermite polynomial is defined by the recurrence
//! `P_{k+1} = 2x P_k + 2k P_{k-1}`, i.e. `(-i)^m H_m(ix)`, which has
//! strictly positive coefficients and is therefore positive on the real line
//! for even `m`. The alternative prefactor `(-1)^m` would flip the sign for
//! `m = 2 (mod 4)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Even, non-negative codimension of the exceptional Hermite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u32")]
pub struct Codimension(u32);

impl TryFrom<i64> for Codimension {
    type Error = Error;
    fn try_from(m: i64) -> Result<Self> {
        Codimension::new(m)
    }
}

impl From<Codimension> for u32 {
    fn from(m: Codimension) -> u32 {
        m.0
    }
}

impl Codimension {
    pub fn new(m: i64) -> Result<Self> {
        if m < 0 {
            return Err(Error::NegativeCodimension(m));
        }
        if m % 2 != 0 {
            return Err(Error::OddCodimension(m));
        }
        u32::try_from(m)
            .map(Codimension)
            .map_err(|_| Error::InvalidConfig(format!("codimension {m} out of range")))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Codimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Univariate polynomial with exact integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<BigInt>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Polynomial::new(vec![BigInt::from(c)])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Polynomial::from_i64(&[0, 1])
    }

    /// Builds a polynomial, dropping trailing zero coefficients.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn scale(&self, factor: &BigInt) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Multiplies by `x`.
    pub fn shift(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigInt::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    /// Compensated Horner evaluation in double precision.
    pub fn eval(&self, x: f64) -> f64 {
        self.to_float().eval_compensated(x)
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn to_float(&self) -> FloatPoly {
        FloatPoly::new(
            self.coeffs
                .iter()
                .map(|c| c.to_f64().unwrap_or(f64::NAN))
                .collect(),
        )
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Double-precision copy of a polynomial for hot evaluation loops.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPoly {
    coeffs: Vec<f64>,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl FloatPoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        FloatPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Plain Horner. Adequate when no cancellation can occur, e.g. the
    /// pseudo-Hermite polynomials, which have only positive even terms.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Compensated Horner: as accurate as Horner in twice the working
    /// precision, then rounded.
    pub fn eval_compensated(&self, x: f64) -> f64 {
        let Some((&top, rest)) = self.coeffs.split_last() else {
            return 0.0;
        };
        let mut s = top;
        let mut c = 0.0;
        for &a in rest.iter().rev() {
            let (p, pi) = two_prod(s, x);
            let (t, sigma) = two_sum(p, a);
            s = t;
            c = c * x + (pi + sigma);
        }
        s + c
    }
}

/// Physicists' Hermite polynomial `H_n`.
pub fn hermite(n: usize) -> Polynomial {
    let mut prev = Polynomial::one();
    if n == 0 {
        return prev;
    }
    let two_x = Polynomial::from_i64(&[0, 2]);
    let mut cur = two_x.clone();
    for k in 1..n {
        let next = &(&two_x * &cur) - &prev.scale(&BigInt::from(2 * k));
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Pseudo-Hermite recurrence for any order `k`, with no parity guard.
///
/// Odd orders are needed for the identity `P_m' = 2m P_{m-1}`.
pub fn pseudo_hermite_raw(k: usize) -> Polynomial {
    let mut prev = Polynomial::one();
    if k == 0 {
        return prev;
    }
    let two_x = Polynomial::from_i64(&[0, 2]);
    let mut cur = two_x.clone();
    for j in 1..k {
        let next = &(&two_x * &cur) + &prev.scale(&BigInt::from(2 * j));
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Pseudo-Hermite polynomial of even order `m`; positive on the whole real line.
pub fn pseudo_hermite(m: i64) -> Result<Polynomial> {
    let m = Codimension::new(m)?;
    Ok(pseudo_hermite_raw(m.as_usize()))
}

/// Exceptional Hermite polynomial `y^m_{n+1} = P_m H_{n+1} + P_m' H_n`.
///
/// `n = -1` is the ground-state member, the constant 1.
pub fn exceptional_hermite(m: i64, n: i64) -> Result<Polynomial> {
    let m = Codimension::new(m)?;
    if n < -1 {
        return Err(Error::InvalidQuantumNumber {
            family: "exceptional Hermite",
            n,
            min: -1,
        });
    }
    Ok(exceptional_hermite_for(m, n))
}

pub(crate) fn exceptional_hermite_for(m: Codimension, n: i64) -> Polynomial {
    if n < 0 {
        return Polynomial::one();
    }
    let n = n as usize;
    let p = pseudo_hermite_raw(m.as_usize());
    let dp = p.derivative();
    &(&p * &hermite(n + 1)) + &(&dp * &hermite(n))
}

pub fn poly_derivative(p: &Polynomial) -> Polynomial {
    p.derivative()
}

pub fn poly_eval(p: &Polynomial, x: f64) -> f64 {
    p.eval(x)
}
