//! Probability values in exact or floating-point arithmetic.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default tolerance for float-mode rules.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// A probability (or a product/ratio of probabilities).
///
/// Mixing an exact and a float operand promotes the result to float.
#[derive(Clone, PartialEq)]
pub enum Prob {
    Exact(BigRational),
    Float(f64),
}

impl Prob {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Prob::Exact(BigRational::zero()),
            Mode::Float { .. } => Prob::Float(0.0),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Prob::Exact(BigRational::one()),
            Mode::Float { .. } => Prob::Float(1.0),
        }
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Prob::Exact(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Prob::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Prob::Exact(r) => Some(r),
            Prob::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Prob::Float(x) => *x,
        }
    }

    pub fn to_float(&self) -> Prob {
        Prob::Float(self.to_f64())
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Prob::Exact(r) => r.is_negative(),
            Prob::Float(x) => *x < 0.0,
        }
    }

    /// Exact zero test, ignoring any tolerance.
    pub fn is_exactly_zero(&self) -> bool {
        match self {
            Prob::Exact(r) => r.is_zero(),
            Prob::Float(x) => *x == 0.0,
        }
    }

    fn binary(
        &self,
        rhs: &Prob,
        exact: impl Fn(&BigRational, &BigRational) -> BigRational,
        float: impl Fn(f64, f64) -> f64,
    ) -> Prob {
        match (self, rhs) {
            (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact(exact(a, b)),
            _ => Prob::Float(float(self.to_f64(), rhs.to_f64())),
        }
    }
}

impl<'a> Add<&'a Prob> for &'a Prob {
    type Output = Prob;
    fn add(self, rhs: &Prob) -> Prob {
        self.binary(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl<'a> Sub<&'a Prob> for &'a Prob {
    type Output = Prob;
    fn sub(self, rhs: &Prob) -> Prob {
        self.binary(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl<'a> Mul<&'a Prob> for &'a Prob {
    type Output = Prob;
    fn mul(self, rhs: &Prob) -> Prob {
        self.binary(rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl<'a> Div<&'a Prob> for &'a Prob {
    type Output = Prob;
    /// Panics on exact division by zero; callers test the denominator first.
    fn div(self, rhs: &Prob) -> Prob {
        self.binary(rhs, |a, b| a / b, |a, b| a / b)
    }
}

impl fmt::Debug for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prob::Exact(r) => write!(f, "{}", format_rational(r)),
            Prob::Float(x) => write!(f, "{x}"),
        }
    }
}

/// `num/den` text form, or just `num` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("invalid rational {text:?}"));
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(text).map_err(|_| bad())?,
        )),
    }
}

/// Arithmetic mode of a rule, with the comparison semantics attached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    Float { epsilon: f64 },
}

impl Mode {
    pub fn float() -> Self {
        Mode::Float {
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Mode::Exact)
    }

    pub fn epsilon(self) -> f64 {
        match self {
            Mode::Exact => 0.0,
            Mode::Float { epsilon } => epsilon,
        }
    }

    /// Identity test: exact equality, or `|a-b| <= eps (1 + |a| + |b|)`.
    pub fn approx_eq(self, a: &Prob, b: &Prob) -> bool {
        match (self, a, b) {
            (_, Prob::Exact(x), Prob::Exact(y)) if self.is_exact() => x == y,
            _ => {
                let (x, y) = (a.to_f64(), b.to_f64());
                (x - y).abs() <= self.epsilon() * (1.0 + x.abs() + y.abs())
            }
        }
    }

    /// Strict positivity: `> 0` exactly, or `> eps` in float mode.
    pub fn is_positive(self, p: &Prob) -> bool {
        match (self, p) {
            (Mode::Exact, Prob::Exact(r)) => r.is_positive(),
            _ => p.to_f64() > self.epsilon(),
        }
    }

    pub fn convert(self, p: &Prob) -> Prob {
        match self {
            Mode::Exact => p.clone(),
            Mode::Float { .. } => p.to_float(),
        }
    }
}

/// Ratio of two probabilities with `+inf` and `0/0` made explicit.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtendedRatio {
    Finite(Prob),
    Infinite,
    Indeterminate,
}

impl ExtendedRatio {
    pub fn of(numer: &Prob, denom: &Prob, mode: Mode) -> Self {
        if mode.is_positive(denom) {
            ExtendedRatio::Finite(numer / denom)
        } else if mode.is_positive(numer) {
            ExtendedRatio::Infinite
        } else {
            ExtendedRatio::Indeterminate
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedRatio::Finite(_))
    }

    pub fn is_indeterminate(&self) -> bool {
        matches!(self, ExtendedRatio::Indeterminate)
    }

    /// Equality under `mode`; indeterminate values only equal each other.
    pub fn approx_eq(&self, other: &ExtendedRatio, mode: Mode) -> bool {
        match (self, other) {
            (ExtendedRatio::Finite(a), ExtendedRatio::Finite(b)) => mode.approx_eq(a, b),
            (ExtendedRatio::Infinite, ExtendedRatio::Infinite) => true,
            (ExtendedRatio::Indeterminate, ExtendedRatio::Indeterminate) => true,
            _ => false,
        }
    }
}

impl fmt::Display for ExtendedRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRatio::Finite(p) => write!(f, "{p}"),
            ExtendedRatio::Infinite => write!(f, "inf"),
            ExtendedRatio::Indeterminate => write!(f, "0/0"),
        }
    }
}
