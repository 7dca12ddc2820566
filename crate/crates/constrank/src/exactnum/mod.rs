//! Exact scalar arithmetic and exact dense linear algebra.
//!
//! Scalars are arbitrary-precision rationals or Gaussian rationals (the
//! computable subfield of the complex numbers containing every witness
//! direction used in the rank tests, such as `(1, i)`). All operations are
//! pure and all values immutable; nothing here touches floating point.

mod matrix;

pub use matrix::{FieldMatrix, Rref};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use thiserror::Error;

/// Arbitrary-precision rational number, always stored with coprime numerator
/// and positive denominator (maintained by `num-rational`).
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("restriction of the matrix to the subspace is not surjective")]
    NotSurjective,
}

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for the fraction `n / d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `p/q`, or just `p` when `q = 1`.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q` or `p`.
pub fn rational_from_str(s: &str) -> Result<Rational, ExactError> {
    Rational::from_str(s.trim()).map_err(|_| ExactError::ParseRational(s.to_string()))
}

/// Scalar field for the exact linear algebra kernels.
///
/// Implemented by [`Rational`] and [`GaussianRational`]. `conj` is complex
/// conjugation (the identity on rationals) so that orthogonal projections and
/// the Moore-Penrose pseudo-inverse use the right inner product over both
/// fields.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Multiplicative inverse. Panics on zero; callers guard with `is_zero`.
    fn inv(&self) -> Self;

    fn conj(&self) -> Self;

    fn from_rational(r: &Rational) -> Self;

    fn div_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.inv()
    }
}

impl Field for Rational {
    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        self.recip()
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

/// Element of the field Q(i): `re + im * i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussianRational {
    #[serde(
        serialize_with = "serde_rational::ser",
        deserialize_with = "serde_rational::de"
    )]
    pub re: Rational,
    #[serde(
        serialize_with = "serde_rational::ser",
        deserialize_with = "serde_rational::de"
    )]
    pub im: Rational,
}

pub(crate) mod serde_rational {
    use super::{rational_from_str, rational_to_string, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn ser<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(r))
    }

    pub fn de<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        rational_from_str(&s).map_err(serde::de::Error::custom)
    }
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn from_parts(re: i64, im: i64) -> Self {
        Self::new(rat(re), rat(im))
    }

    pub fn i() -> Self {
        Self::from_parts(0, 1)
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `|z|^2 = re^2 + im^2`, an exact rational.
    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact square root in Q(i) when one exists.
    ///
    /// Solves `(x + iy)^2 = re + i im`; this requires `re^2 + im^2` to be a
    /// perfect square of a rational, and then one more perfect-square check
    /// for `x^2`. Used by the witness search to solve quadratics exactly.
    pub fn sqrt_exact(&self) -> Option<GaussianRational> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.im.is_zero() {
            return if self.re.is_positive() {
                rational_sqrt(&self.re).map(|x| Self::new(x, Rational::zero()))
            } else {
                rational_sqrt(&(-self.re.clone())).map(|y| Self::new(Rational::zero(), y))
            };
        }
        let h = rational_sqrt(&self.norm_sq())?;
        // x^2 = (re + h)/2, y = im / (2x)
        let x_sq = (&self.re + &h) / rat(2);
        let x = rational_sqrt(&x_sq)?;
        if x.is_zero() {
            return None;
        }
        let y = &self.im / (rat(2) * &x);
        Some(Self::new(x, y))
    }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &sn * &sn == num && &sd * &sd == den {
        Some(Rational::new(
            BigInt::from(sn),
            BigInt::from(sd.max(BigUint::one())),
        ))
    } else {
        None
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", rational_to_string(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", rational_to_string(&self.im))
        } else if self.im.is_negative() {
            write!(
                f,
                "{}{}i",
                rational_to_string(&self.re),
                rational_to_string(&self.im)
            )
        } else {
            write!(
                f,
                "{}+{}i",
                rational_to_string(&self.re),
                rational_to_string(&self.im)
            )
        }
    }
}

impl From<Rational> for GaussianRational {
    fn from(re: Rational) -> Self {
        Self::new(re, Rational::zero())
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for GaussianRational {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv()
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }
}

impl Field for GaussianRational {
    fn inv(&self) -> Self {
        let n = self.norm_sq();
        assert!(!n.is_zero(), "inverse of zero");
        Self::new(&self.re / &n, -(&self.im / &n))
    }

    fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    fn from_rational(r: &Rational) -> Self {
        Self::new(r.clone(), Rational::zero())
    }
}

/// Draws a rational with numerator in `[-bound, bound]` and denominator in
/// `[1, den_bound]`. Deterministic given the generator state.
pub fn sample_rational<R: Rng>(rng: &mut R, bound: i64, den_bound: i64) -> Rational {
    let n = rng.gen_range(-bound..=bound);
    let d = rng.gen_range(1..=den_bound);
    ratio(n, d)
}

/// Draws a Gaussian rational with both parts sampled as in [`sample_rational`].
pub fn sample_gaussian<R: Rng>(rng: &mut R, bound: i64, den_bound: i64) -> GaussianRational {
    let re = sample_rational(rng, bound, den_bound);
    let im = sample_rational(rng, bound, den_bound);
    GaussianRational::new(re, im)
}

/// Draws a nonzero Gaussian-rational point of dimension `n`.
pub fn sample_gaussian_point<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Vec<GaussianRational> {
    loop {
        let p: Vec<GaussianRational> = (0..n).map(|_| sample_gaussian(rng, bound, 3)).collect();
        if p.iter().any(|z| !z.is_zero()) {
            return p;
        }
    }
}

/// Draws a nonzero real rational point of dimension `n`.
pub fn sample_rational_point<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Vec<Rational> {
    loop {
        let p: Vec<Rational> = (0..n).map(|_| sample_rational(rng, bound, 3)).collect();
        if p.iter().any(|z| !z.is_zero()) {
            return p;
        }
    }
}
