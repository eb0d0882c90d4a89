//! Scalar rings used throughout the crate.
//!
//! Combinatorial identities are checked over exact rationals ([`Q`]); the
//! random-matrix side works in floating point. [`Dual`] adjoins a nilpotent
//! `ε` to any of them so a pair of functionals `(φ, φ′)` can be carried as one
//! `φ + εφ′`.

mod dual;
pub mod series;

pub use dual::Dual;
pub use series::{SeriesKind, TruncSeries};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = BigRational;

/// A commutative unital ring of coefficients.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;

    /// Multiplicative inverse, if one exists.
    fn try_inv(&self) -> Option<Self>;

    /// The `ε⁰` layer. Identity except for [`Dual`].
    fn std_part(&self) -> Self {
        self.clone()
    }

    /// A size measure used only for tolerance checks and reporting.
    fn magnitude(&self) -> f64;
}

impl Scalar for Q {
    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn try_inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.inv())
        }
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"-0.25"` into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Ok(v) = s.parse::<Q>() {
        return Ok(v);
    }
    // decimal notation: scale by a power of ten
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body
        .split_once('.')
        .ok_or_else(|| Error::Parse(format!("not a rational: `{s}`")))?;
    let digits = format!("{int}{frac}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a rational: `{s}`")));
    }
    let num: BigInt = digits
        .parse()
        .map_err(|_| Error::Parse(format!("not a rational: `{s}`")))?;
    let den = num::pow(BigInt::from(10), frac.len());
    let v = Q::new(num, den);
    Ok(if neg { -v } else { v })
}

/// Lossy conversion used when exact results feed floating-point consumers.
pub fn q_to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
