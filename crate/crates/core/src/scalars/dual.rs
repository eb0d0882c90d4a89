use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Zero};

use super::Scalar;
use crate::error::{Error, Result};

/// `std + ε·inf` with `ε² = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Dual<S> {
    pub std: S,
    pub inf: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(std: S, inf: S) -> Self {
        Dual { std, inf }
    }

    pub fn real(std: S) -> Self {
        Dual { std, inf: S::zero() }
    }

    /// The nilpotent generator `ε`.
    pub fn eps() -> Self {
        Dual { std: S::zero(), inf: S::one() }
    }

    pub fn scale(&self, c: &S) -> Self {
        Dual { std: self.std.clone() * c.clone(), inf: self.inf.clone() * c.clone() }
    }

    /// `(a + εb)⁻¹ = a⁻¹ − ε b a⁻²`.
    pub fn inv(&self) -> Result<Self> {
        let ai = self.std.try_inv().ok_or(Error::NonInvertible)?;
        let inf = -(self.inf.clone() * ai.clone() * ai.clone());
        Ok(Dual { std: ai, inf })
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual { std: self.std + o.std, inf: self.inf + o.inf }
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual { std: self.std - o.std, inf: self.inf - o.inf }
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let inf = self.std.clone() * o.inf + self.inf * o.std.clone();
        Dual { std: self.std * o.std, inf }
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { std: -self.std, inf: -self.inf }
    }
}

impl<S: Scalar> Zero for Dual<S> {
    fn zero() -> Self {
        Dual { std: S::zero(), inf: S::zero() }
    }
    fn is_zero(&self) -> bool {
        self.std.is_zero() && self.inf.is_zero()
    }
}

impl<S: Scalar> One for Dual<S> {
    fn one() -> Self {
        Dual::real(S::one())
    }
}

impl<S: Scalar> fmt::Display for Dual<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}ε", self.std, self.inf)
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn from_i64(v: i64) -> Self {
        Dual::real(S::from_i64(v))
    }

    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }

    fn std_part(&self) -> Self {
        Dual::real(self.std.clone())
    }

    fn magnitude(&self) -> f64 {
        self.std.magnitude().max(self.inf.magnitude())
    }
}
