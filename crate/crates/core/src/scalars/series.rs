//! Truncated formal Laurent series in `w = 1/z`.
//!
//! A value stores coefficients of `w^val, …, w^(prec-1)`; every term of
//! order `prec` and above is unknown. Operations propagate `prec` so that no
//! coefficient is ever reported beyond what the inputs determine.

use std::cmp::min;

use super::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// `Σ c_n z^{-n-1}`
    G,
    /// `z + Σ d_n z^{-n}`
    F,
    General,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<S> {
    kind: SeriesKind,
    val: i64,
    coeffs: Vec<S>,
    prec: i64,
}

impl<S: Scalar> TruncSeries<S> {
    /// Builds a series from the coefficients of `w^val, w^(val+1), …`, exact below `prec`.
    /// Missing coefficients are zero; extra ones are dropped.
    pub fn new(kind: SeriesKind, val: i64, mut coeffs: Vec<S>, prec: i64) -> Self {
        let prec = prec.max(val);
        coeffs.resize((prec - val) as usize, S::zero());
        TruncSeries { kind, val, coeffs, prec }
    }

    pub fn constant(c: S, prec: i64) -> Self {
        Self::new(SeriesKind::General, 0, vec![c], prec)
    }

    /// The identity `z`.
    pub fn z(prec: i64) -> Self {
        Self::new(SeriesKind::F, -1, vec![S::one()], prec)
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: SeriesKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn val(&self) -> i64 {
        self.val
    }

    /// Exclusive bound on the known powers of `w`.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Coefficient of `w^k`, or `None` if it lies beyond the precision.
    pub fn coeff(&self, k: i64) -> Option<S> {
        if k >= self.prec {
            None
        } else if k < self.val {
            Some(S::zero())
        } else {
            Some(self.coeffs[(k - self.val) as usize].clone())
        }
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let p = min(prec, self.prec);
        let mut out = self.clone();
        out.prec = p.max(out.val);
        out.coeffs.truncate((out.prec - out.val) as usize);
        out
    }

    /// Drops leading zero coefficients, raising `val`.
    fn normalized(&self) -> Self {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(0) => self.clone(),
            None => TruncSeries { kind: self.kind, val: self.prec, coeffs: Vec::new(), prec: self.prec },
            Some(i) => TruncSeries {
                kind: self.kind,
                val: self.val + i as i64,
                coeffs: self.coeffs[i..].to_vec(),
                prec: self.prec,
            },
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let val = min(self.val, o.val);
        let prec = min(self.prec, o.prec);
        let coeffs = (val..prec)
            .map(|k| self.coeff(k).unwrap() + o.coeff(k).unwrap())
            .collect();
        Self::new(SeriesKind::General, val, coeffs, prec)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| -c.clone()).collect();
        Self::new(SeriesKind::General, self.val, coeffs, self.prec)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x.clone() * c.clone()).collect();
        Self::new(SeriesKind::General, self.val, coeffs, self.prec)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (self.normalized(), o.normalized());
        let val = a.val + b.val;
        let prec = min(a.prec + b.val, b.prec + a.val);
        let len = (prec - val) as usize;
        let mut coeffs = vec![S::zero(); len];
        for (i, x) in a.coeffs.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] = coeffs[i + j].clone() + x.clone() * y.clone();
            }
        }
        Self::new(SeriesKind::General, val, coeffs, prec)
    }

    /// `1/s`. The leading coefficient must be invertible.
    pub fn reciprocal(&self) -> Result<Self> {
        let s = self.normalized();
        let lead = s.coeffs.first().ok_or(Error::NonInvertible)?;
        let li = lead.try_inv().ok_or(Error::NonInvertible)?;
        let rel = s.coeffs.len();
        let mut b: Vec<S> = Vec::with_capacity(rel);
        b.push(li.clone());
        for n in 1..rel {
            let mut acc = S::zero();
            for j in 1..=n {
                acc = acc + s.coeffs[j].clone() * b[n - j].clone();
            }
            b.push(-(acc * li.clone()));
        }
        let kind = match s.kind {
            SeriesKind::G => SeriesKind::F,
            SeriesKind::F => SeriesKind::G,
            SeriesKind::General => SeriesKind::General,
        };
        Ok(Self::new(kind, -s.val, b, s.prec - 2 * s.val))
    }

    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Self::constant(S::one(), self.prec.max(1));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes `z ↦ g(z)` into `self`. `g` must behave like `c·z + O(1)`.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        let gn = g.normalized();
        if gn.val != -1 {
            return Err(Error::KindMismatch(format!(
                "inner series must have a simple pole at infinity, got valuation {}",
                gn.val
            )));
        }
        let h = gn.reciprocal()?; // w ↦ 1/g, valuation 1
        let mut acc = Self::constant(S::zero(), self.prec);
        let mut hp: Option<Self> = None;
        let mut gp: Option<Self> = None;
        for k in 1..self.prec {
            hp = Some(match hp {
                None => h.clone(),
                Some(p) => p.mul(&h),
            });
            let a = self.coeff(k).unwrap();
            if !a.is_zero() {
                acc = acc.add(&hp.as_ref().unwrap().scale(&a));
            }
        }
        if let Some(a0) = self.coeff(0) {
            acc = acc.add(&Self::constant(a0, self.prec));
        }
        for k in (self.val..0).rev() {
            gp = Some(match gp {
                None => gn.clone(),
                Some(p) => p.mul(&gn),
            });
            let a = self.coeff(k).unwrap();
            if !a.is_zero() {
                acc = acc.add(&gp.as_ref().unwrap().scale(&a));
            }
        }
        let kind = match (self.kind, g.kind) {
            (SeriesKind::F, SeriesKind::F) => SeriesKind::F,
            (SeriesKind::G, SeriesKind::F) => SeriesKind::G,
            _ => SeriesKind::General,
        };
        Ok(acc.truncate(self.prec).with_kind(kind))
    }

    /// Compositional inverse of an F-type series `z + d₀ + d₁/z + …`.
    pub fn comp_inverse(&self) -> Result<Self> {
        if self.val != -1 || !self.coeffs[0].is_one() {
            return Err(Error::KindMismatch("compositional inverse needs leading term z".into()));
        }
        let p = self.prec;
        let z = Self::z(p);
        let r = self.sub(&z);
        // H = z − R(H); each pass fixes at least two more coefficients.
        let mut h = z.clone();
        for _ in 0..(p + 3).max(1) {
            let next = z.sub(&r.compose(&h)?).truncate(p);
            if next.coeffs == h.coeffs && next.prec == h.prec {
                break;
            }
            h = next;
        }
        Ok(h.with_kind(SeriesKind::F))
    }

    /// Formal `d/dz`, using `d/dz w^k = −k w^(k+1)`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.clone() * S::from_i64(-(self.val + i as i64)))
            .collect();
        Self::new(SeriesKind::General, self.val + 1, coeffs, self.prec + 1)
    }

    /// `G = Σ_{n≤K} m_n z^{-n-1}` for a probability moment sequence.
    pub fn g_from_moments(m: &[S], k: usize) -> Result<Self> {
        if m.first().map(|m0| !m0.is_one()).unwrap_or(true) {
            return Err(Error::NotADistribution("m₀ must equal 1".into()));
        }
        Self::g_from_sequence(m, k)
    }

    /// As [`Self::g_from_moments`] without the normalization requirement.
    pub fn g_from_sequence(m: &[S], k: usize) -> Result<Self> {
        if m.len() < k + 1 {
            return Err(Error::OrderShortfall { need: k, have: m.len().saturating_sub(1) });
        }
        Ok(Self::new(SeriesKind::G, 1, m[..=k].to_vec(), k as i64 + 2))
    }

    /// Reads off `m_0, …, m_K` from a series `Σ m_n z^{-n-1}`, where `K` is the last exact index.
    pub fn moments_from_g(&self) -> Result<Vec<S>> {
        if (self.val..min(1, self.prec)).any(|k| !self.coeff(k).unwrap().is_zero()) {
            return Err(Error::KindMismatch("not of G-type: nonzero polynomial part".into()));
        }
        Ok((1..self.prec).map(|k| self.coeff(k).unwrap()).collect())
    }

    /// Largest `K` such that `m_K` is known, if this is read as a G-type series.
    pub fn g_order(&self) -> Option<usize> {
        if self.prec >= 2 {
            Some((self.prec - 2) as usize)
        } else {
            None
        }
    }
}
