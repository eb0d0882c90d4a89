//! Complex matrices stored as real and imaginary parts, so products run on
//! the real kernels.

use nalgebra::{Complex, DMatrix};

pub type C64 = Complex<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { re: DMatrix::zeros(rows, cols), im: DMatrix::zeros(rows, cols) }
    }

    pub fn from_complex(m: &DMatrix<C64>) -> Self {
        CMat { re: m.map(|z| z.re), im: m.map(|z| z.im) }
    }

    pub fn to_complex(&self) -> DMatrix<C64> {
        self.re.zip_map(&self.im, C64::new)
    }

    pub fn nrows(&self) -> usize {
        self.re.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.re.ncols()
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        CMat { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }

    /// `self* · o`.
    pub fn adj_mul(&self, o: &CMat) -> CMat {
        CMat { re: self.re.tr_mul(&o.re) + self.im.tr_mul(&o.im), im: self.re.tr_mul(&o.im) - self.im.tr_mul(&o.re) }
    }

    pub fn adjoint(&self) -> CMat {
        CMat { re: self.re.transpose(), im: -self.im.transpose() }
    }

    pub fn scale_columns(&self, d: &[f64]) -> CMat {
        let mut out = self.clone();
        for (j, &s) in d.iter().enumerate() {
            out.re.column_mut(j).scale_mut(s);
            out.im.column_mut(j).scale_mut(s);
        }
        out
    }

    pub fn trace(&self) -> C64 {
        C64::new(self.re.trace(), self.im.trace())
    }

    /// `tr(self · o)` without forming the product.
    pub fn trace_mul(&self, o: &CMat) -> C64 {
        let (mut re, mut im) = (0.0, 0.0);
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                let (ar, ai, br, bi) = (self.re[(i, j)], self.im[(i, j)], o.re[(j, i)], o.im[(j, i)]);
                re += ar * br - ai * bi;
                im += ar * bi + ai * br;
            }
        }
        C64::new(re, im)
    }
}

/// A dense matrix, or a finite-rank one as `l · r*`.
#[derive(Clone, Debug)]
pub enum Op {
    Dense(CMat),
    LowRank { l: CMat, r: CMat },
}

impl Op {
    pub fn mul(&self, o: &Op) -> Op {
        match (self, o) {
            (Op::Dense(a), Op::Dense(b)) => Op::Dense(a.mul(b)),
            (Op::Dense(a), Op::LowRank { l, r }) => Op::LowRank { l: a.mul(l), r: r.clone() },
            (Op::LowRank { l, r }, Op::Dense(b)) => Op::LowRank { l: l.clone(), r: b.adj_mul(r) },
            (Op::LowRank { l: l1, r: r1 }, Op::LowRank { l: l2, r: r2 }) => {
                Op::LowRank { l: l1.mul(&r1.adj_mul(l2)), r: r2.clone() }
            }
        }
    }

    pub fn trace(&self) -> C64 {
        match self {
            Op::Dense(a) => a.trace(),
            Op::LowRank { l, r } => r.adj_mul(l).trace(),
        }
    }

    /// `tr(self · o)`.
    pub fn trace_mul(&self, o: &Op) -> C64 {
        match (self, o) {
            (Op::Dense(a), Op::Dense(b)) => a.trace_mul(b),
            (Op::Dense(d), Op::LowRank { l, r }) | (Op::LowRank { l, r }, Op::Dense(d)) => r.adj_mul(&d.mul(l)).trace(),
            (Op::LowRank { l: l1, r: r1 }, Op::LowRank { l: l2, r: r2 }) => r1.adj_mul(l2).trace_mul(&r2.adj_mul(l1)),
        }
    }

    pub fn to_dense(&self) -> CMat {
        match self {
            Op::Dense(a) => a.clone(),
            Op::LowRank { l, r } => l.mul(&r.adjoint()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, seed: usize) -> CMat {
        CMat {
            re: DMatrix::from_fn(rows, cols, |i, j| ((i * 7 + j * 3 + seed) % 5) as f64 - 2.0),
            im: DMatrix::from_fn(rows, cols, |i, j| ((i * 2 + j * 5 + seed) % 7) as f64 - 3.0),
        }
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-9
    }

    #[test]
    fn matches_complex_arithmetic() {
        let (a, b) = (m(5, 5, 0), m(5, 5, 1));
        assert!((a.mul(&b).to_complex() - a.to_complex() * b.to_complex()).norm() < 1e-9);
        assert!((a.adj_mul(&b).to_complex() - a.to_complex().adjoint() * b.to_complex()).norm() < 1e-9);
        assert!(close(a.trace_mul(&b), (a.to_complex() * b.to_complex()).trace()));
    }

    #[test]
    fn low_rank_agrees_with_dense() {
        let d = Op::Dense(m(6, 6, 2));
        let f = Op::LowRank { l: m(6, 2, 3), r: m(6, 2, 4) };
        let g = Op::LowRank { l: m(6, 1, 5), r: m(6, 1, 6) };
        for (x, y) in [(&d, &f), (&f, &d), (&f, &g), (&d, &d)] {
            let dense = x.to_dense().mul(&y.to_dense());
            assert!((x.mul(y).to_dense().to_complex() - dense.to_complex()).norm() < 1e-8);
            assert!(close(x.trace_mul(y), dense.trace()));
        }
        assert!(close(f.trace(), f.to_dense().trace()));
    }
}
