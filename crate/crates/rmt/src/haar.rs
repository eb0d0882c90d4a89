use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::cmat::C64;

fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// Thin QR of a Gaussian matrix, with columns rotated so that `R` has a
/// positive diagonal.
fn orthonormalize(g: DMatrix<C64>) -> DMatrix<C64> {
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..q.ncols() {
        let d = r[(k, k)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        }
    }
    q
}

/// A Haar-distributed `n × n` unitary.
pub fn sample_haar(n: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    orthonormalize(gaussian(rng, n, n))
}

/// The first `r` columns of a Haar unitary.
pub fn haar_columns(n: usize, r: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    orthonormalize(gaussian(rng, n, r))
}
