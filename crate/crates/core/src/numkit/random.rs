//! Seeded random matrices and states for property suites.

use nalgebra::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use super::types::{CMat, CVec, DensityMatrix, HermMatrix, PureState};
use crate::scalar::{cabs, lit, Real};

pub fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(lit(re), lit(im))
}

pub fn random_matrix<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat<T> {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermMatrix<T> {
    HermMatrix::from_hermitian_part(&random_matrix(d, d, rng))
}

/// G G† with G of shape d × rank.
pub fn random_psd<T: Real, R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> HermMatrix<T> {
    let g = random_matrix::<T, R>(d, rank, rng);
    HermMatrix::from_hermitian_part(&(&g * g.adjoint()))
}

pub fn random_state<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState<T> {
    let v = CVec::from_fn(d, |_, _| gaussian(rng));
    PureState::normalized(v).expect("gaussian vector is nonzero")
}

pub fn random_density<T: Real, R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityMatrix<T> {
    let p = random_psd::<T, R>(d, rank.max(1), rng);
    let tr = p.mat().trace().re;
    DensityMatrix::from_trusted(&p.mat().unscale(tr))
}

/// Haar unitary from the QR decomposition of a Ginibre matrix with phase correction.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat<T> {
    isometry(d, d, rng)
}

/// Random isometry (rows ≥ cols) with orthonormal columns.
pub fn isometry<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat<T> {
    let g = random_matrix::<T, R>(rows, cols, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let rj = r[(j, j)];
        let n = cabs(rj);
        if n > T::zero() {
            let ph = rj.unscale(n);
            q.column_mut(j).iter_mut().for_each(|z| *z *= ph);
        }
    }
    q
}

/// Uniform real vector in [−a, a]^n.
pub fn uniform_vec<T: Real, R: Rng + ?Sized>(n: usize, a: f64, rng: &mut R) -> Vec<T> {
    (0..n).map(|_| lit(rng.random_range(-a..=a))).collect()
}
