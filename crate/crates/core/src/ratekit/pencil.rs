use nalgebra::{Complex, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::numkit::{
    herm_eig, kernel_split_with_floor, pinv_with_floor, random::gaussian, CMat, CVec, HermMatrix,
    ToleranceConfig,
};
use crate::scalar::{lit, Extended, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PencilMethod {
    SchurGeig,
    BisectionOracle,
}

/// Value of sup{r ≥ 0 : a − r·b ⪰ 0}.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilResult<T: Real> {
    pub value: Extended<T>,
    /// Unit vector attaining the infimum of v†av / v†bv.
    pub minimizing_direction: Option<CVec<T>>,
    pub method: PencilMethod,
    /// Eigenvalues of b that were treated as zero.
    pub kernel_eigenvalues: Vec<T>,
}

fn check_pair<T: Real>(a: &HermMatrix<T>, b: &HermMatrix<T>, tol: &ToleranceConfig) -> Result<(T, T)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let top = |m: &HermMatrix<T>| -> Result<T> {
        let (v, _) = herm_eig(m)?;
        crate::numkit::check_psd_spectrum(&v, tol)?;
        Ok(v.iter().fold(T::zero(), |acc, &x| acc.max(x)))
    };
    Ok((top(a)?, top(b)?))
}

/// Largest r with a − r·b PSD, by a Schur complement onto supp(b).
pub fn sup_ratio<T: Real>(
    a: &HermMatrix<T>,
    b: &HermMatrix<T>,
    tol: &ToleranceConfig,
) -> Result<PencilResult<T>> {
    sup_ratio_with_floor(a, b, tol, T::zero())
}

/// As [`sup_ratio`], with kernels judged against `max(λ_max(a), λ_max(b), scale)`. Tensors
/// built from generators pass their natural scale so that roundoff-sized b counts as zero.
pub fn sup_ratio_with_floor<T: Real>(
    a: &HermMatrix<T>,
    b: &HermMatrix<T>,
    tol: &ToleranceConfig,
    scale: T,
) -> Result<PencilResult<T>> {
    let (amax, bmax) = check_pair(a, b, tol)?;
    let scale = amax.max(bmax).max(scale);
    let split = kernel_split_with_floor(b, tol, scale)?;
    if split.support.ncols() == 0 {
        return Ok(PencilResult {
            value: Extended::PosInf,
            minimizing_direction: None,
            method: PencilMethod::SchurGeig,
            kernel_eigenvalues: split.kernel_eigenvalues,
        });
    }
    let s = &split.support;
    let k = &split.kernel;
    let am = a.mat();
    let a_ss = s.adjoint() * am * s;
    let a_sk = s.adjoint() * am * k;
    let a_kk = k.adjoint() * am * k;
    let a_kk_pinv = pinv_with_floor(&a_kk, tol, scale)?;
    let schur = &a_ss - &a_sk * &a_kk_pinv * a_sk.adjoint();
    let inv_sqrt = DVector::from_iterator(
        split.support_eigenvalues.len(),
        split.support_eigenvalues.iter().map(|&l| Complex::new(T::one() / l.sqrt(), T::zero())),
    );
    let d = CMat::from_diagonal(&inv_sqrt);
    let m = HermMatrix::from_hermitian_part(&(&d * schur * &d));
    let (vals, vecs) = herm_eig(&m)?;
    let vs = &d * vecs.column(0);
    let v = s * &vs - k * (&a_kk_pinv * (a_sk.adjoint() * &vs));
    let n = v.norm();
    Ok(PencilResult {
        value: Extended::Finite(vals[0].max(T::zero())),
        minimizing_direction: if n > T::zero() { Some(v.unscale(n)) } else { None },
        method: PencilMethod::SchurGeig,
        kernel_eigenvalues: split.kernel_eigenvalues,
    })
}

/// Bisection settings for [`sup_ratio_oracle`].
#[derive(Debug, Clone, Copy)]
pub struct BisectionConfig {
    pub iterations: usize,
    /// PSD test: λ_min(a − r·b) ≥ −slack·(λ_max(a) + r·λ_max(b)).
    pub slack: f64,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        Self { iterations: 200, slack: 1e-13 }
    }
}

/// Independent check of [`sup_ratio`]: bisection on r with a minimum-eigenvalue test.
pub fn sup_ratio_oracle<T: Real>(
    a: &HermMatrix<T>,
    b: &HermMatrix<T>,
    cfg: &BisectionConfig,
    tol: &ToleranceConfig,
) -> Result<PencilResult<T>> {
    let (amax, bmax) = check_pair(a, b, tol)?;
    let done = |value| PencilResult {
        value,
        minimizing_direction: None,
        method: PencilMethod::BisectionOracle,
        kernel_eigenvalues: Vec::new(),
    };
    if bmax <= lit::<T>(tol.tol_kernel) * amax.max(bmax) || bmax == T::zero() {
        return Ok(done(Extended::PosInf));
    }
    let slack = lit::<T>(cfg.slack);
    let psd = |r: T| -> Result<bool> {
        let m = HermMatrix::from_hermitian_part(&(a.mat() - b.mat().scale(r)));
        let (v, _) = herm_eig(&m)?;
        Ok(v[0] >= -slack * (amax + r * bmax))
    };
    let (mut lo, mut hi) = (T::zero(), T::one());
    let cap = lit::<T>(1e300);
    while psd(hi)? {
        lo = hi;
        hi *= lit(2.0);
        if hi > cap {
            return Err(Error::NonConvergence);
        }
    }
    for _ in 0..cfg.iterations {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if psd(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(done(Extended::Finite((lo + hi) * lit(0.5))))
}

/// min over `draws` Gaussian directions of v†av / v†bv; an upper bound on the pencil value.
pub fn sample_ratio_upper<T: Real, R: Rng + ?Sized>(
    a: &HermMatrix<T>,
    b: &HermMatrix<T>,
    draws: usize,
    rng: &mut R,
) -> Extended<T> {
    let n = a.dim();
    let bnorm = b.mat().iter().fold(T::zero(), |m, z| m.max(z.norm_sqr())).sqrt();
    let floor = lit::<T>(1e-12) * bnorm;
    let mut best = Extended::PosInf;
    for _ in 0..draws {
        let v = CVec::from_fn(n, |_, _| gaussian::<T, R>(rng));
        let vb = v.dotc(&(b.mat() * &v)).re / v.norm_squared();
        if vb > floor {
            let va = v.dotc(&(a.mat() * &v)).re / v.norm_squared();
            best = best.min(Extended::Finite(va / vb));
        }
    }
    best
}

/// D_max(a‖b) = −log₂ sup{s : b ⪰ s·a}, in bits.
pub fn dmax<T: Real>(a: &HermMatrix<T>, b: &HermMatrix<T>, tol: &ToleranceConfig) -> Result<Extended<T>> {
    Ok(sup_ratio(b, a, tol)?.value.neg_log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::random::random_psd;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(d: &[f64]) -> HermMatrix<f64> {
        HermMatrix::from_real_diagonal(d)
    }

    #[test]
    fn simple_values() {
        let tol = ToleranceConfig::default();
        let b = diag(&[1.0, 1.0]);
        assert_eq!(sup_ratio(&diag(&[2.0, 1.0]), &b, &tol).unwrap().value, Extended::Finite(1.0));
        let a = diag(&[3.0, 0.5, 2.0]);
        let r = sup_ratio(&a, &a, &tol).unwrap().value.to_f64();
        assert!((r - 1.0).abs() < 1e-14);
        assert!(sup_ratio(&a, &diag(&[0.0, 0.0, 0.0]), &tol).unwrap().value.is_pos_inf());
        assert_eq!(sup_ratio(&diag(&[0.0, 1.0]), &diag(&[1.0, 1.0]), &tol).unwrap().value, Extended::Finite(0.0));
    }

    #[test]
    fn singular_b_uses_schur_complement() {
        // a = [[2,1],[1,1]], b = diag(1,0): a − r·b PSD iff (2−r)·1 ≥ 1, so r* = 1
        let tol = ToleranceConfig::default();
        let a = HermMatrix::from_hermitian_part(&CMat::from_row_slice(
            2,
            2,
            &[Complex::new(2.0, 0.0), Complex::new(1.0, 0.0), Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)],
        ));
        let r = sup_ratio(&a, &diag(&[1.0, 0.0]), &tol).unwrap();
        assert!((r.value.to_f64() - 1.0).abs() < 1e-12);
        let v = r.minimizing_direction.unwrap();
        // minimizer ∝ (1, −1)
        assert!((v[0] + v[1]).norm() < 1e-12);
        assert_eq!(r.kernel_eigenvalues.len(), 1);
    }

    #[test]
    fn rejects_indefinite_input() {
        let tol = ToleranceConfig::default();
        assert!(matches!(
            sup_ratio(&diag(&[1.0, -1.0]), &diag(&[1.0, 1.0]), &tol),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn oracle_agrees_on_random_pairs() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..60 {
            let d = 1 + i % 5;
            let a = random_psd::<f64, _>(d, 1 + (i / 5) % d, &mut rng);
            let b = random_psd::<f64, _>(d, 1 + (i / 3) % d, &mut rng);
            let r = sup_ratio(&a, &b, &tol).unwrap().value.to_f64();
            let o = sup_ratio_oracle(&a, &b, &BisectionConfig::default(), &tol).unwrap().value.to_f64();
            assert!((r - o).abs() <= 1e-6 * r.max(1.0), "{i}: {r} vs {o}");
            let up = sample_ratio_upper(&a, &b, 200, &mut rng).to_f64();
            assert!(up >= r - 1e-9);
        }
    }

    #[test]
    fn minimizing_direction_attains_value() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = random_psd::<f64, _>(4, 4, &mut rng);
            let b = random_psd::<f64, _>(4, 2, &mut rng);
            let r = sup_ratio(&a, &b, &tol).unwrap();
            let v = r.minimizing_direction.unwrap();
            let q = v.dotc(&(a.mat() * &v)).re / v.dotc(&(b.mat() * &v)).re;
            assert!((q - r.value.to_f64()).abs() < 1e-8 * q.max(1.0));
        }
    }

    #[test]
    fn dmax_cases() {
        let tol = ToleranceConfig::default();
        let a = diag(&[1.0, 3.0]);
        assert!(dmax(&a, &a, &tol).unwrap().to_f64().abs() < 1e-14);
        assert!((dmax(&a.scale(2.0), &a, &tol).unwrap().to_f64() - 1.0).abs() < 1e-14);
        assert!(dmax(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), &tol).unwrap().is_pos_inf());
        assert_eq!(dmax(&diag(&[0.0, 0.0]), &a, &tol).unwrap(), Extended::NegInf);
    }
}
