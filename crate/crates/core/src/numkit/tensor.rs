use nalgebra::Complex;

use super::types::{CMat, CVec};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default ceiling on tensor-power dimensions.
pub const DEFAULT_TENSOR_CAP: usize = 4096;

/// Environment variable that overrides [`DEFAULT_TENSOR_CAP`].
pub const TENSOR_CAP_ENV: &str = "ASYMKIT_TENSOR_CAP";

/// Cap from `ASYMKIT_TENSOR_CAP`, falling back to the default when unset or unparsable.
pub fn tensor_cap_from_env() -> usize {
    std::env::var(TENSOR_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&c| c > 0)
        .unwrap_or(DEFAULT_TENSOR_CAP)
}

/// `base^n` with an overflow-safe cap check.
pub fn checked_power_dim(base: usize, n: usize, cap: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc = acc
            .checked_mul(base)
            .filter(|&d| d <= cap)
            .ok_or(Error::CapExceeded { dim: base.saturating_pow(n as u32), cap })?;
    }
    Ok(acc)
}

pub fn tensor_product<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a.kronecker(b)
}

pub fn tensor_product_vec<T: Real>(a: &CVec<T>, b: &CVec<T>) -> CVec<T> {
    a.kronecker(b)
}

/// m^{⊗n}, refusing results larger than `cap` in either dimension.
pub fn tensor_power<T: Real>(m: &CMat<T>, n: usize, cap: usize) -> Result<CMat<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("tensor power needs n ≥ 1".into()));
    }
    checked_power_dim(m.nrows(), n, cap)?;
    checked_power_dim(m.ncols(), n, cap)?;
    let mut out = m.clone();
    for _ in 1..n {
        out = out.kronecker(m);
    }
    Ok(out)
}

pub fn tensor_power_vec<T: Real>(v: &CVec<T>, n: usize, cap: usize) -> Result<CVec<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("tensor power needs n ≥ 1".into()));
    }
    checked_power_dim(v.len(), n, cap)?;
    let mut out = v.clone();
    for _ in 1..n {
        out = out.kronecker(v);
    }
    Ok(out)
}

/// I_{left} ⊗ op ⊗ I_{right}.
pub fn embed<T: Real>(op: &CMat<T>, left: usize, right: usize) -> CMat<T> {
    let l = CMat::<T>::identity(left, left);
    let r = CMat::<T>::identity(right, right);
    l.kronecker(op).kronecker(&r)
}

/// Σ_k I^{⊗k−1} ⊗ op ⊗ I^{⊗n−k} on (dim op)^n.
pub fn collective<T: Real>(op: &CMat<T>, n: usize, cap: usize) -> Result<CMat<T>> {
    let d = op.nrows();
    let total = checked_power_dim(d, n, cap)?;
    let mut acc = CMat::zeros(total, total);
    for k in 0..n {
        let left = d.pow(k as u32);
        let right = d.pow((n - k - 1) as u32);
        acc += embed(op, left, right);
    }
    Ok(acc)
}

/// Kets |k⟩ of dimension d as a column vector.
pub fn basis_vec<T: Real>(d: usize, k: usize) -> CVec<T> {
    let mut v = CVec::zeros(d);
    v[k] = Complex::new(T::one(), T::zero());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::linalg::frobenius;
    use crate::numkit::random::random_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_products() {
        let i2 = CMat::<f64>::identity(2, 2);
        assert_eq!(tensor_product(&i2, &i2), CMat::identity(4, 4));
    }

    #[test]
    fn projector_product_index() {
        let p0 = basis_vec::<f64>(2, 0) * basis_vec::<f64>(2, 0).adjoint();
        let p1 = basis_vec::<f64>(2, 1) * basis_vec::<f64>(2, 1).adjoint();
        let m = tensor_product(&p0, &p1);
        assert_eq!(m[(1, 1)].re, 1.0);
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn mixed_product_and_associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (a, b, c, d) = (
            random_matrix::<f64, _>(2, 2, &mut rng),
            random_matrix::<f64, _>(2, 2, &mut rng),
            random_matrix::<f64, _>(2, 2, &mut rng),
            random_matrix::<f64, _>(2, 2, &mut rng),
        );
        let lhs = tensor_product(&a, &b) * tensor_product(&c, &d);
        let rhs = tensor_product(&(&a * &c), &(&b * &d));
        assert!(frobenius(&(lhs - rhs)) < 1e-12);
        let l = tensor_product(&tensor_product(&a, &b), &c);
        let r = tensor_product(&a, &tensor_product(&b, &c));
        assert!(frobenius(&(l - r)) < 1e-12);
    }

    #[test]
    fn cap_enforced() {
        let m = CMat::<f64>::identity(2, 2);
        assert!(tensor_power(&m, 12, 4096).is_ok());
        assert!(matches!(tensor_power(&m, 13, 4096), Err(Error::CapExceeded { .. })));
        assert!(matches!(checked_power_dim(3, 200, 4096), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn collective_sigma_z() {
        let z = CMat::from_diagonal(&CVec::from_vec(vec![Complex::new(0.5, 0.0), Complex::new(-0.5, 0.0)]));
        let c = collective(&z, 2, 4096).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| c[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 0.0, 0.0, -1.0]);
    }
}
