use nalgebra::{Complex, DVector, SymmetricEigen, SVD};

use super::types::{check_finite, CMat, CVec, HermMatrix, ToleranceConfig};
use crate::error::{Error, Result};
use crate::scalar::{cabs, lit, to_f64, Real};

const MAX_SWEEPS: usize = 100_000;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn herm_eig<T: Real>(m: &HermMatrix<T>) -> Result<(DVector<T>, CMat<T>)> {
    let a = m.mat();
    let n = a.nrows();
    if n == 0 {
        return Ok((DVector::zeros(0), CMat::zeros(0, 0)));
    }
    check_finite(a)?;
    let eig = SymmetricEigen::try_new(a.clone(), T::default_epsilon(), MAX_SWEEPS)
        .ok_or(Error::NonConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((vals, vecs))
}

/// Largest and smallest eigenvalue.
pub fn eig_range<T: Real>(m: &HermMatrix<T>) -> Result<(T, T)> {
    let (v, _) = herm_eig(m)?;
    if v.is_empty() {
        return Ok((T::zero(), T::zero()));
    }
    Ok((v[0], v[v.len() - 1]))
}

/// V diag(f(λ)) V†.
pub fn spectral_map<T: Real>(vals: &DVector<T>, vecs: &CMat<T>, f: impl Fn(T) -> Complex<T>) -> CMat<T> {
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        let s = f(l);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
    }
    scaled * vecs.adjoint()
}

/// Moore–Penrose pseudo-inverse; singular values below `tol_kernel·σ_max` are dropped.
pub fn pinv<T: Real>(m: &CMat<T>, tol: &ToleranceConfig) -> Result<CMat<T>> {
    pinv_with_floor(m, tol, T::zero())
}

/// As [`pinv`], with the cut taken relative to `max(σ_max, scale)`. Callers that know
/// the natural scale of the problem pass it so that a numerically-zero matrix stays zero.
pub fn pinv_with_floor<T: Real>(m: &CMat<T>, tol: &ToleranceConfig, scale: T) -> Result<CMat<T>> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Ok(CMat::zeros(c, r));
    }
    check_finite(m)?;
    let svd = SVD::try_new(m.clone(), true, true, T::default_epsilon(), MAX_SWEEPS)
        .ok_or(Error::NonConvergence)?;
    let u = svd.u.as_ref().ok_or(Error::NonConvergence)?;
    let vt = svd.v_t.as_ref().ok_or(Error::NonConvergence)?;
    let smax = svd.singular_values.iter().fold(T::zero(), |a, &s| a.max(s));
    let cut = lit::<T>(tol.tol_kernel) * smax.max(scale);
    let mut out = CMat::zeros(c, r);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cut && s > T::zero() {
            let vk = vt.row(k).adjoint();
            let uk = u.column(k);
            out += (vk * uk.adjoint()).unscale(s);
        }
    }
    Ok(out)
}

/// Principal square root of a PSD matrix. Small negative eigenvalues are clipped.
pub fn psd_sqrt<T: Real>(m: &HermMatrix<T>, tol: &ToleranceConfig) -> Result<HermMatrix<T>> {
    let (vals, vecs) = herm_eig(m)?;
    check_psd_spectrum(&vals, tol)?;
    let s = spectral_map(&vals, &vecs, |l| Complex::new(l.max(T::zero()).sqrt(), T::zero()));
    Ok(HermMatrix::from_hermitian_part(&s))
}

pub(crate) fn check_psd_spectrum<T: Real>(vals: &DVector<T>, tol: &ToleranceConfig) -> Result<()> {
    if vals.is_empty() {
        return Ok(());
    }
    let lmin = vals[0];
    let lmax = vals[vals.len() - 1].max(T::zero());
    if lmin < -lit::<T>(tol.tol_psd) * lmax || (lmax == T::zero() && lmin < T::zero()) {
        return Err(Error::NotPsd { min_eigenvalue: to_f64(lmin) });
    }
    Ok(())
}

/// Support and kernel bases of a PSD matrix (columns orthonormal).
#[derive(Debug, Clone)]
pub struct KernelSplit<T: Real> {
    pub support: CMat<T>,
    pub kernel: CMat<T>,
    /// Eigenvalues of the support columns, in column order.
    pub support_eigenvalues: Vec<T>,
    /// Eigenvalues classified as kernel (recorded for auditing borderline cases).
    pub kernel_eigenvalues: Vec<T>,
}

/// Splits on the relative threshold `tol_kernel·λ_max`.
pub fn kernel_split<T: Real>(m: &HermMatrix<T>, tol: &ToleranceConfig) -> Result<KernelSplit<T>> {
    kernel_split_with_floor(m, tol, T::zero())
}

/// Splits on `tol_kernel·max(λ_max, scale)`; an all-zero matrix has empty support.
pub fn kernel_split_with_floor<T: Real>(
    m: &HermMatrix<T>,
    tol: &ToleranceConfig,
    scale: T,
) -> Result<KernelSplit<T>> {
    let (vals, vecs) = herm_eig(m)?;
    let n = vals.len();
    let lmax = if n == 0 { T::zero() } else { vals[n - 1] };
    let cut = lit::<T>(tol.tol_kernel) * lmax.max(scale).max(T::zero());
    let mut sup = Vec::new();
    let mut ker = Vec::new();
    for j in 0..n {
        if vals[j] > cut && vals[j] > T::zero() {
            sup.push(j);
        } else {
            ker.push(j);
        }
    }
    let pick = |idx: &[usize]| {
        let mut out = CMat::zeros(n, idx.len());
        for (c, &j) in idx.iter().enumerate() {
            out.set_column(c, &vecs.column(j));
        }
        out
    };
    Ok(KernelSplit {
        support: pick(&sup),
        kernel: pick(&ker),
        support_eigenvalues: sup.iter().map(|&j| vals[j]).collect(),
        kernel_eigenvalues: ker.iter().map(|&j| vals[j]).collect(),
    })
}

/// e^{i t H} for Hermitian H, via its eigendecomposition.
pub fn expm_i<T: Real>(h: &HermMatrix<T>, t: T) -> Result<CMat<T>> {
    let (vals, vecs) = herm_eig(h)?;
    Ok(spectral_map(&vals, &vecs, |l| {
        let a = l * t;
        Complex::new(a.cos(), a.sin())
    }))
}

/// ⟨ψ|A|ψ⟩.
pub fn expectation<T: Real>(psi: &CVec<T>, a: &CMat<T>) -> Complex<T> {
    psi.dotc(&(a * psi))
}

pub fn commutator<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a * b - b * a
}

/// max |U†U − I|.
pub fn unitarity_defect<T: Real>(u: &CMat<T>) -> T {
    let n = u.ncols();
    let g = u.adjoint() * u - CMat::<T>::identity(n, n);
    g.iter().fold(T::zero(), |a, z| a.max(cabs(*z)))
}

pub fn frobenius<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt()
}

/// Orthonormal basis of the complement of `v` by Gram–Schmidt over e₀, e₁, … in order.
pub fn orthonormal_complement<T: Real>(v: &CVec<T>) -> CMat<T> {
    let d = v.len();
    let mut kept: Vec<CVec<T>> = vec![v.unscale(v.norm())];
    let mut out: Vec<CVec<T>> = Vec::with_capacity(d.saturating_sub(1));
    let thresh = lit::<T>(1e-6);
    for j in 0..d {
        if out.len() + 1 == d {
            break;
        }
        let mut e = CVec::zeros(d);
        e[j] = Complex::new(T::one(), T::zero());
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for b in kept.iter() {
                let c = b.dotc(&e);
                e -= b * c;
            }
        }
        let n = e.norm();
        if n > thresh {
            let e = e.unscale(n);
            kept.push(e.clone());
            out.push(e);
        }
    }
    let mut m = CMat::zeros(d, out.len());
    for (j, c) in out.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::random::{random_hermitian, random_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn eig_diagonal_sorted() {
        let h = HermMatrix::from_real_diagonal(&[2.0_f64, 1.0]);
        let (v, u) = herm_eig(&h).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 2.0).abs() < 1e-15);
        assert!((u[(1, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eig_pauli_x() {
        let tol = ToleranceConfig::default();
        let x = CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let (v, _) = herm_eig(&HermMatrix::new(x, &tol).unwrap()).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [1usize, 2, 6, 17, 64] {
            let h = random_hermitian::<f64, _>(d, &mut rng);
            let (v, u) = herm_eig(&h).unwrap();
            let rec = spectral_map(&v, &u, |l| c(l, 0.0));
            let norm = frobenius(h.mat());
            assert!(frobenius(&(rec - h.mat())) <= 1e-12 * norm.max(1.0), "d={d}");
            assert!(unitarity_defect(&u) < 1e-12);
            assert!(v.as_slice().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn pinv_cases() {
        let tol = ToleranceConfig::default();
        let i3 = CMat::<f64>::identity(3, 3);
        assert!(frobenius(&(pinv(&i3, &tol).unwrap() - &i3)) < 1e-14);
        let d = CMat::from_row_slice(2, 2, &[c(2., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        let p = pinv(&d, &tol).unwrap();
        assert!((p[(0, 0)] - c(0.5, 0.)).norm() < 1e-15 && p[(1, 1)].norm() < 1e-15);
        let z = CMat::<f64>::zeros(2, 3);
        assert_eq!(pinv(&z, &tol).unwrap(), CMat::zeros(3, 2));
    }

    #[test]
    fn pinv_penrose_identities() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..200 {
            let (r, k) = (1 + trial % 5, 1 + (trial / 5) % 5);
            let a = random_matrix::<f64, _>(r, k, &mut rng);
            let p = pinv(&a, &tol).unwrap();
            assert!(frobenius(&(&a * &p * &a - &a)) < 1e-10);
            assert!(frobenius(&(&p * &a * &p - &p)) < 1e-10);
            let ap = &a * &p;
            let pa = &p * &a;
            assert!(frobenius(&(&ap - ap.adjoint())) < 1e-10);
            assert!(frobenius(&(&pa - pa.adjoint())) < 1e-10);
        }
    }

    #[test]
    fn psd_sqrt_cases() {
        let tol = ToleranceConfig::default();
        let s = psd_sqrt(&HermMatrix::from_real_diagonal(&[4.0_f64, 1.0]), &tol).unwrap();
        assert!((s.mat()[(0, 0)].re - 2.0).abs() < 1e-14 && (s.mat()[(1, 1)].re - 1.0).abs() < 1e-14);
        let z = psd_sqrt(&HermMatrix::<f64>::zeros(3), &tol).unwrap();
        assert!(frobenius(z.mat()) == 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix::<f64, _>(4, 4, &mut rng);
        let m = HermMatrix::from_hermitian_part(&(a.adjoint() * &a));
        let s = psd_sqrt(&m, &tol).unwrap();
        assert!(frobenius(&(s.mat() * s.mat() - m.mat())) < 1e-10);
        let neg = HermMatrix::from_real_diagonal(&[1.0_f64, -0.5]);
        assert!(matches!(psd_sqrt(&neg, &tol), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn kernel_split_cases() {
        let tol = ToleranceConfig::default();
        let ks = kernel_split(&HermMatrix::from_real_diagonal(&[1.0_f64, 0.0]), &tol).unwrap();
        assert_eq!((ks.support.ncols(), ks.kernel.ncols()), (1, 1));
        assert!((ks.support[(0, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((ks.kernel[(1, 0)].norm() - 1.0).abs() < 1e-15);
        let full = kernel_split(&HermMatrix::from_real_diagonal(&[1.0_f64, 2.0, 3.0]), &tol).unwrap();
        assert_eq!(full.kernel.ncols(), 0);
        let zero = kernel_split(&HermMatrix::<f64>::zeros(2), &tol).unwrap();
        assert_eq!(zero.support.ncols(), 0);
    }

    #[test]
    fn complement_is_orthonormal() {
        let v = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.0)]);
        let b = orthonormal_complement(&v);
        assert_eq!(b.ncols(), 2);
        assert!(unitarity_defect(&b) < 1e-14);
        assert!((b.adjoint() * &v).norm() < 1e-14);
        // deterministic
        assert_eq!(b, orthonormal_complement(&v));
    }

    #[test]
    fn expm_of_sigma_z() {
        let h = HermMatrix::from_real_diagonal(&[0.5_f64, -0.5]);
        let u = expm_i(&h, std::f64::consts::TAU).unwrap();
        assert!((u[(0, 0)] + c(1.0, 0.0)).norm() < 1e-14);
    }
}
