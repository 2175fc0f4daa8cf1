use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{cabs, lit, to_f64, Real};

pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;
pub type RMat<T> = DMatrix<T>;

/// Numerical thresholds. Stored as `f64` and converted at use sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub tol_herm: f64,
    pub tol_norm: f64,
    pub tol_psd: f64,
    /// Relative eigenvalue threshold separating support from kernel.
    pub tol_kernel: f64,
    pub tol_residual: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tol_herm: 1e-10,
            tol_norm: 1e-10,
            tol_psd: 1e-9,
            tol_kernel: 1e-9,
            tol_residual: 1e-8,
        }
    }
}

impl ToleranceConfig {
    /// Looser thresholds suitable for `f32` arithmetic.
    pub fn single_precision() -> Self {
        Self {
            tol_herm: 1e-5,
            tol_norm: 1e-5,
            tol_psd: 1e-4,
            tol_kernel: 1e-4,
            tol_residual: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("tol_herm", self.tol_herm),
            ("tol_norm", self.tol_norm),
            ("tol_psd", self.tol_psd),
            ("tol_kernel", self.tol_kernel),
            ("tol_residual", self.tol_residual),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

pub(crate) fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

pub(crate) fn check_finite<T: Real>(m: &CMat<T>) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub(crate) fn check_square<T: Real>(m: &CMat<T>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    Ok(())
}

pub(crate) fn hermitian_part<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m + m.adjoint()).unscale(lit(2.0))
}

/// Square matrix that passed the Hermiticity gate. Stored symmetrized.
#[derive(Debug, Clone, PartialEq)]
pub struct HermMatrix<T: Real> {
    m: CMat<T>,
}

impl<T: Real> HermMatrix<T> {
    pub fn new(m: CMat<T>, tol: &ToleranceConfig) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m)?;
        let dev = max_abs(&(&m - m.adjoint()));
        let bound = lit::<T>(tol.tol_herm) * (T::one() + max_abs(&m));
        if dev > bound {
            return Err(Error::NotHermitian { deviation: to_f64(dev) });
        }
        Ok(Self { m: hermitian_part(&m) })
    }

    /// Takes the Hermitian part without the deviation gate. For matrices that are
    /// Hermitian by construction.
    pub fn from_hermitian_part(m: &CMat<T>) -> Self {
        Self { m: hermitian_part(m) }
    }

    pub fn from_real_diagonal(d: &[T]) -> Self {
        let n = d.len();
        let mut m = CMat::zeros(n, n);
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = Complex::new(*x, T::zero());
        }
        Self { m }
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: CMat::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: CMat::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn mat(&self) -> &CMat<T> {
        &self.m
    }

    pub fn into_mat(self) -> CMat<T> {
        self.m
    }

    pub fn scale(&self, s: T) -> Self {
        Self { m: self.m.scale(s) }
    }
}

/// Unit vector in ℂ^d.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    v: CVec<T>,
}

impl<T: Real> PureState<T> {
    pub fn new(v: CVec<T>, tol: &ToleranceConfig) -> Result<Self> {
        if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = v.norm();
        if (n - T::one()).abs() > lit(tol.tol_norm) {
            return Err(Error::NotNormalized { value: to_f64(n) });
        }
        Ok(Self { v })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(v: CVec<T>) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n <= T::zero() {
            return Err(Error::NotNormalized { value: to_f64(n) });
        }
        Ok(Self { v: v.unscale(n) })
    }

    /// Computational basis vector |k⟩.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, len: dim });
        }
        let mut v = CVec::zeros(dim);
        v[k] = Complex::new(T::one(), T::zero());
        Ok(Self { v })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn vec(&self) -> &CVec<T> {
        &self.v
    }

    pub fn projector(&self) -> CMat<T> {
        &self.v * self.v.adjoint()
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        DensityMatrix { m: HermMatrix::from_hermitian_part(&self.projector()) }
    }

    /// U|ψ⟩.
    pub fn transformed(&self, u: &CMat<T>) -> Self {
        Self { v: u * &self.v }
    }
}

/// PSD unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    m: HermMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(m: CMat<T>, tol: &ToleranceConfig) -> Result<Self> {
        let h = HermMatrix::new(m, tol)?;
        Self::from_herm(h, tol)
    }

    pub fn from_herm(h: HermMatrix<T>, tol: &ToleranceConfig) -> Result<Self> {
        let tr = h.mat().trace().re;
        if (tr - T::one()).abs() > lit(tol.tol_norm) {
            return Err(Error::NotNormalized { value: to_f64(tr) });
        }
        let (evals, _) = super::herm_eig(&h)?;
        let lmax = evals[evals.len() - 1];
        let lmin = evals[0];
        if lmin < -lit::<T>(tol.tol_psd) * lmax.max(T::zero()) {
            return Err(Error::NotPsd { min_eigenvalue: to_f64(lmin) });
        }
        Ok(Self { m: h })
    }

    /// For outputs that are density matrices by construction (channel images, mixtures).
    pub(crate) fn from_trusted(m: &CMat<T>) -> Self {
        Self { m: HermMatrix::from_hermitian_part(m) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let p = T::one() / lit::<T>(dim as f64);
        Self { m: HermMatrix::from_real_diagonal(&vec![p; dim]) }
    }

    /// Convex combination Σ w_k ρ_k; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(T, &DensityMatrix<T>)], tol: &ToleranceConfig) -> Result<Self> {
        let first = parts.first().ok_or(Error::Empty("mixture components"))?;
        let d = first.1.dim();
        let mut acc = CMat::zeros(d, d);
        let mut total = T::zero();
        for (w, rho) in parts {
            if rho.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: rho.dim() });
            }
            if *w < T::zero() {
                return Err(Error::InvalidParameter("negative mixture weight".into()));
            }
            acc += rho.mat().scale(*w);
            total += *w;
        }
        if (total - T::one()).abs() > lit(tol.tol_norm) {
            return Err(Error::NotNormalized { value: to_f64(total) });
        }
        Ok(Self::from_trusted(&acc))
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn mat(&self) -> &CMat<T> {
        self.m.mat()
    }

    pub fn herm(&self) -> &HermMatrix<T> {
        &self.m
    }

    /// UρU†.
    pub fn transformed(&self, u: &CMat<T>) -> Self {
        Self::from_trusted(&(u * self.mat() * u.adjoint()))
    }
}
