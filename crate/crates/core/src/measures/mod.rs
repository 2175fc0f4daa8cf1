//! Asymmetry measures: the quantum geometric tensor, generalized variances, Petz
//! monotone-metric norms, the mixed-state tensors S and S_q, skew information and the
//! U(1) relative entropy of asymmetry.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::numkit::{
    herm_eig, kernel_split, von_neumann_entropy, CMat, CVec, DensityMatrix, HermMatrix, PureState,
    ToleranceConfig,
};
use crate::repkit::{unitary_at_point, GroupPoint, Representation, U1Spec};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TensorKind<T> {
    Qgt,
    S,
    Sq { q: T },
}

/// dimG × dimG tensor together with where it was evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryTensor<T: Real> {
    pub kind: TensorKind<T>,
    pub matrix: HermMatrix<T>,
    pub group_point: GroupPoint<T>,
}

/// Petz metric f_q(x) = (1−q) + q·x, 0 < q < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSpec<T> {
    q: T,
}

impl<T: Real> MetricSpec<T> {
    pub fn new(q: T) -> Result<Self> {
        if !(q > T::zero() && q < T::one()) {
            return Err(Error::InvalidParameter(format!("q must lie in (0,1), got {q:?}")));
        }
        Ok(Self { q })
    }

    /// q = 1/2, the symmetric logarithmic derivative metric.
    pub fn sld() -> Self {
        Self { q: lit(0.5) }
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn f(&self, x: T) -> T {
        (T::one() - self.q) + self.q * x
    }

    pub fn f0(&self) -> T {
        T::one() - self.q
    }

    /// (1−q)·p_l + q·p_k, the denominator paired with ⟨l|O|k⟩.
    fn mean(&self, pl: T, pk: T) -> T {
        (T::one() - self.q) * pl + self.q * pk
    }
}

fn transport_state<T: Real>(rep: &Representation<T>, psi: &PureState<T>, p: &GroupPoint<T>) -> Result<CVec<T>> {
    if psi.dim() != rep.dim() {
        return Err(Error::DimensionMismatch { expected: rep.dim(), found: psi.dim() });
    }
    if p.is_identity() {
        return Ok(psi.vec().clone());
    }
    Ok(unitary_at_point(rep, p)? * psi.vec())
}

fn transport_density<T: Real>(
    rep: &Representation<T>,
    rho: &DensityMatrix<T>,
    p: &GroupPoint<T>,
) -> Result<DensityMatrix<T>> {
    if rho.dim() != rep.dim() {
        return Err(Error::DimensionMismatch { expected: rep.dim(), found: rho.dim() });
    }
    if p.is_identity() {
        return Ok(rho.clone());
    }
    Ok(rho.transformed(&unitary_at_point(rep, p)?))
}

/// Q_{μν} = ⟨ψ|X_μX_ν|ψ⟩ − ⟨ψ|X_μ|ψ⟩⟨ψ|X_ν|ψ⟩ for a given generator list.
pub fn qgt_matrix<T: Real>(generators: &[HermMatrix<T>], psi: &CVec<T>) -> HermMatrix<T> {
    // (I−|ψ⟩⟨ψ|)X_μψ, so that Q_{μν} is a Gram matrix
    let w: Vec<CVec<T>> = generators
        .iter()
        .map(|x| {
            let xv = x.mat() * psi;
            let m = Complex::new(psi.dotc(&xv).re, T::zero());
            xv - psi * m
        })
        .collect();
    let g = generators.len();
    let q = CMat::from_fn(g, g, |mu, nu| w[mu].dotc(&w[nu]));
    HermMatrix::from_hermitian_part(&q)
}

/// QGT of ψ transported to `point`.
pub fn qgt<T: Real>(
    rep: &Representation<T>,
    psi: &PureState<T>,
    point: &GroupPoint<T>,
) -> Result<AsymmetryTensor<T>> {
    let v = transport_state(rep, psi, point)?;
    Ok(AsymmetryTensor {
        kind: TensorKind::Qgt,
        matrix: qgt_matrix(rep.generators(), &v),
        group_point: point.clone(),
    })
}

/// V(ψ,O) = ⟨ψ|O(I−|ψ⟩⟨ψ|)O†|ψ⟩ = ‖O†ψ‖² − |⟨ψ|O|ψ⟩|².
pub fn generalized_variance<T: Real>(psi: &PureState<T>, o: &CMat<T>) -> Result<T> {
    if o.nrows() != psi.dim() || o.ncols() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), found: o.nrows() });
    }
    let v = psi.vec();
    let od = o.adjoint() * v;
    let mean = v.dotc(&(o * v));
    Ok((od.norm_squared() - mean.norm_sqr()).max(T::zero()))
}

/// Spectrum of ρ clipped at zero, with eigenvectors.
fn clipped_spectrum<T: Real>(rho: &DensityMatrix<T>) -> Result<(Vec<T>, CMat<T>)> {
    let (vals, vecs) = herm_eig(rho.herm())?;
    Ok((vals.iter().map(|&p| p.max(T::zero())).collect(), vecs))
}

/// Pairs (l, k, weight) with weight (p_l−p_k)²/((1−q)p_l+qp_k), skipping denominators
/// at or below `tol_kernel`.
fn petz_weights<T: Real>(p: &[T], spec: &MetricSpec<T>, tol: &ToleranceConfig) -> Vec<(usize, usize, T)> {
    let cut = lit::<T>(tol.tol_kernel);
    let mut out = Vec::new();
    for l in 0..p.len() {
        for k in 0..p.len() {
            let den = spec.mean(p[l], p[k]);
            let diff = p[l] - p[k];
            if den > cut && diff != T::zero() {
                out.push((l, k, diff * diff / den));
            }
        }
    }
    out
}

/// ‖i[ρ,O]‖²_{f_q,ρ} = Σ_{k,l} (p_l−p_k)²/((1−q)p_l+qp_k)·|⟨l|O|k⟩|².
pub fn petz_norm<T: Real>(
    rho: &DensityMatrix<T>,
    o: &CMat<T>,
    spec: &MetricSpec<T>,
    tol: &ToleranceConfig,
) -> Result<T> {
    if o.nrows() != rho.dim() || o.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: o.nrows() });
    }
    let (p, v) = clipped_spectrum(rho)?;
    let ob = v.adjoint() * o * &v;
    Ok(petz_weights(&p, spec, tol)
        .into_iter()
        .fold(T::zero(), |acc, (l, k, w)| acc + w * ob[(l, k)].norm_sqr()))
}

/// S_{μν} = Tr(ρ X_μ (I−Π_ρ) X_ν).
pub fn s_matrix<T: Real>(
    rep: &Representation<T>,
    rho: &DensityMatrix<T>,
    point: &GroupPoint<T>,
    tol: &ToleranceConfig,
) -> Result<AsymmetryTensor<T>> {
    let r = transport_density(rep, rho, point)?;
    let split = kernel_split(r.herm(), tol)?;
    let pk = &split.kernel * split.kernel.adjoint();
    let g = rep.dim_g();
    let left: Vec<CMat<T>> = rep.generators().iter().map(|x| r.mat() * x.mat() * &pk).collect();
    let s = CMat::from_fn(g, g, |mu, nu| (&left[mu] * rep.generators()[nu].mat()).trace());
    Ok(AsymmetryTensor {
        kind: TensorKind::S,
        matrix: HermMatrix::from_hermitian_part(&s),
        group_point: point.clone(),
    })
}

/// (S_q)_{μν} = Σ f_q(0)(p_l−p_k)²/((1−q)p_l+qp_k)·⟨l|X_μ|k⟩⟨k|X_ν|l⟩.
pub fn s_q_matrix<T: Real>(
    rep: &Representation<T>,
    rho: &DensityMatrix<T>,
    spec: &MetricSpec<T>,
    point: &GroupPoint<T>,
    tol: &ToleranceConfig,
) -> Result<AsymmetryTensor<T>> {
    let r = transport_density(rep, rho, point)?;
    let (p, v) = clipped_spectrum(&r)?;
    let xb: Vec<CMat<T>> = rep.generators().iter().map(|x| v.adjoint() * x.mat() * &v).collect();
    let weights = petz_weights(&p, spec, tol);
    let g = rep.dim_g();
    let f0 = spec.f0();
    let s = CMat::from_fn(g, g, |mu, nu| {
        weights.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &(l, k, w)| {
            acc + xb[mu][(l, k)] * xb[nu][(k, l)] * (f0 * w)
        })
    });
    Ok(AsymmetryTensor {
        kind: TensorKind::Sq { q: spec.q() },
        matrix: HermMatrix::from_hermitian_part(&s),
        group_point: point.clone(),
    })
}

/// Metric-adjusted skew information (f_q(0)/2)·‖i[ρ,H]‖²_{f_q,ρ}.
pub fn skew_information<T: Real>(
    rho: &DensityMatrix<T>,
    h: &HermMatrix<T>,
    spec: &MetricSpec<T>,
    tol: &ToleranceConfig,
) -> Result<T> {
    Ok(spec.f0() * lit(0.5) * petz_norm(rho, h.mat(), spec, tol)?)
}

/// S(𝒟(ρ)) − S(ρ) in nats, 𝒟 the dephasing between distinct eigenvalues of H.
pub fn u1_relative_entropy_asymmetry<T: Real>(spec: &U1Spec<T>, rho: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: rho.dim() });
    }
    let r = spec.basis.adjoint() * rho.mat() * &spec.basis;
    let n = &spec.eigenvalues;
    let dephased = CMat::from_fn(r.nrows(), r.ncols(), |j, k| {
        if n[j] == n[k] {
            r[(j, k)]
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    let d = DensityMatrix::from_trusted(&dephased);
    Ok((von_neumann_entropy(&d)? - von_neumann_entropy(rho)?).max(T::zero()))
}
