use nalgebra::Complex;

use super::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::numkit::{
    frobenius, herm_eig, orthonormal_complement, pinv_with_floor, spectral_map, CMat, HermMatrix, PureState,
    ToleranceConfig,
};
use crate::repkit::{RepPair, Representation};
use crate::scalar::{lit, to_f64, Real};

/// Intermediate matrices of the single-copy conversion channel.
#[derive(Debug, Clone)]
pub struct ChannelBuildArtifacts<T: Real> {
    /// (d−1)×dim G, entries −i⟨b_k|X_μ|ψ⟩.
    pub c_in: CMat<T>,
    pub c_out: CMat<T>,
    /// C′C⁺.
    pub z: CMat<T>,
    /// I − Z†Z.
    pub gamma: HermMatrix<T>,
    pub basis_in: CMat<T>,
    pub basis_out: CMat<T>,
    /// ‖C′ − ZC‖_F.
    pub residual: T,
}

/// C with C†C = Q^ψ, in the Gram–Schmidt complement basis of ψ.
pub fn c_matrix<T: Real>(rep: &Representation<T>, psi: &PureState<T>) -> Result<(CMat<T>, CMat<T>)> {
    if rep.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: rep.dim(), found: psi.dim() });
    }
    let basis = orthonormal_complement(psi.vec());
    let minus_i = Complex::new(T::zero(), -T::one());
    let cols: Vec<_> = rep.generators().iter().map(|x| basis.adjoint() * (x.mat() * psi.vec())).collect();
    let c = CMat::from_fn(basis.ncols(), cols.len(), |k, mu| cols[mu][k] * minus_i);
    Ok((c, basis))
}

/// Channel mapping ψ to φ exactly whose Kraus operators follow the covariance-matrix
/// construction; requires Q^ψ ⪰ Q^φ at the identity.
pub fn build_conversion_channel<T: Real>(
    pair: &RepPair<T>,
    psi: &PureState<T>,
    phi: &PureState<T>,
    tol: &ToleranceConfig,
) -> Result<(KrausChannel<T>, ChannelBuildArtifacts<T>)> {
    let (c_in, basis_in) = c_matrix(&pair.rep_in, psi)?;
    let (c_out, basis_out) = c_matrix(&pair.rep_out, phi)?;
    let scale = pair
        .rep_in
        .generators()
        .iter()
        .chain(pair.rep_out.generators())
        .fold(T::zero(), |m, x| m.max(frobenius(x.mat())));
    let z = &c_out * pinv_with_floor(&c_in, tol, scale)?;
    let m = c_in.nrows();
    let gamma = HermMatrix::from_hermitian_part(&(CMat::identity(m, m) - z.adjoint() * &z));
    let (vals, vecs) = herm_eig(&gamma)?;
    let (lmin, lmax) = if m == 0 { (T::zero(), T::zero()) } else { (vals[0], vals[m - 1]) };
    if lmin < -lit::<T>(tol.tol_psd) * lmax.max(T::one()) {
        return Err(Error::CovarianceViolated {
            min_eigenvalue: to_f64(lmin),
            detail: "Γ = I − Z†Z has a negative eigenvalue".into(),
        });
    }
    let residual = frobenius(&(&c_out - &z * &c_in));
    if residual > lit::<T>(tol.tol_residual) * frobenius(&c_out).max(T::one()) {
        return Err(Error::CovarianceViolated {
            min_eigenvalue: to_f64(lmin),
            detail: format!("C′ ≠ ZC (residual {:e}); a generator direction is stabilized by ψ only", to_f64(residual)),
        });
    }
    // clip the roundoff-negative part
    let sqrt_gamma = spectral_map(&vals, &vecs, |l| Complex::new(l.max(T::zero()).sqrt(), T::zero()));
    let (p_out, p_in) = (phi.vec(), psi.vec());
    let k0 = p_out * p_in.adjoint() + &basis_out * &z * basis_in.adjoint();
    let mut ops = vec![k0];
    for k in 0..m {
        let row = sqrt_gamma.row(k) * basis_in.adjoint();
        ops.push(p_out * row);
    }
    let ch = KrausChannel::new(ops, tol)?;
    Ok((ch, ChannelBuildArtifacts { c_in, c_out, z, gamma, basis_in, basis_out, residual }))
}
