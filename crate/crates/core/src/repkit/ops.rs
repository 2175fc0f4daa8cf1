use nalgebra::{Complex, DVector, SVD};

use super::rep::Representation;
use crate::error::{Error, Result};
use crate::numkit::{
    checked_power_dim, collective, frobenius, tensor_power, CMat, HermMatrix, PureState, RMat,
    ToleranceConfig,
};
use crate::scalar::{lit, to_f64, Real};

/// Lift to a unitary representation: X̃_μ = Σ_n X_μ^{(n)} − Tr(X_μ)·I on d^d, and
/// component representatives G^{⊗d}/det G.
pub fn lift_projective<T: Real>(rep: &Representation<T>, cap: usize) -> Result<Representation<T>> {
    let d = rep.dim();
    let big = checked_power_dim(d, d, cap)?;
    let id = CMat::<T>::identity(big, big);
    let mut gens = Vec::with_capacity(rep.dim_g());
    for x in rep.generators() {
        let tr = x.mat().trace();
        let lifted = collective(x.mat(), d, cap)? - &id * tr;
        gens.push(HermMatrix::from_hermitian_part(&lifted));
    }
    let mut comps = Vec::with_capacity(rep.component_reps().len());
    for g in rep.component_reps() {
        let det = g.determinant();
        comps.push(tensor_power(g, d, cap)? / det);
    }
    Ok(Representation::from_parts(gens, comps, format!("lift({})", rep.label())))
}

/// Real matrix V with u†X_μu = Σ_ν V_{νμ} X_ν, by least squares on vectorized generators.
pub fn congruence_matrix<T: Real>(
    rep: &Representation<T>,
    u: &CMat<T>,
    tol: &ToleranceConfig,
) -> Result<RMat<T>> {
    let d = rep.dim();
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: u.nrows() });
    }
    let g = rep.dim_g();
    let vectorize = |m: &CMat<T>| {
        let mut v = DVector::<T>::zeros(2 * d * d);
        for (k, z) in m.iter().enumerate() {
            v[2 * k] = z.re;
            v[2 * k + 1] = z.im;
        }
        v
    };
    let mut a = RMat::<T>::zeros(2 * d * d, g);
    for (nu, x) in rep.generators().iter().enumerate() {
        a.set_column(nu, &vectorize(x.mat()));
    }
    let svd = SVD::try_new(a.clone(), true, true, T::default_epsilon(), 100_000)
        .ok_or(Error::NonConvergence)?;
    let smax = svd.singular_values.iter().fold(T::zero(), |m, &s| m.max(s));
    let cut = lit::<T>(tol.tol_kernel) * smax;
    if svd.singular_values.iter().any(|&s| s <= cut) {
        return Err(Error::InvalidParameter("generators are linearly dependent".into()));
    }
    let xmax = rep.generators().iter().fold(T::zero(), |m, x| m.max(frobenius(x.mat())));
    let mut v = RMat::<T>::zeros(g, g);
    let mut worst = T::zero();
    for (mu, x) in rep.generators().iter().enumerate() {
        let b = vectorize(&(u.adjoint() * x.mat() * u));
        let sol = svd.solve(&b, cut).map_err(|_| Error::NonConvergence)?;
        let res = (&a * &sol - &b).norm();
        worst = worst.max(res);
        v.set_column(mu, &sol);
    }
    if worst > lit::<T>(tol.tol_residual) * xmax.max(T::one()) {
        return Err(Error::NotNormalizing { residual: to_f64(worst) });
    }
    Ok(v)
}

/// X̃_i = Π⊥X_iΠ + ΠX_iΠ⊥ with Π = |φ⟩⟨φ|.
pub fn projected_generators<T: Real>(
    rep: &Representation<T>,
    phi: &PureState<T>,
) -> Result<Vec<HermMatrix<T>>> {
    if phi.dim() != rep.dim() {
        return Err(Error::DimensionMismatch { expected: rep.dim(), found: phi.dim() });
    }
    let p = phi.projector();
    let q = CMat::<T>::identity(rep.dim(), rep.dim()) - &p;
    Ok(rep
        .generators()
        .iter()
        .map(|x| HermMatrix::from_hermitian_part(&(&q * x.mat() * &p + &p * x.mat() * &q)))
        .collect())
}

/// n-fold i.i.d. extension: collective generators and tensor-power components.
pub fn iid_generators<T: Real>(
    rep: &Representation<T>,
    n: usize,
    cap: usize,
) -> Result<Representation<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be ≥ 1".into()));
    }
    checked_power_dim(rep.dim(), n, cap)?;
    let gens = rep
        .generators()
        .iter()
        .map(|x| collective(x.mat(), n, cap).map(|m| HermMatrix::from_hermitian_part(&m)))
        .collect::<Result<Vec<_>>>()?;
    let comps = rep
        .component_reps()
        .iter()
        .map(|g| tensor_power(g, n, cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(Representation::from_parts(gens, comps, format!("{}^{n}", rep.label())))
}

/// Collective generators of a two-party product: X_μ ⊗ I + I ⊗ X′_μ.
pub fn product_generators<T: Real>(
    a: &Representation<T>,
    b: &Representation<T>,
) -> Result<Representation<T>> {
    if a.dim_g() != b.dim_g() {
        return Err(Error::DimensionMismatch { expected: a.dim_g(), found: b.dim_g() });
    }
    let ia = CMat::<T>::identity(a.dim(), a.dim());
    let ib = CMat::<T>::identity(b.dim(), b.dim());
    let gens = a
        .generators()
        .iter()
        .zip(b.generators())
        .map(|(x, y)| HermMatrix::from_hermitian_part(&(x.mat().kronecker(&ib) + ia.kronecker(y.mat()))))
        .collect();
    let comps = if a.component_reps().len() == b.component_reps().len() {
        a.component_reps().iter().zip(b.component_reps()).map(|(u, v)| u.kronecker(v)).collect()
    } else {
        vec![CMat::identity(a.dim() * b.dim(), a.dim() * b.dim())]
    };
    Ok(Representation::from_parts(gens, comps, format!("{}⊗{}", a.label(), b.label())))
}

pub(crate) fn is_multiple_of_identity<T: Real>(m: &CMat<T>, tol: T) -> bool {
    let n = m.nrows();
    let avg = m.trace() / Complex::new(lit::<T>(n as f64), T::zero());
    frobenius(&(m - CMat::<T>::identity(n, n) * avg)) <= tol * frobenius(m).max(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repkit::builders::{pauli, spin, u1};
    use crate::repkit::rep::unitary_at;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn lift_of_sigma_z_half() {
        let rep = u1(&[0.5, -0.5]);
        let lifted = lift_projective(&rep, 4096).unwrap();
        assert_eq!(lifted.dim(), 4);
        let diag: Vec<f64> = (0..4).map(|i| lifted.generators()[0].mat()[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn lift_is_traceless() {
        let rep = u1(&[0.0, 1.0, 3.0]);
        let lifted = lift_projective(&rep, 4096).unwrap();
        assert_eq!(lifted.dim(), 27);
        assert!(lifted.generators()[0].mat().trace().norm() < 1e-12);
        assert!(matches!(lift_projective(&spin::<f64>(8), 4096), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn congruence_identity_and_flip() {
        let tol = ToleranceConfig::default();
        let rep = pauli::<f64>();
        let v = congruence_matrix(&rep, &CMat::identity(2, 2), &tol).unwrap();
        assert!((v - RMat::identity(3, 3)).norm() < 1e-12);
        let sx = rep.generators()[0].mat().clone();
        let v = congruence_matrix(&rep, &sx, &tol).unwrap();
        assert!((v - RMat::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, -1.0]))).norm() < 1e-12);
    }

    #[test]
    fn congruence_z_rotation_matches_adjoint_series() {
        let tol = ToleranceConfig::default();
        let rep = pauli::<f64>();
        let alpha = 0.7;
        let u = unitary_at(&spin::<f64>(1), &[0.0, 0.0, alpha], 0).unwrap();
        let v = congruence_matrix(&rep, &u, &tol).unwrap();
        // oracle: u†Xu = e^{−ad_A}X with A = iασ_z/2, summed as a commutator series
        let a = rep.generators()[2].mat() * c(0.0, alpha / 2.0);
        for mu in 0..3 {
            let mut term = rep.generators()[mu].mat().clone();
            let mut acc = term.clone();
            for k in 1..40 {
                term = (&a * &term - &term * &a) * c(-1.0 / k as f64, 0.0);
                acc += &term;
            }
            let fitted = (0..3).fold(CMat::zeros(2, 2), |m, nu| {
                m + rep.generators()[nu].mat() * c(v[(nu, mu)], 0.0)
            });
            assert!((fitted - acc).norm() < 1e-12);
        }
        let expect = RMat::from_row_slice(
            3,
            3,
            &[alpha.cos(), -alpha.sin(), 0.0, alpha.sin(), alpha.cos(), 0.0, 0.0, 0.0, 1.0],
        );
        assert!((v - expect).norm() < 1e-12);
    }

    #[test]
    fn congruence_detects_non_normalizing_element() {
        let tol = ToleranceConfig::default();
        let rep = u1(&[0.0, 1.0]);
        let h = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)])
            * c(0.5_f64.sqrt(), 0.0);
        assert!(matches!(congruence_matrix(&rep, &h, &tol), Err(Error::NotNormalizing { .. })));
    }

    #[test]
    fn projected_generator_cases() {
        let rep = pauli::<f64>();
        let zero = PureState::basis(2, 0).unwrap();
        let p = projected_generators(&rep, &zero).unwrap();
        assert!((p[0].mat() - rep.generators()[0].mat()).norm() < 1e-15);
        assert!(p[2].mat().norm() < 1e-15);
    }

    #[test]
    fn iid_two_copies() {
        let rep = u1(&[0.5, -0.5]);
        let r2 = iid_generators(&rep, 2, 4096).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| r2.generators()[0].mat()[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 0.0, 0.0, -1.0]);
        assert_eq!(iid_generators(&rep, 1, 4096).unwrap().generators(), rep.generators());
    }
}
