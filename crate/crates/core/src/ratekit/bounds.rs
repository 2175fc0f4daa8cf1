use nalgebra::Complex;

use super::pencil::sup_ratio_with_floor;
use super::rate::tensor_scale;
use super::sym::{commutator_columns, real_nullspace};
use crate::error::{Error, Result};
use crate::measures::{
    generalized_variance, qgt, s_matrix, s_q_matrix, skew_information, AsymmetryTensor, MetricSpec,
};
use crate::numkit::{
    eig_range, herm_eig, kernel_split, CMat, CVec, DensityMatrix, HermMatrix, PureState,
    ToleranceConfig,
};
use crate::repkit::{GroupPoint, RepPair, Representation};
use crate::scalar::{lit, Extended, Real};

/// min over components of sup{r : S^{ρ_g} ⪰ r·Q^{φ_g}}.
pub fn distillable_bound<T: Real>(
    pair: &RepPair<T>,
    rho: &DensityMatrix<T>,
    phi: &PureState<T>,
    tol: &ToleranceConfig,
) -> Result<Extended<T>> {
    let g = pair.dim_g();
    let mut best = Extended::PosInf;
    for i in 0..pair.n_components() {
        let p = GroupPoint::component(g, i);
        let s = s_matrix(&pair.rep_in, rho, &p, tol)?.matrix;
        let q = qgt(&pair.rep_out, phi, &p)?.matrix;
        best = best.min(sup_ratio_with_floor(&s, &q, tol, tensor_scale(pair))?.value);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VanishingCheck<T: Real> {
    pub vanishes: bool,
    /// γ with [Π_ρ, γ†X] = 0 and γ†Q^φγ > 0.
    pub witness_gamma: Option<CVec<T>>,
}

/// Looks for γ in the commutant of the support projector that φ's QGT does not annihilate.
pub fn vanishing_distillable_check<T: Real>(
    pair: &RepPair<T>,
    rho: &DensityMatrix<T>,
    phi: &PureState<T>,
    tol: &ToleranceConfig,
) -> Result<VanishingCheck<T>> {
    if rho.dim() != pair.rep_in.dim() {
        return Err(Error::DimensionMismatch { expected: pair.rep_in.dim(), found: rho.dim() });
    }
    let split = kernel_split(rho.herm(), tol)?;
    let proj = &split.support * split.support.adjoint();
    let m = commutator_columns(&proj, &pair.rep_in);
    let scale = pair.rep_in.generators().iter().fold(T::one(), |a, x| a.max(crate::numkit::frobenius(x.mat())));
    let null = real_nullspace(&m, lit::<T>(tol.tol_kernel) * scale);
    let none = VanishingCheck { vanishes: false, witness_gamma: None };
    if null.ncols() == 0 {
        return Ok(none);
    }
    let q = qgt(&pair.rep_out, phi, &GroupPoint::identity(pair.dim_g()))?.matrix;
    let n = null.map(|x| Complex::new(x, T::zero()));
    let restricted = HermMatrix::from_hermitian_part(&(n.adjoint() * q.mat() * &n));
    let (vals, vecs) = herm_eig(&restricted)?;
    let top = vals.len() - 1;
    let qmax = eig_range(&q)?.1;
    if vals[top] <= lit::<T>(tol.tol_kernel) * qmax.max(T::one()) {
        return Ok(none);
    }
    Ok(VanishingCheck { vanishes: true, witness_gamma: Some(&n * vecs.column(top)) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostBound<T: Real> {
    pub total: Extended<T>,
    /// inf{r : r·Q^φ ⪰ Q^{ψ_i}} maximized over components, one per ensemble member.
    pub per_state: Vec<Extended<T>>,
}

/// Σ p_i·r_i for an ensemble of pure states plus a symmetric remainder of weight p_sym.
pub fn cost_bound<T: Real>(
    pair: &RepPair<T>,
    ensemble: &[(T, PureState<T>)],
    p_sym: T,
    phi: &PureState<T>,
    tol: &ToleranceConfig,
) -> Result<CostBound<T>> {
    if p_sym < T::zero() || ensemble.iter().any(|(p, _)| *p < T::zero()) {
        return Err(Error::InvalidParameter("ensemble weights must be nonnegative".into()));
    }
    let total_w = ensemble.iter().fold(p_sym, |a, (p, _)| a + *p);
    if (total_w - T::one()).abs() > lit(tol.tol_norm) {
        return Err(Error::NotNormalized { value: crate::scalar::to_f64(total_w) });
    }
    let g = pair.dim_g();
    let mut per_state = Vec::with_capacity(ensemble.len());
    let mut total = Extended::Finite(T::zero());
    for (p, psi) in ensemble {
        let mut r = Extended::Finite(T::zero());
        for i in 0..pair.n_components() {
            let pt = GroupPoint::component(g, i);
            let qphi = qgt(&pair.rep_in, phi, &pt)?.matrix;
            let qpsi = qgt(&pair.rep_out, psi, &pt)?.matrix;
            r = r.max(sup_ratio_with_floor(&qphi, &qpsi, tol, tensor_scale(pair))?.value.recip());
        }
        per_state.push(r);
        total = match (total, r) {
            (_, _) if *p == T::zero() => total,
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + *p * b),
            _ => Extended::PosInf,
        };
    }
    Ok(CostBound { total, per_state })
}

/// Σ p_i·Q^{ψ_i} at the identity.
pub fn average_qgt<T: Real>(rep: &Representation<T>, ensemble: &[(T, PureState<T>)]) -> Result<HermMatrix<T>> {
    let g = rep.dim_g();
    let id = GroupPoint::identity(g);
    let mut acc = CMat::zeros(g, g);
    for (p, psi) in ensemble {
        acc += qgt(rep, psi, &id)?.matrix.mat().scale(*p);
    }
    Ok(HermMatrix::from_hermitian_part(&acc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixOrder {
    Equal,
    /// a ⪯ b.
    Less,
    Greater,
    Incomparable,
}

/// Löwner order between two Hermitian matrices, decided by the spectrum of a − b.
pub fn matrix_order<T: Real>(a: &HermMatrix<T>, b: &HermMatrix<T>, tol: &ToleranceConfig) -> Result<MatrixOrder> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let scale = eig_range(a)?.1.abs().max(eig_range(b)?.1.abs()).max(T::one());
    let cut = lit::<T>(tol.tol_psd) * scale;
    let (lo, hi) = eig_range(&HermMatrix::from_hermitian_part(&(a.mat() - b.mat())))?;
    Ok(match (lo >= -cut, hi <= cut) {
        (true, true) => MatrixOrder::Equal,
        (false, true) => MatrixOrder::Less,
        (true, false) => MatrixOrder::Greater,
        (false, false) => MatrixOrder::Incomparable,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermoBounds<T: Real> {
    /// Lower bound on the per-copy energy variance of the external resource.
    pub variance_rate_required: T,
    /// r·Q^ψ − S_q^ρ.
    pub s_bound_matrix: HermMatrix<T>,
    /// Same bound with the metric-adjusted skew information in place of S^ρ.
    pub skew_bound: T,
}

/// Coherence an external system must supply for distillation at rate r under energy
/// conservation. `rep` carries the Hamiltonian of ρ as its single generator.
pub fn thermo_bounds<T: Real>(
    rep: &Representation<T>,
    rho: &DensityMatrix<T>,
    psi_target: &PureState<T>,
    h_target: &HermMatrix<T>,
    r: T,
    spec: &MetricSpec<T>,
    tol: &ToleranceConfig,
) -> Result<ThermoBounds<T>> {
    if rep.dim_g() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: rep.dim_g() });
    }
    let id = GroupPoint::identity(1);
    let s = s_matrix(rep, rho, &id, tol)?.matrix.mat()[(0, 0)].re;
    let v = generalized_variance(psi_target, h_target.mat())?;
    let target = Representation::new(vec![h_target.clone()], "target")?;
    let q = qgt(&target, psi_target, &id)?.matrix;
    let sq = s_q_matrix(rep, rho, spec, &id, tol)?.matrix;
    let skew = skew_information(rho, &rep.generators()[0], spec, tol)?;
    Ok(ThermoBounds {
        variance_rate_required: (r * v - s).max(T::zero()),
        s_bound_matrix: HermMatrix::from_hermitian_part(&(q.mat().scale(r) - sq.mat())),
        skew_bound: (r * v - skew).max(T::zero()),
    })
}

/// 1/λ_max(Q^φ): rate from the isotropic reference state.
pub fn min_entropy_rate<T: Real>(q_phi: &AsymmetryTensor<T>) -> Result<Extended<T>> {
    let lmax = eig_range(&q_phi.matrix)?.1;
    if lmax <= T::zero() {
        return Ok(Extended::PosInf);
    }
    Ok(Extended::Finite(T::one() / lmax))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::random::random_density;
    use crate::numkit::CVec;
    use crate::repkit::builders::{pauli, reference_state, u1};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn ket(amps: &[Complex<f64>]) -> PureState<f64> {
        PureState::normalized(CVec::from_column_slice(amps)).unwrap()
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn distillable_full_rank_and_pure() {
        let t = tol();
        let rep = pauli::<f64>();
        let pair = RepPair::new(rep.clone(), rep).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let full = random_density::<f64, _>(2, 2, &mut rng);
        let phi = ket(&[c(1., 0.), c(0., 1.)]);
        assert_eq!(distillable_bound(&pair, &full, &phi, &t).unwrap(), Extended::Finite(0.0));
        let chk = vanishing_distillable_check(&pair, &full, &phi, &t).unwrap();
        assert!(chk.vanishes);
        let g = chk.witness_gamma.unwrap();
        let q = qgt(&pair.rep_out, &phi, &GroupPoint::identity(3)).unwrap().matrix;
        assert!(g.dotc(&(q.mat() * &g)).re > 1e-6);

        let psi = ket(&[c(0.6, 0.), c(0.0, 0.8)]);
        let pure = distillable_bound(&pair, &psi.to_density(), &phi, &t).unwrap();
        let rate = super::super::rate::component_pencils(&pair, &psi, &phi, &t).unwrap()[0].1.value;
        assert!((pure.to_f64() - rate.to_f64()).abs() < 1e-10);
        // a pure qubit state is stabilized by its Bloch axis, so the commutant is nonempty
        assert!(vanishing_distillable_check(&pair, &psi.to_density(), &phi, &t).unwrap().vanishes);
        let s1 = crate::repkit::builders::spin::<f64>(2);
        let p1 = RepPair::new(s1.clone(), s1).unwrap();
        let generic = ket(&[c(0.5, 0.1), c(0.3, -0.6), c(0.2, 0.4)]);
        let target = ket(&[c(0.1, 0.0), c(0.7, 0.2), c(0.5, -0.3)]);
        assert!(!vanishing_distillable_check(&p1, &generic.to_density(), &target, &t).unwrap().vanishes);
        let sym = PureState::basis(2, 0).unwrap();
        let u = RepPair::new(u1(&[0.0, 1.0]), u1(&[0.0, 1.0])).unwrap();
        assert!(!vanishing_distillable_check(&u, &full, &sym, &t).unwrap().vanishes);
    }

    #[test]
    fn cost_bound_coherence_bits() {
        let t = tol();
        let pair = RepPair::new(u1(&[0.0, 1.0]), u1(&[0.0, 1.0])).unwrap();
        let plus = ket(&[c(1., 0.), c(1., 0.)]);
        let one = cost_bound(&pair, &[(1.0, plus.clone())], 0.0, &plus, &t).unwrap();
        assert!((one.total.to_f64() - 1.0).abs() < 1e-12);
        let psi = ket(&[c(0.8, 0.), c(0.6, 0.)]);
        let b = cost_bound(&pair, &[(0.5, psi.clone()), (0.25, plus.clone())], 0.25, &plus, &t).unwrap();
        let v = 0.64 * 0.36;
        assert!((b.per_state[0].to_f64() - 4.0 * v).abs() < 1e-12);
        assert!((b.total.to_f64() - (0.5 * 4.0 * v + 0.25)).abs() < 1e-12);
        assert!(cost_bound(&pair, &[(0.5, psi)], 0.2, &plus, &t).is_err());
    }

    #[test]
    fn matrix_order_cases() {
        let t = tol();
        let a = HermMatrix::from_real_diagonal(&[1.0, 2.0]);
        let b = HermMatrix::from_real_diagonal(&[2.0, 1.0]);
        assert_eq!(matrix_order(&a, &b, &t).unwrap(), MatrixOrder::Incomparable);
        assert_eq!(matrix_order(&a, &a, &t).unwrap(), MatrixOrder::Equal);
        assert_eq!(matrix_order(&a, &a.scale(2.0), &t).unwrap(), MatrixOrder::Less);
        assert_eq!(matrix_order(&a.scale(2.0), &a, &t).unwrap(), MatrixOrder::Greater);
    }

    #[test]
    fn thermo_full_rank_and_quasiclassical() {
        let t = tol();
        let rep = u1(&[0.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_density::<f64, _>(2, 2, &mut rng);
        let plus = ket(&[c(1., 0.), c(1., 0.)]);
        let h = HermMatrix::from_real_diagonal(&[0.0, 1.0]);
        let b = thermo_bounds(&rep, &rho, &plus, &h, 2.0, &MetricSpec::sld(), &t).unwrap();
        assert!((b.variance_rate_required - 0.5).abs() < 1e-12);
        let zero = PureState::basis(2, 0).unwrap();
        let b0 = thermo_bounds(&rep, &rho, &zero, &h, 2.0, &MetricSpec::sld(), &t).unwrap();
        assert_eq!(b0.variance_rate_required, 0.0);
        assert_eq!(b0.skew_bound, 0.0);
    }

    #[test]
    fn thermo_qubit_hand_evaluation() {
        // ρ_{q,ε} = (1−ε)ψ_q + ε·I/2 with H = σ_x/2 + 1/2 (eigenbasis |±⟩, levels 0 and 1)
        let t = tol();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = HermMatrix::from_hermitian_part(&CMat::from_row_slice(2, 2, &[c(0.5, 0.), c(0.5, 0.), c(0.5, 0.), c(0.5, 0.)]));
        let rep = Representation::new(vec![h.clone()], "u1x").unwrap();
        let (q, eps, qq, r) = (0.3, 0.1, 0.6, 1.5);
        let psi_q = |q: f64| ket(&[c(s * (q.sqrt() + (1.0 - q).sqrt()), 0.), c(s * (q.sqrt() - (1.0 - q).sqrt()), 0.)]);
        let rho = DensityMatrix::mixture(&[(1.0 - eps, &psi_q(q).to_density()), (eps, &DensityMatrix::maximally_mixed(2))], &t)
            .unwrap();
        let b = thermo_bounds(&rep, &rho, &psi_q(qq), &h, r, &MetricSpec::sld(), &t).unwrap();
        // full-rank ρ: S vanishes, so the bound is r·q′(1−q′)
        assert!((b.variance_rate_required - r * qq * (1.0 - qq)).abs() < 1e-12);
        // skew variant from the Bloch vector in the |±⟩ frame
        let bloch_z = (1.0 - eps) * (2.0 * q - 1.0);
        let bloch_x = (1.0 - eps) * 2.0 * (q * (1.0 - q)).sqrt();
        let len = (bloch_z * bloch_z + bloch_x * bloch_x).sqrt();
        let (p1, p2) = ((1.0 + len) / 2.0, (1.0 - len) / 2.0);
        // |⟨1|H|2⟩|² in ρ's eigenbasis: (1/4)·sin²(angle between Bloch vector and the H axis)
        let h12 = 0.25 * (bloch_x / len).powi(2);
        let skew = 0.5 * 0.5 * h12 * 2.0 * (p1 - p2).powi(2) / (0.5 * p1 + 0.5 * p2);
        assert!((b.skew_bound - (r * qq * (1.0 - qq) - skew).max(0.0)).abs() < 1e-12);
        assert!(b.skew_bound > 0.0);
    }

    #[test]
    fn min_entropy_rates() {
        let (rep, psi) = reference_state::<f64>(2).unwrap();
        let q = qgt(&rep, &psi, &GroupPoint::identity(3)).unwrap();
        assert!((min_entropy_rate(&q).unwrap().to_f64() - 1.0).abs() < 1e-10);
        let zero = AsymmetryTensor {
            kind: crate::measures::TensorKind::<f64>::Qgt,
            matrix: HermMatrix::<f64>::zeros(3),
            group_point: GroupPoint::identity(3),
        };
        assert!(min_entropy_rate(&zero).unwrap().is_pos_inf());
    }
}
