use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chankit::apply_channel;
use crate::error::{Error, Result};
use crate::measures::{s_q_matrix, MetricSpec};
use crate::numkit::random::random_density;
use crate::numkit::{eig_range, tensor_product, CMat, DensityMatrix, HermMatrix, PureState, ToleranceConfig};
use crate::ratekit::{average_qgt, matrix_order, MatrixOrder};
use crate::repkit::builders::pauli;
use crate::repkit::{product_generators, GroupPoint, RepPair, Representation};
use crate::scalar::{cabs, lit, to_f64, Real};

use super::covariant::{exact_elements, random_covariant_channel, random_covariant_instrument};

/// Worst relative violation of each S_q property over the draws; 0 means none observed.
#[derive(Debug, Clone, PartialEq)]
pub struct SqSuiteReport {
    pub draws: usize,
    pub positivity: f64,
    pub additivity: f64,
    pub convexity: f64,
    pub monotonicity: f64,
    pub strong_monotonicity: f64,
}

impl SqSuiteReport {
    pub fn max_violation(&self) -> f64 {
        [self.positivity, self.additivity, self.convexity, self.monotonicity, self.strong_monotonicity]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn sq<T: Real>(rep: &Representation<T>, rho: &DensityMatrix<T>, spec: &MetricSpec<T>, tol: &ToleranceConfig) -> Result<HermMatrix<T>> {
    Ok(s_q_matrix(rep, rho, spec, &GroupPoint::identity(rep.dim_g()), tol)?.matrix)
}

/// (−λ_min(a − b))⁺ / max(1, λ_max(a)): how far a ⪰ b fails.
fn order_violation<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Result<f64> {
    let (lo, _) = eig_range(&HermMatrix::from_hermitian_part(&(a - b)))?;
    let scale = to_f64(eig_range(&HermMatrix::from_hermitian_part(a))?.1).max(1.0);
    Ok((-to_f64(lo)).max(0.0) / scale)
}

/// Σ_k K ρ K† for a CP map given by Kraus operators.
fn apply_cp<T: Real>(ops: &[CMat<T>], rho: &DensityMatrix<T>) -> CMat<T> {
    let d = ops[0].nrows();
    ops.iter().fold(CMat::zeros(d, d), |acc, k| acc + k * rho.mat() * k.adjoint())
}

/// Seeded random checks of positivity, additivity, convexity, monotonicity under twirled
/// channels and strong monotonicity under two-outcome covariant instruments, with q drawn
/// from [0.1, 0.9] each round. The group of `rep` must admit an exact twirl.
pub fn s_q_property_suite<T: Real>(
    rep: &Representation<T>,
    count: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<SqSuiteReport> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be ≥ 1".into()));
    }
    let d = rep.dim();
    let pair = RepPair::new(rep.clone(), rep.clone())?;
    let elements = exact_elements(&pair)?;
    let both = product_generators(rep, rep)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = SqSuiteReport {
        draws: count,
        positivity: 0.0,
        additivity: 0.0,
        convexity: 0.0,
        monotonicity: 0.0,
        strong_monotonicity: 0.0,
    };
    for _ in 0..count {
        let spec = MetricSpec::new(lit(rng.random_range(0.1..0.9)))?;
        let rank_a = rng.random_range(1..=d);
        let rank_b = rng.random_range(1..=d);
        let rho = random_density::<T, _>(d, rank_a, &mut rng);
        let sigma = random_density::<T, _>(d, rank_b, &mut rng);
        let s_rho = sq(rep, &rho, &spec, tol)?;
        let s_sigma = sq(rep, &sigma, &spec, tol)?;

        let (lo, hi) = eig_range(&s_rho)?;
        r.positivity = r.positivity.max((-to_f64(lo)).max(0.0) / to_f64(hi).max(1.0));

        let joint = DensityMatrix::new(tensor_product(rho.mat(), sigma.mat()), tol)?;
        let s_joint = sq(&both, &joint, &spec, tol)?;
        let diff = s_joint.mat() - s_rho.mat() - s_sigma.mat();
        let scale = to_f64(s_joint.mat().norm()).max(1.0);
        r.additivity = r.additivity.max(to_f64(diff.norm()) / scale);

        let p: T = lit(rng.random_range(0.05..0.95));
        let mix = DensityMatrix::mixture(&[(p, &rho), (T::one() - p, &sigma)], tol)?;
        let avg = s_rho.mat().scale(p) + s_sigma.mat().scale(T::one() - p);
        r.convexity = r.convexity.max(order_violation(&avg, sq(rep, &mix, &spec, tol)?.mat())?);

        let (_, ch) = random_covariant_channel(&pair, &elements, &mut rng, tol)?;
        let out = apply_channel(&ch, &rho)?;
        r.monotonicity = r.monotonicity.max(order_violation(s_rho.mat(), sq(rep, &out, &spec, tol)?.mat())?);

        // flagged outcomes: S_q of Σ p_k ρ_k ⊗ |k⟩⟨k| is Σ p_k S_q^{ρ_k}
        let parts = random_covariant_instrument(&pair, &elements, &mut rng)?;
        let mut flagged = CMat::zeros(rep.dim_g(), rep.dim_g());
        for ops in &parts {
            let m = apply_cp(ops, &rho);
            let pk = m.trace().re;
            if pk <= lit(1e-12) {
                continue;
            }
            let branch = DensityMatrix::new(m.unscale(pk), tol)?;
            flagged += sq(rep, &branch, &spec, tol)?.mat().scale(pk);
        }
        r.strong_monotonicity = r.strong_monotonicity.max(order_violation(s_rho.mat(), &flagged)?);
    }
    Ok(r)
}

/// Average QGTs of the two pure-state decompositions of ½(I + εσ_z) under Pauli generators,
/// next to the closed forms and their matrix order.
#[derive(Debug, Clone)]
pub struct CounterexampleReport<T: Real> {
    pub epsilon: T,
    /// ε|0⟩⟨0| + (1−ε)I/2.
    pub first: HermMatrix<T>,
    /// ½(ψ₊ + ψ₋), ψ± = cos(φ/2)|0⟩ ± sin(φ/2)|1⟩ with cos φ = ε.
    pub second: HermMatrix<T>,
    pub first_expected: HermMatrix<T>,
    pub second_expected: HermMatrix<T>,
    /// Largest entrywise deviation from the closed forms.
    pub max_deviation: T,
    /// ‖Σ p_i ψ_i − ρ‖ over both decompositions.
    pub decomposition_residual: T,
    pub order: MatrixOrder,
}

fn herm3<T: Real>(entries: [[(f64, f64); 3]; 3]) -> HermMatrix<T> {
    HermMatrix::from_hermitian_part(&CMat::from_fn(3, 3, |i, j| Complex::new(lit(entries[i][j].0), lit(entries[i][j].1))))
}

pub fn convex_roof_counterexample<T: Real>(epsilon: T, tol: &ToleranceConfig) -> Result<CounterexampleReport<T>> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::InvalidParameter(format!("ε must lie in (0,1), got {epsilon:?}")));
    }
    let rep = pauli::<T>();
    let c = epsilon;
    let phi = c.acos();
    let half = lit::<T>(0.5);
    let (ch, sh) = ((phi * half).cos(), (phi * half).sin());
    let ket = |a: T, b: T| PureState::normalized(nalgebra::DVector::from_vec(vec![Complex::new(a, T::zero()), Complex::new(b, T::zero())]));
    let zero = ket(T::one(), T::zero())?;
    let plus = ket(ch, sh)?;
    let minus = ket(ch, -sh)?;

    // the maximally mixed part is symmetric and carries no QGT
    let first = average_qgt(&rep, &[(c, zero.clone())])?;
    let second = average_qgt(&rep, &[(half, plus.clone()), (half, minus.clone())])?;

    let cf = to_f64(c);
    let sf2 = 1.0 - cf * cf;
    let first_expected = herm3([[(cf, 0.0), (0.0, cf), (0.0, 0.0)], [(0.0, -cf), (cf, 0.0), (0.0, 0.0)], [(0.0, 0.0); 3]]);
    let second_expected = herm3([
        [(cf * cf, 0.0), (0.0, cf), (0.0, 0.0)],
        [(0.0, -cf), (1.0, 0.0), (0.0, 0.0)],
        [(0.0, 0.0), (0.0, 0.0), (sf2, 0.0)],
    ]);
    let dev = |a: &HermMatrix<T>, b: &HermMatrix<T>| (a.mat() - b.mat()).iter().fold(T::zero(), |m, z| m.max(cabs(*z)));
    let max_deviation = dev(&first, &first_expected).max(dev(&second, &second_expected));

    let rho = (CMat::<T>::identity(2, 2) + crate::repkit::builders::pauli_matrices::<T>()[2].scale(c)).scale(half);
    let d1 = zero.projector().scale(c) + CMat::<T>::identity(2, 2).scale((T::one() - c) * half);
    let d2 = (plus.projector() + minus.projector()).scale(half);
    let decomposition_residual = (&d1 - &rho).norm().max((&d2 - &rho).norm());

    let order = matrix_order(&first, &second, tol)?;
    Ok(CounterexampleReport {
        epsilon,
        first,
        second,
        first_expected,
        second_expected,
        max_deviation,
        decomposition_residual,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repkit::builders::u1;

    #[test]
    fn qubit_u1_suite_has_no_violations() {
        let rep = u1(&[0.0, 1.0]);
        let r = s_q_property_suite(&rep, 40, 11, &ToleranceConfig::default()).unwrap();
        assert_eq!(r.draws, 40);
        assert!(r.max_violation() <= 1e-9, "{r:?}");
    }

    #[test]
    fn qutrit_torus_suite_has_no_violations() {
        let rep = Representation::new(
            vec![
                HermMatrix::from_real_diagonal(&[0.0, 1.0, 2.0]),
                HermMatrix::from_real_diagonal(&[1.0, 0.0, -1.0]),
            ],
            "T2",
        )
        .unwrap();
        let r = s_q_property_suite(&rep, 15, 4, &ToleranceConfig::default()).unwrap();
        assert!(r.max_violation() <= 1e-9, "{r:?}");
    }

    #[test]
    fn pure_products_are_additive() {
        let rep = u1(&[0.0, 1.0, 3.0]);
        let both = product_generators(&rep, &rep).unwrap();
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for q in [0.2, 0.5, 0.8] {
            let spec = MetricSpec::new(q).unwrap();
            let a = crate::numkit::random::random_state::<f64, _>(3, &mut rng).to_density();
            let b = crate::numkit::random::random_state::<f64, _>(3, &mut rng).to_density();
            let joint = DensityMatrix::new(tensor_product(a.mat(), b.mat()), &tol).unwrap();
            let lhs = sq(&both, &joint, &spec, &tol).unwrap();
            let rhs = sq(&rep, &a, &spec, &tol).unwrap().mat() + sq(&rep, &b, &spec, &tol).unwrap().mat();
            assert!((lhs.mat() - rhs).norm() <= 1e-10);
        }
    }

    #[test]
    fn counterexample_decompositions_are_incomparable() {
        for eps in [0.1, 0.5, 0.9] {
            let r = convex_roof_counterexample(eps, &ToleranceConfig::default()).unwrap();
            assert!(r.max_deviation <= 1e-12, "{}", r.max_deviation);
            assert!(r.decomposition_residual <= 1e-12);
            assert_eq!(r.order, MatrixOrder::Incomparable);
        }
        assert!(convex_roof_counterexample(1.0, &ToleranceConfig::default()).is_err());
    }
}
