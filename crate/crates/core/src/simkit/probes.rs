use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chankit::{apply_channel, KrausChannel};
use crate::error::{Error, Result};
use crate::measures::{generalized_variance, petz_norm, s_matrix, MetricSpec};
use crate::numkit::random::{random_density, random_matrix, random_state};
use crate::numkit::{
    checked_power_dim, collective, eig_range, herm_eig, tensor_power, tensor_power_vec, trace_distance, CMat,
    DensityMatrix, HermMatrix, PureState, ToleranceConfig,
};
use crate::repkit::{GroupPoint, RepPair};
use crate::scalar::{lit, to_f64, Real};

use super::covariant::{exact_elements, random_covariant_channel};

/// Largest violations of the monotonicity inequalities over the draws.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub draws: usize,
    /// max over draws and generators of (‖i[E(ρ),X′]‖² − ‖i[ρ,X]‖²)⁺ / max(1, ‖i[ρ,X]‖²).
    pub max_petz_violation: f64,
    /// max over draws of (−λ_min(S^ρ − S^{E(ρ)}))⁺ / max(1, λ_max(S^ρ)).
    pub max_s_violation: f64,
    /// Same quantities for the untwirled draws, which are not covariant.
    pub control_max_violation: f64,
}

/// Relative violations (Petz norm, S matrix) of monotonicity under `ch` at ρ. Every
/// generator is probed, with the SLD metric and the given metric.
pub fn channel_violation<T: Real>(
    ch: &KrausChannel<T>,
    pair: &RepPair<T>,
    rho: &DensityMatrix<T>,
    spec: &MetricSpec<T>,
    tol: &ToleranceConfig,
) -> Result<(f64, f64)> {
    let out = apply_channel(ch, rho)?;
    let mut petz = 0.0f64;
    for s in [MetricSpec::sld(), *spec] {
        for (x, y) in pair.rep_in.generators().iter().zip(pair.rep_out.generators()) {
            let a = to_f64(petz_norm(rho, x.mat(), &s, tol)?);
            let b = to_f64(petz_norm(&out, y.mat(), &s, tol)?);
            petz = petz.max((b - a).max(0.0) / a.max(1.0));
        }
    }
    let id = GroupPoint::identity(pair.dim_g());
    let s_in = s_matrix(&pair.rep_in, rho, &id, tol)?.matrix;
    let s_out = s_matrix(&pair.rep_out, &out, &id, tol)?.matrix;
    let (lo, _) = eig_range(&HermMatrix::from_hermitian_part(&(s_in.mat() - s_out.mat())))?;
    let scale = to_f64(eig_range(&s_in)?.1).max(1.0);
    Ok((petz, (-to_f64(lo)).max(0.0) / scale))
}

/// Draws `count` seeded random channels with 2–4 Kraus operators, twirls each exactly over
/// the group and checks Petz-norm and S-matrix monotonicity at ρ.
pub fn monotonicity_probe<T: Real>(
    pair: &RepPair<T>,
    rho: &DensityMatrix<T>,
    count: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<MonotonicityReport> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be ≥ 1".into()));
    }
    let elements = exact_elements(pair)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report =
        MonotonicityReport { draws: count, max_petz_violation: 0.0, max_s_violation: 0.0, control_max_violation: 0.0 };
    for _ in 0..count {
        let spec = MetricSpec::new(lit(rng.random_range(0.05..0.95)))?;
        let (raw, tw) = random_covariant_channel(pair, &elements, &mut rng, tol)?;
        let (p, s) = channel_violation(&tw, pair, rho, &spec, tol)?;
        report.max_petz_violation = report.max_petz_violation.max(p);
        report.max_s_violation = report.max_s_violation.max(s);
        let (p, s) = channel_violation(&raw, pair, rho, &spec, tol)?;
        report.control_max_violation = report.control_max_violation.max(p.max(s));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LargestEvReport {
    pub draws: usize,
    /// Draws with δ ≥ 1/2, outside the hypothesis.
    pub skipped: usize,
    pub overlap_violations: usize,
    pub metric_violations: usize,
    /// min over draws of |⟨φ|Φ⟩|² − (1−2δ).
    pub min_overlap_margin: f64,
    /// min over draws of (lhs − rhs)/max(1, rhs) for the Petz-norm lower bound.
    pub min_metric_margin: f64,
}

/// (δ, (1−2δ)²/f(δ/(1−δ))·⟨Φ|O(I−Φ)O†|Φ⟩, Φ) with Φ the top eigenvector of σ and
/// δ = 1 − ⟨φ|σ|φ⟩. The middle value bounds ‖i[σ,O]‖²_{f,σ} from below; None when δ ≥ 1/2.
pub fn largest_ev_bound<T: Real>(
    sigma: &DensityMatrix<T>,
    phi: &PureState<T>,
    o: &CMat<T>,
    spec: &MetricSpec<T>,
) -> Result<Option<(T, T, PureState<T>)>> {
    let delta = T::one() - phi.vec().dotc(&(sigma.mat() * phi.vec())).re;
    if delta >= lit(0.5) {
        return Ok(None);
    }
    let (_, vecs) = herm_eig(sigma.herm())?;
    let top = PureState::normalized(vecs.column(vecs.ncols() - 1).into_owned())?;
    let v = generalized_variance(&top, o)?;
    let one = T::one();
    let two = lit::<T>(2.0);
    let bound = (one - two * delta).powi(2) / spec.f(delta / (one - delta)) * v;
    Ok(Some((delta, bound, top)))
}

/// Random σ near random pure φ in dimension d; checks |⟨φ|Φ⟩|² ≥ 1 − 2δ and the Petz-norm
/// lower bound for a random operator O and a random metric.
pub fn largest_ev_check(d: usize, count: usize, seed: u64, tol: &ToleranceConfig) -> Result<LargestEvReport> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = LargestEvReport {
        draws: count,
        skipped: 0,
        overlap_violations: 0,
        metric_violations: 0,
        min_overlap_margin: f64::INFINITY,
        min_metric_margin: f64::INFINITY,
    };
    for _ in 0..count {
        let phi = random_state::<f64, _>(d, &mut rng);
        let t: f64 = rng.random_range(0.0..0.6);
        let tau = random_density::<f64, _>(d, rng.random_range(1..=d), &mut rng);
        let sigma = DensityMatrix::mixture(&[(1.0 - t, &phi.to_density()), (t, &tau)], tol)?;
        let o = random_matrix::<f64, _>(d, d, &mut rng);
        let spec = MetricSpec::new(rng.random_range(0.05..0.95))?;
        let Some((delta, bound, top)) = largest_ev_bound(&sigma, &phi, &o, &spec)? else {
            rep.skipped += 1;
            continue;
        };
        let overlap = phi.vec().dotc(top.vec()).norm_sqr();
        let m = overlap - (1.0 - 2.0 * delta);
        rep.min_overlap_margin = rep.min_overlap_margin.min(m);
        if m < -1e-12 {
            rep.overlap_violations += 1;
        }
        let lhs = petz_norm(&sigma, &o, &spec, tol)?;
        let m = (lhs - bound) / bound.max(1.0);
        rep.min_metric_margin = rep.min_metric_margin.min(m);
        if m < -1e-9 {
            rep.metric_violations += 1;
        }
    }
    Ok(rep)
}

/// Noise mixed into φ^{⊗N} for [`admixed_sequence`].
#[derive(Debug, Clone)]
pub enum Admixture<T: Real> {
    MaximallyMixed,
    /// τ^{⊗N} for a fixed single-copy pure state τ.
    Product(PureState<T>),
}

/// σ_N = (1−ε_N)·φ^{⊗N} + ε_N·noise_N for each N.
pub fn admixed_sequence<T: Real>(
    phi: &PureState<T>,
    ns: &[usize],
    eps: impl Fn(usize) -> T,
    noise: &Admixture<T>,
    cap: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<(usize, DensityMatrix<T>)>> {
    ns.iter()
        .map(|&n| {
            let dim = checked_power_dim(phi.dim(), n, cap)?;
            let base = PureState::normalized(tensor_power_vec(phi.vec(), n, cap)?)?.to_density();
            let other = match noise {
                Admixture::MaximallyMixed => DensityMatrix::maximally_mixed(dim),
                Admixture::Product(tau) => DensityMatrix::new(tensor_power(&tau.projector(), n, cap)?, tol)?,
            };
            let e = eps(n);
            Ok((n, DensityMatrix::mixture(&[(T::one() - e, &base), (e, &other)], tol)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureLimitRow {
    pub n: usize,
    pub distance: f64,
    /// 1 − ⟨φ^{⊗N}|σ_N|φ^{⊗N}⟩.
    pub delta: f64,
    /// f(0)·‖i[σ_N, O_N]‖²/N.
    pub ratio: f64,
    /// f(0)·(largest-eigenvector lower bound)/N; None when δ ≥ 1/2.
    pub rigorous_bound: Option<f64>,
    pub bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureLimitReport {
    /// V(φ, O), the asymptotic floor of the ratio.
    pub variance: f64,
    /// Exact ratio at σ_N = φ^{⊗N}: V(φ,O) + ((1−q)/q)·V(φ,O†).
    pub pure_ratio: f64,
    pub rows: Vec<PureLimitRow>,
    pub note: &'static str,
}

/// f(0)‖i[σ_N,O_N]‖²/N against V(φ,O) along a sequence σ_N → φ^{⊗N}. Only the finite-N
/// largest-eigenvector inequality is checked (at every row with δ < 1/2); the approach to
/// V(φ,O) is reported as a trend.
pub fn pure_limit_probe<T: Real>(
    phi: &PureState<T>,
    o: &CMat<T>,
    sigmas: &[(usize, DensityMatrix<T>)],
    spec: &MetricSpec<T>,
    cap: usize,
    tol: &ToleranceConfig,
) -> Result<PureLimitReport> {
    if sigmas.is_empty() {
        return Err(Error::Empty("state sequence"));
    }
    let variance = to_f64(generalized_variance(phi, o)?);
    let vdag = to_f64(generalized_variance(phi, &o.adjoint())?);
    let q = to_f64(spec.q());
    let f0 = to_f64(spec.f0());
    let mut rows = Vec::with_capacity(sigmas.len());
    for (n, sigma) in sigmas {
        let on = collective(o, *n, cap)?;
        let phin = PureState::normalized(tensor_power_vec(phi.vec(), *n, cap)?)?;
        if sigma.dim() != phin.dim() {
            return Err(Error::DimensionMismatch { expected: phin.dim(), found: sigma.dim() });
        }
        let nf = *n as f64;
        let norm = to_f64(petz_norm(sigma, &on, spec, tol)?);
        let ratio = f0 * norm / nf;
        let bound = largest_ev_bound(sigma, &phin, &on, spec)?.map(|(_, b, _)| f0 * to_f64(b) / nf);
        let delta = 1.0 - to_f64(phin.vec().dotc(&(sigma.mat() * phin.vec())).re);
        rows.push(PureLimitRow {
            n: *n,
            distance: to_f64(trace_distance(sigma, &phin.to_density())?),
            delta,
            ratio,
            rigorous_bound: bound,
            bound_holds: bound.is_none_or(|b| ratio >= b - 1e-9 * b.max(1.0)),
        });
    }
    Ok(PureLimitReport {
        variance,
        pure_ratio: variance + (1.0 - q) / q * vdag,
        rows,
        note: "finite-N trend probe; the asymptotic statement is not verified",
    })
}

/// Hadamard channel on a qubit with ρ = |0⟩ and U(1) diag(0,1): not covariant, and the
/// Petz norm grows from 0 to 1/4·(1/(1−q) + 1/q) under it.
pub fn negative_control<T: Real>(tol: &ToleranceConfig) -> Result<(f64, f64)> {
    use crate::repkit::builders::u1;
    let h = CMat::from_fn(2, 2, |i, j| {
        let s = if i == 1 && j == 1 { -T::one() } else { T::one() };
        nalgebra::Complex::new(s / lit::<T>(2.0).sqrt(), T::zero())
    });
    let ch = KrausChannel::unitary(h);
    let pair = RepPair::new(u1(&[T::zero(), T::one()]), u1(&[T::zero(), T::one()]))?;
    let rho = PureState::basis(2, 0)?.to_density();
    channel_violation(&ch, &pair, &rho, &MetricSpec::sld(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repkit::builders::{spin, u1};

    #[test]
    fn twirled_channels_are_monotone() {
        let tol = ToleranceConfig::default();
        let pair = RepPair::new(u1(&[0.0, 1.0]), u1(&[0.0, 1.0])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for rank in 1..=2 {
            let rho = random_density::<f64, _>(2, rank, &mut rng);
            let r = monotonicity_probe(&pair, &rho, 40, 5 + rank as u64, &tol).unwrap();
            assert!(r.max_petz_violation <= 1e-9, "{r:?}");
            assert!(r.max_s_violation <= 1e-9, "{r:?}");
        }
        // qubit into qutrit
        let pair = RepPair::new(u1(&[0.0, 1.0]), u1(&[0.0, 1.0, 2.0])).unwrap();
        let rho = PureState::<f64>::normalized(nalgebra::DVector::from_element(2, nalgebra::Complex::new(1.0, 0.0)))
            .unwrap()
            .to_density();
        let r = monotonicity_probe(&pair, &rho, 40, 3, &tol).unwrap();
        assert!(r.max_petz_violation <= 1e-9 && r.max_s_violation <= 1e-9, "{r:?}");
        assert!(r.control_max_violation > 1e-3, "{r:?}");
    }

    #[test]
    fn identity_channel_has_no_violation() {
        let tol = ToleranceConfig::default();
        let pair = RepPair::new(u1(&[0.0, 1.0]), u1(&[0.0, 1.0])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density::<f64, _>(2, 2, &mut rng);
        let (p, s) = channel_violation(&KrausChannel::identity(2), &pair, &rho, &MetricSpec::sld(), &tol).unwrap();
        assert_eq!((p, s), (0.0, 0.0));
    }

    #[test]
    fn negative_control_has_teeth() {
        let (p, _) = negative_control::<f64>(&ToleranceConfig::default()).unwrap();
        // 0 → (1/4)·(1/(1−q) + 1/q) = 1 at q = 1/2
        assert!((p - 1.0).abs() < 1e-12, "{p}");
    }

    #[test]
    fn non_abelian_groups_are_refused() {
        let pair = RepPair::new(spin(1), spin(1)).unwrap();
        let rho = DensityMatrix::<f64>::maximally_mixed(2);
        assert!(monotonicity_probe(&pair, &rho, 3, 1, &ToleranceConfig::default()).is_err());
    }

    #[test]
    fn largest_eigenvector_bounds() {
        let tol = ToleranceConfig::default();
        for d in 2..=4 {
            let r = largest_ev_check(d, 200, d as u64, &tol).unwrap();
            assert_eq!(r.overlap_violations + r.metric_violations, 0, "{r:?}");
            assert!(r.skipped < r.draws / 2);
        }
        // σ = φ: δ = 0, overlap 1
        let phi = PureState::<f64>::basis(3, 1).unwrap();
        let o = CMat::<f64>::identity(3, 3);
        let (delta, _, top) = largest_ev_bound(&phi.to_density(), &phi, &o, &MetricSpec::sld()).unwrap().unwrap();
        assert!(delta.abs() < 1e-15);
        assert!((phi.vec().dotc(top.vec()).norm_sqr() - 1.0).abs() < 1e-12);
        // rank-2 closed form: σ = (1−δ)φ + δ·φ⊥ keeps φ as top eigenvector
        let perp = PureState::<f64>::basis(3, 2).unwrap();
        let sigma = DensityMatrix::mixture(&[(0.8, &phi.to_density()), (0.2, &perp.to_density())], &tol).unwrap();
        let (delta, _, top) = largest_ev_bound(&sigma, &phi, &o, &MetricSpec::sld()).unwrap().unwrap();
        assert!((delta - 0.2).abs() < 1e-12);
        assert!((phi.vec().dotc(top.vec()).norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_limit_probe_pure_and_admixed() {
        let tol = ToleranceConfig::default();
        let phi = PureState::<f64>::normalized(nalgebra::DVector::from_vec(vec![
            nalgebra::Complex::new(0.8, 0.0),
            nalgebra::Complex::new(0.0, 0.6),
        ]))
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let o = random_matrix::<f64, _>(2, 2, &mut rng);
        let spec = MetricSpec::new(0.3).unwrap();
        let ns: Vec<usize> = (1..=6).collect();
        let exact = admixed_sequence(&phi, &ns, |_| 0.0, &Admixture::MaximallyMixed, 4096, &tol).unwrap();
        let r = pure_limit_probe(&phi, &o, &exact, &spec, 4096, &tol).unwrap();
        for row in &r.rows {
            assert!((row.ratio - r.pure_ratio).abs() < 1e-10 * r.pure_ratio.max(1.0), "{row:?}");
            assert!(row.bound_holds);
        }
        let noisy = admixed_sequence(&phi, &ns, |n| 1.0 / (4.0 * n as f64 * n as f64), &Admixture::MaximallyMixed, 4096, &tol)
            .unwrap();
        let r = pure_limit_probe(&phi, &o, &noisy, &spec, 4096, &tol).unwrap();
        assert!(r.rows.iter().all(|row| row.bound_holds));
        let tail = PureState::<f64>::basis(2, 1).unwrap();
        let adv = admixed_sequence(&phi, &ns, |_| 0.02, &Admixture::Product(tail), 4096, &tol).unwrap();
        let r = pure_limit_probe(&phi, &o, &adv, &spec, 4096, &tol).unwrap();
        assert!(r.rows.iter().all(|row| row.bound_holds && row.ratio > 0.0));
    }
}
