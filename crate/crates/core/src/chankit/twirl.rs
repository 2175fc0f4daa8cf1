use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::channel::{apply_channel, KrausChannel};
use crate::error::{Error, Result};
use crate::numkit::{herm_eig, trace_distance, CMat, DensityMatrix, ToleranceConfig};
use crate::repkit::{unitary_at, GroupPoint, RepPair};
use crate::scalar::{lit, Real};

/// Which group elements the twirl averages over.
#[derive(Debug, Clone)]
pub enum TwirlSampling<T: Real> {
    /// Explicit (U, U′) pairs; exact when they form a group.
    Finite(Vec<(CMat<T>, CMat<T>)>),
    /// Uniform grid on the torus generated by commuting integer-spectrum generators, times
    /// the component representatives. Exact for such groups.
    CyclicGrid,
    /// Seeded draws, θ uniform in [−π, π]^dimG and a uniform component.
    MonteCarlo { count: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct Twirled<T: Real> {
    pub channel: KrausChannel<T>,
    /// Number of group elements averaged.
    pub elements: usize,
    pub exact: bool,
}

/// E′ = avg_g U′_g† ∘ E ∘ U_g.
pub fn twirl<T: Real>(
    ch: &KrausChannel<T>,
    pair: &RepPair<T>,
    sampling: &TwirlSampling<T>,
    tol: &ToleranceConfig,
) -> Result<Twirled<T>> {
    if ch.in_dim() != pair.rep_in.dim() || ch.out_dim() != pair.rep_out.dim() {
        return Err(Error::DimensionMismatch { expected: pair.rep_in.dim(), found: ch.in_dim() });
    }
    let (elements, exact) = match sampling {
        TwirlSampling::Finite(list) => (list.clone(), true),
        TwirlSampling::CyclicGrid => (cyclic_grid(pair)?, true),
        TwirlSampling::MonteCarlo { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let pts = random_points(pair, *count, &mut rng);
            (pts.iter().map(|p| pair.unitaries_at(p)).collect::<Result<Vec<_>>>()?, false)
        }
    };
    if elements.is_empty() {
        return Err(Error::Empty("twirl elements"));
    }
    let ops = twirl_kraus(ch.kraus_ops(), &elements)?;
    let mut channel = KrausChannel::new(ops, tol)?;
    if channel.kraus_ops().len() > ch.in_dim() * ch.out_dim() {
        channel = channel.compressed(tol)?;
    }
    Ok(Twirled { channel, elements: elements.len(), exact })
}

/// Kraus operators of avg_g U′_g† ∘ K ∘ U_g for any CP map given by `ops`.
pub(crate) fn twirl_kraus<T: Real>(ops: &[CMat<T>], elements: &[(CMat<T>, CMat<T>)]) -> Result<Vec<CMat<T>>> {
    if elements.is_empty() {
        return Err(Error::Empty("twirl elements"));
    }
    let w = Complex::new(T::one() / lit::<T>(elements.len() as f64).sqrt(), T::zero());
    let mut out = Vec::with_capacity(elements.len() * ops.len());
    for (u, v) in elements {
        for k in ops {
            if u.nrows() != k.ncols() || v.nrows() != k.nrows() {
                return Err(Error::DimensionMismatch { expected: k.ncols(), found: u.nrows() });
            }
            out.push(v.adjoint() * k * u * w);
        }
    }
    Ok(out)
}

/// Seeded group points: θ uniform in [−π, π]^dimG, component uniform.
pub fn random_points<T: Real, R: Rng + ?Sized>(pair: &RepPair<T>, count: usize, rng: &mut R) -> Vec<GroupPoint<T>> {
    let pi = std::f64::consts::PI;
    (0..count)
        .map(|_| GroupPoint {
            component: rng.random_range(0..pair.n_components()),
            theta: (0..pair.dim_g()).map(|_| lit(rng.random_range(-pi..pi))).collect(),
        })
        .collect()
}

fn integer_range<T: Real>(vals: &nalgebra::DVector<T>) -> Option<i64> {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for &v in vals.iter() {
        let r = v.round();
        if (v - r).abs() > lit(1e-9) {
            return None;
        }
        let r = r.to_i64()?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Some(hi - lo)
}

pub(crate) fn cyclic_grid<T: Real>(pair: &RepPair<T>) -> Result<Vec<(CMat<T>, CMat<T>)>> {
    let bad = || Error::InvalidParameter("cyclic grid needs commuting generators with integer spectra".into());
    let mut sizes = Vec::with_capacity(pair.dim_g());
    for side in [&pair.rep_in, &pair.rep_out] {
        let gens = side.generators();
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                let c = a.mat() * b.mat() - b.mat() * a.mat();
                if c.norm() > lit(1e-9) {
                    return Err(bad());
                }
            }
        }
    }
    for mu in 0..pair.dim_g() {
        let (vi, _) = herm_eig(&pair.rep_in.generators()[mu])?;
        let (vo, _) = herm_eig(&pair.rep_out.generators()[mu])?;
        let ri = integer_range(&vi).ok_or_else(bad)?;
        let ro = integer_range(&vo).ok_or_else(bad)?;
        // superoperator frequencies lie in [−(ri+ro), ri+ro]
        sizes.push((ri + ro + 1) as usize);
    }
    let total: usize = sizes.iter().product();
    let two_pi = lit::<T>(2.0 * std::f64::consts::PI);
    let mut out = Vec::with_capacity(total * pair.n_components());
    for c in 0..pair.n_components() {
        for flat in 0..total {
            let mut rest = flat;
            let theta: Vec<T> = sizes
                .iter()
                .map(|&m| {
                    let k = rest % m;
                    rest /= m;
                    two_pi * lit(k as f64) / lit(m as f64)
                })
                .collect();
            out.push((unitary_at(&pair.rep_in, &theta, c)?, unitary_at(&pair.rep_out, &theta, c)?));
        }
    }
    Ok(out)
}

/// max over probes and points of T(E(U_gρU_g†), U′_g E(ρ) U′_g†).
pub fn covariance_defect<T: Real>(
    ch: &KrausChannel<T>,
    pair: &RepPair<T>,
    probes: &[DensityMatrix<T>],
    points: &[GroupPoint<T>],
) -> Result<T> {
    if probes.is_empty() || points.is_empty() {
        return Err(Error::Empty("covariance probes"));
    }
    let mut worst = T::zero();
    for p in points {
        let (u, v) = pair.unitaries_at(p)?;
        for rho in probes {
            let a = apply_channel(ch, &rho.transformed(&u))?;
            let b = apply_channel(ch, rho)?.transformed(&v);
            worst = worst.max(trace_distance(&a, &b)?);
        }
    }
    Ok(worst)
}
