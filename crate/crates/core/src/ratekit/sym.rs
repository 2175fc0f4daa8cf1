use nalgebra::{DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numkit::{
    commutator, expm_i, frobenius, trace_distance, CMat, DensityMatrix, RMat,
    ToleranceConfig,
};
use crate::repkit::{
    is_multiple_of_identity, u1_symmetry_divisor, unitary_at, RepPair, Representation,
    SymmetryDivisor, U1Spec,
};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness<T: Real> {
    /// Real Lie-algebra direction fixing the input but not the output.
    Direction(Vec<T>),
    /// Group element (input unitary, output unitary) fixing the input but not the output.
    Element { u_in: CMat<T>, u_out: CMat<T> },
}

/// Whether Sym(ρ_in) ⊆ Sym(ρ_out).
#[derive(Debug, Clone, PartialEq)]
pub struct SymVerdict<T: Real> {
    pub verdict: Verdict,
    pub witnesses: Vec<(Witness<T>, String)>,
    pub notes: Vec<String>,
}

impl<T: Real> SymVerdict<T> {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

#[derive(Debug, Clone)]
pub struct SymOptions<T: Real> {
    /// Integer-spectrum Hamiltonians for a U(1) pair; derived from the generators when
    /// both have integer spectra and this is left empty.
    pub u1: Option<(U1Spec<T>, U1Spec<T>)>,
    pub extra_elements: Vec<(CMat<T>, CMat<T>)>,
    /// The component pairs plus `extra_elements` list the whole group (generators ∝ I).
    pub finite_exhaustive: bool,
    /// Random group elements tested per component.
    pub samples: usize,
    pub seed: u64,
    /// Trace distance below which an element counts as fixing a state.
    pub fix_tol: f64,
}

impl<T: Real> Default for SymOptions<T> {
    fn default() -> Self {
        Self { u1: None, extra_elements: Vec::new(), finite_exhaustive: false, samples: 16, seed: 0, fix_tol: 1e-8 }
    }
}

/// Columns vec([ρ, X_μ]) split into real and imaginary parts.
pub(crate) fn commutator_columns<T: Real>(rho: &CMat<T>, rep: &Representation<T>) -> RMat<T> {
    let d = rho.nrows();
    let mut m = RMat::zeros(2 * d * d, rep.dim_g());
    for (mu, x) in rep.generators().iter().enumerate() {
        let c = commutator(rho, x.mat());
        for (k, z) in c.iter().enumerate() {
            m[(2 * k, mu)] = z.re;
            m[(2 * k + 1, mu)] = z.im;
        }
    }
    m
}

fn generator_scale<T: Real>(rep: &Representation<T>) -> T {
    rep.generators().iter().fold(T::one(), |m, x| m.max(frobenius(x.mat())))
}

/// Orthonormal basis (columns) of the real null space of m.
pub(crate) fn real_nullspace<T: Real>(m: &RMat<T>, cut: T) -> RMat<T> {
    let g = m.ncols();
    let eig = SymmetricEigen::new(m.transpose() * m);
    let idx: Vec<usize> = (0..g).filter(|&j| eig.eigenvalues[j] <= cut * cut).collect();
    let mut out = RMat::zeros(g, idx.len());
    for (c, &j) in idx.iter().enumerate() {
        out.set_column(c, &eig.eigenvectors.column(j));
    }
    out
}

fn fixes<T: Real>(u: &CMat<T>, rho: &DensityMatrix<T>, tol: T) -> Result<bool> {
    Ok(trace_distance(&rho.transformed(u), rho)? <= tol)
}

/// Integer-spectrum U(1) description of a one-generator representation, if there is one.
fn integer_u1<T: Real>(rep: &Representation<T>) -> Option<U1Spec<T>> {
    if rep.dim_g() != 1 {
        return None;
    }
    let (vals, vecs) = crate::numkit::herm_eig(&rep.generators()[0]).ok()?;
    let mut ints = Vec::with_capacity(vals.len());
    for &v in vals.iter() {
        let r = v.round();
        if (v - r).abs() > lit(1e-9) {
            return None;
        }
        ints.push(crate::scalar::to_f64(r) as i64);
    }
    Some(U1Spec { eigenvalues: ints, basis: vecs })
}

/// Compares Sym(ρ_in) with Sym(ρ_out): Lie-algebra stabilizers, explicit or sampled
/// elements, and the complete tests available for U(1) and for listed finite groups.
pub fn sym_check<T: Real>(
    pair: &RepPair<T>,
    rho_in: &DensityMatrix<T>,
    rho_out: &DensityMatrix<T>,
    opts: &SymOptions<T>,
    tol: &ToleranceConfig,
) -> Result<SymVerdict<T>> {
    if rho_in.dim() != pair.rep_in.dim() {
        return Err(Error::DimensionMismatch { expected: pair.rep_in.dim(), found: rho_in.dim() });
    }
    if rho_out.dim() != pair.rep_out.dim() {
        return Err(Error::DimensionMismatch { expected: pair.rep_out.dim(), found: rho_out.dim() });
    }
    let fix_tol = lit::<T>(opts.fix_tol);
    let violated = |w: Witness<T>, why: String| SymVerdict {
        verdict: Verdict::Violated,
        witnesses: vec![(w, why)],
        notes: Vec::new(),
    };

    // identity component: ker of γ ↦ [ρ, γ·X]
    let m_in = commutator_columns(rho_in.mat(), &pair.rep_in);
    let m_out = commutator_columns(rho_out.mat(), &pair.rep_out);
    let s_in = generator_scale(&pair.rep_in);
    let s_out = generator_scale(&pair.rep_out);
    let ker_in = real_nullspace(&m_in, lit::<T>(tol.tol_kernel) * s_in);
    if ker_in.ncols() > 0 {
        let leak = &m_out * &ker_in;
        if leak.norm() > lit::<T>(tol.tol_residual) * s_out {
            let eig = SymmetricEigen::new(leak.transpose() * &leak);
            let top = (0..eig.eigenvalues.len())
                .max_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap())
                .unwrap_or(0);
            let mut gamma: DVector<T> = &ker_in * eig.eigenvectors.column(top);
            let lead = gamma.iter().fold(T::zero(), |m, &x| if x.abs() > m.abs() { x } else { m });
            if lead < T::zero() {
                gamma = -gamma;
            }
            gamma.iter_mut().for_each(|x| {
                if x.abs() < lit(1e-12) {
                    *x = T::zero()
                }
            });
            return Ok(violated(
                Witness::Direction(gamma.iter().copied().collect()),
                "generator direction leaves the input invariant but moves the output".into(),
            ));
        }
    }

    // explicit elements: component pairs, user-supplied pairs, random samples
    let mut candidates: Vec<(CMat<T>, CMat<T>)> = pair.component_pairs().iter().skip(1).cloned().collect();
    candidates.extend(opts.extra_elements.iter().cloned());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pi = T::pi();
    for comp in 0..pair.n_components() {
        for _ in 0..opts.samples {
            let theta: Vec<T> = (0..pair.dim_g())
                .map(|_| lit::<T>(rng.random_range(-1.0..1.0)) * pi)
                .collect();
            candidates.push((
                unitary_at(&pair.rep_in, &theta, comp)?,
                unitary_at(&pair.rep_out, &theta, comp)?,
            ));
        }
    }
    for (u, v) in &candidates {
        if fixes(u, rho_in, fix_tol)? && !fixes(v, rho_out, fix_tol)? {
            return Ok(violated(
                Witness::Element { u_in: u.clone(), u_out: v.clone() },
                "group element leaves the input invariant but moves the output".into(),
            ));
        }
    }

    // complete tests
    let u1 = opts.u1.clone().or_else(|| Some((integer_u1(&pair.rep_in)?, integer_u1(&pair.rep_out)?)));
    if let (Some((h_in, h_out)), 1) = (u1, pair.n_components()) {
        let d_in = u1_symmetry_divisor(&h_in, rho_in, tol)?;
        let d_out = u1_symmetry_divisor(&h_out, rho_out, tol)?;
        if d_in.subgroup_of(d_out) {
            return Ok(SymVerdict {
                verdict: Verdict::Holds,
                witnesses: Vec::new(),
                notes: vec![format!("U(1) stabilizers {d_in} ⊆ {d_out}")],
            });
        }
        let theta: T = match (d_in, d_out) {
            (SymmetryDivisor::Divisor(a), _) => lit(std::f64::consts::TAU / a as f64),
            (SymmetryDivisor::Full, SymmetryDivisor::Divisor(b)) => lit(std::f64::consts::PI / b as f64),
            (SymmetryDivisor::Full, SymmetryDivisor::Full) => unreachable!("Full ⊆ Full"),
        };
        return Ok(violated(
            Witness::Element {
                u_in: expm_i(&h_in.hamiltonian(), theta)?,
                u_out: expm_i(&h_out.hamiltonian(), theta)?,
            },
            format!("U(1) stabilizers {d_in} ⊄ {d_out}"),
        ));
    }

    let trivial_connected = |r: &Representation<T>| {
        r.generators().iter().all(|x| is_multiple_of_identity(x.mat(), lit(tol.tol_residual)))
    };
    if opts.finite_exhaustive && trivial_connected(&pair.rep_in) && trivial_connected(&pair.rep_out) {
        return Ok(SymVerdict {
            verdict: Verdict::Holds,
            witnesses: Vec::new(),
            notes: vec![format!("exhaustive check over {} listed elements", candidates.len() + 1)],
        });
    }

    let out_symmetric = m_out.norm() <= lit::<T>(tol.tol_residual) * s_out && {
        let mut all = true;
        for (_, v) in pair.component_pairs().iter().skip(1).chain(opts.extra_elements.iter()) {
            all &= fixes(v, rho_out, fix_tol)?;
        }
        all
    };
    if out_symmetric {
        return Ok(SymVerdict {
            verdict: Verdict::Holds,
            witnesses: Vec::new(),
            notes: vec!["output state is invariant under the whole group".into()],
        });
    }

    if pair.rep_in == pair.rep_out && trace_distance(rho_in, rho_out)? <= fix_tol {
        return Ok(SymVerdict {
            verdict: Verdict::Holds,
            witnesses: Vec::new(),
            notes: vec!["identical representation and state".into()],
        });
    }

    Ok(SymVerdict {
        verdict: Verdict::Inconclusive,
        witnesses: Vec::new(),
        notes: vec![format!(
            "no violation found among the Lie stabilizer and {} tested elements; inclusion not certified",
            candidates.len()
        )],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{CVec, HermMatrix, PureState};
    use crate::repkit::builders::{pauli, u1};
    use nalgebra::Complex;

    fn ket(amps: &[f64]) -> DensityMatrix<f64> {
        let v = CVec::from_iterator(amps.len(), amps.iter().map(|&a| Complex::new(a, 0.0)));
        PureState::normalized(v).unwrap().to_density()
    }

    #[test]
    fn zero_to_plus_violates_with_z_witness() {
        let rep = pauli::<f64>();
        let pair = RepPair::new(rep.clone(), rep).unwrap();
        let v = sym_check(&pair, &ket(&[1.0, 0.0]), &ket(&[1.0, 1.0]), &SymOptions::default(), &ToleranceConfig::default())
            .unwrap();
        assert_eq!(v.verdict, Verdict::Violated);
        match &v.witnesses[0].0 {
            Witness::Direction(g) => assert_eq!(g, &vec![0.0, 0.0, 1.0]),
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn u1_divisor_gate() {
        let tol = ToleranceConfig::default();
        let pair = RepPair::new(u1(&[0.0, 1.0, 2.0]), u1(&[0.0, 1.0, 2.0])).unwrap();
        let opts = SymOptions::default();
        // period π input (divisor 2) to period 2π output (divisor 1) is fine; reverse is not
        let even = ket(&[1.0, 0.0, 1.0]);
        let all = ket(&[1.0, 1.0, 1.0]);
        assert_eq!(sym_check(&pair, &all, &even, &opts, &tol).unwrap().verdict, Verdict::Holds);
        let v = sym_check(&pair, &even, &all, &opts, &tol).unwrap();
        assert_eq!(v.verdict, Verdict::Violated);
        if let Witness::Element { u_in, u_out } = &v.witnesses[0].0 {
            assert!(fixes(u_in, &even, 1e-10).unwrap());
            assert!(!fixes(u_out, &all, 1e-10).unwrap());
        } else {
            panic!("expected element witness");
        }
    }

    #[test]
    fn identical_states_hold() {
        let rep = pauli::<f64>();
        let pair = RepPair::new(rep.clone(), rep).unwrap();
        let s = ket(&[0.6, 0.8]);
        let v = sym_check(&pair, &s, &s, &SymOptions::default(), &ToleranceConfig::default()).unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
    }

    #[test]
    fn finite_group_exhaustive_list() {
        let tol = ToleranceConfig::default();
        let gen = vec![HermMatrix::identity(2)];
        let sx = pauli::<f64>().generators()[0].mat().clone();
        let rep = Representation::with_components(gen, vec![sx.clone()], "z2", &tol).unwrap();
        let pair = RepPair::new(rep.clone(), rep).unwrap();
        let opts = SymOptions { finite_exhaustive: true, ..SymOptions::default() };
        // |0⟩ has the trivial stabilizer, |+⟩ is σ_x invariant
        assert_eq!(sym_check(&pair, &ket(&[1.0, 0.0]), &ket(&[1.0, 1.0]), &opts, &tol).unwrap().verdict, Verdict::Holds);
        assert_eq!(
            sym_check(&pair, &ket(&[1.0, 1.0]), &ket(&[1.0, 0.0]), &opts, &tol).unwrap().verdict,
            Verdict::Violated
        );
    }

    #[test]
    fn unresolved_case_is_inconclusive() {
        let tol = ToleranceConfig::default();
        let rep = crate::repkit::builders::spin::<f64>(2);
        let pair = RepPair::new(rep.clone(), rep).unwrap();
        let a = ket(&[1.0, 0.3, 0.2]);
        let b = ket(&[0.2, 1.0, 0.5]);
        assert_eq!(sym_check(&pair, &a, &b, &SymOptions::default(), &tol).unwrap().verdict, Verdict::Inconclusive);
    }
}
