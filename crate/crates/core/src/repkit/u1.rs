use nalgebra::Complex;

use super::rep::{check_unitary, Representation};
use crate::error::{Error, Result};
use crate::numkit::{CMat, CVec, DensityMatrix, HermMatrix, ToleranceConfig};
use crate::scalar::{cabs, lit, Real};

/// U(1) action generated by H = B·diag(n)·B† with integer spectrum n.
#[derive(Debug, Clone, PartialEq)]
pub struct U1Spec<T: Real> {
    pub eigenvalues: Vec<i64>,
    pub basis: CMat<T>,
}

impl<T: Real> U1Spec<T> {
    pub fn new(eigenvalues: Vec<i64>, basis: CMat<T>, tol: &ToleranceConfig) -> Result<Self> {
        check_unitary(&basis, eigenvalues.len(), tol)?;
        Ok(Self { eigenvalues, basis })
    }

    /// Diagonal Hamiltonian in the computational basis.
    pub fn diagonal(eigenvalues: Vec<i64>) -> Self {
        let d = eigenvalues.len();
        Self { eigenvalues, basis: CMat::identity(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn hamiltonian(&self) -> HermMatrix<T> {
        let diag = CVec::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&n| Complex::new(lit(n as f64), T::zero())),
        );
        let h = &self.basis * CMat::from_diagonal(&diag) * self.basis.adjoint();
        HermMatrix::from_hermitian_part(&h)
    }

    pub fn to_representation(&self) -> Representation<T> {
        Representation::new(vec![self.hamiltonian()], "u1").expect("one generator")
    }

    /// ρ written in the eigenbasis of H.
    pub(crate) fn in_eigenbasis(&self, rho: &CMat<T>) -> CMat<T> {
        self.basis.adjoint() * rho * &self.basis
    }
}

/// Period structure of a state under U(1): Sym = {θ : θ·d ∈ 2πℤ} for `Divisor(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryDivisor {
    Full,
    Divisor(u64),
}

impl SymmetryDivisor {
    /// Whether Sym(self) ⊆ Sym(other).
    pub fn subgroup_of(self, other: SymmetryDivisor) -> bool {
        match (self, other) {
            (_, SymmetryDivisor::Full) => true,
            (SymmetryDivisor::Full, SymmetryDivisor::Divisor(_)) => false,
            (SymmetryDivisor::Divisor(a), SymmetryDivisor::Divisor(b)) => b % a == 0,
        }
    }

    /// Smallest nonzero stabilizing angle, if any.
    pub fn period(self) -> Option<f64> {
        match self {
            SymmetryDivisor::Full => None,
            SymmetryDivisor::Divisor(d) => Some(std::f64::consts::TAU / d as f64),
        }
    }
}

impl std::fmt::Display for SymmetryDivisor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymmetryDivisor::Full => write!(f, "all of U(1)"),
            SymmetryDivisor::Divisor(d) => write!(f, "Z_{d}"),
        }
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// gcd of the level differences |n_j − n_k| over pairs that the state couples.
pub fn u1_symmetry_divisor<T: Real>(
    spec: &U1Spec<T>,
    state: &DensityMatrix<T>,
    tol: &ToleranceConfig,
) -> Result<SymmetryDivisor> {
    if state.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: state.dim() });
    }
    let r = spec.in_eigenbasis(state.mat());
    let thresh = lit::<T>(tol.tol_kernel);
    let mut g = 0u64;
    let n = spec.dim();
    for j in 0..n {
        for k in (j + 1)..n {
            let diff = (spec.eigenvalues[j] - spec.eigenvalues[k]).unsigned_abs();
            if diff != 0 && cabs(r[(j, k)]) > thresh {
                g = gcd(g, diff);
            }
        }
    }
    Ok(if g == 0 { SymmetryDivisor::Full } else { SymmetryDivisor::Divisor(g) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::PureState;
    use crate::repkit::rep::unitary_at;

    fn ket(amps: &[f64]) -> DensityMatrix<f64> {
        let v = CVec::from_iterator(amps.len(), amps.iter().map(|&a| Complex::new(a, 0.0)));
        PureState::normalized(v).unwrap().to_density()
    }

    #[test]
    fn divisor_examples() {
        let tol = ToleranceConfig::default();
        let spec = U1Spec::<f64>::diagonal(vec![0, 1, 2]);
        assert_eq!(u1_symmetry_divisor(&spec, &ket(&[1.0, 0.0, 1.0]), &tol).unwrap(), SymmetryDivisor::Divisor(2));
        assert_eq!(u1_symmetry_divisor(&spec, &ket(&[1.0, 1.0, 0.0]), &tol).unwrap(), SymmetryDivisor::Divisor(1));
        assert_eq!(u1_symmetry_divisor(&spec, &ket(&[1.0, 0.0, 0.0]), &tol).unwrap(), SymmetryDivisor::Full);
    }

    #[test]
    fn divisor_invariant_under_rotation_and_phase() {
        let tol = ToleranceConfig::default();
        let spec = U1Spec::<f64>::diagonal(vec![0, 2, 4, 6]);
        let rho = ket(&[1.0, 0.0, 0.5, 0.3]);
        let base = u1_symmetry_divisor(&spec, &rho, &tol).unwrap();
        assert_eq!(base, SymmetryDivisor::Divisor(2));
        let u = unitary_at(&spec.to_representation(), &[0.37], 0).unwrap();
        assert_eq!(u1_symmetry_divisor(&spec, &rho.transformed(&u), &tol).unwrap(), base);
        let ph = CMat::identity(4, 4) * Complex::new(0.6, 0.8);
        assert_eq!(u1_symmetry_divisor(&spec, &rho.transformed(&ph), &tol).unwrap(), base);
    }

    #[test]
    fn inclusion_rule() {
        use SymmetryDivisor::*;
        assert!(Divisor(1).subgroup_of(Divisor(2)));
        assert!(!Divisor(2).subgroup_of(Divisor(1)));
        assert!(Divisor(3).subgroup_of(Full));
        assert!(!Full.subgroup_of(Divisor(3)));
        assert!(Full.subgroup_of(Full));
    }
}
