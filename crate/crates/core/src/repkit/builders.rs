//! Standard representations used by fixtures and tests.

use nalgebra::Complex;

use super::rep::Representation;
use crate::error::{Error, Result};
use crate::numkit::{CMat, CVec, HermMatrix, PureState};
use crate::scalar::{lit, Real};

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

/// σ_x, σ_y, σ_z without the ½.
pub fn pauli_matrices<T: Real>() -> [CMat<T>; 3] {
    let z = c::<T>(0.0, 0.0);
    [
        CMat::from_row_slice(2, 2, &[z, c(1.0, 0.0), c(1.0, 0.0), z]),
        CMat::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        CMat::from_row_slice(2, 2, &[c(1.0, 0.0), z, z, c(-1.0, 0.0)]),
    ]
}

/// SU(2) on a qubit with generators (σ_x, σ_y, σ_z).
pub fn pauli<T: Real>() -> Representation<T> {
    let gens = pauli_matrices::<T>().iter().map(HermMatrix::from_hermitian_part).collect();
    Representation::new(gens, "pauli").expect("three generators")
}

/// Spin matrices (J_x, J_y, J_z) for spin j = two_j/2, basis ordered m = j, j−1, …, −j.
pub fn spin_matrices<T: Real>(two_j: u32) -> [CMat<T>; 3] {
    let d = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let mut jp = CMat::<T>::zeros(d, d);
    for k in 1..d {
        let m = j - k as f64;
        jp[(k - 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm).unscale(lit(2.0));
    let jy = (&jp - &jm) * c::<T>(0.0, -0.5);
    let jz = CMat::from_diagonal(&CVec::from_fn(d, |k, _| c(j - k as f64, 0.0)));
    [jx, jy, jz]
}

/// Spin-j irrep of SU(2), j = two_j/2.
pub fn spin<T: Real>(two_j: u32) -> Representation<T> {
    let gens = spin_matrices::<T>(two_j).iter().map(HermMatrix::from_hermitian_part).collect();
    Representation::new(gens, format!("spin-{}/2", two_j)).expect("three generators")
}

/// U(1) generated by a diagonal Hamiltonian.
pub fn u1<T: Real>(eigenvalues: &[T]) -> Representation<T> {
    Representation::new(vec![HermMatrix::from_real_diagonal(eigenvalues)], "u1")
        .expect("one generator")
}

/// Block-diagonal direct sum. All summands must share dimG and component count.
pub fn direct_sum<T: Real>(reps: &[Representation<T>]) -> Result<Representation<T>> {
    let first = reps.first().ok_or(Error::Empty("direct sum summands"))?;
    let g = first.dim_g();
    let nc = first.component_reps().len();
    for r in reps {
        if r.dim_g() != g {
            return Err(Error::DimensionMismatch { expected: g, found: r.dim_g() });
        }
        if r.component_reps().len() != nc {
            return Err(Error::DimensionMismatch { expected: nc, found: r.component_reps().len() });
        }
    }
    let total: usize = reps.iter().map(|r| r.dim()).sum();
    let block = |pick: &dyn Fn(&Representation<T>) -> CMat<T>| {
        let mut m = CMat::zeros(total, total);
        let mut off = 0;
        for r in reps {
            let b = pick(r);
            let d = r.dim();
            m.view_mut((off, off), (d, d)).copy_from(&b);
            off += d;
        }
        m
    };
    let gens = (0..g)
        .map(|mu| HermMatrix::from_hermitian_part(&block(&|r| r.generators()[mu].mat().clone())))
        .collect();
    let comps = (0..nc).map(|i| block(&|r| r.component_reps()[i].clone())).collect();
    let label = reps.iter().map(|r| r.label().to_string()).collect::<Vec<_>>().join("⊕");
    Ok(Representation::from_parts(gens, comps, label))
}

/// Reference state for SO(3) at spin J = two_j/2: generators √(3/(J(J+1)))·J_μ ⊗ I on
/// (2J+1)², and the maximally entangled Ψ_J = Σ_m |m⟩|m⟩/√(2J+1).
pub fn reference_state<T: Real>(two_j: u32) -> Result<(Representation<T>, PureState<T>)> {
    if two_j == 0 {
        return Err(Error::InvalidParameter("reference state needs J > 0".into()));
    }
    let j = two_j as f64 / 2.0;
    let s: T = lit((3.0 / (j * (j + 1.0))).sqrt());
    let d = two_j as usize + 1;
    let rep = spin::<T>(two_j).scaled(s).with_trivial_ancilla(d);
    let mut v = CVec::zeros(d * d);
    for m in 0..d {
        v[m * d + m] = c(1.0, 0.0);
    }
    Ok((rep, PureState::normalized(v)?))
}
