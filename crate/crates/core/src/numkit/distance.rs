use nalgebra::Complex;

use super::linalg::{herm_eig, spectral_map};
use super::types::{DensityMatrix, HermMatrix, PureState};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Trace distance ½‖a − b‖₁ and fidelity (Tr√(√a b √a))².
pub fn state_distance<T: Real>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> Result<(T, T)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok((trace_distance(a, b)?, fidelity(a, b)?))
}

pub fn trace_distance<T: Real>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> Result<T> {
    let diff = HermMatrix::from_hermitian_part(&(a.mat() - b.mat()));
    let (vals, _) = herm_eig(&diff)?;
    let t = vals.iter().fold(T::zero(), |acc, l| acc + l.abs()) * lit(0.5);
    Ok(t.min(T::one()).max(T::zero()))
}

pub fn fidelity<T: Real>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> Result<T> {
    // roundoff-level eigenvalues are zeroed before taking square roots, otherwise √ε noise
    // from rank-deficient inputs leaks into the result
    let floor = lit::<T>(1e-13);
    let sa = clipped_sqrt(a.herm(), floor)?;
    let m = HermMatrix::from_hermitian_part(&(&sa * b.mat() * &sa));
    let (vals, _) = herm_eig(&m)?;
    let cut = floor * vals[vals.len() - 1].max(T::zero());
    let s = vals.iter().filter(|&&l| l > cut).fold(T::zero(), |acc, &l| acc + l.sqrt());
    Ok((s * s).min(T::one()).max(T::zero()))
}

fn clipped_sqrt<T: Real>(h: &HermMatrix<T>, floor: T) -> Result<nalgebra::DMatrix<Complex<T>>> {
    let (vals, vecs) = herm_eig(h)?;
    let cut = floor * vals[vals.len() - 1].max(T::zero());
    Ok(spectral_map(&vals, &vecs, |l| {
        Complex::new(if l > cut { l.sqrt() } else { T::zero() }, T::zero())
    }))
}

/// ⟨φ|ρ|φ⟩, the fidelity against a pure state.
pub fn pure_fidelity<T: Real>(phi: &PureState<T>, rho: &DensityMatrix<T>) -> T {
    let v = phi.vec();
    v.dotc(&(rho.mat() * v)).re.min(T::one()).max(T::zero())
}

/// T(ρ^{⊗n}, |φ⟩⟨φ|^{⊗n}) without forming the d^n-dimensional matrices.
///
/// ρ^{⊗n} − |Φ⟩⟨Φ| is a rank-one downdate, so it has at most one negative eigenvalue μ and
/// the trace distance is −μ. μ solves Σ_k W_k/(Λ_k − μ) = 1 below the smallest Λ_k with
/// W_k > 0, where Λ_k runs over the product eigenvalues and W_k is the weight of Φ there.
pub fn power_trace_distance<T: Real>(rho: &DensityMatrix<T>, phi: &PureState<T>, n: usize) -> Result<T> {
    if rho.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: phi.dim() });
    }
    let (vals, vecs) = herm_eig(rho.herm())?;
    let d = vals.len();
    let lam: Vec<T> = vals.iter().map(|l| l.max(T::zero())).collect();
    let w: Vec<T> = (0..d).map(|a| vecs.column(a).dotc(phi.vec()).norm_sqr()).collect();
    // group the d^n product eigenvalues by occupation numbers
    let mut terms: Vec<(T, T)> = Vec::new();
    let mut counts = vec![0usize; d];
    counts[d - 1] = n;
    loop {
        let mut big = T::one();
        let mut weight = lit::<T>(multinomial(n, &counts));
        for a in 0..d {
            big *= lam[a].powi(counts[a] as i32);
            weight *= w[a].powi(counts[a] as i32);
        }
        terms.push((big, weight));
        if !next_composition(&mut counts) {
            break;
        }
    }
    let total: T = terms.iter().fold(T::zero(), |s, t| s + t.1);
    let cut = lit::<T>(1e-300);
    let top = terms.iter().filter(|t| t.1 > cut).fold(None, |m: Option<T>, t| Some(m.map_or(t.0, |x| x.min(t.0))));
    let Some(top) = top else { return Ok(T::one()) };
    let f = |mu: T| terms.iter().filter(|t| t.1 > cut).fold(T::zero(), |s, t| s + t.1 / (t.0 - mu));
    // f increases on (−∞, top) and f(top − total) ≤ 1
    let (mut lo, mut hi) = (top - total.max(T::one()), top);
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = (lo + hi) * lit(0.5);
    Ok((-mu).max(T::zero()).min(T::one()))
}

fn multinomial(n: usize, counts: &[usize]) -> f64 {
    let mut acc = 1.0;
    let mut left = n;
    for &c in counts {
        for j in 0..c {
            acc *= (left - j) as f64 / (j + 1) as f64;
        }
        left -= c;
    }
    acc
}

/// Steps through all compositions of n into counts.len() parts; false after the last.
fn next_composition(counts: &mut [usize]) -> bool {
    let d = counts.len();
    // find the last nonzero entry before the tail
    let Some(j) = (0..d - 1).rev().find(|&j| counts[j + 1..].iter().sum::<usize>() > 0) else {
        return false;
    };
    let tail: usize = counts[j + 1..].iter().sum();
    counts[j] += 1;
    for c in counts[j + 1..].iter_mut() {
        *c = 0;
    }
    counts[d - 1] = tail - 1;
    true
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let (vals, _) = herm_eig(rho.herm())?;
    Ok(shannon_entropy(vals.iter().copied()))
}

/// −Σ p ln p over the positive entries.
pub fn shannon_entropy<T: Real>(p: impl Iterator<Item = T>) -> T {
    p.filter(|&x| x > T::zero()).fold(T::zero(), |acc, x| acc - x * x.ln())
}

/// Binary entropy in nats.
pub fn binary_entropy<T: Real>(p: T) -> T {
    shannon_entropy([p, T::one() - p].into_iter())
}
