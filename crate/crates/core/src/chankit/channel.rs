use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::numkit::{checked_power_dim, herm_eig, max_abs, CMat, CVec, DensityMatrix, HermMatrix, PureState, ToleranceConfig};
use crate::scalar::{lit, to_f64, Real};

/// Channel ρ ↦ Σ K ρ K† with d_out×d_in Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel<T: Real> {
    kraus_ops: Vec<CMat<T>>,
    in_dim: usize,
    out_dim: usize,
}

impl<T: Real> KrausChannel<T> {
    /// Checks shapes and ‖Σ K†K − I‖_max ≤ tol_residual.
    pub fn new(kraus_ops: Vec<CMat<T>>, tol: &ToleranceConfig) -> Result<Self> {
        let ch = Self::unchecked(kraus_ops)?;
        let res = ch.completeness_residual();
        if res > lit(tol.tol_residual) {
            return Err(Error::NotTracePreserving { residual: to_f64(res) });
        }
        Ok(ch)
    }

    pub(crate) fn unchecked(kraus_ops: Vec<CMat<T>>) -> Result<Self> {
        let first = kraus_ops.first().ok_or(Error::Empty("Kraus operators"))?;
        let (out_dim, in_dim) = first.shape();
        for k in &kraus_ops {
            if k.shape() != (out_dim, in_dim) {
                return Err(Error::DimensionMismatch { expected: out_dim, found: k.nrows() });
            }
        }
        Ok(Self { kraus_ops, in_dim, out_dim })
    }

    pub fn identity(d: usize) -> Self {
        Self { kraus_ops: vec![CMat::identity(d, d)], in_dim: d, out_dim: d }
    }

    /// ρ ↦ UρU†.
    pub fn unitary(u: CMat<T>) -> Self {
        let (o, i) = u.shape();
        Self { kraus_ops: vec![u], in_dim: i, out_dim: o }
    }

    pub fn kraus_ops(&self) -> &[CMat<T>] {
        &self.kraus_ops
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// max |Σ K†K − I|.
    pub fn completeness_residual(&self) -> T {
        let mut acc = CMat::<T>::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus_ops {
            acc += k.adjoint() * k;
        }
        acc -= CMat::identity(self.in_dim, self.in_dim);
        max_abs(&acc)
    }

    /// Choi matrix Σ_{ij} |i⟩⟨j| ⊗ E(|i⟩⟨j|), input factor first.
    pub fn choi(&self) -> HermMatrix<T> {
        let (di, d_o) = (self.in_dim, self.out_dim);
        let mut j = CMat::zeros(di * d_o, di * d_o);
        for k in &self.kraus_ops {
            // column vector Σ_i |i⟩ ⊗ K|i⟩
            let v = CVec::from_fn(di * d_o, |r, _| k[(r % d_o, r / d_o)]);
            j += &v * v.adjoint();
        }
        HermMatrix::from_hermitian_part(&j)
    }

    /// Minimal Kraus set from the Choi spectrum; eigenvalues below tol_kernel·λ_max are dropped.
    pub fn compressed(&self, tol: &ToleranceConfig) -> Result<Self> {
        let (di, d_o) = (self.in_dim, self.out_dim);
        let (vals, vecs) = herm_eig(&self.choi())?;
        let lmax = vals.iter().fold(T::zero(), |m, &x| m.max(x));
        let cut = lit::<T>(tol.tol_kernel) * lmax;
        let mut ops = Vec::new();
        for j in (0..vals.len()).rev() {
            if vals[j] > cut {
                let s = vals[j].sqrt();
                ops.push(CMat::from_fn(d_o, di, |o, i| vecs[(i * d_o + o, j)] * Complex::new(s, T::zero())));
            }
        }
        if ops.is_empty() {
            return Err(Error::Empty("Kraus operators"));
        }
        Self::unchecked(ops)
    }
}

/// Σ K ρ K†.
pub fn apply_channel<T: Real>(ch: &KrausChannel<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    if rho.dim() != ch.in_dim {
        return Err(Error::DimensionMismatch { expected: ch.in_dim, found: rho.dim() });
    }
    let mut out = CMat::zeros(ch.out_dim, ch.out_dim);
    for k in &ch.kraus_ops {
        out += k * rho.mat() * k.adjoint();
    }
    Ok(DensityMatrix::from_trusted(&out))
}

/// E^{⊗n} applied to an n-partite state on d_in^n, one factor at a time.
pub fn apply_channel_power<T: Real>(
    ch: &KrausChannel<T>,
    rho: &DensityMatrix<T>,
    n: usize,
    cap: usize,
) -> Result<DensityMatrix<T>> {
    let din = checked_power_dim(ch.in_dim, n, cap)?;
    checked_power_dim(ch.out_dim, n, cap)?;
    if rho.dim() != din {
        return Err(Error::DimensionMismatch { expected: din, found: rho.dim() });
    }
    let mut cur = rho.mat().clone();
    // factors before j are already output-sized
    for j in 0..n {
        let left = ch.out_dim.pow(j as u32);
        let right = ch.in_dim.pow((n - j - 1) as u32);
        let mut next = CMat::zeros(left * ch.out_dim * right, left * ch.out_dim * right);
        for k in &ch.kraus_ops {
            let big = crate::numkit::embed(k, left, right);
            next += &big * &cur * big.adjoint();
        }
        cur = next;
    }
    Ok(DensityMatrix::from_trusted(&cur))
}

/// 1 − ⟨φ|E(ψ)|φ⟩ = Σ_K ‖(I−|φ⟩⟨φ|)Kψ‖², accurate when the deficit is tiny.
pub fn conversion_infidelity<T: Real>(ch: &KrausChannel<T>, psi: &PureState<T>, phi: &PureState<T>) -> Result<T> {
    if psi.dim() != ch.in_dim || phi.dim() != ch.out_dim {
        return Err(Error::DimensionMismatch { expected: ch.in_dim, found: psi.dim() });
    }
    let p = phi.vec();
    Ok(ch.kraus_ops.iter().fold(T::zero(), |acc, k| {
        let w = k * psi.vec();
        let perp = &w - p * p.dotc(&w);
        acc + perp.norm_squared()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::random::{isometry, random_density};
    use crate::numkit::{tensor_power, trace_distance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_channel(din: usize, dout: usize, r: usize, seed: u64) -> KrausChannel<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = isometry::<f64, _>(dout * r, din, &mut rng);
        let ops = (0..r).map(|k| v.rows(k * dout, dout).into_owned()).collect();
        KrausChannel::new(ops, &ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn identity_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density::<f64, _>(3, 2, &mut rng);
        let out = apply_channel(&KrausChannel::identity(3), &rho).unwrap();
        assert!((out.mat() - rho.mat()).norm() < 1e-15);
        let ch = random_channel(3, 2, 3, 2);
        let out = apply_channel(&ch, &rho).unwrap();
        assert!((out.mat().trace().re - 1.0).abs() < 1e-12);
        assert!(ch.completeness_residual() < 1e-12);
    }

    #[test]
    fn choi_compression_preserves_action() {
        let t = ToleranceConfig::default();
        let ch = random_channel(2, 3, 2, 5);
        // duplicate the Kraus set with weights 1/√2 to get a redundant representation
        let half = Complex::new(0.5f64.sqrt(), 0.0);
        let ops: Vec<_> = ch.kraus_ops().iter().flat_map(|k| [k * half, k * half]).collect();
        let redundant = KrausChannel::new(ops, &t).unwrap();
        let small = redundant.compressed(&t).unwrap();
        assert!(small.kraus_ops().len() <= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = random_density::<f64, _>(2, 2, &mut rng);
        let a = apply_channel(&ch, &rho).unwrap();
        let b = apply_channel(&small, &rho).unwrap();
        assert!(trace_distance(&a, &b).unwrap() < 1e-12);
        // trace of the Choi matrix is d_in for a trace-preserving map
        assert!((ch.choi().mat().trace().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn power_matches_product_on_product_inputs() {
        let ch = random_channel(2, 3, 2, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_density::<f64, _>(2, 2, &mut rng);
        let big = DensityMatrix::from_trusted(&tensor_power(rho.mat(), 3, 4096).unwrap());
        let out = apply_channel_power(&ch, &big, 3, 4096).unwrap();
        let single = apply_channel(&ch, &rho).unwrap();
        let expect = tensor_power(single.mat(), 3, 4096).unwrap();
        assert!((out.mat() - expect).norm() < 1e-12);
        assert!(matches!(apply_channel_power(&ch, &big, 3, 20), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let ops = vec![CMat::<f64>::identity(2, 2) * Complex::new(0.9, 0.0)];
        assert!(matches!(
            KrausChannel::new(ops, &ToleranceConfig::default()),
            Err(Error::NotTracePreserving { .. })
        ));
    }
}
