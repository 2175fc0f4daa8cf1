use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::numkit::{
    expm_i, tensor_product, unitarity_defect, CMat, HermMatrix, ToleranceConfig,
};
use crate::scalar::{lit, to_f64, Real};

/// Generators X_μ of the connected part plus one unitary per connected component.
/// Component 0 is always the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation<T: Real> {
    generators: Vec<HermMatrix<T>>,
    component_reps: Vec<CMat<T>>,
    label: String,
}

impl<T: Real> Representation<T> {
    /// Connected group: the only component representative is the identity.
    pub fn new(generators: Vec<HermMatrix<T>>, label: impl Into<String>) -> Result<Self> {
        let first = generators.first().ok_or(Error::Empty("generator list"))?;
        let d = first.dim();
        for g in &generators {
            if g.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
            }
        }
        Ok(Self { generators, component_reps: vec![CMat::identity(d, d)], label: label.into() })
    }

    /// Adds representatives of the non-identity components (the identity is prepended).
    pub fn with_components(
        generators: Vec<HermMatrix<T>>,
        others: Vec<CMat<T>>,
        label: impl Into<String>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        let mut rep = Self::new(generators, label)?;
        let d = rep.dim();
        for u in others {
            check_unitary(&u, d, tol)?;
            rep.component_reps.push(u);
        }
        Ok(rep)
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn dim_g(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[HermMatrix<T>] {
        &self.generators
    }

    pub fn component_reps(&self) -> &[CMat<T>] {
        &self.component_reps
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// θ·X.
    pub fn combination(&self, theta: &[T]) -> Result<HermMatrix<T>> {
        if theta.len() != self.dim_g() {
            return Err(Error::DimensionMismatch { expected: self.dim_g(), found: theta.len() });
        }
        let d = self.dim();
        let mut acc = CMat::zeros(d, d);
        for (t, x) in theta.iter().zip(&self.generators) {
            acc += x.mat().scale(*t);
        }
        Ok(HermMatrix::from_hermitian_part(&acc))
    }

    /// γ†X = Σ_μ conj(γ_μ) X_μ for a complex probe vector γ.
    pub fn adjoint_combination(&self, gamma: &[Complex<T>]) -> Result<CMat<T>> {
        if gamma.len() != self.dim_g() {
            return Err(Error::DimensionMismatch { expected: self.dim_g(), found: gamma.len() });
        }
        let d = self.dim();
        let mut acc = CMat::zeros(d, d);
        for (g, x) in gamma.iter().zip(&self.generators) {
            acc += x.mat() * g.conj();
        }
        Ok(acc)
    }

    /// Same group action with every generator multiplied by `s`.
    pub fn scaled(&self, s: T) -> Self {
        Self {
            generators: self.generators.iter().map(|g| g.scale(s)).collect(),
            component_reps: self.component_reps.clone(),
            label: self.label.clone(),
        }
    }

    /// X_μ ⊗ I_ancilla, with the ancilla carrying the trivial representation.
    pub fn with_trivial_ancilla(&self, ancilla: usize) -> Self {
        let id = CMat::<T>::identity(ancilla, ancilla);
        Self {
            generators: self
                .generators
                .iter()
                .map(|g| HermMatrix::from_hermitian_part(&tensor_product(g.mat(), &id)))
                .collect(),
            component_reps: self.component_reps.iter().map(|u| tensor_product(u, &id)).collect(),
            label: format!("{}⊗1", self.label),
        }
    }

    pub(crate) fn from_parts(
        generators: Vec<HermMatrix<T>>,
        component_reps: Vec<CMat<T>>,
        label: String,
    ) -> Self {
        Self { generators, component_reps, label }
    }
}

pub(crate) fn check_unitary<T: Real>(u: &CMat<T>, d: usize, tol: &ToleranceConfig) -> Result<()> {
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: u.nrows().max(u.ncols()) });
    }
    let dev = unitarity_defect(u);
    if dev > lit(tol.tol_residual) {
        return Err(Error::NotUnitary { deviation: to_f64(dev) });
    }
    Ok(())
}

/// A group element in exponential coordinates: e^{iθ·X}·G_component.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint<T> {
    pub component: usize,
    pub theta: Vec<T>,
}

impl<T: Real> GroupPoint<T> {
    pub fn identity(dim_g: usize) -> Self {
        Self { component: 0, theta: vec![T::zero(); dim_g] }
    }

    pub fn component(dim_g: usize, component: usize) -> Self {
        Self { component, theta: vec![T::zero(); dim_g] }
    }

    pub fn is_identity(&self) -> bool {
        self.component == 0 && self.theta.iter().all(|t| *t == T::zero())
    }
}

/// e^{iθ·X}·G_i.
pub fn unitary_at<T: Real>(rep: &Representation<T>, theta: &[T], component: usize) -> Result<CMat<T>> {
    let g = rep
        .component_reps
        .get(component)
        .ok_or(Error::IndexOutOfRange { index: component, len: rep.component_reps.len() })?;
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite);
    }
    let h = rep.combination(theta)?;
    Ok(expm_i(&h, T::one())? * g)
}

pub fn unitary_at_point<T: Real>(rep: &Representation<T>, p: &GroupPoint<T>) -> Result<CMat<T>> {
    unitary_at(rep, &p.theta, p.component)
}

/// Input/output representations of the same group with matched component representatives.
#[derive(Debug, Clone, PartialEq)]
pub struct RepPair<T: Real> {
    pub rep_in: Representation<T>,
    pub rep_out: Representation<T>,
    component_pairs: Vec<(CMat<T>, CMat<T>)>,
}

impl<T: Real> RepPair<T> {
    /// Matches the component representatives of the two representations by position.
    pub fn new(rep_in: Representation<T>, rep_out: Representation<T>) -> Result<Self> {
        if rep_in.dim_g() != rep_out.dim_g() {
            return Err(Error::DimensionMismatch { expected: rep_in.dim_g(), found: rep_out.dim_g() });
        }
        if rep_in.component_reps.len() != rep_out.component_reps.len() {
            return Err(Error::DimensionMismatch {
                expected: rep_in.component_reps.len(),
                found: rep_out.component_reps.len(),
            });
        }
        let component_pairs = rep_in
            .component_reps
            .iter()
            .cloned()
            .zip(rep_out.component_reps.iter().cloned())
            .collect();
        Ok(Self { rep_in, rep_out, component_pairs })
    }

    /// Explicit non-identity component pairs; (I, I) is prepended. The representations'
    /// own component lists are replaced so that single-sided evaluations agree.
    pub fn with_component_pairs(
        rep_in: Representation<T>,
        rep_out: Representation<T>,
        others: Vec<(CMat<T>, CMat<T>)>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        if rep_in.dim_g() != rep_out.dim_g() {
            return Err(Error::DimensionMismatch { expected: rep_in.dim_g(), found: rep_out.dim_g() });
        }
        let (di, dout) = (rep_in.dim(), rep_out.dim());
        let mut pairs = vec![(CMat::identity(di, di), CMat::identity(dout, dout))];
        for (a, b) in others {
            check_unitary(&a, di, tol)?;
            check_unitary(&b, dout, tol)?;
            pairs.push((a, b));
        }
        let rep_in = Representation::from_parts(
            rep_in.generators,
            pairs.iter().map(|p| p.0.clone()).collect(),
            rep_in.label,
        );
        let rep_out = Representation::from_parts(
            rep_out.generators,
            pairs.iter().map(|p| p.1.clone()).collect(),
            rep_out.label,
        );
        Ok(Self { rep_in, rep_out, component_pairs: pairs })
    }

    pub fn component_pairs(&self) -> &[(CMat<T>, CMat<T>)] {
        &self.component_pairs
    }

    pub fn n_components(&self) -> usize {
        self.component_pairs.len()
    }

    pub fn dim_g(&self) -> usize {
        self.rep_in.dim_g()
    }

    /// The same pair read in the opposite direction.
    pub fn reversed(&self) -> Self {
        Self {
            rep_in: self.rep_out.clone(),
            rep_out: self.rep_in.clone(),
            component_pairs: self.component_pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    /// (U(g), U′(g)) for g = e^{iθ·X} g_i.
    pub fn unitaries_at(&self, p: &GroupPoint<T>) -> Result<(CMat<T>, CMat<T>)> {
        Ok((unitary_at_point(&self.rep_in, p)?, unitary_at_point(&self.rep_out, p)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repkit::builders::{pauli, spin};

    #[test]
    fn identity_point() {
        let rep = pauli::<f64>();
        let u = unitary_at(&rep, &[0.0, 0.0, 0.0], 0).unwrap();
        assert!(unitarity_defect(&u) < 1e-15);
        assert!((u - CMat::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn spinor_double_cover() {
        let rep = spin::<f64>(1);
        let u = unitary_at(&rep, &[0.0, 0.0, std::f64::consts::TAU], 0).unwrap();
        assert!((u + CMat::identity(2, 2)).norm() < 1e-13);
    }

    #[test]
    fn half_turn_about_x() {
        // e^{iπσ_x/2} = iσ_x; compared against a truncated power series
        let rep = spin::<f64>(1);
        let u = unitary_at(&rep, &[std::f64::consts::PI, 0.0, 0.0], 0).unwrap();
        let a = rep.generators()[0].mat().scale(std::f64::consts::PI) * Complex::new(0.0, 1.0);
        let mut term = CMat::<f64>::identity(2, 2);
        let mut series = term.clone();
        for k in 1..40 {
            term = &term * &a / Complex::new(k as f64, 0.0);
            series += &term;
        }
        assert!((&u - &series).norm() < 1e-12);
        let isx = CMat::from_row_slice(
            2,
            2,
            &[Complex::new(0., 0.), Complex::new(0., 1.), Complex::new(0., 1.), Complex::new(0., 0.)],
        );
        assert!((u - isx).norm() < 1e-13);
    }

    #[test]
    fn component_index_checked() {
        let rep = pauli::<f64>();
        assert!(matches!(unitary_at(&rep, &[0.0; 3], 1), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(unitary_at(&rep, &[0.0; 2], 0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn pair_requires_matching_dim_g() {
        let a = pauli::<f64>();
        let b = crate::repkit::builders::u1(&[0.0, 1.0]);
        assert!(RepPair::new(a, b).is_err());
    }
}
