//! Problem files: representations, states and options for one conversion instance.
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested arrays.

use std::path::Path;

use asymkit::numkit::{CMat, CVec, DensityMatrix, HermMatrix, PureState, ToleranceConfig};
use asymkit::repkit::{RepPair, Representation, U1Spec};
use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Scalar = [f64; 2];
pub type Matrix = Vec<Vec<Scalar>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepBlock {
    pub dim: usize,
    pub generators: Vec<Matrix>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateBlock {
    Pure { vector: Vec<Scalar> },
    Mixed { matrix: Matrix },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentPair {
    pub u_in: Matrix,
    pub u_out: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct U1Block {
    pub eigenvalues: Vec<i64>,
    /// Columns are the eigenvectors; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Matrix>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_herm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_psd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_kernel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_residual: Option<f64>,
}

impl Tolerances {
    /// Fills unset fields from `base`, with `self` taking precedence.
    pub fn apply(&self, base: ToleranceConfig) -> ToleranceConfig {
        ToleranceConfig {
            tol_herm: self.tol_herm.unwrap_or(base.tol_herm),
            tol_norm: self.tol_norm.unwrap_or(base.tol_norm),
            tol_psd: self.tol_psd.unwrap_or(base.tol_psd),
            tol_kernel: self.tol_kernel.unwrap_or(base.tol_kernel),
            tol_residual: self.tol_residual.unwrap_or(base.tol_residual),
        }
    }
}

/// Pure-state ensemble for cost bounds; the weights plus `p_sym` sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleBlock {
    pub weights: Vec<f64>,
    pub states: Vec<Vec<Scalar>>,
    #[serde(default)]
    pub p_sym: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub rep_in: RepBlock,
    pub rep_out: RepBlock,
    pub state_in: StateBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_out: Option<StateBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub component_pairs: Vec<ComponentPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u1: Option<U1Block>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalyst: Option<StateBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    /// Component pairs list the whole (finite) group.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub finite_exhaustive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleBlock>,
}

/// Weighted pure states.
pub type Ensemble = Vec<(f64, PureState<f64>)>;

/// Parses JSON, naming the offending field and position on failure.
pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let p: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        invalid(format!(
            "problem file: field `{}` (line {}, column {}): {}",
            e.path(),
            inner.line(),
            inner.column(),
            inner
        ))
    })?;
    p.validate()?;
    Ok(p)
}

pub fn load_problem(path: &Path) -> Result<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_problem(&text)
}

fn check_square(m: &Matrix, dim: usize, field: &str) -> Result<()> {
    if m.len() != dim {
        return Err(invalid(format!("{field}: {} rows, expected {dim}", m.len())));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != dim {
            return Err(invalid(format!("{field}[{i}]: {} entries, expected {dim}", row.len())));
        }
        if row.iter().any(|z| !z[0].is_finite() || !z[1].is_finite()) {
            return Err(invalid(format!("{field}[{i}]: non-finite entry")));
        }
    }
    Ok(())
}

fn check_state(s: &StateBlock, dim: usize, field: &str) -> Result<()> {
    match s {
        StateBlock::Pure { vector } => {
            if vector.len() != dim {
                return Err(invalid(format!("{field}.vector: {} entries, expected {dim}", vector.len())));
            }
            if vector.iter().any(|z| !z[0].is_finite() || !z[1].is_finite()) {
                return Err(invalid(format!("{field}.vector: non-finite entry")));
            }
            Ok(())
        }
        StateBlock::Mixed { matrix } => check_square(matrix, dim, &format!("{field}.matrix")),
    }
}

impl ProblemFile {
    /// Shape checks; the numerical ones (Hermiticity, normalization, unitarity) happen on
    /// conversion.
    pub fn validate(&self) -> Result<()> {
        for (name, r) in [("rep_in", &self.rep_in), ("rep_out", &self.rep_out)] {
            if r.dim == 0 {
                return Err(invalid(format!("{name}.dim must be ≥ 1")));
            }
            if r.generators.is_empty() {
                return Err(invalid(format!("{name}.generators is empty")));
            }
            for (k, g) in r.generators.iter().enumerate() {
                check_square(g, r.dim, &format!("{name}.generators[{k}]"))?;
            }
        }
        if self.rep_in.generators.len() != self.rep_out.generators.len() {
            return Err(invalid(format!(
                "rep_in has {} generators but rep_out has {}",
                self.rep_in.generators.len(),
                self.rep_out.generators.len()
            )));
        }
        check_state(&self.state_in, self.rep_in.dim, "state_in")?;
        if let Some(s) = &self.state_out {
            check_state(s, self.rep_out.dim, "state_out")?;
        }
        for (k, c) in self.component_pairs.iter().enumerate() {
            check_square(&c.u_in, self.rep_in.dim, &format!("component_pairs[{k}].u_in"))?;
            check_square(&c.u_out, self.rep_out.dim, &format!("component_pairs[{k}].u_out"))?;
        }
        if let Some(u) = &self.u1 {
            if let Some(b) = &u.basis {
                check_square(b, u.eigenvalues.len(), "u1.basis")?;
            }
        }
        if let Some(e) = &self.ensemble {
            if e.weights.len() != e.states.len() {
                return Err(invalid("ensemble: weights and states differ in length"));
            }
            for (k, s) in e.states.iter().enumerate() {
                if s.len() != self.rep_out.dim {
                    return Err(invalid(format!("ensemble.states[{k}]: {} entries, expected {}", s.len(), self.rep_out.dim)));
                }
            }
        }
        if let Some(t) = &self.tolerances {
            t.apply(ToleranceConfig::default()).validate().map_err(|e| invalid(format!("tolerances: {e}")))?;
        }
        Ok(())
    }

    pub fn representation(&self, side: Side, tol: &ToleranceConfig) -> Result<Representation<f64>> {
        let (block, name) = match side {
            Side::In => (&self.rep_in, "rep_in"),
            Side::Out => (&self.rep_out, "rep_out"),
        };
        let gens = block
            .generators
            .iter()
            .enumerate()
            .map(|(k, g)| {
                HermMatrix::new(matrix(g), tol).map_err(|e| Error::core(&format!("{name}.generators[{k}]"), e))
            })
            .collect::<Result<Vec<_>>>()?;
        Representation::new(gens, block.label.clone()).map_err(|e| Error::core(name, e))
    }

    pub fn pair(&self, tol: &ToleranceConfig) -> Result<RepPair<f64>> {
        let rin = self.representation(Side::In, tol)?;
        let rout = self.representation(Side::Out, tol)?;
        let others = self.component_pairs.iter().map(|c| (matrix(&c.u_in), matrix(&c.u_out))).collect();
        RepPair::with_component_pairs(rin, rout, others, tol).map_err(|e| Error::core("component_pairs", e))
    }

    pub fn density(&self, side: Side, tol: &ToleranceConfig) -> Result<DensityMatrix<f64>> {
        let (s, name) = self.state_block(side)?;
        density_of(s, name, tol)
    }

    pub fn pure(&self, side: Side, tol: &ToleranceConfig) -> Result<PureState<f64>> {
        let (s, name) = self.state_block(side)?;
        match s {
            StateBlock::Pure { vector } => {
                PureState::new(vector_of(vector), tol).map_err(|e| Error::core(&format!("{name}.vector"), e))
            }
            StateBlock::Mixed { .. } => Err(invalid(format!("{name} must be a pure state for this command"))),
        }
    }

    fn state_block(&self, side: Side) -> Result<(&StateBlock, &'static str)> {
        match side {
            Side::In => Ok((&self.state_in, "state_in")),
            Side::Out => self.state_out.as_ref().map(|s| (s, "state_out")).ok_or_else(|| invalid("state_out is required")),
        }
    }

    pub fn u1_spec(&self, tol: &ToleranceConfig) -> Result<Option<U1Spec<f64>>> {
        let Some(u) = &self.u1 else { return Ok(None) };
        let d = u.eigenvalues.len();
        let basis = u.basis.as_ref().map(matrix).unwrap_or_else(|| CMat::identity(d, d));
        U1Spec::new(u.eigenvalues.clone(), basis, tol).map(Some).map_err(|e| Error::core("u1.basis", e))
    }

    pub fn ensemble(&self, tol: &ToleranceConfig) -> Result<Option<(Ensemble, f64)>> {
        let Some(e) = &self.ensemble else { return Ok(None) };
        let states = e
            .states
            .iter()
            .enumerate()
            .map(|(k, v)| PureState::new(vector_of(v), tol).map_err(|err| Error::core(&format!("ensemble.states[{k}]"), err)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Some((e.weights.iter().copied().zip(states).collect(), e.p_sym)))
    }

    pub fn tolerance(&self) -> ToleranceConfig {
        self.tolerances.clone().unwrap_or_default().apply(ToleranceConfig::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    In,
    Out,
}

pub fn density_of(s: &StateBlock, name: &str, tol: &ToleranceConfig) -> Result<DensityMatrix<f64>> {
    match s {
        StateBlock::Pure { vector } => Ok(PureState::new(vector_of(vector), tol)
            .map_err(|e| Error::core(&format!("{name}.vector"), e))?
            .to_density()),
        StateBlock::Mixed { matrix: m } => {
            DensityMatrix::new(matrix(m), tol).map_err(|e| Error::core(&format!("{name}.matrix"), e))
        }
    }
}

pub fn matrix(m: &Matrix) -> CMat<f64> {
    let r = m.len();
    let c = m.first().map_or(0, Vec::len);
    CMat::from_fn(r, c, |i, j| Complex::new(m[i][j][0], m[i][j][1]))
}

pub fn vector_of(v: &[Scalar]) -> CVec<f64> {
    CVec::from_iterator(v.len(), v.iter().map(|z| Complex::new(z[0], z[1])))
}

pub fn encode_matrix(m: &CMat<f64>) -> Matrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn encode_vector(v: &CVec<f64>) -> Vec<Scalar> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUBIT: &str = r#"{
      "rep_in": {"dim": 2, "generators": [[[[0,0],[0,0]],[[0,0],[1,0]]]]},
      "rep_out": {"dim": 2, "generators": [[[[0,0],[0,0]],[[0,0],[1,0]]]]},
      "state_in": {"type": "pure", "vector": [[0.6,0],[0.8,0]]}
    }"#;

    #[test]
    fn minimal_file_parses() {
        let p = parse_problem(QUBIT).unwrap();
        assert!(p.state_out.is_none());
        let tol = p.tolerance();
        assert_eq!(p.pair(&tol).unwrap().n_components(), 1);
        assert!(p.pure(Side::In, &tol).is_ok());
        assert!(p.pure(Side::Out, &tol).is_err());
    }

    #[test]
    fn errors_name_the_field() {
        let bad = QUBIT.replace("[[0.6,0],[0.8,0]]", "[[0.6,0],[0.8]]");
        let msg = parse_problem(&bad).unwrap_err().to_string();
        assert!(msg.contains("state_in") && msg.contains("line"), "{msg}");
        let short = QUBIT.replace("[[0.6,0],[0.8,0]]", "[[1,0]]");
        let msg = parse_problem(&short).unwrap_err().to_string();
        assert!(msg.contains("state_in.vector"), "{msg}");
        let unknown = QUBIT.replacen("\"rep_in\"", "\"extra\": 1, \"rep_in\"", 1);
        assert!(parse_problem(&unknown).is_err());
    }

    #[test]
    fn numerical_checks_happen_on_conversion() {
        let p = parse_problem(&QUBIT.replace("[[0.6,0],[0.8,0]]", "[[0.6,0],[0.9,0]]")).unwrap();
        assert!(matches!(p.pure(Side::In, &p.tolerance()), Err(Error::Validation(_))));
        let nonherm = QUBIT.replacen("[[0,0],[0,0]],[[0,0],[1,0]]", "[[0,0],[1,0]],[[0,0],[1,0]]", 1);
        let p = parse_problem(&nonherm).unwrap();
        assert!(p.pair(&p.tolerance()).is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let t = Tolerances { tol_psd: Some(1e-6), ..Default::default() };
        let c = t.apply(ToleranceConfig::default());
        assert_eq!(c.tol_psd, 1e-6);
        assert_eq!(c.tol_herm, 1e-10);
    }
}
