use super::pencil::{sup_ratio_with_floor, PencilResult};
use super::sym::{sym_check, SymOptions, SymVerdict, Verdict};
use crate::error::Result;
use crate::measures::qgt;
use crate::numkit::{frobenius, PureState, ToleranceConfig};
use crate::repkit::{GroupPoint, RepPair};
use crate::scalar::{lit, Extended, Real};

#[derive(Debug, Clone, Default)]
pub struct RateOptions<T: Real> {
    pub sym: SymOptions<T>,
    /// Sublinear-catalyst mode: report the bare pencil value without the symmetry gate.
    pub catalyst: bool,
}

#[derive(Debug, Clone)]
pub struct RateReport<T: Real> {
    pub rate: Extended<T>,
    pub per_component: Vec<(String, PencilResult<T>)>,
    /// −log₂ rate, i.e. max over components of D_max(Q^φ‖Q^ψ).
    pub dmax_bits: Extended<T>,
    pub sym: SymVerdict<T>,
    pub caveats: Vec<String>,
}

/// Pencil values sup{r : Q^{ψ_g} ⪰ r·Q^{φ_g}} at each component representative.
pub fn component_pencils<T: Real>(
    pair: &RepPair<T>,
    psi: &PureState<T>,
    phi: &PureState<T>,
    tol: &ToleranceConfig,
) -> Result<Vec<(String, PencilResult<T>)>> {
    let g = pair.dim_g();
    let floor = tensor_scale(pair);
    (0..pair.n_components())
        .map(|i| {
            let p = GroupPoint::component(g, i);
            let a = qgt(&pair.rep_in, psi, &p)?.matrix;
            let b = qgt(&pair.rep_out, phi, &p)?.matrix;
            Ok((format!("g{i}"), sup_ratio_with_floor(&a, &b, tol, floor)?))
        })
        .collect()
}

/// max ‖X_μ‖²_F over both sides, an upper bound on every tensor entry.
pub(crate) fn tensor_scale<T: Real>(pair: &RepPair<T>) -> T {
    pair.rep_in
        .generators()
        .iter()
        .chain(pair.rep_out.generators())
        .fold(T::zero(), |m, x| m.max(frobenius(x.mat()).powi(2)))
}

/// Asymptotic conversion rate between pure states.
pub fn conversion_rate<T: Real>(
    pair: &RepPair<T>,
    psi: &PureState<T>,
    phi: &PureState<T>,
    opts: &RateOptions<T>,
    tol: &ToleranceConfig,
) -> Result<RateReport<T>> {
    let per_component = component_pencils(pair, psi, phi, tol)?;
    let pencil = per_component.iter().fold(Extended::PosInf, |m, (_, r)| m.min(r.value));
    let sym = sym_check(pair, &psi.to_density(), &phi.to_density(), &opts.sym, tol)?;
    let mut caveats = Vec::new();
    let rate = if opts.catalyst {
        caveats.push("catalyst mode: symmetry-subgroup gate skipped".to_string());
        pencil
    } else {
        match sym.verdict {
            Verdict::Violated => Extended::Finite(T::zero()),
            Verdict::Holds => pencil,
            Verdict::Inconclusive => {
                caveats.push("symmetry-subgroup inclusion not certified; rate assumes it holds".to_string());
                pencil
            }
        }
    };
    Ok(RateReport { rate, per_component, dmax_bits: rate.neg_log2(), sym, caveats })
}

#[derive(Debug, Clone)]
pub struct Reversibility<T: Real> {
    pub reversible: bool,
    /// Forward pencil value at the identity component (None when both tensors vanish).
    pub r: Option<T>,
    pub forward: SymVerdict<T>,
    pub backward: SymVerdict<T>,
    /// max over components of ‖Q^ψ − r·Q^φ‖ / ‖Q^ψ‖.
    pub proportionality_gap: T,
}

/// Relative threshold for the proportionality condition.
pub const PROPORTIONALITY_TOL: f64 = 1e-8;

/// Two-way symmetry inclusion plus Q^ψ = r·Q^φ at every component.
pub fn reversibility_check<T: Real>(
    pair: &RepPair<T>,
    psi: &PureState<T>,
    phi: &PureState<T>,
    opts: &SymOptions<T>,
    tol: &ToleranceConfig,
) -> Result<Reversibility<T>> {
    let (rin, rout) = (psi.to_density(), phi.to_density());
    let forward = sym_check(pair, &rin, &rout, opts, tol)?;
    let rev_opts = SymOptions { u1: opts.u1.clone().map(|(a, b)| (b, a)), ..opts.clone() };
    let rev_opts = SymOptions {
        extra_elements: opts.extra_elements.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        ..rev_opts
    };
    let backward = sym_check(&pair.reversed(), &rout, &rin, &rev_opts, tol)?;
    let g = pair.dim_g();
    let id = GroupPoint::identity(g);
    let q_psi = qgt(&pair.rep_in, psi, &id)?.matrix;
    let q_phi = qgt(&pair.rep_out, phi, &id)?.matrix;
    let r = sup_ratio_with_floor(&q_psi, &q_phi, tol, tensor_scale(pair))?.value.finite();
    let mut gap = T::zero();
    for i in 0..pair.n_components() {
        let p = GroupPoint::component(g, i);
        let a = qgt(&pair.rep_in, psi, &p)?.matrix.into_mat();
        let b = qgt(&pair.rep_out, phi, &p)?.matrix.into_mat();
        let na = frobenius(&a);
        let diff = match r {
            Some(r) => frobenius(&(&a - b.scale(r))),
            None => frobenius(&b).max(na),
        };
        if diff > T::zero() {
            gap = gap.max(if na > T::zero() { diff / na } else { T::one() });
        }
    }
    let reversible = forward.holds() && backward.holds() && gap <= lit(PROPORTIONALITY_TOL);
    Ok(Reversibility { reversible, r, forward, backward, proportionality_gap: gap })
}
