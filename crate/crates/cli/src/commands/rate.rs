use asymkit::measures::{qgt, MetricSpec};
use asymkit::numkit::herm_eig;
use asymkit::ratekit::{
    conversion_rate, cost_bound, distillable_bound, min_entropy_rate, reversibility_check, thermo_bounds,
    vanishing_distillable_check, PencilResult, RateOptions, SymOptions, SymVerdict, Witness,
};
use asymkit::repkit::GroupPoint;
use asymkit::{Extended, PureState};
use serde_json::{json, Value};

use super::{eigenvalues, Outcome};
use crate::error::{invalid, Error, Result};
use crate::problem::{encode_vector, ProblemFile, Side};
use crate::report::{cmat, extended, herm};
use crate::{Context, RateSub};

pub(crate) fn sym_options(cx: &Context, p: &ProblemFile) -> Result<SymOptions<f64>> {
    let u1 = match p.u1_spec(&cx.tol)? {
        Some(s) if s.dim() == p.rep_in.dim && s.dim() == p.rep_out.dim => Some((s.clone(), s)),
        _ => None,
    };
    Ok(SymOptions { u1, finite_exhaustive: p.finite_exhaustive, seed: cx.opts.seed, ..SymOptions::default() })
}

fn pencil(name: &str, r: &PencilResult<f64>) -> Value {
    json!({
        "component": name,
        "value": extended(r.value),
        "method": format!("{:?}", r.method),
        "kernel_eigenvalues": r.kernel_eigenvalues,
        "minimizing_direction": r.minimizing_direction.as_ref().map(encode_vector),
    })
}

fn sym(v: &SymVerdict<f64>) -> Value {
    let witnesses: Vec<Value> = v
        .witnesses
        .iter()
        .map(|(w, why)| match w {
            Witness::Direction(d) => json!({ "direction": d, "detail": why }),
            Witness::Element { u_in, u_out } => json!({ "u_in": cmat(u_in), "u_out": cmat(u_out), "detail": why }),
        })
        .collect();
    json!({ "verdict": v.verdict.as_str(), "witnesses": witnesses, "notes": v.notes })
}

fn ext(context: &str, r: asymkit::Result<Extended<f64>>) -> Result<Value> {
    r.map(extended).map_err(|e| Error::core(context, e))
}

pub fn rate(cx: &Context, sub: RateSub) -> Outcome {
    let p = cx.problem()?;
    let tol = &cx.tol;
    let pair = p.pair(tol)?;
    let id = GroupPoint::identity(pair.dim_g());
    let mut caveats = Vec::new();
    let results = match sub {
        RateSub::Rate => {
            let (psi, phi) = (p.pure(Side::In, tol)?, p.pure(Side::Out, tol)?);
            let opts = RateOptions { sym: sym_options(cx, p)?, catalyst: cx.opts.catalyst };
            let r = conversion_rate(&pair, &psi, &phi, &opts, tol).map_err(|e| Error::core("rate", e))?;
            caveats.extend(r.caveats.iter().cloned());
            json!({
                "rate": extended(r.rate),
                "dmax_bits": extended(r.dmax_bits),
                "catalyst": cx.opts.catalyst,
                "sym_verdict": r.sym.verdict.as_str(),
                "sym": sym(&r.sym),
                "per_component": r.per_component.iter().map(|(n, v)| pencil(n, v)).collect::<Vec<_>>(),
            })
        }
        RateSub::Reversible => {
            let (psi, phi) = (p.pure(Side::In, tol)?, p.pure(Side::Out, tol)?);
            let so = sym_options(cx, p)?;
            let rev = reversibility_check(&pair, &psi, &phi, &so, tol).map_err(|e| Error::core("reversibility", e))?;
            let opts = RateOptions { sym: so, catalyst: false };
            let fwd = conversion_rate(&pair, &psi, &phi, &opts, tol).map_err(|e| Error::core("rate", e))?;
            let back = conversion_rate(&pair.reversed(), &phi, &psi, &opts, tol).map_err(|e| Error::core("rate", e))?;
            let product = match (fwd.rate, back.rate) {
                (Extended::Finite(a), Extended::Finite(b)) => json!(a * b),
                _ => Value::Null,
            };
            json!({
                "reversible": rev.reversible,
                "r": rev.r,
                "proportionality_gap": rev.proportionality_gap,
                "forward_rate": extended(fwd.rate),
                "reverse_rate": extended(back.rate),
                "rate_product": product,
                "forward_sym": sym(&rev.forward),
                "backward_sym": sym(&rev.backward),
            })
        }
        RateSub::DistillBound => {
            let rho = p.density(Side::In, tol)?;
            let phi = p.pure(Side::Out, tol)?;
            let check = vanishing_distillable_check(&pair, &rho, &phi, tol).map_err(|e| Error::core("vanishing check", e))?;
            json!({
                "bound": ext("distillable bound", distillable_bound(&pair, &rho, &phi, tol))?,
                "vanishes": check.vanishes,
                "witness_gamma": check.witness_gamma.as_ref().map(encode_vector),
            })
        }
        RateSub::CostBound => {
            let phi = p.pure(Side::In, tol)?;
            let (ensemble, p_sym) = match p.ensemble(tol)? {
                Some(e) => e,
                None => {
                    caveats.push("ensemble taken from the eigendecomposition of state_out".into());
                    (eigen_ensemble(p, tol)?, 0.0)
                }
            };
            let c = cost_bound(&pair, &ensemble, p_sym, &phi, tol).map_err(|e| Error::core("cost bound", e))?;
            json!({
                "total": extended(c.total),
                "per_state": c.per_state.iter().map(|x| extended(*x)).collect::<Vec<_>>(),
                "weights": ensemble.iter().map(|(w, _)| *w).collect::<Vec<_>>(),
                "p_sym": p_sym,
            })
        }
        RateSub::ThermoBound => {
            let r = cx.opts.r.ok_or_else(|| invalid("thermo-bound needs --r"))?;
            if !(r >= 0.0 && r.is_finite()) {
                return Err(invalid(format!("--r must be a nonnegative number, got {r}")));
            }
            let spec = MetricSpec::new(cx.opts.q.unwrap_or(0.5)).map_err(|e| Error::core("--q", e))?;
            let rho = p.density(Side::In, tol)?;
            let target = p.pure(Side::Out, tol)?;
            let h = &pair.rep_out.generators()[0];
            let b = thermo_bounds(&pair.rep_in, &rho, &target, h, r, &spec, tol).map_err(|e| Error::core("thermo bounds", e))?;
            json!({
                "r": r,
                "q": spec.q(),
                "variance_rate_required": b.variance_rate_required,
                "skew_bound": b.skew_bound,
                "s_bound_matrix": herm(&b.s_bound_matrix),
                "s_bound_eigenvalues": eigenvalues(&b.s_bound_matrix)?,
            })
        }
        RateSub::Refrate => {
            let phi = p.pure(Side::Out, tol)?;
            let t = qgt(&pair.rep_out, &phi, &id).map_err(|e| Error::core("qgt", e))?;
            let rate = min_entropy_rate(&t).map_err(|e| Error::core("reference rate", e))?;
            caveats.push("assumes the input is an isotropic reference state with identity QGT".into());
            json!({
                "rate": extended(rate),
                "qgt_eigenvalues": eigenvalues(&t.matrix)?,
            })
        }
    };
    Ok((results, caveats))
}

/// Eigenvectors of state_out with nonzero weight.
fn eigen_ensemble(p: &ProblemFile, tol: &asymkit::ToleranceConfig) -> Result<Vec<(f64, PureState)>> {
    let rho = p.density(Side::Out, tol)?;
    let (vals, vecs) = herm_eig(rho.herm()).map_err(|e| Error::core("state_out", e))?;
    let mut out = Vec::new();
    for (k, &w) in vals.iter().enumerate() {
        if w > tol.tol_psd {
            let v = PureState::normalized(vecs.column(k).into_owned()).map_err(|e| Error::core("state_out", e))?;
            out.push((w, v));
        }
    }
    let total: f64 = out.iter().map(|(w, _)| w).sum();
    Ok(out.into_iter().map(|(w, v)| (w / total, v)).collect())
}
