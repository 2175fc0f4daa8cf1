use asymkit::measures::{qgt, s_matrix, s_q_matrix, u1_relative_entropy_asymmetry, MetricSpec};
use asymkit::repkit::{GroupPoint, Representation};
use serde_json::{json, Map, Value};

use super::{component_point, eigenvalues, Outcome};
use crate::error::{invalid, Error, Result};
use crate::problem::{Side, StateBlock};
use crate::report::herm;
use crate::{Context, MeasureSub};

pub fn measure(cx: &Context, sub: MeasureSub) -> Outcome {
    let p = cx.problem()?;
    let tol = &cx.tol;
    let pair = p.pair(tol)?;
    let point = component_point(cx, &pair)?;
    let mut out = Map::new();
    out.insert("component".into(), json!(point.component));
    let mut caveats = Vec::new();
    let sides: Vec<(Side, &str, &Representation<f64>)> = [(Side::In, "state_in", &pair.rep_in), (Side::Out, "state_out", &pair.rep_out)]
        .into_iter()
        .filter(|(s, _, _)| *s == Side::In || p.state_out.is_some())
        .collect();
    match sub {
        MeasureSub::Qgt => {
            for (side, name, rep) in sides {
                if side == Side::Out && matches!(p.state_out, Some(StateBlock::Mixed { .. })) {
                    caveats.push("state_out is mixed; no QGT reported for it".into());
                    continue;
                }
                let psi = p.pure(side, tol)?;
                let t = qgt(rep, &psi, &point).map_err(|e| Error::core("qgt", e))?.matrix;
                out.insert(name.into(), tensor(&t)?);
            }
        }
        MeasureSub::Smatrix => {
            for (side, name, rep) in sides {
                let rho = p.density(side, tol)?;
                let t = s_matrix(rep, &rho, &point, tol).map_err(|e| Error::core("s matrix", e))?.matrix;
                out.insert(name.into(), tensor(&t)?);
            }
        }
        MeasureSub::Sq => {
            let q = cx.opts.q.unwrap_or(0.5);
            let spec = MetricSpec::new(q).map_err(|e| Error::core("--q", e))?;
            out.insert("q".into(), json!(q));
            for (side, name, rep) in sides {
                let rho = p.density(side, tol)?;
                let t = s_q_matrix(rep, &rho, &spec, &point, tol).map_err(|e| Error::core("S_q", e))?.matrix;
                out.insert(name.into(), tensor(&t)?);
            }
        }
        MeasureSub::Ag => {
            let spec = p.u1_spec(tol)?.ok_or_else(|| invalid("measure ag needs a `u1` block"))?;
            if point != GroupPoint::identity(pair.dim_g()) {
                caveats.push("A_G is invariant under the group; --component is ignored".into());
            }
            for (side, name, _) in sides {
                let rho = p.density(side, tol)?;
                if rho.dim() != spec.dim() {
                    caveats.push(format!("{name} dimension differs from the u1 block; skipped"));
                    continue;
                }
                let a = u1_relative_entropy_asymmetry(&spec, &rho).map_err(|e| Error::core("A_G", e))?;
                out.insert(name.into(), json!({ "nats": a, "bits": a / std::f64::consts::LN_2 }));
            }
        }
    }
    Ok((Value::Object(out), caveats))
}

fn tensor(t: &asymkit::HermMatrix) -> Result<Value> {
    Ok(json!({ "matrix": herm(t), "eigenvalues": eigenvalues(t)? }))
}
