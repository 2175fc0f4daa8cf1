use asymkit::chankit::{
    apply_channel, build_conversion_channel, covariance_defect, random_points, twirl, TwirlSampling,
};
use asymkit::numkit::random::random_density;
use asymkit::numkit::{eig_range, pure_fidelity, DensityMatrix};
use asymkit::repkit::RepPair;
use asymkit::{KrausChannel, PureState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::Outcome;
use crate::error::{Error, Result};
use crate::problem::Side;
use crate::report::cmat;
use crate::{ChannelSub, Context};

/// Covariance points drawn for the defect estimate.
const DEFECT_POINTS: usize = 16;
const DEFAULT_MC_DRAWS: usize = 256;
/// Displacement ‖θ‖ for the local defect, probed on the input state alone. The built
/// channel matches the action there to first order only.
const LOCAL_STEP: f64 = 1e-3;

struct Probe {
    points: Vec<asymkit::GroupPoint>,
    local: Vec<asymkit::GroupPoint>,
    states: Vec<DensityMatrix<f64>>,
}

fn probe(pair: &RepPair<f64>, psi: &PureState, seed: u64) -> Probe {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = random_points(pair, DEFECT_POINTS, &mut rng);
    let d = pair.rep_in.dim();
    let states = vec![psi.to_density(), random_density(d, d, &mut rng)];
    let local = points
        .iter()
        .filter_map(|p| {
            let n = p.theta.iter().map(|x| x * x).sum::<f64>().sqrt();
            (n > 0.0).then(|| asymkit::GroupPoint {
                component: 0,
                theta: p.theta.iter().map(|x| x * LOCAL_STEP / n).collect(),
            })
        })
        .collect();
    Probe { points, local, states }
}

fn certificates(ch: &KrausChannel, pair: &RepPair<f64>, psi: &PureState, phi: &PureState, pr: &Probe) -> Result<Value> {
    let out = apply_channel(ch, &psi.to_density()).map_err(|e| Error::core("apply channel", e))?;
    let defect = |states: &[DensityMatrix<f64>], pts: &[asymkit::GroupPoint]| -> Result<Value> {
        if pts.is_empty() {
            return Ok(json!(0.0));
        }
        Ok(json!(covariance_defect(ch, pair, states, pts).map_err(|e| Error::core("covariance defect", e))?))
    };
    Ok(json!({
        "completeness_residual": ch.completeness_residual(),
        "fidelity_to_target": pure_fidelity(phi, &out),
        "covariance_defect": defect(&pr.states, &pr.points)?,
        "local_covariance_defect": defect(&pr.states[..1], &pr.local)?,
        "local_step": LOCAL_STEP,
    }))
}

fn kraus(ch: &KrausChannel) -> Value {
    Value::Array(ch.kraus_ops().iter().map(cmat).collect())
}

pub fn channel(cx: &Context, sub: ChannelSub) -> Outcome {
    let p = cx.problem()?;
    let tol = &cx.tol;
    let pair = p.pair(tol)?;
    let (psi, phi) = (p.pure(Side::In, tol)?, p.pure(Side::Out, tol)?);
    let (ch, art) = build_conversion_channel(&pair, &psi, &phi, tol).map_err(|e| Error::core("channel construction", e))?;
    let pr = probe(&pair, &psi, cx.opts.seed);
    let gamma_min = if art.gamma.dim() == 0 { 0.0 } else { eig_range(&art.gamma).map_err(|e| Error::core("Γ", e))?.0 };
    let built = json!({
        "kraus": kraus(&ch),
        "z": cmat(&art.z),
        "gamma_min_eigenvalue": gamma_min,
        "cz_residual": art.residual,
        "certificates": certificates(&ch, &pair, &psi, &phi, &pr)?,
    });
    let mut caveats = vec!["the built channel intertwines the generators to first order only; \
                            covariance_defect measures global covariance on seeded samples"
        .to_string()];
    let results = match sub {
        ChannelSub::Build => built,
        ChannelSub::Twirl => {
            let sampling = if p.finite_exhaustive {
                TwirlSampling::Finite(pair.component_pairs().to_vec())
            } else {
                match twirl(&ch, &pair, &TwirlSampling::CyclicGrid, tol) {
                    Ok(_) => TwirlSampling::CyclicGrid,
                    Err(_) => {
                        let count = cx.opts.count.unwrap_or(DEFAULT_MC_DRAWS);
                        caveats.push(format!(
                            "no exact twirl for this group; averaged {count} seeded draws uniform in exponential coordinates"
                        ));
                        TwirlSampling::MonteCarlo { count, seed: cx.opts.seed }
                    }
                }
            };
            let tw = twirl(&ch, &pair, &sampling, tol).map_err(|e| Error::core("twirl", e))?;
            json!({
                "built": built,
                "twirled": {
                    "kraus": kraus(&tw.channel),
                    "elements": tw.elements,
                    "exact": tw.exact,
                    "certificates": certificates(&tw.channel, &pair, &psi, &phi, &pr)?,
                },
            })
        }
    };
    Ok((results, caveats))
}
