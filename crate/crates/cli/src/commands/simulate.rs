use std::path::Path;

use asymkit::chankit::{estimate_and_convert, EstimateOptions};
use asymkit::measures::MetricSpec;
use asymkit::numkit::random::random_density;
use asymkit::numkit::{DensityMatrix, HermMatrix, PureState};
use asymkit::ratekit::MatrixOrder;
use asymkit::repkit::builders::u1;
use asymkit::repkit::RepPair;
use asymkit::simkit::{
    admixed_sequence, convergence_scan, convex_roof_counterexample, largest_ev_check, monotonicity_probe,
    negative_control, pure_limit_probe, s_q_property_suite, Admixture, ScanConfig, ScanTable,
};
use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::Outcome;
use crate::error::{invalid, Error, Result};
use crate::problem::Side;
use crate::report::number;
use crate::{Context, SimulateSub, Suite};

/// Violation ceiling shared by every property suite.
pub const SUITE_TOL: f64 = 1e-9;
/// The non-covariant control must violate monotonicity by at least this much.
pub const CONTROL_MIN: f64 = 1e-3;

fn parse_copies(s: Option<&str>, default: (usize, usize)) -> Result<Vec<usize>> {
    let (a, b) = match s {
        None => default,
        Some(s) => {
            let (a, b) = s.split_once(':').ok_or_else(|| invalid(format!("--copies expects A:B, got `{s}`")))?;
            let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| invalid(format!("--copies: `{x}` is not a count")));
            (parse(a)?, parse(b)?)
        }
    };
    if a == 0 || a > b {
        return Err(invalid(format!("--copies {a}:{b} must satisfy 1 ≤ A ≤ B")));
    }
    Ok((a..=b).collect())
}

fn load_shifts(path: Option<&Path>, dim_g: usize) -> Result<Vec<Vec<f64>>> {
    let Some(path) = path else { return Ok(vec![vec![0.0; dim_g]]) };
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let shifts: Vec<Vec<f64>> =
        serde_json::from_str(&text).map_err(|e| invalid(format!("shift file {}: {e}", path.display())))?;
    if shifts.is_empty() {
        return Err(invalid("shift file lists no shifts"));
    }
    for (k, u) in shifts.iter().enumerate() {
        if u.len() != dim_g || u.iter().any(|x| !x.is_finite()) {
            return Err(invalid(format!("shift {k}: expected {dim_g} finite entries")));
        }
    }
    Ok(shifts)
}

fn run_scan(cx: &Context) -> Result<ScanTable<f64>> {
    let p = cx.problem()?;
    let tol = &cx.tol;
    let pair = p.pair(tol)?;
    let (psi, phi) = (p.pure(Side::In, tol)?, p.pure(Side::Out, tol)?);
    let cfg = ScanConfig {
        copies: parse_copies(cx.opts.copies.as_deref(), (1, 8))?,
        shifts: load_shifts(cx.opts.shift_file.as_deref(), pair.dim_g())?,
        rate_r: cx.opts.rate_r,
        seed: cx.opts.seed,
        cap: cx.cap,
    };
    convergence_scan(&pair, &psi, &phi, &cfg, tol).map_err(|e| Error::core("convergence scan", e))
}

pub fn scan_csv(cx: &Context) -> Result<String> {
    let table = run_scan(cx)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Error::Numerical(format!("csv: {e}"));
    w.write_record(["N", "u_norm", "trace_distance", "fidelity", "per_copy_infidelity"]).map_err(fail)?;
    for r in &table.rows {
        // shortest round-trip form, matching the JSON reports
        let f = |x: f64| number(x).to_string().trim_matches('"').to_string();
        w.write_record([r.n.to_string(), f(r.u_norm), f(r.trace_distance), f(r.fidelity), f(r.per_copy_infidelity)])
        .map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Numerical(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Numerical(format!("csv: {e}")))
}

pub fn simulate(cx: &Context, sub: SimulateSub) -> Outcome {
    match sub {
        SimulateSub::Scan => {
            let t = run_scan(cx)?;
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "N": r.n,
                        "n_out": r.n_out,
                        "u_norm": r.u_norm,
                        "trace_distance": r.trace_distance,
                        "fidelity": r.fidelity,
                        "per_copy_infidelity": r.per_copy_infidelity,
                    })
                })
                .collect();
            let u_exp: Vec<Value> = t.u_exponents.iter().map(|(n, s)| json!({ "N": n, "slope": s })).collect();
            let n_exp: Vec<Value> = t.n_exponents.iter().map(|(u, s)| json!({ "u_norm": u, "slope": s })).collect();
            Ok((
                json!({ "rows": rows, "u_exponents": u_exp, "n_exponents": n_exp, "rate_r": cx.opts.rate_r }),
                vec!["exponents are least-squares log-log fits, not asymptotic limits".into()],
            ))
        }
        SimulateSub::Estimate => estimate(cx),
        SimulateSub::Check => check(cx),
    }
}

fn estimate(cx: &Context) -> Outcome {
    let p = cx.problem()?;
    let tol = &cx.tol;
    let pair = p.pair(tol)?;
    let (psi, phi) = (p.pure(Side::In, tol)?, p.pure(Side::Out, tol)?);
    let copies = parse_copies(cx.opts.copies.as_deref(), (2, 8))?;
    let u = load_shifts(cx.opts.shift_file.as_deref(), pair.dim_g())?.remove(0);
    let opts = EstimateOptions::default();
    let mut caveats: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    for n in copies {
        let r = estimate_and_convert(&pair, &psi, &phi, n, cx.opts.split, &u, cx.opts.seed, &opts, cx.cap, tol)
            .map_err(|e| Error::core(&format!("estimate-and-convert at N = {n}"), e))?;
        for c in &r.caveats {
            if !caveats.contains(c) {
                caveats.push(c.clone());
            }
        }
        rows.push(json!({
            "N": n,
            "n_est": r.n_est,
            "n_conv": r.n_conv,
            "distance_to_target": r.distance_to_target,
            "estimate": { "component": r.estimate.component, "theta": r.estimate.theta },
            "estimate_fidelity": r.estimate_fidelity,
        }));
    }
    Ok((json!({ "u": u, "split_exponent": cx.opts.split, "rows": rows }), caveats))
}

fn verdict(name: &str, passed: bool, threshold: f64, details: Value) -> Value {
    json!({ "suite": name, "passed": passed, "threshold": threshold, "details": details })
}

/// Pair and state for the channel suites: the problem's when given, else a qubit under U(1).
fn suite_inputs(cx: &Context) -> Result<(RepPair<f64>, DensityMatrix<f64>)> {
    match &cx.problem {
        Some(p) => Ok((p.pair(&cx.tol)?, p.density(Side::In, &cx.tol)?)),
        None => {
            let pair = RepPair::new(u1(&[0.0, 1.0]), u1(&[0.0, 1.0])).map_err(|e| Error::core("default pair", e))?;
            let mut rng = ChaCha8Rng::seed_from_u64(cx.opts.seed);
            Ok((pair, random_density(2, 2, &mut rng)))
        }
    }
}

fn check(cx: &Context) -> Outcome {
    let tol = &cx.tol;
    let seed = cx.opts.seed;
    let want = |s: Suite| cx.opts.suite == Suite::All || cx.opts.suite == s;
    let mut out = Vec::new();
    let mut caveats = Vec::new();
    if want(Suite::Monotonicity) {
        let (pair, rho) = suite_inputs(cx)?;
        let count = cx.opts.count.unwrap_or(200);
        let r = monotonicity_probe(&pair, &rho, count, seed, tol).map_err(|e| Error::core("monotonicity suite", e))?;
        let (cp, cs) = negative_control::<f64>(tol).map_err(|e| Error::core("negative control", e))?;
        let control = cp.max(cs);
        let passed = r.max_petz_violation <= SUITE_TOL && r.max_s_violation <= SUITE_TOL && control >= CONTROL_MIN;
        out.push(verdict(
            "monotonicity",
            passed,
            SUITE_TOL,
            json!({
                "draws": r.draws,
                "max_petz_violation": r.max_petz_violation,
                "max_s_violation": r.max_s_violation,
                "untwirled_max_violation": r.control_max_violation,
                "negative_control_violation": control,
                "negative_control_minimum": CONTROL_MIN,
            }),
        ));
    }
    if want(Suite::Sq) {
        let rep = match &cx.problem {
            Some(p) => p.pair(tol)?.rep_in,
            None => u1(&[0.0, 1.0]),
        };
        let count = cx.opts.count.unwrap_or(100);
        let r = s_q_property_suite(&rep, count, seed, tol).map_err(|e| Error::core("S_q suite", e))?;
        out.push(verdict(
            "sq",
            r.max_violation() <= SUITE_TOL,
            SUITE_TOL,
            json!({
                "draws": r.draws,
                "positivity": r.positivity,
                "additivity": r.additivity,
                "convexity": r.convexity,
                "monotonicity": r.monotonicity,
                "strong_monotonicity": r.strong_monotonicity,
            }),
        ));
    }
    if want(Suite::LargestEv) {
        let d = cx.problem.as_ref().map_or(2, |p| p.rep_in.dim);
        let count = cx.opts.count.unwrap_or(500);
        let r = largest_ev_check(d, count, seed, tol).map_err(|e| Error::core("largest-eigenvector suite", e))?;
        out.push(verdict(
            "largest-ev",
            r.overlap_violations == 0 && r.metric_violations == 0,
            SUITE_TOL,
            json!({
                "draws": r.draws,
                "skipped": r.skipped,
                "overlap_violations": r.overlap_violations,
                "metric_violations": r.metric_violations,
                "min_overlap_margin": number(r.min_overlap_margin),
                "min_metric_margin": number(r.min_metric_margin),
            }),
        ));
    }
    if want(Suite::PureLimit) {
        let (phi, o) = match &cx.problem {
            Some(p) if p.state_out.is_some() => (p.pure(Side::Out, tol)?, p.pair(tol)?.rep_out.generators()[0].mat().clone()),
            _ => {
                let v = nalgebra::DVector::from_vec(vec![Complex::new(0.8, 0.0), Complex::new(0.6, 0.0)]);
                (PureState::normalized(v).map_err(|e| Error::core("default state", e))?, HermMatrix::from_real_diagonal(&[0.0, 1.0]).into_mat())
            }
        };
        let spec = MetricSpec::new(cx.opts.q.unwrap_or(0.5)).map_err(|e| Error::core("--q", e))?;
        let ns: Vec<usize> = (1..=6).take_while(|&n| phi.dim().checked_pow(n as u32).is_some_and(|d| d <= cx.cap)).collect();
        let seq = admixed_sequence(&phi, &ns, |n| 1.0 / (4.0 * (n * n) as f64), &Admixture::MaximallyMixed, cx.cap, tol)
            .map_err(|e| Error::core("state sequence", e))?;
        let r = pure_limit_probe(&phi, &o, &seq, &spec, cx.cap, tol).map_err(|e| Error::core("pure-limit probe", e))?;
        caveats.push(r.note.to_string());
        let rows: Vec<Value> = r
            .rows
            .iter()
            .map(|x| json!({ "N": x.n, "distance": x.distance, "delta": x.delta, "ratio": x.ratio, "bound": x.rigorous_bound, "bound_holds": x.bound_holds }))
            .collect();
        out.push(verdict(
            "pure-limit",
            r.rows.iter().all(|x| x.bound_holds),
            SUITE_TOL,
            json!({ "variance": r.variance, "pure_ratio": r.pure_ratio, "rows": rows }),
        ));
    }
    if want(Suite::Counterexample) {
        let eps = match &cx.problem {
            Some(p) if p.rep_in.dim == 2 => {
                let rho = p.density(Side::In, tol)?;
                rho.mat()[(0, 0)].re - rho.mat()[(1, 1)].re
            }
            _ => 0.6,
        };
        let r = convex_roof_counterexample(eps, tol).map_err(|e| Error::core("convex-roof counterexample", e))?;
        out.push(verdict(
            "counterexample",
            r.max_deviation <= 1e-10 && r.order == MatrixOrder::Incomparable,
            1e-10,
            json!({
                "epsilon": eps,
                "first": crate::report::herm(&r.first),
                "second": crate::report::herm(&r.second),
                "max_deviation": r.max_deviation,
                "decomposition_residual": r.decomposition_residual,
                "order": format!("{:?}", r.order),
            }),
        ));
    }
    let all = out.iter().all(|v| v["passed"] == json!(true));
    Ok((json!({ "passed": all, "suites": out }), caveats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copies_parse() {
        assert_eq!(parse_copies(Some("2:4"), (1, 8)).unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_copies(None, (1, 3)).unwrap(), vec![1, 2, 3]);
        for bad in ["0:3", "4:2", "3", "a:b", "1:-2"] {
            assert!(parse_copies(Some(bad), (1, 8)).is_err(), "{bad}");
        }
    }

    #[test]
    fn default_shift_is_zero() {
        assert_eq!(load_shifts(None, 3).unwrap(), vec![vec![0.0; 3]]);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.json");
        std::fs::write(&p, "[[0.5, 1.0]]").unwrap();
        assert!(load_shifts(Some(&p), 1).is_err());
        assert_eq!(load_shifts(Some(&p), 2).unwrap(), vec![vec![0.5, 1.0]]);
    }
}
