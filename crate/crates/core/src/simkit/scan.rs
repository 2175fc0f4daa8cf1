use rayon::prelude::*;

use crate::chankit::{apply_channel, build_conversion_channel, conversion_infidelity};
use crate::error::{Error, Result};
use crate::numkit::{
    checked_power_dim, expm_i, power_trace_distance, pure_fidelity, tensor_power_vec, PureState, ToleranceConfig,
};
use crate::repkit::{RepPair, Representation};
use crate::scalar::{lit, to_f64, Real};

/// (e^{i(u/√N)·X}ψ)^{⊗N}.
pub fn shifted_iid_state<T: Real>(
    rep: &Representation<T>,
    psi: &PureState<T>,
    u: &[T],
    n: usize,
    cap: usize,
) -> Result<PureState<T>> {
    checked_power_dim(rep.dim(), n, cap)?;
    let one = shift(rep, psi, u, n)?;
    PureState::normalized(tensor_power_vec(one.vec(), n, cap)?)
}

fn shift<T: Real>(rep: &Representation<T>, psi: &PureState<T>, u: &[T], n: usize) -> Result<PureState<T>> {
    if u.len() != rep.dim_g() {
        return Err(Error::DimensionMismatch { expected: rep.dim_g(), found: u.len() });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("copies must be ≥ 1".into()));
    }
    let s = T::one() / lit::<T>((n as f64).sqrt());
    let theta: Vec<T> = u.iter().map(|&x| x * s).collect();
    Ok(psi.transformed(&expm_i(&rep.combination(&theta)?, T::one())?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig<T> {
    /// Strictly ascending copy counts.
    pub copies: Vec<usize>,
    pub shifts: Vec<Vec<T>>,
    /// Output copies per input copy, in (0, 1]; ⌊rN⌋ (at least one) copies are converted.
    pub rate_r: f64,
    pub seed: u64,
    pub cap: usize,
}

impl<T: Real> ScanConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.copies.is_empty() || self.shifts.is_empty() {
            return Err(Error::Empty("scan grid"));
        }
        if self.copies[0] == 0 || self.copies.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("copies must be positive and strictly ascending".into()));
        }
        if !(self.rate_r > 0.0 && self.rate_r <= 1.0) {
            return Err(Error::InvalidParameter(format!("rate {} outside (0, 1]", self.rate_r)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow<T> {
    pub n: usize,
    pub n_out: usize,
    pub u_norm: T,
    pub trace_distance: T,
    pub fidelity: T,
    pub per_copy_infidelity: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable<T> {
    pub rows: Vec<ScanRow<T>>,
    /// (N, fitted exponent of per-copy infidelity against ‖u‖).
    pub u_exponents: Vec<(usize, f64)>,
    /// (‖u‖, fitted exponent of per-copy infidelity against N).
    pub n_exponents: Vec<(f64, f64)>,
}

/// Least-squares slope of log y against log x over the positive pairs.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Runs the exact single-copy converter on (ψ_{u/√N})^{⊗N} and compares with the shifted
/// target. Rows are ordered by N, then by shift.
pub fn convergence_scan<T: Real>(
    pair: &RepPair<T>,
    psi: &PureState<T>,
    phi: &PureState<T>,
    cfg: &ScanConfig<T>,
    tol: &ToleranceConfig,
) -> Result<ScanTable<T>> {
    cfg.validate()?;
    let (ch, _) = build_conversion_channel(pair, psi, phi, tol)?;
    for &n in &cfg.copies {
        let n_out = ((cfg.rate_r * n as f64).floor() as usize).max(1);
        checked_power_dim(pair.rep_in.dim(), n, cfg.cap)?;
        checked_power_dim(pair.rep_out.dim(), n_out, cfg.cap)?;
    }
    let cells: Vec<(usize, &Vec<T>)> = cfg.copies.iter().flat_map(|&n| cfg.shifts.iter().map(move |u| (n, u))).collect();
    // indexed collect keeps row order independent of the schedule
    let rows = cells
        .par_iter()
        .map(|&(n, u)| -> Result<ScanRow<T>> {
            let n_out = ((cfg.rate_r * n as f64).floor() as usize).max(1);
            let a = shift(&pair.rep_in, psi, u, n)?;
            let b = shift(&pair.rep_out, phi, u, n)?;
            let out = apply_channel(&ch, &a.to_density())?;
            let f1 = pure_fidelity(&b, &out);
            Ok(ScanRow {
                n,
                n_out,
                u_norm: u.iter().fold(T::zero(), |s, &x| s + x * x).sqrt(),
                trace_distance: power_trace_distance(&out, &b, n_out)?,
                fidelity: f1.powi(n_out as i32),
                per_copy_infidelity: conversion_infidelity(&ch, &a, &b)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let u_exponents = cfg
        .copies
        .iter()
        .filter_map(|&n| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| (to_f64(r.u_norm), to_f64(r.per_copy_infidelity)))
                .unzip();
            loglog_slope(&xs, &ys).map(|s| (n, s))
        })
        .collect();
    let n_exponents = cfg
        .shifts
        .iter()
        .enumerate()
        .filter_map(|(j, u)| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .skip(j)
                .step_by(cfg.shifts.len())
                .map(|r| (r.n as f64, to_f64(r.per_copy_infidelity)))
                .unzip();
            let norm = u.iter().map(|&x| to_f64(x).powi(2)).sum::<f64>().sqrt();
            loglog_slope(&xs, &ys).map(|s| (norm, s))
        })
        .collect();
    Ok(ScanTable { rows, u_exponents, n_exponents })
}
