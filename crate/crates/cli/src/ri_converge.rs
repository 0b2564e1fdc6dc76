use rayon::prelude::*;
use ritherm::currents::CurrentReport;
use ritherm::linalg::trace_distance;
use ritherm::ri_map::{ri_fixed_point, RiConfig};
use ritherm::steady_state::solve_chain;
use serde::Serialize;

use crate::config::{Config, RiSection};
use crate::error::{CliError, CliResult};
use crate::sweep::EvalOptions;

const ROUNDOFF_DISTANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiRow {
    pub tau: f64,
    pub cycles: usize,
    pub trace_distance: f64,
    /// Largest |RI rate − master-equation rate| over the four boundary rates.
    pub rate_error: f64,
    pub qdot_l: f64,
    pub qdot_r: f64,
    pub wdot_l: f64,
    pub wdot_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiConvergenceReport {
    pub rows: Vec<RiRow>,
    pub lme_qdot_l: f64,
    pub lme_qdot_r: f64,
    pub lme_wdot_l: f64,
    pub lme_wdot_r: f64,
    /// `trace_distance`, or `rate_error` when the fixed point does not move
    /// with τ (all distances at roundoff, e.g. a maximally mixed steady state).
    pub error_measure: String,
    /// Least-squares slope of ln(error) against ln τ for `error_measure`.
    pub fitted_order: f64,
    pub rate_order: f64,
    pub strictly_decreasing: bool,
}

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn fitted_order(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn ri_config(sec: &RiSection, tau: f64, tol: Option<f64>) -> RiConfig {
    let mut cfg = RiConfig::new(tau);
    cfg.n_max = sec.n_max;
    if let Some(n) = sec.max_cycles {
        cfg.n_cycles = n;
    }
    if let Some(t) = tol.or(sec.convergence_tol) {
        cfg.convergence_tol = t;
    }
    cfg
}

pub fn taus(sec: &RiSection) -> CliResult<Vec<f64>> {
    let taus = sec
        .taus
        .clone()
        .ok_or_else(|| CliError::Config("[ri] needs taus = [...]".into()))?;
    if taus.len() < 3 {
        return Err(CliError::Config("[ri] taus needs at least 3 values".into()));
    }
    if taus.windows(2).any(|w| w[1].is_nan() || w[1] >= w[0])
        || taus.iter().any(|&t| t.is_nan() || t <= 0.0)
    {
        return Err(CliError::Config(
            "[ri] taus must be positive and strictly decreasing".into(),
        ));
    }
    Ok(taus)
}

/// Runs the RI fixed point for every τ and compares it with the
/// master-equation steady state and rates.
pub fn run_ri_convergence(
    cfg: &Config,
    tol: Option<f64>,
    opts: &EvalOptions,
) -> CliResult<RiConvergenceReport> {
    let sec = cfg
        .ri
        .clone()
        .ok_or_else(|| CliError::Config("missing [ri] section".into()))?;
    let taus = taus(&sec)?;
    let sc = cfg.point().scenario()?;
    let lme = solve_chain(&sc.spec, &sc.baths, &opts.steady)?;
    let reference = CurrentReport::compute(&sc.spec, &sc.baths, &lme, &opts.currents)?;
    let rows = taus
        .par_iter()
        .map(|&tau| {
            let rc = ri_config(&sec, tau, tol);
            rc.validate()?;
            let fp = ri_fixed_point(&sc.spec, &sc.baths, &rc)?;
            let r = fp.rates;
            let rate_error = [
                r.qdot_l - reference.qdot_l,
                r.qdot_r - reference.qdot_r,
                r.wdot_l - reference.wdot_l,
                r.wdot_r - reference.wdot_r,
            ]
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()));
            Ok(RiRow {
                tau,
                cycles: fp.history.len(),
                trace_distance: trace_distance(&fp.steady.rho, &lme.rho)?,
                rate_error,
                qdot_l: r.qdot_l,
                qdot_r: r.qdot_r,
                wdot_l: r.wdot_l,
                wdot_r: r.wdot_r,
            })
        })
        .collect::<Result<Vec<_>, ritherm::Error>>()?;
    let dists: Vec<f64> = rows.iter().map(|r| r.trace_distance).collect();
    let rate_errs: Vec<f64> = rows.iter().map(|r| r.rate_error).collect();
    let (measure, errs) = if dists.iter().all(|&d| d <= ROUNDOFF_DISTANCE) {
        ("rate_error", &rate_errs)
    } else {
        ("trace_distance", &dists)
    };
    let strictly_decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    Ok(RiConvergenceReport {
        error_measure: measure.to_string(),
        fitted_order: fitted_order(&taus, errs),
        rate_order: fitted_order(&taus, &rate_errs),
        strictly_decreasing,
        lme_qdot_l: reference.qdot_l,
        lme_qdot_r: reference.qdot_r,
        lme_wdot_l: reference.wdot_l,
        lme_wdot_r: reference.wdot_r,
        rows,
    })
}
