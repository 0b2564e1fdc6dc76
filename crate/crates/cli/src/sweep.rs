use rayon::prelude::*;
use ritherm::currents::{energy_inflow, spin_current, CurrentOptions, CurrentReport};
use ritherm::models::{bath_f, Side};
use ritherm::steady_state::{solve_chain, SteadyOptions, SteadyState};
use ritherm::Error;
use serde::Serialize;

use crate::config::{Config, Param, Scenario};
use crate::error::CliResult;

/// One evaluated parameter point. Quantities that could not be computed
/// are NaN and the reason is in `error`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub value: f64,
    pub f_l: f64,
    pub f_r: f64,
    pub qdot_l: f64,
    pub qdot_r: f64,
    pub wdot_l: f64,
    pub wdot_r: f64,
    pub wdot_total: f64,
    pub f_energy: f64,
    pub pi_ss: f64,
    pub j: f64,
    pub regime: String,
    pub nullspace_dim: Option<usize>,
    pub residual: f64,
    pub error: Option<String>,
}

impl Row {
    fn empty(value: f64) -> Self {
        Self {
            value,
            f_l: f64::NAN,
            f_r: f64::NAN,
            qdot_l: f64::NAN,
            qdot_r: f64::NAN,
            wdot_l: f64::NAN,
            wdot_r: f64::NAN,
            wdot_total: f64::NAN,
            f_energy: f64::NAN,
            pi_ss: f64::NAN,
            j: f64::NAN,
            regime: "none".into(),
            nullspace_dim: None,
            residual: f64::NAN,
            error: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    pub steady: SteadyOptions,
    pub currents: CurrentOptions,
}

/// Solves the steady state and derives all currents. When a bath is given
/// only by its polarization the energy current and spin current are still
/// reported; the heat/work split is left NaN with the explanation.
pub fn evaluate(sc: &Scenario, value: f64, opts: &EvalOptions) -> Row {
    let mut row = Row::empty(value);
    row.f_l = bath_f(&sc.baths.left).unwrap_or(f64::NAN);
    row.f_r = bath_f(&sc.baths.right).unwrap_or(f64::NAN);
    let ss = match solve_chain(&sc.spec, &sc.baths, &opts.steady) {
        Ok(ss) => ss,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.nullspace_dim = Some(ss.nullspace_dim);
    row.residual = ss.residual;
    if let Err(e) = fill_currents(&mut row, sc, &ss, opts) {
        row.error = Some(e.to_string());
    }
    row
}

fn fill_currents(
    row: &mut Row,
    sc: &Scenario,
    ss: &SteadyState,
    opts: &EvalOptions,
) -> Result<(), Error> {
    match CurrentReport::compute(&sc.spec, &sc.baths, ss, &opts.currents) {
        Ok(r) => {
            row.qdot_l = r.qdot_l;
            row.qdot_r = r.qdot_r;
            row.wdot_l = r.wdot_l;
            row.wdot_r = r.wdot_r;
            row.wdot_total = r.wdot_total;
            row.f_energy = r.f_energy;
            row.pi_ss = r.pi_ss;
            row.j = r.j_spin;
            row.regime = r.regime.label().to_string();
            Ok(())
        }
        Err(e @ Error::UndeterminedSplit { .. }) => {
            row.f_energy = energy_inflow(&sc.spec, &sc.baths, &ss.rho, Side::L)?;
            row.j = spin_current(&sc.spec, &ss.rho)?;
            Err(e)
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub parameter: Param,
    pub rows: Vec<Row>,
}

/// Evaluates every grid point in parallel; rows come back in grid order.
/// Points whose configuration does not resolve are recorded as error rows.
pub fn run_sweep(cfg: &Config, opts: &EvalOptions) -> CliResult<SweepResult> {
    let sweep = cfg.validate_sweep()?;
    // surface config errors that do not depend on the swept value
    cfg.with_param(sweep.parameter, sweep.from).scenario()?;
    let rows = sweep
        .grid()
        .into_par_iter()
        .map(|x| match cfg.with_param(sweep.parameter, x).scenario() {
            Ok(sc) => evaluate(&sc, x, opts),
            Err(e) => Row {
                error: Some(e.to_string()),
                ..Row::empty(x)
            },
        })
        .collect();
    Ok(SweepResult {
        parameter: sweep.parameter,
        rows,
    })
}

/// Maximal runs of equal regime labels, as `(label, first index, last index)`.
pub fn regime_segments(rows: &[Row]) -> Vec<(String, usize, usize)> {
    let mut out: Vec<(String, usize, usize)> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        match out.last_mut() {
            Some((label, _, end)) if *label == r.regime => *end = i,
            _ => out.push((r.regime.clone(), i, i)),
        }
    }
    out
}
