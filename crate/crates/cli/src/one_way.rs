use rayon::prelude::*;
use ritherm::models::{BathPair, BathSpec, Reservoir, SpinDrive};
use serde::Serialize;

use crate::config::{Config, InversionKind, InversionSection, Scenario};
use crate::error::{CliError, CliResult};
use crate::sweep::{evaluate, EvalOptions, Row};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Inversion {
    Identity,
    /// f → −f on both baths: h → −h at fixed β, or the polarization itself.
    FlipF,
    /// Every field reversed: both bath fields and the chain field.
    FlipH,
    /// β_L → κ_R β_R, h_L → h_R/κ_R, β_R → κ_L β_L, h_R → h_L/κ_L.
    KappaSwap {
        kappa_l: f64,
        kappa_r: f64,
    },
    /// Multiplicative remap of each bath's (β, h).
    Custom {
        beta_l: f64,
        h_l: f64,
        beta_r: f64,
        h_r: f64,
    },
}

impl Inversion {
    pub fn from_section(s: &InversionSection) -> CliResult<Self> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| CliError::Config(format!("[inversion] kind = kappa_swap needs {key}")))
        };
        let inv = match s.kind {
            InversionKind::Identity => Inversion::Identity,
            InversionKind::FlipF => Inversion::FlipF,
            InversionKind::FlipH => Inversion::FlipH,
            InversionKind::KappaSwap => Inversion::KappaSwap {
                kappa_l: need(s.kappa_l, "kappa_L")?,
                kappa_r: need(s.kappa_r, "kappa_R")?,
            },
            InversionKind::Custom => Inversion::Custom {
                beta_l: s.beta_l_scale.unwrap_or(1.0),
                h_l: s.h_l_scale.unwrap_or(1.0),
                beta_r: s.beta_r_scale.unwrap_or(1.0),
                h_r: s.h_r_scale.unwrap_or(1.0),
            },
        };
        if let Inversion::KappaSwap { kappa_l, kappa_r } = inv {
            if !(kappa_l > 0.0 && kappa_r > 0.0) {
                return Err(CliError::Config(
                    "kappa_L and kappa_R must be positive".into(),
                ));
            }
        }
        if let Inversion::Custom { beta_l, beta_r, .. } = inv {
            if !(beta_l > 0.0 && beta_r > 0.0) {
                return Err(CliError::Config(
                    "beta scale factors must be positive".into(),
                ));
            }
        }
        Ok(inv)
    }

    pub fn apply(&self, sc: &Scenario) -> CliResult<Scenario> {
        let (l, r) = (&sc.baths.left, &sc.baths.right);
        let mut spec = sc.spec.clone();
        let (left, right) = match *self {
            Inversion::Identity => (*l, *r),
            Inversion::FlipF => (flip(l)?, flip(r)?),
            Inversion::FlipH => {
                spec.h = -spec.h;
                spec.field = spec.field.map(|v| v.into_iter().map(|x| -x).collect());
                (flip(l)?, flip(r)?)
            }
            Inversion::KappaSwap { kappa_l, kappa_r } => swap(l, r, kappa_l, kappa_r)?,
            Inversion::Custom {
                beta_l,
                h_l,
                beta_r,
                h_r,
            } => (scale(l, beta_l, h_l)?, scale(r, beta_r, h_r)?),
        };
        let baths = BathPair::new(left, right).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Scenario { spec, baths })
    }
}

fn spin_parts(b: &BathSpec) -> CliResult<(f64, SpinDrive)> {
    match b.reservoir {
        Reservoir::Spin { gamma, drive } => Ok((gamma, drive)),
        Reservoir::Bosonic { .. } => {
            Err(CliError::Config("inversions act on spin baths only".into()))
        }
    }
}

fn flip(b: &BathSpec) -> CliResult<BathSpec> {
    let (gamma, drive) = spin_parts(b)?;
    Ok(match drive {
        SpinDrive::Thermal { beta, h } => BathSpec::spin(b.side, beta, -h, gamma),
        SpinDrive::Polarization { f } => BathSpec::spin_polarized(b.side, -f, gamma),
    })
}

fn thermal(b: &BathSpec) -> CliResult<(f64, f64, f64)> {
    match spin_parts(b)? {
        (gamma, SpinDrive::Thermal { beta, h }) => Ok((gamma, beta, h)),
        _ => Err(CliError::Config(
            "this inversion needs baths given by (beta, h)".into(),
        )),
    }
}

fn swap(l: &BathSpec, r: &BathSpec, kappa_l: f64, kappa_r: f64) -> CliResult<(BathSpec, BathSpec)> {
    let (gl, bl, hl) = thermal(l)?;
    let (gr, br, hr) = thermal(r)?;
    Ok((
        BathSpec::spin(l.side, kappa_r * br, hr / kappa_r, gl),
        BathSpec::spin(r.side, kappa_l * bl, hl / kappa_l, gr),
    ))
}

fn scale(b: &BathSpec, beta_factor: f64, h_factor: f64) -> CliResult<BathSpec> {
    let (gamma, beta, h) = thermal(b)?;
    Ok(BathSpec::spin(
        b.side,
        beta * beta_factor,
        h * h_factor,
        gamma,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneWayReport {
    pub inversion: Inversion,
    pub points: usize,
    pub tol: f64,
    pub max_df: f64,
    pub max_dqdot_l: f64,
    pub max_dqdot_r: f64,
    pub max_dwdot_l: f64,
    pub max_dwdot_r: f64,
    pub max_dwdot_total: f64,
    pub max_dj: f64,
    /// Grid value of the largest |ΔF|.
    pub worst_point: f64,
    pub pass: bool,
}

/// NaN-propagating running maximum: an uncomputable current (a bath given
/// only by f) shows up as null in the report rather than as zero.
fn worst(m: f64, a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if m.is_nan() || d.is_nan() {
        f64::NAN
    } else {
        m.max(d)
    }
}

/// Evaluates the grid before and after the inversion and reports the
/// largest deviation of each current. Passing means max |ΔF| ≤ `tol`.
pub fn check_one_way(
    cfg: &Config,
    inv: &Inversion,
    tol: f64,
    opts: &EvalOptions,
) -> CliResult<OneWayReport> {
    let (param, grid) = match &cfg.sweep {
        Some(_) => {
            let s = cfg.validate_sweep()?;
            (Some(s.parameter), s.grid())
        }
        None => (None, vec![f64::NAN]),
    };
    let scenarios: Vec<(f64, Scenario, Scenario)> = grid
        .iter()
        .map(|&x| {
            let point = match param {
                Some(p) => cfg.with_param(p, x),
                None => cfg.clone(),
            };
            let sc = point.scenario()?;
            let inverted = inv.apply(&sc)?;
            Ok((x, sc, inverted))
        })
        .collect::<CliResult<_>>()?;
    let pairs: Vec<(Row, Row)> = scenarios
        .par_iter()
        .map(|(x, a, b)| (evaluate(a, *x, opts), evaluate(b, *x, opts)))
        .collect();
    let mut rep = OneWayReport {
        inversion: *inv,
        points: pairs.len(),
        tol,
        max_df: 0.0,
        max_dqdot_l: 0.0,
        max_dqdot_r: 0.0,
        max_dwdot_l: 0.0,
        max_dwdot_r: 0.0,
        max_dwdot_total: 0.0,
        max_dj: 0.0,
        worst_point: grid[0],
        pass: true,
    };
    for (a, b) in &pairs {
        for r in [a, b] {
            if r.nullspace_dim.is_none() {
                return Err(CliError::Point(format!(
                    "{}: {}",
                    r.value,
                    r.error.as_deref().unwrap_or("unknown")
                )));
            }
        }
        let df = (a.f_energy - b.f_energy).abs();
        if df > rep.max_df {
            rep.worst_point = a.value;
        }
        rep.max_df = worst(rep.max_df, a.f_energy, b.f_energy);
        rep.max_dqdot_l = worst(rep.max_dqdot_l, a.qdot_l, b.qdot_l);
        rep.max_dqdot_r = worst(rep.max_dqdot_r, a.qdot_r, b.qdot_r);
        rep.max_dwdot_l = worst(rep.max_dwdot_l, a.wdot_l, b.wdot_l);
        rep.max_dwdot_r = worst(rep.max_dwdot_r, a.wdot_r, b.wdot_r);
        rep.max_dwdot_total = worst(rep.max_dwdot_total, a.wdot_total, b.wdot_total);
        rep.max_dj = worst(rep.max_dj, a.j, b.j);
    }
    rep.pass = rep.max_df <= tol;
    Ok(rep)
}
