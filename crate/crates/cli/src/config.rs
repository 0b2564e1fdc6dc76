//! TOML configuration: model, the two baths, and optional sweep, RI and
//! inversion sections. Every field is optional at parse time so that a
//! preset and a user file can be layered; completeness is checked when a
//! scenario is resolved.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ritherm::models::{BathPair, BathSpec, ChainSpec, Side};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Xxz,
    Ising,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BathKind {
    Spin,
    Bosonic,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ModelName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Mean anisotropy.
    #[serde(rename = "Delta", skip_serializing_if = "Option::is_none")]
    pub delta_mean: Option<f64>,
    /// Bond asymmetry.
    #[serde(rename = "delta", skip_serializing_if = "Option::is_none")]
    pub asymmetry: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Ising only: next-nearest coupling between sites 1 and 3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_13: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bond_deltas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<BathKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    Delta,
    #[serde(rename = "delta")]
    Asymmetry,
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "h")]
    H,
    #[serde(rename = "h_L")]
    HL,
    #[serde(rename = "h_R")]
    HR,
    #[serde(rename = "beta_L")]
    BetaL,
    #[serde(rename = "beta_R")]
    BetaR,
    #[serde(rename = "gamma")]
    Gamma,
    #[serde(rename = "f_L")]
    FL,
    #[serde(rename = "f_R")]
    FR,
}

impl Param {
    pub const ALL: [Param; 11] = [
        Param::Delta,
        Param::Asymmetry,
        Param::Alpha,
        Param::H,
        Param::HL,
        Param::HR,
        Param::BetaL,
        Param::BetaR,
        Param::Gamma,
        Param::FL,
        Param::FR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Delta => "Delta",
            Param::Asymmetry => "delta",
            Param::Alpha => "alpha",
            Param::H => "h",
            Param::HL => "h_L",
            Param::HR => "h_R",
            Param::BetaL => "beta_L",
            Param::BetaR => "beta_R",
            Param::Gamma => "gamma",
            Param::FL => "f_L",
            Param::FR => "f_R",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown sweep parameter '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: Param,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl SweepSection {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| self.from + (self.to - self.from) * k as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taus: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_cycles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InversionKind {
    Identity,
    FlipF,
    FlipH,
    KappaSwap,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InversionSection {
    pub kind: InversionKind,
    #[serde(rename = "kappa_L", skip_serializing_if = "Option::is_none")]
    pub kappa_l: Option<f64>,
    #[serde(rename = "kappa_R", skip_serializing_if = "Option::is_none")]
    pub kappa_r: Option<f64>,
    #[serde(rename = "beta_L_scale", skip_serializing_if = "Option::is_none")]
    pub beta_l_scale: Option<f64>,
    #[serde(rename = "h_L_scale", skip_serializing_if = "Option::is_none")]
    pub h_l_scale: Option<f64>,
    #[serde(rename = "beta_R_scale", skip_serializing_if = "Option::is_none")]
    pub beta_r_scale: Option<f64>,
    #[serde(rename = "h_R_scale", skip_serializing_if = "Option::is_none")]
    pub h_r_scale: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(rename = "bath_L", default)]
    pub bath_l: BathSection,
    #[serde(rename = "bath_R", default)]
    pub bath_r: BathSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ri: Option<RiSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inversion: Option<InversionSection>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),+) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )+
    };
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Fields set in `top` replace those in `self`; whole sweep, RI and
    /// inversion sections are replaced.
    pub fn overlay(mut self, top: &Config) -> Self {
        overlay!(
            self.model,
            top.model,
            kind,
            n_sites,
            alpha,
            delta_mean,
            asymmetry,
            h,
            delta_13,
            fields,
            bond_deltas
        );
        overlay!(self.bath_l, top.bath_l, kind, beta, h, f, gamma, omega, g);
        overlay!(self.bath_r, top.bath_r, kind, beta, h, f, gamma, omega, g);
        overlay!(self, top, preset, sweep, ri, inversion);
        self
    }

    fn param_slot(&mut self, p: Param) -> &mut Option<f64> {
        match p {
            Param::Delta => &mut self.model.delta_mean,
            Param::Asymmetry => &mut self.model.asymmetry,
            Param::Alpha => &mut self.model.alpha,
            Param::H => &mut self.model.h,
            Param::HL => &mut self.bath_l.h,
            Param::HR => &mut self.bath_r.h,
            Param::BetaL => &mut self.bath_l.beta,
            Param::BetaR => &mut self.bath_r.beta,
            Param::FL => &mut self.bath_l.f,
            Param::FR => &mut self.bath_r.f,
            Param::Gamma => unreachable!("gamma spans both baths"),
        }
    }

    fn is_fixed(&self, p: Param) -> bool {
        let mut probe = self.clone();
        match p {
            Param::Gamma => self.bath_l.gamma.is_some() || self.bath_r.gamma.is_some(),
            _ => probe.param_slot(p).is_some(),
        }
    }

    /// Copy with `p` set to `value`.
    pub fn with_param(&self, p: Param, value: f64) -> Self {
        let mut out = self.clone();
        match p {
            Param::Gamma => {
                out.bath_l.gamma = Some(value);
                out.bath_r.gamma = Some(value);
            }
            _ => *out.param_slot(p) = Some(value),
        }
        out
    }

    pub fn validate_sweep(&self) -> CliResult<&SweepSection> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [sweep] section".into()))?;
        if sweep.points < 2 {
            return Err(CliError::Config(format!(
                "sweep needs at least 2 points, got {}",
                sweep.points
            )));
        }
        if !sweep.from.is_finite() || !sweep.to.is_finite() {
            return Err(CliError::Config("sweep bounds must be finite".into()));
        }
        if self.is_fixed(sweep.parameter) {
            return Err(CliError::Config(format!(
                "'{}' is both swept and fixed; remove it from the model/bath sections",
                sweep.parameter
            )));
        }
        Ok(sweep)
    }

    /// The configuration at a single point: the sweep start if the swept
    /// parameter is not otherwise fixed.
    pub fn point(&self) -> Self {
        match &self.sweep {
            Some(s) if !self.is_fixed(s.parameter) => self.with_param(s.parameter, s.from),
            _ => self.clone(),
        }
    }

    pub fn scenario(&self) -> CliResult<Scenario> {
        let spec = self.chain()?;
        let left = resolve_bath(&self.bath_l, Side::L)?;
        let right = resolve_bath(&self.bath_r, Side::R)?;
        let baths = BathPair::new(left, right).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Scenario { spec, baths })
    }

    fn chain(&self) -> CliResult<ChainSpec> {
        let m = &self.model;
        let n = m.n_sites.unwrap_or(3);
        let delta = m.delta_mean.unwrap_or(0.0);
        let mut spec = match m.kind.unwrap_or(ModelName::Xxz) {
            ModelName::Xxz => {
                if m.delta_13.is_some() {
                    return Err(CliError::Config(
                        "delta_13 applies only to the ising model".into(),
                    ));
                }
                ChainSpec::xxz(n, m.alpha.unwrap_or(1.0), delta, m.asymmetry.unwrap_or(0.0))
            }
            ModelName::Ising => {
                if m.alpha.is_some_and(|a| a != 0.0) || m.asymmetry.is_some_and(|d| d != 0.0) {
                    return Err(CliError::Config(
                        "the ising model takes no alpha or delta".into(),
                    ));
                }
                let s = ChainSpec::ising(n, delta);
                match m.delta_13 {
                    Some(d) => s.with_delta_13(d),
                    None => s,
                }
            }
        };
        spec = spec.with_field(m.h.unwrap_or(0.0));
        if let Some(f) = &m.fields {
            spec = spec.with_site_fields(f.clone());
        }
        if let Some(b) = &m.bond_deltas {
            spec = spec.with_bond_deltas(b.clone());
        }
        spec.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }
}

fn resolve_bath(b: &BathSection, side: Side) -> CliResult<BathSpec> {
    let name = match side {
        Side::L => "bath_L",
        Side::R => "bath_R",
    };
    let missing = |what: &str| CliError::Config(format!("[{name}] needs {what}"));
    let spec = match b.kind.unwrap_or(BathKind::Spin) {
        BathKind::Spin => {
            if b.omega.is_some() || b.g.is_some() {
                return Err(CliError::Config(format!(
                    "[{name}] omega and g belong to bosonic baths"
                )));
            }
            let gamma = b.gamma.unwrap_or(1.0);
            match (b.beta, b.h, b.f) {
                (Some(beta), Some(h), None) => BathSpec::spin(side, beta, h, gamma),
                // fixed temperature, field chosen to realize f
                (Some(beta), None, Some(f)) => {
                    BathSpec::spin(side, beta, -2.0 * f.atanh() / beta, gamma)
                }
                (None, None, Some(f)) => BathSpec::spin_polarized(side, f, gamma),
                (_, _, Some(_)) => {
                    return Err(CliError::Config(format!(
                        "[{name}] f together with h is overdetermined"
                    )))
                }
                (None, _, None) => return Err(missing("beta (with h), or f")),
                (Some(_), None, None) => return Err(missing("h or f alongside beta")),
            }
        }
        BathKind::Bosonic => {
            if b.h.is_some() || b.f.is_some() || b.gamma.is_some() {
                return Err(CliError::Config(format!(
                    "[{name}] bosonic baths take beta, omega and g only"
                )));
            }
            BathSpec::bosonic(
                side,
                b.beta.ok_or_else(|| missing("beta"))?,
                b.omega.ok_or_else(|| missing("omega"))?,
                b.g.ok_or_else(|| missing("g"))?,
            )
        }
    };
    spec.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(spec)
}

/// A fully resolved model and bath pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub spec: ChainSpec,
    pub baths: BathPair,
}
