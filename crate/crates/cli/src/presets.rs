//! Named scenarios. Each is a config fragment in the same TOML grammar the
//! user writes; a user file layered on top may fill or override fields.

use crate::config::Config;
use crate::error::{CliError, CliResult};

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    /// Parameters the preset leaves for the user, as `(section, key)`.
    pub user_supplied: &'static [(&'static str, &'static str)],
    pub toml: &'static str,
}

const FIG1: &str = r#"
[model]
kind = "xxz"
n_sites = 3
alpha = 1.0
delta = 1.0
h = 0.0

[bath_L]
h = 1.0
gamma = 1.0

[bath_R]
beta = 2.0
h = -0.5
gamma = 1.0

[sweep]
parameter = "Delta"
from = 0.0
to = 5.0
points = 51

[inversion]
kind = "flip_f"
"#;

const FIG2: &str = r#"
[model]
kind = "xxz"
n_sites = 3
alpha = 2.0
delta = 1.0
h = 0.0

[bath_L]
h = 1.0
gamma = 1.0

[bath_R]
beta = 10.0
h = -0.5
gamma = 1.0

[sweep]
parameter = "Delta"
from = 0.0
to = 5.0
points = 51

[inversion]
kind = "custom"
h_L_scale = -1.0
h_R_scale = -0.1
beta_R_scale = 10.0
"#;

const FIG3: &str = r#"
[model]
kind = "xxz"
n_sites = 3
alpha = 2.0
delta = 1.0
h = 0.0

[bath_L]
h = -1.0
gamma = 1.0

[bath_R]
beta = 100.0
h = 0.05
gamma = 1.0

[sweep]
parameter = "Delta"
from = 0.0
to = 5.0
points = 51
"#;

const FIG4: &str = r#"
[model]
kind = "xxz"
n_sites = 3
alpha = 1.0
Delta = 0.0
delta = 1.0
h = 0.0

[bath_L]
beta = 2.0
gamma = 1.0

[bath_R]
beta = 9.0
h = 0.2
gamma = 1.0

[sweep]
parameter = "h_L"
from = -0.5
to = 2.0
points = 101

[ri]
taus = [1e-2, 5e-3, 2.5e-3]
"#;

const FIG5: &str = r#"
[model]
kind = "xxz"
n_sites = 3
alpha = 1.0
Delta = 1.0
delta = 1.0
h = 1.0

[bath_L]
beta = 2.0
gamma = 1.0

[bath_R]
beta = 9.0
h = 0.2
gamma = 1.0

[sweep]
parameter = "h_L"
from = -0.5
to = 2.0
points = 101
"#;

const EQ16: &str = r#"
[model]
kind = "xxz"
n_sites = 3
alpha = 1.0
Delta = 0.0
delta = 1.0
h = 0.0

[bath_L]
beta = 1.0
gamma = 1.0

[bath_R]
beta = 1.0
h = 0.5
gamma = 1.0

[sweep]
parameter = "h_L"
from = -3.0
to = 3.0
points = 61

[inversion]
kind = "kappa_swap"
kappa_L = 2.0
kappa_R = 0.5
"#;

const ISING_BOSON_N2: &str = r#"
[model]
kind = "ising"
n_sites = 2
h = 0.0

[bath_L]
kind = "bosonic"
beta = 2.0
omega = 1.0
g = 0.5

[bath_R]
kind = "bosonic"
beta = 3.0
omega = 1.5
g = 0.3

[sweep]
parameter = "Delta"
from = 0.0
to = 2.0
points = 21

[ri]
taus = [1e-2, 5e-3, 2.5e-3]
"#;

const ISING_BOSON_N3: &str = r#"
[model]
kind = "ising"
n_sites = 3
h = 0.0
delta_13 = 0.5

[bath_L]
kind = "bosonic"
beta = 2.0
omega = 1.0
g = 0.5

[bath_R]
kind = "bosonic"
beta = 3.0
omega = 1.5
g = 0.3

[sweep]
parameter = "Delta"
from = 0.0
to = 2.0
points = 21
"#;

const ISING_SPIN_N2: &str = r#"
[model]
kind = "ising"
n_sites = 2
h = 0.0

[bath_L]
beta = 1.0
h = 1.0
gamma = 1.0

[bath_R]
beta = 2.0
h = -0.5
gamma = 0.5

[sweep]
parameter = "Delta"
from = 0.0
to = 2.0
points = 21
"#;

const ISING_SPIN_N3: &str = r#"
[model]
kind = "ising"
n_sites = 3
h = 0.0
delta_13 = 0.5

[bath_L]
beta = 1.0
h = 1.0
gamma = 1.0

[bath_R]
beta = 2.0
h = -0.5
gamma = 0.5

[sweep]
parameter = "Delta"
from = 0.0
to = 2.0
points = 21
"#;

const BETA_L: &[(&str, &str)] = &[("bath_L", "beta")];

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1",
        summary: "XXZ N=3 currents vs Delta; alpha=1, gamma=delta=1, h_L=1, h_R=-0.5, beta_R=2; flip_f inversion",
        user_supplied: BETA_L,
        toml: FIG1,
    },
    Preset {
        name: "fig2",
        summary: "XXZ N=3 currents vs Delta; alpha=2, gamma=delta=h_L=1, h_R=-0.5, beta_R=10; remap to fig3",
        user_supplied: BETA_L,
        toml: FIG2,
    },
    Preset {
        name: "fig3",
        summary: "fig2 with inverted baths; h_L=-1, h_R=0.05, beta_R=100",
        user_supplied: BETA_L,
        toml: FIG3,
    },
    Preset {
        name: "fig4",
        summary: "regimes vs h_L without external field; beta_L=2, beta_R=9, h_R=0.2, Delta=h=0",
        user_supplied: &[],
        toml: FIG4,
    },
    Preset {
        name: "fig5",
        summary: "regimes vs h_L with uniform field h=1 and Delta=1; beta_L=2, beta_R=9, h_R=0.2",
        user_supplied: &[],
        toml: FIG5,
    },
    Preset {
        name: "eq16",
        summary: "field-free XXZ N=3 with alpha=delta=gamma=1, comparable to the closed-form energy current",
        user_supplied: &[],
        toml: EQ16,
    },
    Preset {
        name: "ising_boson_n2",
        summary: "Ising N=2 with single-mode bosonic baths",
        user_supplied: &[],
        toml: ISING_BOSON_N2,
    },
    Preset {
        name: "ising_boson_n3",
        summary: "Ising N=3 with next-nearest coupling and bosonic baths (degenerate kernel)",
        user_supplied: &[],
        toml: ISING_BOSON_N3,
    },
    Preset {
        name: "ising_spin_n2",
        summary: "Ising N=2 with spin baths",
        user_supplied: &[],
        toml: ISING_SPIN_N2,
    },
    Preset {
        name: "ising_spin_n3",
        summary: "Ising N=3 with next-nearest coupling and spin baths",
        user_supplied: &[],
        toml: ISING_SPIN_N3,
    },
];

pub fn find(name: &str) -> CliResult<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
        CliError::Config(format!(
            "unknown preset '{name}'; available: {}",
            names.join(", ")
        ))
    })
}

impl Preset {
    pub fn config(&self) -> Config {
        let mut cfg = Config::parse(self.toml).expect("preset TOML is valid");
        cfg.preset = Some(self.name.to_string());
        cfg
    }
}

/// Layers `user` over the named preset and checks that the parameters the
/// preset leaves open have been supplied.
pub fn resolve(name: &str, user: Option<&Config>) -> CliResult<Config> {
    let preset = find(name)?;
    let cfg = match user {
        Some(u) => preset.config().overlay(u),
        None => preset.config(),
    };
    for &(section, key) in preset.user_supplied {
        let set = match (section, key) {
            ("bath_L", "beta") => cfg.bath_l.beta.is_some(),
            ("bath_R", "beta") => cfg.bath_r.beta.is_some(),
            _ => true,
        };
        if !set {
            return Err(CliError::Config(format!(
                "preset {name} does not fix {key} in [{section}]; supply it in a --config file, e.g.\n\n[{section}]\n{key} = 1.0\n"
            )));
        }
    }
    Ok(cfg)
}

/// Config from a `--preset` name and/or a `--config` file. A file may also
/// name its base preset with a top-level `preset = "..."` key.
pub fn load(preset: Option<&str>, file: Option<&Config>) -> CliResult<Config> {
    match (preset, file) {
        (Some(p), f) => resolve(p, f),
        (None, Some(f)) => match &f.preset {
            Some(p) => resolve(p, Some(f)),
            None => Ok(f.clone()),
        },
        (None, None) => Err(CliError::Config(
            "give --preset <name> and/or --config <path>".into(),
        )),
    }
}
