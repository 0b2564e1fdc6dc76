//! Configuration, presets, sweeps, invariance checks and RI convergence
//! runs on top of the `ritherm` solver.

pub mod config;
pub mod error;
pub mod one_way;
pub mod output;
pub mod presets;
pub mod ri_converge;
pub mod sweep;

pub use config::{Config, Param, Scenario};
pub use error::{CliError, CliResult};
pub use one_way::{check_one_way, Inversion, OneWayReport};
pub use ri_converge::{run_ri_convergence, RiConvergenceReport};
pub use sweep::{evaluate, run_sweep, EvalOptions, Row, SweepResult};
