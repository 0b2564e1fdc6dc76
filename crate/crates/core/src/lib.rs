pub mod currents;
pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod models;
pub mod operators;
pub mod ri_map;
pub mod steady_state;

pub use error::{Error, Result};
