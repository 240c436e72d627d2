pub mod constants;
pub mod entanglement;
pub mod error;
pub mod exec;
pub mod grid;
pub mod linear_response;
pub mod parametric_ref;
pub mod output;
pub mod params;
pub mod selftest;
pub mod stability;
pub mod synodyne;
pub mod variational_sensor;

pub use error::{Error, Result};
