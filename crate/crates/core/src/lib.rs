//! Steady-state thermodynamics of two coupled, damped oscillators with
//! coherent feedback on one of them.
//!
//! [`model`] builds the drift and diffusion matrices and solves for the
//! stationary covariance, [`thermo`] evaluates entropy production, mutual
//! information and negativity on it, [`optomech`] maps a driven
//! optomechanical cavity onto the generic model and [`oracle`] re-derives
//! the steady state by direct time integration.

pub mod cov;
pub mod error;
pub mod linalg;
pub mod model;
pub mod optomech;
pub mod oracle;
pub mod thermo;

pub use cov::CovMatrix;
pub use error::{Error, Result};
pub use linalg::RealMatrix;
pub use model::{steady_state, FeedbackParams, SystemMatrices};
pub use optomech::{Drive, OptoParams, OptoSteadyState};
pub use oracle::{integrate_covariance, OdeConfig};
pub use thermo::{analyze, ThermoReport};
