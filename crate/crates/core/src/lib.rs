//! Continuous-time claims reserving on run-off triangles split into newly
//! reported claims (N) and development of reported claims (D).
//!
//! The discrete development parameters are mapped to a jump square-root
//! diffusion whose year-to-year transition is simulated exactly, and the
//! predictive reserve distribution is estimated by bootstrap.
//!
//! Everything numeric is generic over [`real::Real`] (`f32`, `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bootstrap;
pub mod calibration;
pub mod error;
pub mod estimators;
pub mod kernel;
pub mod real;
pub mod simulation;
pub mod stats;
pub mod triangle;

pub use error::{Error, Result};
pub use kernel::RngStream;
pub use real::Real;

pub type Triangle = triangle::Triangle<f64>;
pub type ExposureVector = triangle::ExposureVector<f64>;
pub type ClaimsData = triangle::ClaimsData<f64>;
pub type DiscreteParams = estimators::DiscreteParams<f64>;
pub type ReserveEstimate = estimators::ReserveEstimate<f64>;
pub type CtParams = calibration::CtParams<f64>;
pub type JumpLaw = calibration::JumpLaw<f64>;
pub type RegressionReport = calibration::RegressionReport<f64>;
pub type YearTransition = simulation::YearTransition<f64>;
pub type BootstrapConfig = bootstrap::BootstrapConfig<f64>;
pub type ReserveDistribution = bootstrap::ReserveDistribution<f64>;

pub type Triangle32 = triangle::Triangle<f32>;
pub type ClaimsData32 = triangle::ClaimsData<f32>;
pub type CtParams32 = calibration::CtParams<f32>;
