//! Sampling-based construction of fully connected networks.
//!
//! Hidden layers are built directly from pairs of training points with
//! layer-wise scale schedules; only the output layer is solved for, by least
//! squares. A small Adam trainer and a DFT probe analysis sit alongside for
//! comparing how layers distribute frequency content.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for callers that do not care.

pub mod dataset;
pub mod error;
pub mod linalg;
pub mod network;
pub mod scalar;
pub mod spectral;
pub mod swim;
pub mod trainer;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix64 = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type Network = network::Mlp<f64>;
pub type Network32 = network::Mlp<f32>;
pub type Dataset64 = dataset::Dataset<f64>;
pub type Dataset32 = dataset::Dataset<f32>;
pub type Schedule = swim::ScaleSchedule<f64>;
pub type SwimConfig64 = swim::SwimConfig<f64>;
pub type SwimConfig32 = swim::SwimConfig<f32>;
