//! State compensation linearization.
//!
//! A nonlinear plant `ẋ = f(x, u) + d` is split additively into a linear
//! primary system `ẋ_p = A1 x_p + B1 u_p + d` (the Jacobian linearization at
//! the origin, carrying the initial state and every disturbance) and an exact
//! nonlinear secondary system with zero initial state. An open-loop observer
//! reconstructs both parts from the measured state, so a linear controller can
//! act on the primary state while a nonlinear law stabilizes the secondary
//! one.
//!
//! The crate also carries the comparison pipelines (Jacobian linearization,
//! feedback linearization, robust feedback linearization and ADRC), three
//! benchmark plants, a closed-loop simulation harness and IAE/ITAE metrics.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below are what the benchmarks and the CLI use.

// index loops mirror the textbook algorithms; `!(a > b)` comparisons are
// deliberate so NaN fails them
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod controllers;
pub mod metrics;
pub mod numerics;
pub mod plant;
pub mod scalar;
pub mod scl;

pub use scalar::Scalar;

pub type Vector64 = numerics::Vector<f64>;
pub type Matrix64 = numerics::Matrix<f64>;
pub type Vector32 = numerics::Vector<f32>;
pub type Matrix32 = numerics::Matrix<f32>;
pub type Plant64 = plant::PlantModel<f64>;
pub type Scenario64 = plant::Scenario<f64>;
pub type Trace64 = plant::SimulationTrace<f64>;
pub type Decomposition64 = scl::Decomposition<f64>;
pub type Report64 = metrics::PerformanceReport<f64>;
