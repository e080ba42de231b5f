//! Small dense linear algebra, fixed-step integration, finite-difference
//! Jacobians, eigenvalues, a continuous algebraic Riccati solver and an input
//! delay line.

mod care;
mod delay;
mod eigen;
mod error;
mod jacobian;
mod linalg;
mod ode;

pub use care::{solve_care, solve_lyapunov, CareProblem, CareSolution};
pub use delay::DelayLine;
pub use eigen::{
    characteristic_polynomial, eigenvalues, eigenvalues_with, is_hurwitz, EigenMethod,
    EigenOptions,
};
pub use error::NumericsError;
pub use jacobian::{jacobian_fd, DEFAULT_FD_STEP};
pub use linalg::{Matrix, Vector};
pub use ode::{integrate, rk4_step, Trajectory, DIVERGENCE_LIMIT};
pub(crate) use ode::step_count;
