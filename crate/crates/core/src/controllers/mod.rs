//! Control laws behind a uniform stepping interface.

mod adrc;
mod feedback_lin;
mod jlc;
mod lqr;
mod pid;
mod secondary;

use thiserror::Error;

use crate::numerics::{NumericsError, Vector};
use crate::scl::Decomposition;
use crate::Scalar;

pub use adrc::{Adrc, Leso};
pub use feedback_lin::{FlcEx3, RflcEx3, SINGULARITY_THRESHOLD};
pub use jlc::{JlcFeedback, JlcLaw};
pub use lqr::{lqr_gain, LqrLaw};
pub use pid::{PidGains, PidLaw, PidState};
pub use secondary::{Ex3Backstepping, SecondaryLaw, ZeroSecondary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("singular input transformation at t = {t}: |1 + cos x2| = {denominator:e} (x2 = {x2})")]
    SingularInput { t: f64, x2: f64, denominator: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Primary/secondary split reported by decomposition-based laws.
#[derive(Debug, Clone, PartialEq)]
pub struct Split<T> {
    pub u_p: Vector<T>,
    pub u_s: Vector<T>,
    pub x_hat_p: Vector<T>,
    pub x_hat_s: Vector<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlOutput<T> {
    pub u: Vector<T>,
    pub split: Option<Split<T>>,
    /// The state crossed the manifold where the input transformation is
    /// singular since the previous call, without landing inside the guard band.
    pub singular_transit: bool,
}

impl<T> ControlOutput<T> {
    pub fn plain(u: Vector<T>) -> Self {
        Self { u, split: None, singular_transit: false }
    }
}

/// A controller driven once per sample.
///
/// Laws with continuous-time internal dynamics (observers) expose them through
/// `internal_*`; the simulation harness integrates that state together with
/// the plant so observer and plant see the same RK4 stages. Inputs issued by
/// the last `step` are held over the interval.
pub trait ControlLaw<T: Scalar>: Send {
    fn input_dim(&self) -> usize;

    /// Evaluates the law on the measured state at time `t`.
    fn step(&mut self, x: &Vector<T>, reference: &Vector<T>, t: T, dt: T)
        -> Result<ControlOutput<T>, ControlError>;

    /// Restores the construction-time state.
    fn reset(&mut self);

    fn internal_dim(&self) -> usize {
        0
    }

    fn internal_state(&self) -> Vector<T> {
        Vector::zeros(0)
    }

    fn set_internal_state(&mut self, _z: &Vector<T>) {}

    /// `ż` given a measured (stage) state `x`.
    fn internal_rate(&self, _t: T, _x: &Vector<T>, z: &Vector<T>) -> Vector<T> {
        Vector::zeros(z.dim())
    }

    fn decomposition(&self) -> Option<&Decomposition<T>> {
        None
    }
}

impl<T: Scalar, L: ControlLaw<T> + ?Sized> ControlLaw<T> for Box<L> {
    fn input_dim(&self) -> usize {
        (**self).input_dim()
    }

    fn step(&mut self, x: &Vector<T>, reference: &Vector<T>, t: T, dt: T)
        -> Result<ControlOutput<T>, ControlError> {
        (**self).step(x, reference, t, dt)
    }

    fn reset(&mut self) {
        (**self).reset()
    }

    fn internal_dim(&self) -> usize {
        (**self).internal_dim()
    }

    fn internal_state(&self) -> Vector<T> {
        (**self).internal_state()
    }

    fn set_internal_state(&mut self, z: &Vector<T>) {
        (**self).set_internal_state(z)
    }

    fn internal_rate(&self, t: T, x: &Vector<T>, z: &Vector<T>) -> Vector<T> {
        (**self).internal_rate(t, x, z)
    }

    fn decomposition(&self) -> Option<&Decomposition<T>> {
        (**self).decomposition()
    }
}

/// The law `u ≡ 0`.
#[derive(Debug, Clone)]
pub struct ZeroLaw {
    m: usize,
}

impl ZeroLaw {
    pub fn new(m: usize) -> Self {
        Self { m }
    }
}

impl<T: Scalar> ControlLaw<T> for ZeroLaw {
    fn input_dim(&self) -> usize {
        self.m
    }

    fn step(&mut self, _x: &Vector<T>, _r: &Vector<T>, _t: T, _dt: T) -> Result<ControlOutput<T>, ControlError> {
        Ok(ControlOutput::plain(Vector::zeros(self.m)))
    }

    fn reset(&mut self) {}
}

/// Open-loop input `u(t)`.
pub struct OpenLoop<T> {
    m: usize,
    signal: Box<dyn Fn(T) -> Vector<T> + Send + Sync>,
}

impl<T: Scalar> OpenLoop<T> {
    pub fn new(m: usize, signal: impl Fn(T) -> Vector<T> + Send + Sync + 'static) -> Self {
        Self { m, signal: Box::new(signal) }
    }

    pub fn constant(u: Vector<T>) -> Self {
        Self::new(u.dim(), move |_| u.clone())
    }
}

impl<T: Scalar> ControlLaw<T> for OpenLoop<T> {
    fn input_dim(&self) -> usize {
        self.m
    }

    fn step(&mut self, _x: &Vector<T>, _r: &Vector<T>, t: T, _dt: T) -> Result<ControlOutput<T>, ControlError> {
        Ok(ControlOutput::plain((self.signal)(t)))
    }

    fn reset(&mut self) {}
}
