use super::{ControlError, ControlLaw, ControlOutput, LqrLaw, PidLaw};
use crate::numerics::{Matrix, Vector};
use crate::Scalar;

pub enum JlcFeedback<T> {
    /// `u = −Kx` on the measured state.
    State(LqrLaw<T>),
    /// PID on the measured output error.
    Output(PidLaw<T>),
}

/// Jacobian linearization: a linear law designed on `(A1, B1)` applied to the
/// nonlinear plant as is.
pub struct JlcLaw<T> {
    a1: Matrix<T>,
    b1: Matrix<T>,
    feedback: JlcFeedback<T>,
}

impl<T: Scalar> JlcLaw<T> {
    pub fn new(a1: Matrix<T>, b1: Matrix<T>, feedback: JlcFeedback<T>) -> Self {
        Self { a1, b1, feedback }
    }

    pub fn a1(&self) -> &Matrix<T> {
        &self.a1
    }

    pub fn b1(&self) -> &Matrix<T> {
        &self.b1
    }
}

impl<T: Scalar> ControlLaw<T> for JlcLaw<T> {
    fn input_dim(&self) -> usize {
        self.b1.cols()
    }

    fn step(&mut self, x: &Vector<T>, r: &Vector<T>, t: T, dt: T) -> Result<ControlOutput<T>, ControlError> {
        match &mut self.feedback {
            JlcFeedback::State(l) => l.step(x, r, t, dt),
            JlcFeedback::Output(l) => l.step(x, r, t, dt),
        }
    }

    fn reset(&mut self) {
        match &mut self.feedback {
            JlcFeedback::State(l) => ControlLaw::<T>::reset(l),
            JlcFeedback::Output(l) => l.reset(),
        }
    }
}
