use serde::{Deserialize, Serialize};

use super::{ControlError, ControlLaw, ControlOutput};
use crate::numerics::Vector;
use crate::plant::OutputFn;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains<T> {
    pub kp: T,
    pub ki: T,
    pub kd: T,
}

impl<T: Scalar> PidGains<T> {
    pub fn new(kp: T, ki: T, kd: T) -> Self {
        Self { kp, ki, kd }
    }
}

/// Sampled PID: trapezoidal integral, backward-difference derivative, no
/// anti-windup and no derivative filter.
///
/// On the first sample both the integral and the derivative are zero.
#[derive(Debug, Clone)]
pub struct PidState<T> {
    gains: PidGains<T>,
    integral: T,
    e_prev: Option<T>,
}

impl<T: Scalar> PidState<T> {
    pub fn new(gains: PidGains<T>) -> Self {
        Self { gains, integral: T::zero(), e_prev: None }
    }

    pub fn gains(&self) -> PidGains<T> {
        self.gains
    }

    pub fn integral(&self) -> T {
        self.integral
    }

    pub fn step(&mut self, e: T, dt: T) -> T {
        let derivative = match self.e_prev {
            Some(prev) => {
                self.integral += T::lit(0.5) * (e + prev) * dt;
                (e - prev) / dt
            }
            None => T::zero(),
        };
        self.e_prev = Some(e);
        let g = self.gains;
        g.kp * e + g.ki * self.integral + g.kd * derivative
    }

    pub fn reset(&mut self) {
        self.integral = T::zero();
        self.e_prev = None;
    }
}

/// PID on the output error `e = r − h(x)` of a single-input single-output
/// plant.
pub struct PidLaw<T> {
    state: PidState<T>,
    output: OutputFn<T>,
}

impl<T: Scalar> PidLaw<T> {
    pub fn new(gains: PidGains<T>, output: OutputFn<T>) -> Self {
        Self { state: PidState::new(gains), output }
    }

    pub fn gains(&self) -> PidGains<T> {
        self.state.gains()
    }
}

impl<T: Scalar> ControlLaw<T> for PidLaw<T> {
    fn input_dim(&self) -> usize {
        1
    }

    fn step(&mut self, x: &Vector<T>, reference: &Vector<T>, _t: T, dt: T)
        -> Result<ControlOutput<T>, ControlError> {
        let y = (self.output)(x);
        let e = reference[0] - y[0];
        Ok(ControlOutput::plain(Vector::scalar(self.state.step(e, dt))))
    }

    fn reset(&mut self) {
        self.state.reset();
    }
}
