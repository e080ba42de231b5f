use std::collections::VecDeque;

use crate::Scalar;

/// Fixed transport delay quantized to the simulation step.
///
/// Holds `round(delay / dt)` samples; until that many have been pushed the
/// output is `fill_value`.
#[derive(Debug, Clone)]
pub struct DelayLine<T> {
    delay: T,
    dt: T,
    fill_value: T,
    buffer: VecDeque<T>,
}

impl<T: Scalar> DelayLine<T> {
    pub fn new(delay: T, dt: T, fill_value: T) -> Self {
        assert!(delay >= T::zero() && dt > T::zero(), "delay >= 0 and dt > 0");
        let len = (delay / dt).round().to_usize().unwrap_or(0);
        Self {
            delay,
            dt,
            fill_value,
            buffer: std::iter::repeat_n(fill_value, len).collect(),
        }
    }

    pub fn delay(&self) -> T {
        self.delay
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Number of samples between input and output.
    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    /// Pushes `sample` and returns the one pushed `len()` calls earlier.
    pub fn push(&mut self, sample: T) -> T {
        if self.buffer.is_empty() {
            return sample;
        }
        self.buffer.push_back(sample);
        self.buffer.pop_front().unwrap_or(self.fill_value)
    }

    pub fn reset(&mut self) {
        let fill = self.fill_value;
        self.buffer.iter_mut().for_each(|s| *s = fill);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_delay_is_identity() {
        let mut d = DelayLine::new(0.0, 1e-3, 0.0);
        assert_eq!(d.push(3.5), 3.5);
        assert_eq!(d.push(-1.0), -1.0);
    }

    #[test]
    fn step_input_appears_after_delay() {
        let mut d = DelayLine::new(0.2, 1e-3, 0.0);
        assert_eq!(d.len(), 200);
        let out: Vec<f64> = (0..400).map(|_| d.push(1.0)).collect();
        assert!(out[..200].iter().all(|&v| v == 0.0));
        assert!(out[200..].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn ramp_is_shifted() {
        let dt = 1e-3;
        let mut d = DelayLine::new(0.2, dt, 0.0);
        for k in 0..1000usize {
            let y = d.push(k as f64 * dt);
            if k >= 200 {
                assert!((y - (k - 200) as f64 * dt).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn delay_is_linear(
            u1 in proptest::collection::vec(-10.0f64..10.0, 50),
            u2 in proptest::collection::vec(-10.0f64..10.0, 50),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
            steps in 0usize..20,
        ) {
            let dt = 0.01;
            let delay = steps as f64 * dt;
            let mut d1 = DelayLine::new(delay, dt, 0.0);
            let mut d2 = DelayLine::new(delay, dt, 0.0);
            let mut d3 = DelayLine::new(delay, dt, 0.0);
            for (x, y) in u1.iter().zip(&u2) {
                let lhs = d3.push(a * x + b * y);
                let rhs = a * d1.push(*x) + b * d2.push(*y);
                prop_assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }
}
