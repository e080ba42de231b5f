//! Feedback linearization of the mismatched plant, exact and robust.
//!
//! Both transformations divide by `1 + cos x2`, which vanishes on
//! `x2 = π + 2kπ`.

use super::{ControlError, ControlLaw, ControlOutput};
use crate::numerics::{Matrix, Vector};
use crate::Scalar;

/// `|1 + cos x2|` below this aborts with [`ControlError::SingularInput`].
pub const SINGULARITY_THRESHOLD: f64 = 1e-6;

/// Index of the band `[π + 2kπ, π + 2(k+1)π)` holding `x2`.
fn branch<T: Scalar>(x2: T) -> i64 {
    ((x2 - T::PI()) / (T::lit(2.0) * T::PI())).floor().to_i64().unwrap_or(i64::MAX)
}

fn denominator<T: Scalar>(x2: T, t: T) -> Result<T, ControlError> {
    let den = T::one() + x2.cos();
    if den.abs() < T::lit(SINGULARITY_THRESHOLD) {
        return Err(ControlError::SingularInput {
            t: t.as_f64(),
            x2: x2.as_f64(),
            denominator: den.abs().as_f64(),
        });
    }
    Ok(den)
}

fn check_gain<T: Scalar>(k: &Matrix<T>) {
    assert_eq!(k.shape(), (1, 2), "gain must be 1x2");
}

/// Exact linearization to the double integrator `ż1 = z2`, `ż2 = v` with
/// `z = (x1, x2 + sin x2)` and `v = −Kz`.
#[derive(Debug, Clone)]
pub struct FlcEx3<T> {
    k: Matrix<T>,
    last_branch: Option<i64>,
}

impl<T: Scalar> FlcEx3<T> {
    pub fn new(k: Matrix<T>) -> Self {
        check_gain(&k);
        Self { k, last_branch: None }
    }

    pub fn coordinates(x: &Vector<T>) -> [T; 2] {
        [x[0], x[1] + x[1].sin()]
    }

    pub fn eval(&self, x: &Vector<T>, t: T) -> Result<T, ControlError> {
        let (two, three) = (T::lit(2.0), T::lit(3.0));
        let den = denominator(x[1], t)?;
        let z = Self::coordinates(x);
        let v = -(self.k[(0, 0)] * z[0] + self.k[(0, 1)] * z[1]);
        Ok(v / den + two * x[0] + three * x[1] - two * x[1] * x[1])
    }
}

impl<T: Scalar> ControlLaw<T> for FlcEx3<T> {
    fn input_dim(&self) -> usize {
        1
    }

    fn step(&mut self, x: &Vector<T>, _r: &Vector<T>, t: T, _dt: T) -> Result<ControlOutput<T>, ControlError> {
        let u = self.eval(x, t)?;
        let b = branch(x[1]);
        let transit = self.last_branch.is_some_and(|prev| prev != b);
        self.last_branch = Some(b);
        Ok(ControlOutput { u: Vector::scalar(u), split: None, singular_transit: transit })
    }

    fn reset(&mut self) {
        self.last_branch = None;
    }
}

/// Robust linearization onto the Jacobian model: `z = (x1, (x2 + sin x2)/2)`
/// obeys `ż1 = 2z2`, `ż2 = −2z1 − 3z2 + v` with `v = −Kz`.
#[derive(Debug, Clone)]
pub struct RflcEx3<T> {
    k: Matrix<T>,
    last_branch: Option<i64>,
}

impl<T: Scalar> RflcEx3<T> {
    pub fn new(k: Matrix<T>) -> Self {
        check_gain(&k);
        Self { k, last_branch: None }
    }

    pub fn coordinates(x: &Vector<T>) -> [T; 2] {
        let half = T::lit(0.5);
        [x[0], half * x[1] + half * x[1].sin()]
    }

    pub fn eval(&self, x: &Vector<T>, t: T) -> Result<T, ControlError> {
        let (two, three, four) = (T::lit(2.0), T::lit(3.0), T::lit(4.0));
        let den = denominator(x[1], t)?;
        let z = Self::coordinates(x);
        let v = -(self.k[(0, 0)] * z[0] + self.k[(0, 1)] * z[1]);
        Ok(two * v / den + two * x[0] + three * x[1] - two * x[1] * x[1]
            - (four * x[0] + three * x[1] + three * x[1].sin()) / den)
    }
}

impl<T: Scalar> ControlLaw<T> for RflcEx3<T> {
    fn input_dim(&self) -> usize {
        1
    }

    fn step(&mut self, x: &Vector<T>, _r: &Vector<T>, t: T, _dt: T) -> Result<ControlOutput<T>, ControlError> {
        let u = self.eval(x, t)?;
        let b = branch(x[1]);
        let transit = self.last_branch.is_some_and(|prev| prev != b);
        self.last_branch = Some(b);
        Ok(ControlOutput { u: Vector::scalar(u), split: None, singular_transit: transit })
    }

    fn reset(&mut self) {
        self.last_branch = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn k() -> Matrix<f64> {
        Matrix::from_f64(&[[3.0, 4.5]])
    }

    fn x(a: f64, b: f64) -> Vector<f64> {
        Vector::from_f64(&[a, b])
    }

    /// ẋ of the nominal plant.
    fn plant(x: &Vector<f64>, u: f64) -> [f64; 2] {
        [x[1] + x[1].sin(), -2.0 * x[0] - 3.0 * x[1] + 2.0 * x[1] * x[1] + u]
    }

    #[test]
    fn zero_at_origin() {
        assert_eq!(FlcEx3::new(k()).eval(&x(0.0, 0.0), 0.0).unwrap(), 0.0);
        assert_eq!(RflcEx3::new(k()).eval(&x(0.0, 0.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn unit_first_state() {
        assert!((FlcEx3::new(k()).eval(&x(1.0, 0.0), 0.0).unwrap() - (-1.5 + 2.0)).abs() < 1e-12);
        assert!((RflcEx3::new(k()).eval(&x(1.0, 0.0), 0.0).unwrap() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn guard_near_singular_manifold() {
        for x2 in [-PI, PI, -PI + 5e-8, 3.0 * PI] {
            let mut flc = FlcEx3::new(k());
            let mut rflc = RflcEx3::new(k());
            let r = Vector::zeros(1);
            assert!(matches!(flc.step(&x(0.3, x2), &r, 0.0, 1e-3), Err(ControlError::SingularInput { .. })));
            assert!(matches!(rflc.step(&x(0.3, x2), &r, 0.0, 1e-3), Err(ControlError::SingularInput { .. })));
        }
    }

    #[test]
    fn transit_is_reported_once() {
        let mut flc = FlcEx3::new(k());
        let r = Vector::zeros(1);
        let a = flc.step(&x(0.0, PI - 0.01), &r, 0.0, 1e-3).unwrap();
        let b = flc.step(&x(0.0, PI + 0.01), &r, 0.001, 1e-3).unwrap();
        let c = flc.step(&x(0.0, PI + 0.02), &r, 0.002, 1e-3).unwrap();
        assert!(!a.singular_transit && b.singular_transit && !c.singular_transit);
        flc.reset();
        assert!(!flc.step(&x(0.0, PI + 0.02), &r, 0.0, 1e-3).unwrap().singular_transit);
    }

    #[test]
    fn inverse_consistency_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (flc, rflc) = (FlcEx3::new(k()), RflcEx3::new(k()));
        let mut checked = 0;
        while checked < 500 {
            let s = x(rng.gen_range(-5.0..5.0), rng.gen_range(-6.0..6.0));
            if (1.0 + s[1].cos()).abs() <= 0.1 {
                continue;
            }
            let scale = 1.0 + s[0].abs() + s[1] * s[1];
            // FLC: ż2 = (1 + cos x2) ẋ2 = v
            let dx = plant(&s, flc.eval(&s, 0.0).unwrap());
            let z = FlcEx3::coordinates(&s);
            let v = -(3.0 * z[0] + 4.5 * z[1]);
            assert!(((1.0 + s[1].cos()) * dx[1] - v).abs() < 1e-9 * scale);
            // RFLC: ż2 = −2 z1 − 3 z2 + v
            let dx = plant(&s, rflc.eval(&s, 0.0).unwrap());
            let z = RflcEx3::coordinates(&s);
            let v = -(3.0 * z[0] + 4.5 * z[1]);
            let lhs = 0.5 * (1.0 + s[1].cos()) * dx[1];
            assert!((lhs - (-2.0 * z[0] - 3.0 * z[1] + v)).abs() < 1e-9 * scale);
            // first coordinate
            assert!((dx[0] - 2.0 * z[1]).abs() < 1e-12 * scale);
            checked += 1;
        }
    }
}
