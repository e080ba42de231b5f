use super::{ControlError, ControlLaw, ControlOutput};
use crate::numerics::{Matrix, Vector};
use crate::Scalar;

/// Linear extended state observer for `ÿ = f + b·u` with bandwidth `ω0`;
/// `x̂3` estimates the lumped disturbance `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leso<T> {
    pub omega0: T,
    pub b: T,
}

impl<T: Scalar> Leso<T> {
    pub fn new(omega0: T, b: T) -> Self {
        assert!(b != T::zero(), "input gain estimate must be nonzero");
        assert!(omega0 > T::zero(), "observer bandwidth must be positive");
        Self { omega0, b }
    }

    /// Observer gains `(3ω0, 3ω0², ω0³)`.
    pub fn gains(&self) -> [T; 3] {
        let w = self.omega0;
        let three = T::lit(3.0);
        [three * w, three * w * w, w * w * w]
    }

    pub fn rate(&self, z: &Vector<T>, y: T, u: T) -> Vector<T> {
        let [l1, l2, l3] = self.gains();
        let e = z[0] - y;
        Vector::new(vec![z[1] - l1 * e, z[2] - l2 * e + self.b * u, -l3 * e])
    }

    /// Estimation error matrix; its spectrum is `{−ω0}` with multiplicity 3.
    pub fn error_matrix(&self) -> Matrix<T> {
        let [l1, l2, l3] = self.gains();
        let (o, z) = (T::one(), T::zero());
        Matrix::from_rows(&[[-l1, o, z], [-l2, z, o], [-l3, z, z]])
    }
}

/// Active disturbance rejection control of the mismatched plant with output
/// `y = x1`: `u = −x̂3/b − K·[x̂1 − y_d, x̂2]`.
///
/// The observer starts at `(y(0), 0, 0)`.
#[derive(Debug, Clone)]
pub struct Adrc<T> {
    leso: Leso<T>,
    k: Matrix<T>,
    z: Vector<T>,
    u_last: T,
    started: bool,
}

impl<T: Scalar> Adrc<T> {
    pub fn new(b: T, omega0: T, k: Matrix<T>) -> Self {
        assert_eq!(k.shape(), (1, 2), "gain must be 1x2");
        Self { leso: Leso::new(omega0, b), k, z: Vector::zeros(3), u_last: T::zero(), started: false }
    }

    pub fn leso(&self) -> &Leso<T> {
        &self.leso
    }

    /// Control from the current estimates.
    pub fn eval(&self, z: &Vector<T>, y_d: T) -> T {
        let u0 = -(self.k[(0, 0)] * (z[0] - y_d) + self.k[(0, 1)] * z[1]);
        -z[2] / self.leso.b + u0
    }
}

impl<T: Scalar> ControlLaw<T> for Adrc<T> {
    fn input_dim(&self) -> usize {
        1
    }

    fn step(&mut self, x: &Vector<T>, r: &Vector<T>, _t: T, _dt: T) -> Result<ControlOutput<T>, ControlError> {
        if !self.started {
            self.z = Vector::new(vec![x[0], T::zero(), T::zero()]);
            self.started = true;
        }
        let u = self.eval(&self.z, r[0]);
        self.u_last = u;
        Ok(ControlOutput::plain(Vector::scalar(u)))
    }

    fn reset(&mut self) {
        self.z = Vector::zeros(3);
        self.u_last = T::zero();
        self.started = false;
    }

    fn internal_dim(&self) -> usize {
        3
    }

    fn internal_state(&self) -> Vector<T> {
        self.z.clone()
    }

    fn set_internal_state(&mut self, z: &Vector<T>) {
        self.z = z.clone();
    }

    fn internal_rate(&self, _t: T, x: &Vector<T>, z: &Vector<T>) -> Vector<T> {
        self.leso.rate(z, x[0], self.u_last)
    }
}
