use crate::numerics::Vector;
use crate::Scalar;

/// Law `u_s = L(x, x̂_s)` stabilizing the secondary system.
pub trait SecondaryLaw<T: Scalar>: Send {
    fn input_dim(&self) -> usize;
    fn control(&self, x: &Vector<T>, x_hat_s: &Vector<T>) -> Vector<T>;
}

/// `u_s ≡ 0`, for plants whose secondary system is stable on its own.
#[derive(Debug, Clone, Copy)]
pub struct ZeroSecondary {
    m: usize,
}

impl ZeroSecondary {
    pub fn new(m: usize) -> Self {
        Self { m }
    }
}

impl<T: Scalar> SecondaryLaw<T> for ZeroSecondary {
    fn input_dim(&self) -> usize {
        self.m
    }

    fn control(&self, _x: &Vector<T>, _x_hat_s: &Vector<T>) -> Vector<T> {
        Vector::zeros(self.m)
    }
}

/// Backstepping law for the secondary system of the mismatched plant
///
/// `ẋ_s1 = 2x_s2 + g1`, `ẋ_s2 = −2x_s1 − 3x_s2 + 2x2² + u_s`,
///
/// with virtual control `z = x̂_s2 + a·atan x̂_s1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ex3Backstepping<T> {
    pub a: T,
    pub c: T,
}

impl<T: Scalar> Ex3Backstepping<T> {
    pub fn new(a: T, c: T) -> Self {
        assert!(a > T::zero() && c > T::zero(), "backstepping gains must be positive");
        Self { a, c }
    }

    pub fn eval(&self, x2: T, xs1: T, xs2: T) -> T {
        let (two, three) = (T::lit(2.0), T::lit(3.0));
        let g = x2.sin() - xs2.sin();
        let z = xs2 + self.a * xs1.atan();
        two * xs1 + three * xs2 - two * x2 * x2
            - self.a / (xs1 * xs1 + T::one()) * (xs2.sin() + xs2 + g)
            - self.c * z
    }
}

impl<T: Scalar> Default for Ex3Backstepping<T> {
    fn default() -> Self {
        Self::new(T::lit(10.0), T::lit(10.0))
    }
}

impl<T: Scalar> SecondaryLaw<T> for Ex3Backstepping<T> {
    fn input_dim(&self) -> usize {
        1
    }

    fn control(&self, x: &Vector<T>, x_hat_s: &Vector<T>) -> Vector<T> {
        Vector::scalar(self.eval(x[1], x_hat_s[0], x_hat_s[1]))
    }
}
