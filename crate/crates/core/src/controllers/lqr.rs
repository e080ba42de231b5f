use super::{ControlError, ControlLaw, ControlOutput};
use crate::numerics::{solve_care, CareProblem, Matrix, NumericsError, Vector};
use crate::Scalar;

/// LQR gain `K` for `u = −Kx`, so the closed loop is `A − BK`.
pub fn lqr_gain<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    q: &Matrix<T>,
    r: &Matrix<T>,
) -> Result<Matrix<T>, NumericsError> {
    let problem = CareProblem::new(a.clone(), b.clone(), q.clone(), r.clone())?;
    Ok(solve_care(&problem)?.k)
}

/// State feedback `u = −Kx`.
#[derive(Debug, Clone)]
pub struct LqrLaw<T> {
    k: Matrix<T>,
}

impl<T: Scalar> LqrLaw<T> {
    pub fn new(k: Matrix<T>) -> Self {
        Self { k }
    }

    pub fn gain(&self) -> &Matrix<T> {
        &self.k
    }

    pub fn eval(&self, x: &Vector<T>) -> Result<Vector<T>, NumericsError> {
        Ok(-&self.k.try_mul_vec(x)?)
    }
}

impl<T: Scalar> ControlLaw<T> for LqrLaw<T> {
    fn input_dim(&self) -> usize {
        self.k.rows()
    }

    fn step(&mut self, x: &Vector<T>, _r: &Vector<T>, _t: T, _dt: T) -> Result<ControlOutput<T>, ControlError> {
        Ok(ControlOutput::plain(self.eval(x)?))
    }

    fn reset(&mut self) {}
}
