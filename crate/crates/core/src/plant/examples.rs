use std::sync::Arc;

use serde::Serialize;

use super::{PlantModel, Reference, Saturation, Scenario};
use crate::numerics::{Matrix, Vector};
use crate::Scalar;

/// Bilinear plant `ẋ = −4x + x·u + d`, `y = x`, tracking `y_d = 20` under
/// `d = 3` from `x0 = −1`.
pub fn build_example1<T: Scalar>() -> (PlantModel<T>, Scenario<T>) {
    let four = T::lit(4.0);
    let plant = PlantModel::new(
        "example1",
        (1, 1, 1),
        Arc::new(move |_t, x: &Vector<T>, u: &Vector<T>, d: &Vector<T>| {
            Vector::scalar(-four * x[0] + x[0] * u[0] + d[0])
        }),
        Arc::new(|x: &Vector<T>| x.clone()),
    )
    .with_jacobian(Matrix::from_f64(&[[-4.0]]), Matrix::from_f64(&[[0.0]]));
    let scenario = Scenario::new("example1", Vector::from_f64(&[-1.0]), T::lit(10.0))
        .with_disturbance(Vector::from_f64(&[3.0]))
        .with_reference(Reference::Constant(Vector::from_f64(&[20.0])));
    (plant, scenario)
}

/// `(A, b, c)` of the saturated non-minimum-phase plant.
pub fn example2_matrices<T: Scalar>() -> (Matrix<T>, Matrix<T>, Matrix<T>) {
    (
        Matrix::from_f64(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-4.0, -6.0, -4.0]]),
        Matrix::from_f64(&[[0.0], [0.0], [1.0]]),
        Matrix::from_f64(&[[-1.0, 0.0, 1.0]]),
    )
}

/// `ẋ = Ax + b·sat(u)`, `y = cᵀx`, `|u| ≤ 2`, tracking one period of
/// `sin(0.25t)` and then zero, from rest over 25 s.
pub fn build_example2<T: Scalar>() -> (PlantModel<T>, Scenario<T>) {
    let (a, b, c) = example2_matrices::<T>();
    let (fa, fb) = (a.clone(), b.clone());
    let plant = PlantModel::new(
        "example2",
        (3, 1, 1),
        Arc::new(move |_t, x: &Vector<T>, u: &Vector<T>, d: &Vector<T>| {
            let mut dx = &fa * x;
            dx += &(&fb * u);
            dx += d;
            dx
        }),
        Arc::new(move |x: &Vector<T>| &c * x),
    )
    .with_jacobian(a, b)
    .with_saturation(Saturation::new(T::lit(-2.0), T::lit(2.0)));
    let scenario = Scenario::new("example2", Vector::zeros(3), T::lit(25.0)).with_reference(
        Reference::SineWindow {
            amplitude: T::one(),
            omega: T::lit(0.25),
            until: T::lit(4.0) * T::PI(),
        },
    );
    (plant, scenario)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Example3Scenario {
    /// Nominal, `x0 = [2, 2]`.
    I,
    /// Large initial state, `x0 = [5, 5]`.
    II,
    /// Constant disturbance `d = [1, 1]`.
    III,
    /// 0.2 s input delay.
    IV,
}

impl Example3Scenario {
    pub const ALL: [Example3Scenario; 4] = [Self::I, Self::II, Self::III, Self::IV];

    pub fn label(self) -> &'static str {
        match self {
            Self::I => "i",
            Self::II => "ii",
            Self::III => "iii",
            Self::IV => "iv",
        }
    }

    pub fn scenario<T: Scalar>(self) -> Scenario<T> {
        let ten = T::lit(10.0);
        let nominal = Vector::from_f64(&[2.0, 2.0]);
        let name = format!("example3-{}", self.label());
        match self {
            Self::I => Scenario::new(name, nominal, ten),
            Self::II => Scenario::new(name, Vector::from_f64(&[5.0, 5.0]), ten),
            Self::III => Scenario::new(name, nominal, ten).with_disturbance(Vector::from_f64(&[1.0, 1.0])),
            Self::IV => Scenario::new(name, nominal, ten).with_delay(T::lit(0.2)),
        }
    }
}

/// Mismatched plant `ẋ1 = x2 + sin x2 + d1`, `ẋ2 = −2x1 − 3x2 + 2x2² + u + d2`,
/// `y = x1`, with its four scenarios in order (i)-(iv).
pub fn build_example3<T: Scalar>() -> (PlantModel<T>, Vec<Scenario<T>>) {
    let (two, three) = (T::lit(2.0), T::lit(3.0));
    let plant = PlantModel::new(
        "example3",
        (2, 1, 1),
        Arc::new(move |_t, x: &Vector<T>, u: &Vector<T>, d: &Vector<T>| {
            Vector::new(vec![
                x[1] + x[1].sin() + d[0],
                -two * x[0] - three * x[1] + two * x[1] * x[1] + u[0] + d[1],
            ])
        }),
        Arc::new(|x: &Vector<T>| Vector::scalar(x[0])),
    )
    .with_jacobian(
        Matrix::from_f64(&[[0.0, 2.0], [-2.0, -3.0]]),
        Matrix::from_f64(&[[0.0], [1.0]]),
    );
    let scenarios = Example3Scenario::ALL.iter().map(|s| s.scenario()).collect();
    (plant, scenarios)
}
