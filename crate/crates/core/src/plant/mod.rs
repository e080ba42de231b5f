//! Plant models, scenarios and the closed-loop simulation harness.

mod examples;
mod sim;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::numerics::{Matrix, Vector};
use crate::Scalar;

pub use examples::{build_example1, build_example2, build_example3, example2_matrices, Example3Scenario};
pub use sim::{simulate, SimError, SimulationTrace, Termination, TraceRow};

/// `(t, x, u, d) ↦ ẋ`.
pub type FieldFn<T> = Arc<dyn Fn(T, &Vector<T>, &Vector<T>, &Vector<T>) -> Vector<T> + Send + Sync>;
/// `x ↦ y`.
pub type OutputFn<T> = Arc<dyn Fn(&Vector<T>) -> Vector<T> + Send + Sync>;

/// Symmetric or asymmetric actuator clamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Saturation<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Saturation<T> {
    pub fn new(lo: T, hi: T) -> Self {
        assert!(lo < hi, "saturation bounds must satisfy lo < hi");
        Self { lo, hi }
    }

    pub fn apply(&self, u: T) -> T {
        u.max(self.lo).min(self.hi)
    }

    pub fn apply_vec(&self, u: &Vector<T>) -> Vector<T> {
        u.map(|v| self.apply(v))
    }

    /// True when `u` lies strictly outside the bounds.
    pub fn is_active(&self, u: T) -> bool {
        u < self.lo || u > self.hi
    }
}

/// Nonlinear plant `ẋ = f(t, x, blocks(u), d)`, `y = h(x)`.
///
/// The input channel optionally saturates; an input delay is a property of the
/// scenario, not the plant.
#[derive(Clone)]
pub struct PlantModel<T> {
    name: String,
    n: usize,
    m: usize,
    p: usize,
    field: FieldFn<T>,
    output: OutputFn<T>,
    jacobian: Option<(Matrix<T>, Matrix<T>)>,
    saturation: Option<Saturation<T>>,
}

impl<T: Scalar> PlantModel<T> {
    pub fn new(
        name: impl Into<String>,
        (n, m, p): (usize, usize, usize),
        field: FieldFn<T>,
        output: OutputFn<T>,
    ) -> Self {
        assert!(n > 0 && m > 0 && p > 0, "plant dimensions must be positive");
        Self {
            name: name.into(),
            n,
            m,
            p,
            field,
            output,
            jacobian: None,
            saturation: None,
        }
    }

    /// Attaches analytic Jacobians `(∂f/∂x, ∂f/∂u)` at the origin.
    pub fn with_jacobian(mut self, a: Matrix<T>, b: Matrix<T>) -> Self {
        assert_eq!(a.shape(), (self.n, self.n));
        assert_eq!(b.shape(), (self.n, self.m));
        self.jacobian = Some((a, b));
        self
    }

    pub fn with_saturation(mut self, sat: Saturation<T>) -> Self {
        self.saturation = Some(sat);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn saturation(&self) -> Option<&Saturation<T>> {
        self.saturation.as_ref()
    }

    pub fn analytic_jacobian(&self) -> Option<&(Matrix<T>, Matrix<T>)> {
        self.jacobian.as_ref()
    }

    /// Raw vector field; `u` is taken as already applied (no input blocks).
    pub fn field(&self, t: T, x: &Vector<T>, u: &Vector<T>, d: &Vector<T>) -> Vector<T> {
        (self.field)(t, x, u, d)
    }

    pub fn field_fn(&self) -> FieldFn<T> {
        Arc::clone(&self.field)
    }

    pub fn output(&self, x: &Vector<T>) -> Vector<T> {
        (self.output)(x)
    }

    pub fn output_fn(&self) -> OutputFn<T> {
        Arc::clone(&self.output)
    }

    /// The designer's model `f(x, u)`: saturation applied, no disturbance.
    pub fn nominal_field(&self, x: &Vector<T>, u: &Vector<T>) -> Vector<T> {
        let u = match &self.saturation {
            Some(s) => s.apply_vec(u),
            None => u.clone(),
        };
        (self.field)(T::zero(), x, &u, &Vector::zeros(self.n))
    }

    /// Shareable form of [`Self::nominal_field`].
    pub fn nominal_fn(&self) -> crate::scl::NominalFn<T> {
        let field = Arc::clone(&self.field);
        let sat = self.saturation;
        let n = self.n;
        Arc::new(move |x, u| {
            let u = match &sat {
                Some(s) => s.apply_vec(u),
                None => u.clone(),
            };
            field(T::zero(), x, &u, &Vector::zeros(n))
        })
    }
}

impl<T: Scalar> fmt::Debug for PlantModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlantModel")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("p", &self.p)
            .field("jacobian", &self.jacobian)
            .field("saturation", &self.saturation)
            .finish()
    }
}

/// Reference output `y_d(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference<T> {
    /// Stabilization: `y_d ≡ 0`.
    Zero,
    Constant(Vector<T>),
    /// `amplitude·sin(omega·t)` for `t ≤ until`, zero afterwards (scalar).
    SineWindow { amplitude: T, omega: T, until: T },
}

impl<T: Scalar> Reference<T> {
    pub fn eval(&self, t: T, p: usize) -> Vector<T> {
        match self {
            Reference::Zero => Vector::zeros(p),
            Reference::Constant(v) => v.clone(),
            Reference::SineWindow { amplitude, omega, until } => {
                let v = if t <= *until { *amplitude * (*omega * t).sin() } else { T::zero() };
                Vector::new(vec![v; p])
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Reference::Zero)
    }
}

/// Initial state, constant disturbance, input delay, horizon and reference.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub name: String,
    pub x0: Vector<T>,
    /// Constant additive disturbance on `ẋ`; never visible to controllers.
    pub d: Vector<T>,
    pub input_delay: T,
    pub t_end: T,
    pub reference: Reference<T>,
}

impl<T: Scalar> Scenario<T> {
    pub fn new(name: impl Into<String>, x0: Vector<T>, t_end: T) -> Self {
        let n = x0.dim();
        Self {
            name: name.into(),
            x0,
            d: Vector::zeros(n),
            input_delay: T::zero(),
            t_end,
            reference: Reference::Zero,
        }
    }

    pub fn with_disturbance(mut self, d: Vector<T>) -> Self {
        self.d = d;
        self
    }

    pub fn with_delay(mut self, delay: T) -> Self {
        self.input_delay = delay;
        self
    }

    pub fn with_reference(mut self, reference: Reference<T>) -> Self {
        self.reference = reference;
        self
    }

    pub fn with_t_end(mut self, t_end: T) -> Self {
        self.t_end = t_end;
        self
    }
}
