//! Additive state decomposition, the open-loop observer of the secondary
//! state and the composite controller `u = u_p + u_s`.
//!
//! For a plant `ẋ = f(x, u) + d` with origin Jacobians `(A1, B1)`:
//!
//! * primary system `ẋ_p = A1 x_p + B1 u_p + d`, `x_p(0) = x(0)`;
//! * secondary system `ẋ_s = f(x, u) − A1 x_p − B1 u_p`, `x_s(0) = 0`;
//!
//! so that `x = x_p + x_s` for any split of `u`. The secondary state is
//! computable from measurements alone, which is what the observer does.

mod composite;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::controllers::ControlError;
use crate::numerics::{eigenvalues, integrate, jacobian_fd, rk4_step, Matrix, NumericsError, Vector, DEFAULT_FD_STEP};
use crate::plant::PlantModel;
use crate::Scalar;

pub use composite::{CompositeLaw, ObserverMode};

/// `(x, u) ↦ f(x, u)`.
pub type NominalFn<T> = Arc<dyn Fn(&Vector<T>, &Vector<T>) -> Vector<T> + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SclError {
    #[error("A1 is not Hurwitz (eigenvalues {spectrum}); the open-loop observer would diverge")]
    UnstableA1 { spectrum: String },
    #[error("plant is not differentiable at the origin: {0}")]
    NonDifferentiable(String),
    #[error("reference gain y_d = 0 leaves the primary system uncontrollable")]
    ZeroReferenceGain,
    #[error("simulation diverged at t = {t}")]
    Diverged { t: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Control(#[from] ControlError),
}

/// Primary model `(A1, B1)` and nominal field `f`, plus the observer state.
#[derive(Clone)]
pub struct Decomposition<T> {
    a1: Matrix<T>,
    b1: Matrix<T>,
    field: NominalFn<T>,
    x_hat_s: Vector<T>,
    u_last: Vector<T>,
    u_s_last: Vector<T>,
}

impl<T: Scalar> Decomposition<T> {
    /// Fails with `UnstableA1` unless `A1` is Hurwitz.
    pub fn new(a1: Matrix<T>, b1: Matrix<T>, field: NominalFn<T>) -> Result<Self, SclError> {
        let n = a1.rows();
        if !a1.is_square() || b1.rows() != n {
            return Err(NumericsError::dims(
                "decomposition",
                "A1 (n x n) and B1 (n x m)",
                format!("{:?}, {:?}", a1.shape(), b1.shape()),
            )
            .into());
        }
        let spectrum = eigenvalues(&a1)?;
        if spectrum.iter().any(|l| !(l.re < T::lit(-1e-9))) {
            let listed: Vec<String> = spectrum.iter().map(|l| format!("{}{:+}i", l.re, l.im)).collect();
            return Err(SclError::UnstableA1 { spectrum: listed.join(", ") });
        }
        let m = b1.cols();
        Ok(Self {
            a1,
            b1,
            field,
            x_hat_s: Vector::zeros(n),
            u_last: Vector::zeros(m),
            u_s_last: Vector::zeros(m),
        })
    }

    pub fn a1(&self) -> &Matrix<T> {
        &self.a1
    }

    pub fn b1(&self) -> &Matrix<T> {
        &self.b1
    }

    pub fn n(&self) -> usize {
        self.a1.rows()
    }

    pub fn m(&self) -> usize {
        self.b1.cols()
    }

    pub fn nominal(&self, x: &Vector<T>, u: &Vector<T>) -> Vector<T> {
        (self.field)(x, u)
    }

    pub fn nominal_fn(&self) -> NominalFn<T> {
        Arc::clone(&self.field)
    }

    pub fn x_hat_s(&self) -> &Vector<T> {
        &self.x_hat_s
    }

    pub fn set_x_hat_s(&mut self, x_hat_s: Vector<T>) {
        self.x_hat_s = x_hat_s;
    }

    pub fn x_hat_p(&self, x: &Vector<T>) -> Vector<T> {
        x - &self.x_hat_s
    }

    pub fn u_last(&self) -> &Vector<T> {
        &self.u_last
    }

    pub fn u_s_last(&self) -> &Vector<T> {
        &self.u_s_last
    }

    pub fn record_inputs(&mut self, u: Vector<T>, u_s: Vector<T>) {
        self.u_last = u;
        self.u_s_last = u_s;
    }

    /// `ẋ_p = A1 x_p + B1 u_p + d`.
    pub fn primary_rate(&self, x_p: &Vector<T>, u_p: &Vector<T>, d: &Vector<T>) -> Vector<T> {
        let mut r = &self.a1 * x_p;
        r += &(&self.b1 * u_p);
        r += d;
        r
    }

    /// Observer field `f(x, u) + A1(x̂_s − x) + B1(u_s − u)`.
    pub fn secondary_rate(&self, x: &Vector<T>, x_hat_s: &Vector<T>, u: &Vector<T>, u_s: &Vector<T>) -> Vector<T> {
        let mut r = self.nominal(x, u);
        r += &(&self.a1 * &(x_hat_s - x));
        r += &(&self.b1 * &(u_s - u));
        r
    }

    /// One RK4 step of the observer with `x`, `u`, `u_s` held over the step;
    /// returns `(x̂_p, x̂_s)` with `x̂_p = x − x̂_s`.
    ///
    /// Holding `x` makes the estimate lag the true secondary state by O(dt);
    /// [`CompositeLaw`] in its default mode integrates the observer alongside
    /// the plant instead.
    pub fn observer_step(
        &mut self,
        x: &Vector<T>,
        u: &Vector<T>,
        u_s: &Vector<T>,
        dt: T,
    ) -> Result<(Vector<T>, Vector<T>), SclError> {
        x.check_dim("observer_step", self.n())?;
        u.check_dim("observer_step", self.m())?;
        u_s.check_dim("observer_step", self.m())?;
        let next = rk4_step(|_, z| self.secondary_rate(x, z, u, u_s), T::zero(), &self.x_hat_s, dt)?;
        self.x_hat_s = next;
        Ok((self.x_hat_p(x), self.x_hat_s.clone()))
    }

    /// Back to `x̂_s = 0` and zero held inputs.
    pub fn reset(&mut self) {
        self.x_hat_s = Vector::zeros(self.n());
        self.u_last = Vector::zeros(self.m());
        self.u_s_last = Vector::zeros(self.m());
    }
}

impl<T: Scalar> fmt::Debug for Decomposition<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Decomposition")
            .field("a1", &self.a1)
            .field("b1", &self.b1)
            .field("x_hat_s", &self.x_hat_s)
            .finish()
    }
}

/// Origin Jacobians of the nominal field: analytic when the plant provides
/// them, central differences otherwise. Both the decomposition and the
/// Jacobian-linearization pipeline go through here.
pub fn linearize<T: Scalar>(plant: &PlantModel<T>) -> Result<(Matrix<T>, Matrix<T>), SclError> {
    if let Some((a, b)) = plant.analytic_jacobian() {
        return Ok((a.clone(), b.clone()));
    }
    let (a, b) = jacobian_fd(
        |x, u| plant.nominal_field(x, u),
        &Vector::zeros(plant.n()),
        &Vector::zeros(plant.m()),
        T::lit(DEFAULT_FD_STEP),
    )
    .map_err(|e| SclError::NonDifferentiable(e.to_string()))?;
    if !a.is_finite() || !b.is_finite() {
        return Err(SclError::NonDifferentiable("non-finite difference quotient".into()));
    }
    Ok((a, b))
}

/// Decomposition with the primary system at the origin Jacobians.
pub fn make_decomposition<T: Scalar>(plant: &PlantModel<T>) -> Result<Decomposition<T>, SclError> {
    let (a1, b1) = linearize(plant)?;
    Decomposition::new(a1, b1, plant.nominal_fn())
}

/// Decomposition of the bilinear plant `ẋ = −4x + xu` whose origin Jacobian
/// has `B = 0`: the primary input matrix is the reference `y_d` instead, i.e.
/// the bilinear term is linearized around `x = y_d`.
pub fn make_decomposition_ex1<T: Scalar>(y_d: T) -> Result<Decomposition<T>, SclError> {
    if y_d == T::zero() {
        return Err(SclError::ZeroReferenceGain);
    }
    let four = T::lit(4.0);
    Decomposition::new(
        Matrix::from_rows(&[[-four]]),
        Matrix::from_rows(&[[y_d]]),
        Arc::new(move |x: &Vector<T>, u: &Vector<T>| Vector::scalar(-four * x[0] + x[0] * u[0])),
    )
}

/// `(u_p(t), u_s(t))`.
pub type InputSplit<'a, T> = &'a (dyn Fn(T) -> (Vector<T>, Vector<T>) + Sync);

/// Simulates the plant, the primary system and the secondary system side by
/// side under the same input split and returns `max_t ‖x − (x_p + x_s)‖∞`.
///
/// The secondary system is integrated in its self-contained form
/// `ẋ_s = f(x_p + x_s, u) − A1 x_p − B1 u_p`.
pub fn verify_decomposition<T: Scalar>(
    plant: &PlantModel<T>,
    dec: &Decomposition<T>,
    input: InputSplit<'_, T>,
    d: &Vector<T>,
    x0: &Vector<T>,
    t_end: T,
    dt: T,
) -> Result<T, SclError> {
    verify_decomposition_with_primary(plant, dec, dec.a1(), input, d, x0, t_end, dt)
}

/// As [`verify_decomposition`], but the primary system uses `primary_a1` instead of
/// the decomposition's `A1`. A mismatched matrix breaks the identity, which
/// makes this the fault-injection hook for the check itself.
#[allow(clippy::too_many_arguments)]
pub fn verify_decomposition_with_primary<T: Scalar>(
    plant: &PlantModel<T>,
    dec: &Decomposition<T>,
    primary_a1: &Matrix<T>,
    input: InputSplit<'_, T>,
    d: &Vector<T>,
    x0: &Vector<T>,
    t_end: T,
    dt: T,
) -> Result<T, SclError> {
    let n = plant.n();
    x0.check_dim("verify_decomposition", n)?;
    d.check_dim("verify_decomposition", n)?;
    if dec.n() != n || dec.m() != plant.m() || primary_a1.shape() != (n, n) {
        return Err(NumericsError::dims("verify_decomposition", "decomposition matching the plant", "mismatch").into());
    }
    let sat = plant.saturation().copied();
    let rate = |t: T, s: &Vector<T>| {
        let x = s.segment(0, n);
        let xp = s.segment(n, n);
        let xs = s.segment(2 * n, n);
        let (up, us) = input(t);
        let u = &up + &us;
        let applied = match &sat {
            Some(s) => s.apply_vec(&u),
            None => u.clone(),
        };
        let dx = plant.field(t, &x, &applied, d);
        let mut dxp = primary_a1 * &xp;
        dxp += &(dec.b1() * &up);
        dxp += d;
        let mut dxs = dec.nominal(&(&xp + &xs), &u);
        dxs -= &(dec.a1() * &xp);
        dxs -= &(dec.b1() * &up);
        Vector::concat(&[&dx, &dxp, &dxs])
    };
    let s0 = Vector::concat(&[x0, x0, &Vector::zeros(n)]);
    let mut worst = T::zero();
    let gap = |s: &Vector<T>| {
        let mut g = T::zero();
        for i in 0..n {
            g = g.max((s[i] - s[n + i] - s[2 * n + i]).abs());
        }
        g
    };
    let traj = integrate(rate, &s0, T::zero(), t_end, dt, |_, s| worst = worst.max(gap(s)))?;
    if let Some(t) = traj.diverged_at {
        return Err(SclError::Diverged { t: t.as_f64() });
    }
    Ok(worst)
}
