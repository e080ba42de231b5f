use super::{NumericsError, Vector};
use crate::Scalar;

/// States whose infinity norm exceeds this are treated as a diverged run.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// One classical fourth-order Runge-Kutta step of `ẋ = f(t, x)`.
pub fn rk4_step<T, F>(mut f: F, t: T, x: &Vector<T>, dt: T) -> Result<Vector<T>, NumericsError>
where
    T: Scalar,
    F: FnMut(T, &Vector<T>) -> Vector<T>,
{
    if !(dt > T::zero()) {
        return Err(NumericsError::InvalidArgument(format!(
            "step size must be positive, got {dt}"
        )));
    }
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let sixth = T::one() / T::lit(6.0);
    let non_finite = || NumericsError::NonFiniteState { t: t.as_f64() };

    let k1 = f(t, x);
    k1.check_dim("rk4_step", x.dim())?;
    if !k1.is_finite() {
        return Err(non_finite());
    }
    let k2 = f(t + half * dt, &x.axpy(half * dt, &k1));
    if !k2.is_finite() {
        return Err(non_finite());
    }
    let k3 = f(t + half * dt, &x.axpy(half * dt, &k2));
    if !k3.is_finite() {
        return Err(non_finite());
    }
    let k4 = f(t + dt, &x.axpy(dt, &k3));
    if !k4.is_finite() {
        return Err(non_finite());
    }
    let mut incr = k1;
    for i in 0..incr.dim() {
        incr[i] = (incr[i] + two * k2[i] + two * k3[i] + k4[i]) * sixth;
    }
    let next = x.axpy(dt, &incr);
    if !next.is_finite() {
        return Err(NumericsError::NonFiniteState {
            t: (t + dt).as_f64(),
        });
    }
    Ok(next)
}

/// Sampled solution of an initial value problem.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Vector<T>>,
    /// Time of the first sample whose infinity norm exceeded
    /// [`DIVERGENCE_LIMIT`]; the trajectory stops there.
    pub diverged_at: Option<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> &Vector<T> {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }
}

/// Number of fixed steps covering `[t0, t_end]`, requiring `dt` to divide the
/// interval to within 1e-9 or a few ulps of `T`, whichever is looser.
pub(crate) fn step_count<T: Scalar>(t0: T, t_end: T, dt: T) -> Result<usize, NumericsError> {
    if !(dt > T::zero()) || !(t_end > t0) {
        return Err(NumericsError::InvalidArgument(format!(
            "need t_end > t0 and dt > 0 (t0 = {t0}, t_end = {t_end}, dt = {dt})"
        )));
    }
    let span = (t_end - t0).as_f64();
    let steps = (span / dt.as_f64()).round();
    let tol = 1e-9f64.max(8.0 * T::epsilon().as_f64() * span);
    if (steps * dt.as_f64() - span).abs() > tol {
        return Err(NumericsError::InvalidArgument(format!(
            "dt = {dt} does not divide the interval length {span}"
        )));
    }
    Ok(steps as usize)
}

/// Integrates `ẋ = f(t, x)` from `t0` to `t_end` with fixed RK4 steps.
///
/// `hook` runs once per step after the state update. Sample `k` sits at
/// `t0 + k·dt`, so a full run holds `1 + (t_end − t0)/dt` samples. A state
/// leaving the `DIVERGENCE_LIMIT` ball ends the run early with `diverged_at`
/// set; a NaN/Inf stage is an error carrying the failing time.
pub fn integrate<T, F, H>(
    mut f: F,
    x0: &Vector<T>,
    t0: T,
    t_end: T,
    dt: T,
    mut hook: H,
) -> Result<Trajectory<T>, NumericsError>
where
    T: Scalar,
    F: FnMut(T, &Vector<T>) -> Vector<T>,
    H: FnMut(T, &Vector<T>),
{
    let steps = step_count(t0, t_end, dt)?;
    let limit = T::lit(DIVERGENCE_LIMIT);
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(t0);
    states.push(x0.clone());
    let mut x = x0.clone();
    for k in 0..steps {
        let t = t0 + T::from_usize(k).unwrap() * dt;
        x = rk4_step(&mut f, t, &x, dt)?;
        let t_next = t0 + T::from_usize(k + 1).unwrap() * dt;
        hook(t_next, &x);
        times.push(t_next);
        states.push(x.clone());
        if x.norm_inf() > limit {
            return Ok(Trajectory {
                times,
                states,
                diverged_at: Some(t_next),
            });
        }
    }
    Ok(Trajectory {
        times,
        states,
        diverged_at: None,
    })
}
