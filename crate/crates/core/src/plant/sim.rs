use thiserror::Error;

use super::{PlantModel, Scenario};
use crate::controllers::{ControlError, ControlLaw};
use crate::numerics::{rk4_step, DelayLine, NumericsError, Vector, DIVERGENCE_LIMIT};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// How a simulation ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Completed,
    /// `‖x‖∞` left the divergence ball or a stage went non-finite.
    Diverged { t: f64 },
    /// The control law refused to evaluate on its singular manifold.
    SingularAbort { t: f64 },
    NumericFailure { t: f64, message: String },
}

/// One sample of the closed loop.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow<T> {
    pub t: T,
    pub x: Vector<T>,
    pub u_commanded: Vector<T>,
    pub u_applied: Vector<T>,
    pub u_p: Vector<T>,
    pub u_s: Vector<T>,
    pub x_hat_p: Vector<T>,
    pub x_hat_s: Vector<T>,
    pub y: Vector<T>,
    pub y_d: Vector<T>,
    pub saturated: bool,
}

/// Sampled closed-loop run.
///
/// Laws without a decomposition report `u_p = u`, `u_s = 0`, `x̂_p = x`,
/// `x̂_s = 0`.
#[derive(Debug, Clone)]
pub struct SimulationTrace<T> {
    pub plant: String,
    pub scenario: String,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub dt: T,
    pub t_end: T,
    pub rows: Vec<TraceRow<T>>,
    pub termination: Termination,
    /// Sample times at which the law reported crossing its singular manifold.
    pub singular_transits: Vec<T>,
    /// `max ‖x_s − x̂_s‖∞` against a co-simulated primary system, when the law
    /// carries a decomposition.
    pub observer_gap: Option<T>,
    /// `max ‖x̂_p + x̂_s − x‖∞`, when the law carries a decomposition.
    pub reconstruction_gap: Option<T>,
}

impl<T: Scalar> SimulationTrace<T> {
    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }

    pub fn diverged(&self) -> bool {
        matches!(self.termination, Termination::Diverged { .. })
    }

    pub fn singular_abort(&self) -> bool {
        matches!(self.termination, Termination::SingularAbort { .. })
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        self.rows.iter().map(|r| r.t)
    }

    pub fn last(&self) -> Option<&TraceRow<T>> {
        self.rows.last()
    }

    /// Sample nearest to `t`.
    pub fn at(&self, t: T) -> Option<&TraceRow<T>> {
        let k = (t / self.dt).round().to_usize()?;
        self.rows.get(k)
    }
}

/// Runs `law` in closed loop with `plant` under `scenario`.
///
/// Per sample: evaluate the law on the measured state, pass its command
/// through the input delay and then the saturation, record, and take one RK4
/// step of the plant together with the law's internal state (and, for
/// decomposition laws, a co-simulated primary system driven by the true
/// model mismatch). The law is reset first. Numerical trouble ends the run
/// and is recorded in `termination`; only malformed inputs are errors.
pub fn simulate<T: Scalar>(
    plant: &PlantModel<T>,
    law: &mut dyn ControlLaw<T>,
    scenario: &Scenario<T>,
    dt: T,
) -> Result<SimulationTrace<T>, SimError> {
    let (n, m, p) = (plant.n(), plant.m(), plant.p());
    if law.input_dim() != m {
        return Err(NumericsError::dims("simulate", format!("law with {m} inputs"), law.input_dim()).into());
    }
    scenario.x0.check_dim("simulate", n)?;
    scenario.d.check_dim("simulate", n)?;
    if !(scenario.input_delay >= T::zero()) {
        return Err(NumericsError::InvalidArgument("input delay must be non-negative".into()).into());
    }
    let steps = crate::numerics::step_count(T::zero(), scenario.t_end, dt)?;

    law.reset();
    let mut delays: Vec<DelayLine<T>> =
        (0..m).map(|_| DelayLine::new(scenario.input_delay, dt, T::zero())).collect();
    let cosim = law
        .decomposition()
        .map(|d| (d.a1().clone(), d.b1().clone(), d.nominal_fn()));
    let sat = plant.saturation().copied();
    let limit = T::lit(DIVERGENCE_LIMIT);

    let mut x = scenario.x0.clone();
    let mut x_p_true = scenario.x0.clone();
    let mut rows = Vec::with_capacity(steps + 1);
    let mut transits = Vec::new();
    let mut observer_gap: Option<T> = None;
    let mut reconstruction_gap: Option<T> = None;
    let mut termination = Termination::Completed;

    for k in 0..=steps {
        let t = T::from_usize(k).unwrap() * dt;
        let y_d = scenario.reference.eval(t, p);
        let out = match law.step(&x, &y_d, t, dt) {
            Ok(out) => out,
            Err(ControlError::SingularInput { t, .. }) => {
                termination = Termination::SingularAbort { t };
                break;
            }
            Err(e) => {
                termination = Termination::NumericFailure { t: t.as_f64(), message: e.to_string() };
                break;
            }
        };
        if out.u.dim() != m || !out.u.is_finite() {
            termination = Termination::NumericFailure {
                t: t.as_f64(),
                message: format!("law emitted an invalid input {:?}", out.u),
            };
            break;
        }
        if out.singular_transit {
            transits.push(t);
        }
        let u = out.u;
        let delayed = Vector::new(delays.iter_mut().zip(u.iter()).map(|(dl, &v)| dl.push(v)).collect());
        let (applied, saturated) = match &sat {
            Some(s) => (s.apply_vec(&delayed), delayed.iter().any(|&v| s.is_active(v))),
            None => (delayed, false),
        };
        let split = out.split;
        let (u_p, u_s, x_hat_p, x_hat_s) = match &split {
            Some(s) => (s.u_p.clone(), s.u_s.clone(), s.x_hat_p.clone(), s.x_hat_s.clone()),
            None => (u.clone(), Vector::zeros(m), x.clone(), Vector::zeros(n)),
        };
        if cosim.is_some() && split.is_some() {
            let true_xs = &x - &x_p_true;
            let g = (&true_xs - &x_hat_s).norm_inf();
            observer_gap = Some(observer_gap.map_or(g, |o| o.max(g)));
            let r = (&(&x_hat_p + &x_hat_s) - &x).norm_inf();
            reconstruction_gap = Some(reconstruction_gap.map_or(r, |o| o.max(r)));
        }
        rows.push(TraceRow {
            t,
            x: x.clone(),
            u_commanded: u.clone(),
            u_applied: applied.clone(),
            u_p: u_p.clone(),
            u_s,
            x_hat_p,
            x_hat_s,
            y: plant.output(&x),
            y_d,
            saturated,
        });
        if k == steps {
            break;
        }

        let nz = law.internal_dim();
        let law_ref: &dyn ControlLaw<T> = &*law;
        let with_cosim = cosim.is_some() && split.is_some();
        let rate = |tau: T, s: &Vector<T>| {
            let xs = s.segment(0, n);
            let z = s.segment(n, nz);
            let dx = plant.field(tau, &xs, &applied, &scenario.d);
            let dz = law_ref.internal_rate(tau, &xs, &z);
            if with_cosim {
                let (a1, b1, f) = cosim.as_ref().unwrap();
                let xp = s.segment(n + nz, n);
                // everything the designer's model misses acts on the primary system
                let mismatch = &dx - &f(&xs, &u);
                let mut dxp = a1 * &xp;
                dxp += &(b1 * &u_p);
                dxp += &mismatch;
                Vector::concat(&[&dx, &dz, &dxp])
            } else {
                Vector::concat(&[&dx, &dz])
            }
        };
        let state = if with_cosim {
            Vector::concat(&[&x, &law.internal_state(), &x_p_true])
        } else {
            Vector::concat(&[&x, &law.internal_state()])
        };
        let t_next = T::from_usize(k + 1).unwrap() * dt;
        let next = match rk4_step(rate, t, &state, dt) {
            Ok(s) => s,
            Err(NumericsError::NonFiniteState { .. }) => {
                termination = Termination::Diverged { t: t_next.as_f64() };
                break;
            }
            Err(e) => {
                termination = Termination::NumericFailure { t: t.as_f64(), message: e.to_string() };
                break;
            }
        };
        x = next.segment(0, n);
        law.set_internal_state(&next.segment(n, nz));
        if with_cosim {
            x_p_true = next.segment(n + nz, n);
        }
        if x.norm_inf() > limit {
            termination = Termination::Diverged { t: t_next.as_f64() };
            break;
        }
    }

    Ok(SimulationTrace {
        plant: plant.name().to_string(),
        scenario: scenario.name.clone(),
        n,
        m,
        p,
        dt,
        t_end: scenario.t_end,
        rows,
        termination,
        singular_transits: transits,
        observer_gap,
        reconstruction_gap,
    })
}
