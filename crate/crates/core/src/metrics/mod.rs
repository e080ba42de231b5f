//! IAE/ITAE indices, saturation intervals, run classification and the
//! comparison table.

mod table;

use serde::Serialize;
use thiserror::Error;

use crate::plant::{SimulationTrace, Termination, TraceRow};
use crate::Scalar;

pub use table::{Table1, Table1Cell, DASH};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("trace diverged at t = {t}; indices are undefined")]
    DivergentTrace { t: f64 },
    #[error("trace was aborted at t = {t}; indices are undefined")]
    AbortedTrace { t: f64 },
}

/// Error signal integrated by the indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorSignal {
    /// `e = y_d − y` on the first output; for stabilization `y_d = 0`.
    #[default]
    Tracking,
    /// `e = Σ|x_i|`.
    StateOneNorm,
}

impl ErrorSignal {
    pub fn eval<T: Scalar>(self, row: &TraceRow<T>) -> T {
        match self {
            ErrorSignal::Tracking => row.y_d[0] - row.y[0],
            ErrorSignal::StateOneNorm => row.x.norm1(),
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ErrorSignal::Tracking => "e = y_d - y",
            ErrorSignal::StateOneNorm => "e = |x|_1",
        }
    }
}

fn usable<T: Scalar>(trace: &SimulationTrace<T>) -> Result<(), MetricsError> {
    match &trace.termination {
        Termination::Completed => Ok(()),
        Termination::Diverged { t } => Err(MetricsError::DivergentTrace { t: *t }),
        Termination::SingularAbort { t } | Termination::NumericFailure { t, .. } => {
            Err(MetricsError::AbortedTrace { t: *t })
        }
    }
}

/// Trapezoidal `∫ w(t)·|e(t)| dt` over the samples.
pub fn integrate_abs<T: Scalar>(times: &[T], errors: &[T], time_weighted: bool) -> T {
    let half = T::lit(0.5);
    let w = |k: usize| if time_weighted { times[k] * errors[k].abs() } else { errors[k].abs() };
    (1..times.len().min(errors.len()))
        .map(|k| half * (times[k] - times[k - 1]) * (w(k) + w(k - 1)))
        .fold(T::zero(), |a, b| a + b)
}

fn index<T: Scalar>(trace: &SimulationTrace<T>, signal: ErrorSignal, weighted: bool) -> Result<T, MetricsError> {
    usable(trace)?;
    let times: Vec<T> = trace.times().collect();
    let errors: Vec<T> = trace.rows.iter().map(|r| signal.eval(r)).collect();
    Ok(integrate_abs(&times, &errors, weighted))
}

/// Integral of the absolute error.
pub fn iae<T: Scalar>(trace: &SimulationTrace<T>, signal: ErrorSignal) -> Result<T, MetricsError> {
    index(trace, signal, false)
}

/// Integral of the time-weighted absolute error.
pub fn itae<T: Scalar>(trace: &SimulationTrace<T>, signal: ErrorSignal) -> Result<T, MetricsError> {
    index(trace, signal, true)
}

/// First time the saturation flag comes on and the last time it goes off;
/// the exit is the final sample time if it never releases.
pub fn saturation_interval<T: Scalar>(trace: &SimulationTrace<T>) -> Option<(T, T)> {
    let first = trace.rows.iter().position(|r| r.saturated)?;
    let last_on = trace.rows.iter().rposition(|r| r.saturated)?;
    let exit = match trace.rows.get(last_on + 1) {
        Some(r) => r.t,
        None => trace.rows[last_on].t,
    };
    Some((trace.rows[first].t, exit))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Converged,
    Unstable,
    Singular,
}

/// Singular if the law hit or crossed its singular manifold, unstable if the
/// run diverged, converged otherwise.
pub fn classify<T: Scalar>(trace: &SimulationTrace<T>) -> Outcome {
    if trace.singular_abort() || !trace.singular_transits.is_empty() {
        Outcome::Singular
    } else if trace.diverged() || matches!(trace.termination, Termination::NumericFailure { .. }) {
        Outcome::Unstable
    } else {
        Outcome::Converged
    }
}

/// Summary of one run. Runs that diverged or were aborted carry no indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerformanceReport<T> {
    pub iae: Option<T>,
    pub itae: Option<T>,
    /// The run reached its horizon.
    pub stable: bool,
    pub singular: bool,
    pub outcome: Outcome,
    pub saturation_interval: Option<(T, T)>,
    pub final_state_norm: T,
    pub termination: String,
    pub error_signal: ErrorSignal,
    pub observer_gap: Option<T>,
}

impl<T: Scalar> PerformanceReport<T> {
    pub fn from_trace(trace: &SimulationTrace<T>, signal: ErrorSignal) -> Self {
        let termination = match &trace.termination {
            Termination::Completed => "completed".to_string(),
            Termination::Diverged { t } => format!("diverged at t = {t:.3}"),
            Termination::SingularAbort { t } => format!("singular input at t = {t:.3}"),
            Termination::NumericFailure { t, message } => format!("numeric failure at t = {t:.3}: {message}"),
        };
        Self {
            iae: iae(trace, signal).ok(),
            itae: itae(trace, signal).ok(),
            stable: trace.completed(),
            singular: trace.singular_abort() || !trace.singular_transits.is_empty(),
            outcome: classify(trace),
            saturation_interval: saturation_interval(trace),
            final_state_norm: trace.last().map_or(T::zero(), |r| r.x.norm_inf()),
            termination,
            error_signal: signal,
            observer_gap: trace.observer_gap,
        }
    }

    /// Both indices present.
    pub fn has_indices(&self) -> bool {
        self.iae.is_some() && self.itae.is_some()
    }
}
