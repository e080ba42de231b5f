//! The three benchmark problems with every applicable method, the comparison
//! table and the decomposition/observer self-checks.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controllers::{
    lqr_gain, Adrc, ControlLaw, Ex3Backstepping, FlcEx3, JlcFeedback, JlcLaw, LqrLaw, PidGains, PidLaw,
    RflcEx3, ZeroSecondary,
};
use crate::metrics::{ErrorSignal, PerformanceReport, Table1, Table1Cell};
use crate::numerics::{Matrix, NumericsError, Vector};
use crate::plant::{build_example1, build_example2, build_example3, simulate, Example3Scenario, SimError, Reference};
use crate::scl::{linearize, make_decomposition, make_decomposition_ex1, verify_decomposition, verify_decomposition_with_primary, CompositeLaw, ObserverMode, SclError};
use crate::{Plant64, Report64, Scenario64, Trace64};

/// Default integration step.
pub const DEFAULT_DT: f64 = 1e-3;
/// Threshold of the decomposition-exactness check.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-6;
/// Threshold of the observer-exactness check.
pub const OBSERVER_TOLERANCE: f64 = 1e-9;

pub const EX1_PID: PidGains<f64> = PidGains { kp: 0.66, ki: 1.33, kd: -0.02 };
pub const EX2_PID: PidGains<f64> = PidGains { kp: -0.5, ki: -1.3, kd: 0.0 };
/// LQR weights shared by every method on the mismatched plant.
pub const EX3_Q: [f64; 2] = [10.0, 10.0];
pub const EX3_R: f64 = 1.0;
pub const BACKSTEPPING_A: f64 = 10.0;
pub const BACKSTEPPING_C: f64 = 10.0;
/// ADRC input-gain estimate, the value of `1 + cos x2` at the origin.
pub const ADRC_B: f64 = 2.0;
pub const ADRC_OMEGA0: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    Ex1,
    Ex2,
    Ex3,
}

impl Example {
    pub const ALL: [Example; 3] = [Example::Ex1, Example::Ex2, Example::Ex3];

    pub fn key(self) -> &'static str {
        match self {
            Example::Ex1 => "ex1",
            Example::Ex2 => "ex2",
            Example::Ex3 => "ex3",
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Example {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Example::ALL
            .into_iter()
            .find(|e| e.key().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown example '{s}' (expected ex1, ex2 or ex3)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// State compensation linearization.
    Sclc,
    /// Jacobian linearization.
    Jlc,
    /// Feedback linearization.
    Flc,
    /// Robust feedback linearization.
    Rflc,
    /// Active disturbance rejection control.
    Adrc,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Sclc, Method::Jlc, Method::Flc, Method::Rflc, Method::Adrc];

    pub fn key(self) -> &'static str {
        match self {
            Method::Sclc => "sclc",
            Method::Jlc => "jlc",
            Method::Flc => "flc",
            Method::Rflc => "rflc",
            Method::Adrc => "adrc",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Sclc => "SCLC",
            Method::Jlc => "JLC",
            Method::Flc => "FLC",
            Method::Rflc => "RFLC",
            Method::Adrc => "ADRC",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.key().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown method '{s}' (expected sclc, jlc, flc, rflc or adrc)"))
    }
}

impl FromStr for Example3Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Example3Scenario::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown scenario '{s}' (expected i, ii, iii or iv)"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("{method} is not applicable to {example}: {reason}")]
    Unsupported { example: Example, method: Method, reason: &'static str },
    #[error("scenarios only exist for ex3")]
    ScenarioNotApplicable,
    #[error(transparent)]
    Scl(#[from] SclError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn unsupported(example: Example, method: Method) -> Option<&'static str> {
    use Example::*;
    use Method::*;
    match (example, method) {
        (Ex1, Jlc) => "equilibrium points of the bilinear plant cannot be obtained, so there is no operating point to linearize at",
        (Ex1, _) if method != Sclc => "the bilinear example compares no other methods",
        (Ex2, Flc) | (Ex2, Rflc) => "the saturation function is irreversible, so the real input u cannot be obtained",
        (Ex2, Adrc) => "the saturated example compares SCLC against JLC only",
        _ => return None,
    }
    .into()
}

/// A fully assembled closed-loop problem.
pub struct Case {
    pub example: Example,
    pub method: Method,
    pub scenario_id: Option<Example3Scenario>,
    pub plant: Plant64,
    pub scenario: Scenario64,
    pub law: Box<dyn ControlLaw<f64>>,
    pub signal: ErrorSignal,
}

fn ex3_q() -> Matrix<f64> {
    Matrix::diag(&EX3_Q)
}

fn ex3_r() -> Matrix<f64> {
    Matrix::from_f64(&[[EX3_R]])
}

/// LQR gains of the mismatched plant for each method, each on its own
/// linear model: `(A1, B1)` for SCLC/JLC/RFLC, the double integrator for FLC
/// and the ADRC model with input gain `b`.
pub fn ex3_gain(method: Method) -> Result<Matrix<f64>, BenchError> {
    let (plant, _) = build_example3::<f64>();
    let (a1, b1) = linearize(&plant)?;
    let double = Matrix::from_f64(&[[0.0, 1.0], [0.0, 0.0]]);
    let k = match method {
        Method::Sclc | Method::Jlc | Method::Rflc => lqr_gain(&a1, &b1, &ex3_q(), &ex3_r())?,
        Method::Flc => lqr_gain(&double, &Matrix::from_f64(&[[0.0], [1.0]]), &ex3_q(), &ex3_r())?,
        Method::Adrc => lqr_gain(&double, &Matrix::from_f64(&[[0.0], [ADRC_B]]), &ex3_q(), &ex3_r())?,
    };
    Ok(k)
}

/// Builds the plant, scenario and law of one benchmark cell. Example 3 uses
/// scenario (i) when none is given.
pub fn build_case(
    example: Example,
    method: Method,
    scenario: Option<Example3Scenario>,
    mode: ObserverMode,
) -> Result<Case, BenchError> {
    if let Some(reason) = unsupported(example, method) {
        return Err(BenchError::Unsupported { example, method, reason });
    }
    if example != Example::Ex3 && scenario.is_some() {
        return Err(BenchError::ScenarioNotApplicable);
    }
    let signal = ErrorSignal::Tracking;
    let case = match example {
        Example::Ex1 => {
            let (plant, sc) = build_example1::<f64>();
            let y_d = match &sc.reference {
                Reference::Constant(v) => v[0],
                _ => unreachable!("constant reference"),
            };
            let dec = make_decomposition_ex1(y_d)?;
            let law = CompositeLaw::new(
                dec,
                Box::new(PidLaw::new(EX1_PID, plant.output_fn())),
                Box::new(ZeroSecondary::new(1)),
                mode,
            )?;
            Case { example, method, scenario_id: None, plant, scenario: sc, law: Box::new(law), signal }
        }
        Example::Ex2 => {
            let (plant, sc) = build_example2::<f64>();
            let law: Box<dyn ControlLaw<f64>> = match method {
                Method::Sclc => Box::new(CompositeLaw::new(
                    make_decomposition(&plant)?,
                    Box::new(PidLaw::new(EX2_PID, plant.output_fn())),
                    Box::new(ZeroSecondary::new(1)),
                    mode,
                )?),
                _ => {
                    let (a1, b1) = linearize(&plant)?;
                    Box::new(JlcLaw::new(a1, b1, JlcFeedback::Output(PidLaw::new(EX2_PID, plant.output_fn()))))
                }
            };
            Case { example, method, scenario_id: None, plant, scenario: sc, law, signal }
        }
        Example::Ex3 => {
            let id = scenario.unwrap_or(Example3Scenario::I);
            let (plant, _) = build_example3::<f64>();
            let sc = id.scenario();
            let k = ex3_gain(method)?;
            let law: Box<dyn ControlLaw<f64>> = match method {
                Method::Sclc => Box::new(CompositeLaw::new(
                    make_decomposition(&plant)?,
                    Box::new(LqrLaw::new(k)),
                    Box::new(Ex3Backstepping::new(BACKSTEPPING_A, BACKSTEPPING_C)),
                    mode,
                )?),
                Method::Jlc => {
                    let (a1, b1) = linearize(&plant)?;
                    Box::new(JlcLaw::new(a1, b1, JlcFeedback::State(LqrLaw::new(k))))
                }
                Method::Flc => Box::new(FlcEx3::new(k)),
                Method::Rflc => Box::new(RflcEx3::new(k)),
                Method::Adrc => Box::new(Adrc::new(ADRC_B, ADRC_OMEGA0, k)),
            };
            Case { example, method, scenario_id: Some(id), plant, scenario: sc, law, signal }
        }
    };
    Ok(case)
}

/// Trace and report of one run.
pub struct RunOutput {
    pub trace: Trace64,
    pub report: Report64,
}

impl Case {
    pub fn run(&mut self, dt: f64) -> Result<RunOutput, BenchError> {
        let trace = simulate(&self.plant, self.law.as_mut(), &self.scenario, dt)?;
        let report = PerformanceReport::from_trace(&trace, self.signal);
        Ok(RunOutput { trace, report })
    }
}

/// Builds and runs one cell; `t_end` overrides the scenario horizon.
pub fn run(
    example: Example,
    method: Method,
    scenario: Option<Example3Scenario>,
    dt: f64,
    t_end: Option<f64>,
) -> Result<RunOutput, BenchError> {
    let mut case = build_case(example, method, scenario, ObserverMode::default())?;
    if let Some(t) = t_end {
        case.scenario.t_end = t;
    }
    case.run(dt)
}

/// All methods in all scenarios of the mismatched plant, cells computed in
/// parallel.
pub fn table1(dt: f64) -> Result<Table1<f64>, BenchError> {
    let jobs: Vec<(Example3Scenario, Method)> = Example3Scenario::ALL
        .into_iter()
        .flat_map(|s| Method::ALL.into_iter().map(move |m| (s, m)))
        .collect();
    let results: Vec<Result<Table1Cell<f64>, BenchError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(s, m)| {
                scope.spawn(move || {
                    let out = run(Example::Ex3, m, Some(s), dt, None)?;
                    Ok(Table1Cell { scenario: s, method: m, report: out.report })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("table worker panicked")).collect()
    });
    Ok(Table1 { cells: results.into_iter().collect::<Result<_, _>>()? })
}

/// One randomized decomposition-exactness run.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionCase {
    pub example: Example,
    pub index: usize,
    /// `max_t ‖x − (x_p + x_s)‖∞`, or the failure message.
    pub deviation: Result<f64, String>,
}

impl DecompositionCase {
    pub fn passed(&self) -> bool {
        matches!(self.deviation, Ok(d) if d < DECOMPOSITION_TOLERANCE)
    }
}

/// Random bounded input split `u_p = a sin(ωt + φ) + c`, `u_s = a' sin(ω't + φ')`.
fn random_split(rng: &mut ChaCha8Rng, amplitude: f64) -> impl Fn(f64) -> (Vector<f64>, Vector<f64>) + Sync {
    let a = rng.gen_range(0.0..0.6 * amplitude);
    let c = rng.gen_range(-0.2 * amplitude..0.2 * amplitude);
    let a2 = rng.gen_range(0.0..0.2 * amplitude);
    let (w, w2) = (rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0));
    let (phi, phi2) = (rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3));
    move |t: f64| {
        (
            Vector::scalar(a * (w * t + phi).sin() + c),
            Vector::scalar(a2 * (w2 * t + phi2).sin()),
        )
    }
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, half_width: f64) -> Vector<f64> {
    Vector::new((0..n).map(|_| rng.gen_range(-half_width..half_width)).collect())
}

/// Decomposition exactness over `cases` seeded random inputs, initial states
/// and disturbances per example. With `fault`, the primary system runs on a
/// deliberately wrong `A1` and every case should fail.
pub fn decomposition_suite(dt: f64, cases: usize, fault: bool) -> Result<Vec<DecompositionCase>, BenchError> {
    let mut out = Vec::new();
    for example in Example::ALL {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5c1 + example as u64);
        // input amplitude, initial-state and disturbance half-widths
        let (plant, dec, amp, x_w, d_w, t_end) = match example {
            Example::Ex1 => {
                let (p, s) = build_example1::<f64>();
                (p, make_decomposition_ex1(20.0)?, 1.0, 1.0, 3.0, s.t_end)
            }
            Example::Ex2 => {
                let (p, s) = build_example2::<f64>();
                let d = make_decomposition(&p)?;
                (p, d, 5.0, 1.0, 0.5, s.t_end)
            }
            Example::Ex3 => {
                let (p, s) = build_example3::<f64>();
                let d = make_decomposition(&p)?;
                (p, d, 0.5, 0.3, 0.2, s[0].t_end)
            }
        };
        let primary_a1 = if fault {
            dec.a1() + &Matrix::identity(dec.n()).scale(0.5)
        } else {
            dec.a1().clone()
        };
        for index in 0..cases {
            let input = random_split(&mut rng, amp);
            let x0 = uniform(&mut rng, plant.n(), x_w);
            let d = uniform(&mut rng, plant.n(), d_w);
            let deviation = verify_decomposition_with_primary(&plant, &dec, &primary_a1, &input, &d, &x0, t_end, dt)
                .map_err(|e| e.to_string());
            out.push(DecompositionCase { example, index, deviation });
        }
    }
    Ok(out)
}

/// Decomposition check with a fixed input, for quick reproduction.
pub fn decomposition_single(example: Example, dt: f64) -> Result<f64, BenchError> {
    let dev = match example {
        Example::Ex1 => {
            let (p, s) = build_example1::<f64>();
            let dec = make_decomposition_ex1(20.0)?;
            let input = |_t: f64| (Vector::scalar(1.0), Vector::scalar(0.0));
            verify_decomposition(&p, &dec, &input, &s.d, &s.x0, s.t_end, dt)?
        }
        Example::Ex2 => {
            let (p, s) = build_example2::<f64>();
            let dec = make_decomposition(&p)?;
            let input = |t: f64| (Vector::scalar(3.0 * t.sin()), Vector::scalar(0.0));
            verify_decomposition(&p, &dec, &input, &s.d, &s.x0, s.t_end, dt)?
        }
        Example::Ex3 => {
            let (p, s) = build_example3::<f64>();
            let dec = make_decomposition(&p)?;
            let input = |t: f64| (Vector::scalar(t.sin()), Vector::scalar(0.0));
            verify_decomposition(&p, &dec, &input, &Vector::from_f64(&[1.0, 1.0]), &Vector::from_f64(&[0.1, -0.1]), s[0].t_end, dt)?
        }
    };
    Ok(dev)
}

/// Observer gap of one decomposition-based benchmark run.
#[derive(Debug, Clone, Serialize)]
pub struct ObserverCase {
    pub label: String,
    pub gap: Option<f64>,
    pub reconstruction_gap: Option<f64>,
    pub final_secondary_norm: f64,
    pub completed: bool,
}

impl ObserverCase {
    pub fn passed(&self) -> bool {
        matches!(self.gap, Some(g) if g < OBSERVER_TOLERANCE)
    }
}

/// Runs every SCLC benchmark and reports how far `x̂_s` strays from the
/// secondary state implied by a co-simulated primary system.
pub fn observer_suite(dt: f64, mode: ObserverMode) -> Result<Vec<ObserverCase>, BenchError> {
    let mut cells: Vec<(Example, Option<Example3Scenario>)> = vec![(Example::Ex1, None), (Example::Ex2, None)];
    cells.extend(Example3Scenario::ALL.into_iter().map(|s| (Example::Ex3, Some(s))));
    cells
        .into_iter()
        .map(|(e, s)| {
            let mut case = build_case(e, Method::Sclc, s, mode)?;
            let out = case.run(dt)?;
            let label = match s {
                Some(s) => format!("{e}-{}", s.label()),
                None => e.to_string(),
            };
            Ok(ObserverCase {
                label,
                gap: out.trace.observer_gap,
                reconstruction_gap: out.trace.reconstruction_gap,
                final_secondary_norm: out.trace.last().map_or(f64::NAN, |r| r.x_hat_s.norm_inf()),
                completed: out.trace.completed(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for e in Example::ALL {
            assert_eq!(e.key().parse::<Example>().unwrap(), e);
        }
        for m in Method::ALL {
            assert_eq!(m.key().parse::<Method>().unwrap(), m);
        }
        assert_eq!("iv".parse::<Example3Scenario>().unwrap(), Example3Scenario::IV);
        assert!("ex4".parse::<Example>().is_err());
    }

    #[test]
    fn rejected_combinations() {
        let err = build_case(Example::Ex2, Method::Flc, None, ObserverMode::default()).err().unwrap();
        assert!(err.to_string().contains("irreversible"));
        let err = build_case(Example::Ex1, Method::Jlc, None, ObserverMode::default()).err().unwrap();
        assert!(err.to_string().contains("equilibrium points"));
        assert!(build_case(Example::Ex1, Method::Sclc, Some(Example3Scenario::I), ObserverMode::default()).is_err());
    }

    #[test]
    fn jlc_and_sclc_share_the_linearization() {
        let (plant, _) = build_example3::<f64>();
        let dec = make_decomposition(&plant).unwrap();
        let (a1, b1) = linearize(&plant).unwrap();
        assert_eq!(dec.a1().as_slice(), a1.as_slice());
        assert_eq!(dec.b1().as_slice(), b1.as_slice());
        assert_eq!(ex3_gain(Method::Sclc).unwrap(), ex3_gain(Method::Jlc).unwrap());
    }
}
