use std::sync::Arc;

use approx::assert_relative_eq;
use scl_core::bench::{self, Example, Method, ADRC_B, ADRC_OMEGA0, EX2_PID};
use scl_core::controllers::{
    lqr_gain, ControlLaw, Ex3Backstepping, JlcFeedback, JlcLaw, Leso, LqrLaw, PidLaw, ZeroLaw, ZeroSecondary,
};
use scl_core::metrics::{ErrorSignal, PerformanceReport};
use scl_core::numerics::{Matrix, Vector};
use scl_core::plant::{build_example1, build_example3, example2_matrices, simulate, Example3Scenario, PlantModel, Reference, Scenario};
use scl_core::scl::{make_decomposition, CompositeLaw, ObserverMode};

#[test]
fn open_loop_bilinear_plant_matches_closed_form() {
    // u = 0: x' = -4x + 3, x(0) = -1
    let (plant, sc) = build_example1::<f64>();
    let tr = simulate(&plant, &mut ZeroLaw::new(1), &sc, 1e-3).unwrap();
    for t in [0.1, 0.5, 1.0, 3.0] {
        let exact = 0.75 - 1.75 * (-4.0f64 * t).exp();
        assert_relative_eq!(tr.at(t).unwrap().x[0], exact, max_relative = 1e-10);
    }
}

fn unsaturated_example2() -> PlantModel<f64> {
    let (a, b, c) = example2_matrices::<f64>();
    let (fa, fb) = (a.clone(), b.clone());
    PlantModel::new(
        "linear",
        (3, 1, 1),
        Arc::new(move |_t, x: &Vector<f64>, u: &Vector<f64>, d: &Vector<f64>| &(&(&fa * x) + &(&fb * u)) + d),
        Arc::new(move |x: &Vector<f64>| &c * x),
    )
    .with_jacobian(a, b)
}

#[test]
fn linear_plant_makes_sclc_and_jlc_coincide() {
    let plant = unsaturated_example2();
    let sc = Scenario::new("linear", Vector::from_f64(&[0.2, -0.1, 0.0]), 8.0).with_reference(Reference::SineWindow {
        amplitude: 1.0,
        omega: 0.25,
        until: 4.0 * std::f64::consts::PI,
    });
    let mut sclc = CompositeLaw::new(
        make_decomposition(&plant).unwrap(),
        Box::new(PidLaw::new(EX2_PID, plant.output_fn())),
        Box::new(ZeroSecondary::new(1)),
        ObserverMode::default(),
    )
    .unwrap();
    let (a, b, _) = example2_matrices::<f64>();
    let mut jlc = JlcLaw::new(a, b, JlcFeedback::Output(PidLaw::new(EX2_PID, plant.output_fn())));
    let ts = simulate(&plant, &mut sclc, &sc, 1e-3).unwrap();
    let tj = simulate(&plant, &mut jlc, &sc, 1e-3).unwrap();
    for (rs, rj) in ts.rows.iter().zip(&tj.rows) {
        assert!(rs.x_hat_s.norm_inf() < 1e-12);
        assert!((rs.u_applied[0] - rj.u_applied[0]).abs() < 1e-10);
    }
}

#[test]
fn double_integrator_gains_match_closed_form() {
    // x'' = b u with Q = diag(q, q), R = 1: K = [sqrt(q), sqrt(q + 2 sqrt(q) / b)]
    let q: f64 = 10.0;
    let flc = bench::ex3_gain(Method::Flc).unwrap();
    assert_relative_eq!(flc[(0, 0)], q.sqrt(), max_relative = 1e-10);
    assert_relative_eq!(flc[(0, 1)], (q + 2.0 * q.sqrt()).sqrt(), max_relative = 1e-10);
    let adrc = bench::ex3_gain(Method::Adrc).unwrap();
    let b = ADRC_B;
    assert_relative_eq!(adrc[(0, 0)], q.sqrt(), max_relative = 1e-10);
    assert_relative_eq!(adrc[(0, 1)], (q + 2.0 * q.sqrt() / b).sqrt(), max_relative = 1e-10);
}

#[test]
fn mismatched_plant_gain_is_stabilizing_and_optimal() {
    let (a, b) = (Matrix::from_f64(&[[0.0, 2.0], [-2.0, -3.0]]), Matrix::from_f64(&[[0.0], [1.0]]));
    let k = bench::ex3_gain(Method::Sclc).unwrap();
    // any other stabilizing gain costs more from a fixed initial state
    let cost = |k: &Matrix<f64>| {
        let ac = &a - &(&b * k);
        let qk = &Matrix::diag(&[10.0, 10.0]) + &(&k.transpose() * k);
        let p = scl_core::numerics::solve_lyapunov(&ac, &qk).unwrap();
        let x0 = Vector::from_f64(&[2.0, 2.0]);
        x0.dot(&(&p * &x0))
    };
    let best = cost(&k);
    for dk in [[0.1, 0.0], [-0.1, 0.0], [0.0, 0.1], [0.0, -0.1], [0.3, -0.2]] {
        let perturbed = &k + &Matrix::from_f64(&[dk]);
        assert!(cost(&perturbed) > best);
    }
}

#[test]
fn leso_gains_place_a_triple_pole() {
    let [l1, l2, l3] = Leso::new(ADRC_OMEGA0, ADRC_B).gains();
    // (s + w)^3 = s^3 + 3w s^2 + 3w^2 s + w^3
    let w = ADRC_OMEGA0;
    assert_relative_eq!(l1, 3.0 * w);
    assert_relative_eq!(l2, 3.0 * w * w);
    assert_relative_eq!(l3, w * w * w);
}

#[test]
fn single_precision_pipeline_tracks_double() {
    fn iae<T: scl_core::Scalar>() -> f64 {
        let (plant, _) = build_example3::<T>();
        let dec = make_decomposition(&plant).unwrap();
        let k = lqr_gain(dec.a1(), dec.b1(), &Matrix::from_f64(&[[10.0, 0.0], [0.0, 10.0]]), &Matrix::from_f64(&[[1.0]]))
            .unwrap();
        let mut law = CompositeLaw::new(
            dec,
            Box::new(LqrLaw::new(k)),
            Box::new(Ex3Backstepping::new(T::lit(10.0), T::lit(10.0))),
            ObserverMode::default(),
        )
        .unwrap();
        let sc = Example3Scenario::I.scenario::<T>();
        let tr = simulate(&plant, &mut law, &sc, T::lit(1e-3)).unwrap();
        PerformanceReport::from_trace(&tr, ErrorSignal::Tracking).iae.unwrap().as_f64()
    }
    assert_relative_eq!(iae::<f32>(), iae::<f64>(), max_relative = 1e-3);
}

#[test]
fn table_is_deterministic() {
    let a = bench::table1(1e-3).unwrap();
    let b = bench::table1(1e-3).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.to_text(), b.to_text());
}

#[test]
fn sampled_hold_observer_lags_to_first_order() {
    let gap = |dt: f64| {
        let mut case = bench::build_case(Example::Ex3, Method::Sclc, Some(Example3Scenario::I), ObserverMode::SampledHold)
            .unwrap();
        case.run(dt).unwrap().trace.observer_gap.unwrap()
    };
    let ratio = gap(2e-3) / gap(1e-3);
    assert!((1.7..2.3).contains(&ratio), "ratio {ratio}");
}

#[test]
fn every_method_resets_between_runs() {
    for method in Method::ALL {
        let mut case = bench::build_case(Example::Ex3, method, Some(Example3Scenario::I), ObserverMode::default()).unwrap();
        let first = case.run(1e-3).unwrap().trace;
        let second = case.run(1e-3).unwrap().trace;
        assert_eq!(first.rows, second.rows, "{method}");
        assert_eq!(case.law.input_dim(), 1);
    }
}
