use super::{Decomposition, SclError};
use crate::controllers::{ControlError, ControlLaw, ControlOutput, SecondaryLaw, Split};
use crate::numerics::Vector;
use crate::Scalar;

/// How the composite law advances its observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObserverMode {
    /// The observer is internal state of the law, integrated by the harness in
    /// the same RK4 stages as the plant. `x̂_s` then equals the true secondary
    /// state up to rounding.
    #[default]
    StageSynchronous,
    /// [`Decomposition::observer_step`] at the start of every sample with the
    /// measured state held over the step; lags by O(dt).
    SampledHold,
}

/// `u = u_p + u_s`: a primary law on `x̂_p = x − x̂_s` and a secondary law on
/// `(x, x̂_s)`.
///
/// In tracking problems the primary law is an output-error law evaluated on
/// `x̂_p`, so it sees `y_d − h(x̂_p)`.
pub struct CompositeLaw<T> {
    dec: Decomposition<T>,
    primary: Box<dyn ControlLaw<T>>,
    secondary: Box<dyn SecondaryLaw<T>>,
    mode: ObserverMode,
    started: bool,
}

impl<T: Scalar> CompositeLaw<T> {
    pub fn new(
        dec: Decomposition<T>,
        primary: Box<dyn ControlLaw<T>>,
        secondary: Box<dyn SecondaryLaw<T>>,
        mode: ObserverMode,
    ) -> Result<Self, SclError> {
        let m = dec.m();
        if primary.input_dim() != m || secondary.input_dim() != m {
            return Err(crate::numerics::NumericsError::dims(
                "composite law",
                format!("primary and secondary laws with {m} inputs"),
                format!("{} and {}", primary.input_dim(), secondary.input_dim()),
            )
            .into());
        }
        if primary.internal_dim() != 0 {
            return Err(crate::numerics::NumericsError::InvalidArgument(
                "primary law must not carry continuous internal state".into(),
            )
            .into());
        }
        let mut dec = dec;
        dec.reset();
        Ok(Self { dec, primary, secondary, mode, started: false })
    }

    pub fn mode(&self) -> ObserverMode {
        self.mode
    }
}

impl<T: Scalar> ControlLaw<T> for CompositeLaw<T> {
    fn input_dim(&self) -> usize {
        self.dec.m()
    }

    fn step(&mut self, x: &Vector<T>, reference: &Vector<T>, t: T, dt: T)
        -> Result<ControlOutput<T>, ControlError> {
        x.check_dim("composite law", self.dec.n())?;
        if self.mode == ObserverMode::SampledHold && self.started {
            let (u, us) = (self.dec.u_last().clone(), self.dec.u_s_last().clone());
            self.dec.observer_step(x, &u, &us, dt).map_err(|e| match e {
                SclError::Numerics(n) => ControlError::Numerics(n),
                SclError::Control(c) => c,
                other => ControlError::Numerics(crate::numerics::NumericsError::InvalidArgument(other.to_string())),
            })?;
        }
        self.started = true;
        let x_hat_s = self.dec.x_hat_s().clone();
        let x_hat_p = self.dec.x_hat_p(x);
        let u_p = self.primary.step(&x_hat_p, reference, t, dt)?.u;
        let u_s = self.secondary.control(x, &x_hat_s);
        let u = &u_p + &u_s;
        self.dec.record_inputs(u.clone(), u_s.clone());
        Ok(ControlOutput {
            u,
            split: Some(Split { u_p, u_s, x_hat_p, x_hat_s }),
            singular_transit: false,
        })
    }

    fn reset(&mut self) {
        self.dec.reset();
        self.primary.reset();
        self.started = false;
    }

    fn internal_dim(&self) -> usize {
        match self.mode {
            ObserverMode::StageSynchronous => self.dec.n(),
            ObserverMode::SampledHold => 0,
        }
    }

    fn internal_state(&self) -> Vector<T> {
        match self.mode {
            ObserverMode::StageSynchronous => self.dec.x_hat_s().clone(),
            ObserverMode::SampledHold => Vector::zeros(0),
        }
    }

    fn set_internal_state(&mut self, z: &Vector<T>) {
        if self.mode == ObserverMode::StageSynchronous {
            self.dec.set_x_hat_s(z.clone());
        }
    }

    fn internal_rate(&self, _t: T, x: &Vector<T>, z: &Vector<T>) -> Vector<T> {
        match self.mode {
            ObserverMode::StageSynchronous => self.dec.secondary_rate(x, z, self.dec.u_last(), self.dec.u_s_last()),
            ObserverMode::SampledHold => Vector::zeros(0),
        }
    }

    fn decomposition(&self) -> Option<&Decomposition<T>> {
        Some(&self.dec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controllers::{lqr_gain, Ex3Backstepping, JlcFeedback, JlcLaw, LqrLaw, ZeroLaw, ZeroSecondary};
    use crate::numerics::Matrix;
    use crate::plant::build_example3;
    use crate::scl::make_decomposition;

    fn ex3_gain(dec: &Decomposition<f64>) -> Matrix<f64> {
        lqr_gain(dec.a1(), dec.b1(), &Matrix::diag(&[10.0, 10.0]), &Matrix::from_f64(&[[1.0]])).unwrap()
    }

    #[test]
    fn zero_laws_give_zero_input() {
        let (p, _) = build_example3::<f64>();
        let dec = make_decomposition(&p).unwrap();
        let mut law =
            CompositeLaw::new(dec, Box::new(ZeroLaw::new(1)), Box::new(ZeroSecondary::new(1)), ObserverMode::default())
                .unwrap();
        let out = law.step(&Vector::from_f64(&[2.0, 2.0]), &Vector::zeros(1), 0.0, 1e-3).unwrap();
        assert_eq!(out.u, Vector::zeros(1));
    }

    #[test]
    fn first_sample_splits_into_lqr_and_backstepping() {
        let (p, _) = build_example3::<f64>();
        let dec = make_decomposition(&p).unwrap();
        let k = ex3_gain(&dec);
        let bs = Ex3Backstepping::default();
        let mut law =
            CompositeLaw::new(dec.clone(), Box::new(LqrLaw::new(k.clone())), Box::new(bs), ObserverMode::default())
                .unwrap();
        let x = Vector::from_f64(&[2.0, 2.0]);
        let out = law.step(&x, &Vector::zeros(1), 0.0, 1e-3).unwrap();
        let split = out.split.unwrap();
        let up = -(2.0 * k[(0, 0)] + 2.0 * k[(0, 1)]);
        assert!((split.u_p[0] - up).abs() < 1e-12);
        assert!((split.u_s[0] - bs.eval(2.0, 0.0, 0.0)).abs() < 1e-12);
        assert_eq!(out.u[0], split.u_p[0] + split.u_s[0]);
        assert_eq!(split.x_hat_p, x);

        // same K on the raw state: SCLC = JLC + secondary law at x̂_s = 0
        let mut jlc = JlcLaw::new(dec.a1().clone(), dec.b1().clone(), JlcFeedback::State(LqrLaw::new(k)));
        let uj = jlc.step(&x, &Vector::zeros(1), 0.0, 1e-3).unwrap().u[0];
        assert!((out.u[0] - (uj + bs.eval(2.0, 0.0, 0.0))).abs() < 1e-12);
    }

    #[test]
    fn sampled_hold_advances_its_own_observer() {
        let (p, _) = build_example3::<f64>();
        let dec = make_decomposition(&p).unwrap();
        let k = ex3_gain(&dec);
        let mut law = CompositeLaw::new(
            dec,
            Box::new(LqrLaw::new(k)),
            Box::new(Ex3Backstepping::default()),
            ObserverMode::SampledHold,
        )
        .unwrap();
        assert_eq!(ControlLaw::<f64>::internal_dim(&law), 0);
        let x = Vector::from_f64(&[2.0, 2.0]);
        law.step(&x, &Vector::zeros(1), 0.0, 1e-3).unwrap();
        let out = law.step(&x, &Vector::zeros(1), 1e-3, 1e-3).unwrap();
        assert!(out.split.unwrap().x_hat_s.norm_inf() > 0.0);
        law.reset();
        assert_eq!(law.decomposition().unwrap().x_hat_s(), &Vector::zeros(2));
    }

    #[test]
    fn mismatched_laws_are_rejected() {
        let (p, _) = build_example3::<f64>();
        let dec = make_decomposition(&p).unwrap();
        let r = CompositeLaw::new(dec, Box::new(ZeroLaw::new(2)), Box::new(ZeroSecondary::new(1)), ObserverMode::default());
        assert!(r.is_err());
    }
}
