use super::{Matrix, NumericsError, Vector};
use crate::Scalar;

/// Central-difference step used when a plant supplies no analytic Jacobian.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Central-difference Jacobians `(∂f/∂x, ∂f/∂u)` of `f(x, u)` at `(x0, u0)`.
pub fn jacobian_fd<T, F>(
    f: F,
    x0: &Vector<T>,
    u0: &Vector<T>,
    h: T,
) -> Result<(Matrix<T>, Matrix<T>), NumericsError>
where
    T: Scalar,
    F: Fn(&Vector<T>, &Vector<T>) -> Vector<T>,
{
    if !(h > T::zero()) {
        return Err(NumericsError::InvalidArgument(format!(
            "difference step must be positive, got {h}"
        )));
    }
    let n = f(x0, u0).dim();
    let two_h = h + h;
    let probe = |x: &Vector<T>, u: &Vector<T>| -> Result<Vector<T>, NumericsError> {
        let y = f(x, u);
        y.check_dim("jacobian_fd", n)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFiniteState { t: f64::NAN })
        }
    };

    let mut a = Matrix::zeros(n, x0.dim());
    for j in 0..x0.dim() {
        let mut xp = x0.clone();
        let mut xm = x0.clone();
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (probe(&xp, u0)?, probe(&xm, u0)?);
        for i in 0..n {
            a[(i, j)] = (fp[i] - fm[i]) / two_h;
        }
    }
    let mut b = Matrix::zeros(n, u0.dim());
    for j in 0..u0.dim() {
        let mut up = u0.clone();
        let mut um = u0.clone();
        up[j] += h;
        um[j] -= h;
        let (fp, fm) = (probe(x0, &up)?, probe(x0, &um)?);
        for i in 0..n {
            b[(i, j)] = (fp[i] - fm[i]) / two_h;
        }
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mismatched_plant_at_origin() {
        let f = |x: &Vector<f64>, u: &Vector<f64>| {
            Vector::new(vec![
                x[1] + x[1].sin(),
                -2.0 * x[0] - 3.0 * x[1] + 2.0 * x[1] * x[1] + u[0],
            ])
        };
        let (a, b) = jacobian_fd(f, &Vector::zeros(2), &Vector::zeros(1), 1e-5).unwrap();
        let expect_a = [[0.0, 2.0], [-2.0, -3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[(i, j)] - expect_a[i][j]).abs() < 1e-6);
            }
        }
        assert!((b[(0, 0)]).abs() < 1e-6 && (b[(1, 0)] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn bilinear_plant_has_no_input_gain_at_origin() {
        let f = |x: &Vector<f64>, u: &Vector<f64>| Vector::scalar(-4.0 * x[0] + x[0] * u[0]);
        let (a, b) = jacobian_fd(f, &Vector::zeros(1), &Vector::zeros(1), 1e-5).unwrap();
        assert!((a[(0, 0)] + 4.0).abs() < 1e-9);
        assert!(b[(0, 0)].abs() < 1e-12);
    }

    #[test]
    fn non_finite_probe_is_an_error() {
        let f = |x: &Vector<f64>, _: &Vector<f64>| Vector::scalar(1.0 / x[0]);
        let r = jacobian_fd(f, &Vector::from_f64(&[1e-5]), &Vector::zeros(1), 1e-5);
        assert!(matches!(r, Err(NumericsError::NonFiniteState { .. })));
    }

    proptest! {
        #[test]
        fn linear_fields_are_reproduced(
            entries in proptest::collection::vec(-5.0f64..5.0, 9 + 6),
            x0 in proptest::collection::vec(-3.0f64..3.0, 3),
            u0 in proptest::collection::vec(-3.0f64..3.0, 2),
        ) {
            let a = Matrix::new(3, 3, entries[..9].to_vec()).unwrap();
            let b = Matrix::new(3, 2, entries[9..].to_vec()).unwrap();
            let f = |x: &Vector<f64>, u: &Vector<f64>| &(&a * x) + &(&b * u);
            let (ja, jb) = jacobian_fd(f, &Vector::new(x0), &Vector::new(u0), 1e-5).unwrap();
            prop_assert!((&ja - &a).max_abs() < 1e-9);
            prop_assert!((&jb - &b).max_abs() < 1e-9);
        }
    }
}
