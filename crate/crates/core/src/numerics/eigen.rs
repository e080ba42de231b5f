use num_complex::Complex;

use super::{Matrix, NumericsError};
use crate::Scalar;

/// How [`eigenvalues_with`] computes the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    /// Closed forms of the characteristic polynomial for n ≤ 3, QR above.
    Auto,
    /// Closed forms only; fails for n > 3.
    ClosedForm,
    /// Hessenberg reduction followed by shifted QR.
    Qr,
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub method: EigenMethod,
    /// QR sweeps allowed per eigenvalue before giving up.
    pub max_iterations: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            method: EigenMethod::Auto,
            max_iterations: 60,
        }
    }
}

/// Coefficients `[1, c1, …, cn]` of `det(λI − M) = λⁿ + c1 λⁿ⁻¹ + … + cn`
/// (Faddeev-LeVerrier).
pub fn characteristic_polynomial<T: Scalar>(m: &Matrix<T>) -> Result<Vec<T>, NumericsError> {
    if !m.is_square() {
        return Err(NumericsError::dims(
            "characteristic_polynomial",
            "square matrix",
            format!("{:?}", m.shape()),
        ));
    }
    let n = m.rows();
    let mut coeffs = vec![T::one()];
    let mut aux = Matrix::identity(n);
    for k in 1..=n {
        let prod = m * &aux;
        let ck = -prod.trace() / T::from_usize(k).unwrap();
        coeffs.push(ck);
        aux = prod;
        for i in 0..n {
            aux[(i, i)] += ck;
        }
    }
    Ok(coeffs)
}

pub fn eigenvalues<T: Scalar>(m: &Matrix<T>) -> Result<Vec<Complex<T>>, NumericsError> {
    eigenvalues_with(m, EigenOptions::default())
}

/// Eigenvalues of a square matrix, sorted by real then imaginary part.
pub fn eigenvalues_with<T: Scalar>(
    m: &Matrix<T>,
    opts: EigenOptions,
) -> Result<Vec<Complex<T>>, NumericsError> {
    if !m.is_square() || m.rows() == 0 {
        return Err(NumericsError::dims(
            "eigenvalues",
            "non-empty square matrix",
            format!("{:?}", m.shape()),
        ));
    }
    if !m.is_finite() {
        return Err(NumericsError::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    let n = m.rows();
    let mut eig = match opts.method {
        EigenMethod::Auto if n <= 3 => closed_form(m)?,
        EigenMethod::ClosedForm => {
            if n > 3 {
                return Err(NumericsError::InvalidArgument(format!(
                    "closed-form eigenvalues need n <= 3, got {n}"
                )));
            }
            closed_form(m)?
        }
        _ => hessenberg_qr(m, opts.max_iterations)?,
    };
    eig.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(eig)
}

/// True iff every eigenvalue has real part below −1e-9.
pub fn is_hurwitz<T: Scalar>(m: &Matrix<T>) -> Result<bool, NumericsError> {
    let margin = T::lit(-1e-9);
    Ok(eigenvalues(m)?.iter().all(|l| l.re < margin))
}

fn closed_form<T: Scalar>(m: &Matrix<T>) -> Result<Vec<Complex<T>>, NumericsError> {
    match m.rows() {
        1 => Ok(vec![Complex::new(m[(0, 0)], T::zero())]),
        2 => {
            let tr = m.trace();
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            Ok(quadratic_roots(-tr, det).to_vec())
        }
        3 => {
            let c = characteristic_polynomial(m)?;
            Ok(cubic_roots(c[1], c[2], c[3]).to_vec())
        }
        n => Err(NumericsError::InvalidArgument(format!(
            "closed-form eigenvalues need n <= 3, got {n}"
        ))),
    }
}

/// Roots of `λ² + b λ + c`.
fn quadratic_roots<T: Scalar>(b: T, c: T) -> [Complex<T>; 2] {
    let half_b = b * T::lit(0.5);
    let disc = half_b * half_b - c;
    if disc >= T::zero() {
        // avoid cancellation: larger-magnitude root first, then Vieta
        let s = disc.sqrt();
        let r1 = if half_b >= T::zero() { -half_b - s } else { -half_b + s };
        let r2 = if r1 != T::zero() { c / r1 } else { T::zero() };
        [Complex::new(r1, T::zero()), Complex::new(r2, T::zero())]
    } else {
        let im = (-disc).sqrt();
        [Complex::new(-half_b, -im), Complex::new(-half_b, im)]
    }
}

/// Roots of `λ³ + b λ² + c λ + d`.
fn cubic_roots<T: Scalar>(b: T, c: T, d: T) -> [Complex<T>; 3] {
    let three = T::lit(3.0);
    let shift = b / three;
    let p = c - b * b / three;
    let q = T::lit(2.0) * b * b * b / T::lit(27.0) - b * c / three + d;
    let scale = b.abs().max(c.abs().sqrt()).max(d.abs().cbrt());
    let tiny = T::lit(16.0) * T::epsilon();
    if p.abs() <= tiny * scale * scale && q.abs() <= tiny * scale * scale * scale {
        let r = Complex::new(-shift, T::zero());
        return [r, r, r];
    }

    let poly = |x: T| ((x + b) * x + c) * x + d;
    let dpoly = |x: T| (three * x + T::lit(2.0) * b) * x + c;
    let polish = |mut x: T| {
        for _ in 0..3 {
            let dp = dpoly(x);
            if dp == T::zero() {
                break;
            }
            let next = x - poly(x) / dp;
            if poly(next).abs() < poly(x).abs() {
                x = next;
            } else {
                break;
            }
        }
        x
    };

    let half_q = q * T::lit(0.5);
    let third_p = p / three;
    let disc = half_q * half_q + third_p * third_p * third_p;
    if disc > T::zero() {
        // one real root, deflate to get the complex pair
        let sq = disc.sqrt();
        let w = -half_q - if q >= T::zero() { sq } else { -sq };
        let u = w.cbrt();
        let t = if u != T::zero() { u - third_p / u } else { T::zero() };
        let r = polish(t - shift);
        let [r1, r2] = quadratic_roots(b + r, c + r * (b + r));
        [Complex::new(r, T::zero()), r1, r2]
    } else {
        let rad = (-third_p).sqrt();
        let cos_arg = (-half_q / (rad * rad * rad)).max(-T::one()).min(T::one());
        let phi = cos_arg.acos() / three;
        let two_pi_3 = T::lit(2.0) * T::PI() / three;
        let two_rad = T::lit(2.0) * rad;
        let roots = [
            two_rad * phi.cos() - shift,
            two_rad * (phi - two_pi_3).cos() - shift,
            two_rad * (phi + two_pi_3).cos() - shift,
        ];
        roots.map(|r| Complex::new(polish(r), T::zero()))
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarity
/// transformations (Gaussian elimination with pivoting).
fn hessenberg<T: Scalar>(a: &mut [Vec<T>], n: usize) {
    // 1-based indexing over an (n+1)x(n+1) array
    for m in 2..n {
        let mut x = T::zero();
        let mut i = m;
        for j in m..=n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..=n {
                let tmp = a[i][j];
                a[i][j] = a[m][j];
                a[m][j] = tmp;
            }
            for row in a.iter_mut().take(n + 1).skip(1) {
                row.swap(i, m);
            }
        }
        if x != T::zero() {
            for i in (m + 1)..=n {
                let mut y = a[i][m - 1];
                if y != T::zero() {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..=n {
                        let amj = a[m][j];
                        a[i][j] -= y * amj;
                    }
                    for row in a.iter_mut().take(n + 1).skip(1) {
                        let rji = row[i];
                        row[m] += y * rji;
                    }
                }
            }
        }
    }
    for i in 3..=n {
        for j in 1..(i - 1) {
            a[i][j] = T::zero();
        }
    }
}

fn sign<T: Scalar>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of a real matrix by Hessenberg reduction and the Francis
/// double-shift QR iteration.
#[allow(unused_assignments)]
fn hessenberg_qr<T: Scalar>(
    m: &Matrix<T>,
    max_iterations: usize,
) -> Result<Vec<Complex<T>>, NumericsError> {
    let n = m.rows();
    let mut a = vec![vec![T::zero(); n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = m[(i, j)];
        }
    }
    hessenberg(&mut a, n);

    let mut wr = vec![T::zero(); n + 1];
    let mut wi = vec![T::zero(); n + 1];
    let mut anorm = T::zero();
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let half = T::lit(0.5);
    let mut nn = n;
    let mut t = T::zero();
    let (mut p, mut q, mut r) = (T::zero(), T::zero(), T::zero());
    let (mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = T::zero();
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = T::zero();
                nn -= 1;
            } else {
                y = a[nn - 1][nn - 1];
                w = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    p = half * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= T::zero() {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != T::zero() {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = T::zero();
                        wi[nn] = T::zero();
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn = nn.saturating_sub(2);
                } else {
                    if its == max_iterations {
                        return Err(NumericsError::NoConvergence { iterations: its });
                    }
                    if its == 10 || its == 20 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            a[i][i] -= x;
                        }
                        let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = T::lit(0.75) * s;
                        y = x;
                        w = T::lit(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut mm = nn - 2;
                    loop {
                        z = a[mm][mm];
                        r = x - z;
                        let s0 = y - z;
                        p = (r * s0 - w) / a[mm + 1][mm] + a[mm][mm + 1];
                        q = a[mm + 1][mm + 1] - z - r - s0;
                        r = a[mm + 2][mm + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if mm == l {
                            break;
                        }
                        let u = a[mm][mm - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (a[mm - 1][mm - 1].abs() + z.abs() + a[mm + 1][mm + 1].abs());
                        if u + v == v {
                            break;
                        }
                        mm -= 1;
                    }
                    for i in (mm + 2)..=nn {
                        a[i][i - 2] = T::zero();
                        if i != mm + 2 {
                            a[i][i - 3] = T::zero();
                        }
                    }
                    let mut k = mm;
                    while k < nn {
                        if k != mm {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = T::zero();
                            if k != nn - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != T::zero() {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != T::zero() {
                            if k == mm {
                                if l != mm {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nn - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if k != nn - 1 {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex::new(wr[i], wi[i])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex<f64>, re: f64, im: f64, tol: f64) -> bool {
        (a.re - re).abs() < tol && (a.im - im).abs() < tol
    }

    /// |det(M − λI)| by complex Gaussian elimination; independent of both
    /// eigenvalue routes.
    fn char_residual(m: &Matrix<f64>, lambda: Complex<f64>) -> f64 {
        let n = m.rows();
        let mut a: Vec<Vec<Complex<f64>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        Complex::new(m[(i, j)], 0.0) - if i == j { lambda } else { Complex::new(0.0, 0.0) }
                    })
                    .collect()
            })
            .collect();
        let mut det = Complex::new(1.0, 0.0);
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a[x][k].norm().partial_cmp(&a[y][k].norm()).unwrap()).unwrap();
            if a[p][k].norm() == 0.0 {
                return 0.0;
            }
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= a[k][k];
            for i in (k + 1)..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    let akj = a[k][j];
                    a[i][j] -= f * akj;
                }
            }
        }
        det.norm()
    }

    #[test]
    fn characteristic_polynomial_of_companion() {
        let a = Matrix::<f64>::from_f64(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-4.0, -6.0, -4.0]]);
        assert_eq!(characteristic_polynomial(&a).unwrap(), vec![1.0, 4.0, 6.0, 4.0]);
    }

    #[test]
    fn complex_pair_of_mismatched_primary() {
        let a = Matrix::<f64>::from_f64(&[[0.0, 2.0], [-2.0, -3.0]]);
        let e = eigenvalues(&a).unwrap();
        let im = 7f64.sqrt() / 2.0;
        assert!(close(e[0], -1.5, -im, 1e-12) && close(e[1], -1.5, im, 1e-12));
        assert!((im - 1.3229).abs() < 1e-4);
        assert!(is_hurwitz(&a).unwrap());
    }

    #[test]
    fn companion_spectrum() {
        let a = Matrix::<f64>::from_f64(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-4.0, -6.0, -4.0]]);
        for method in [EigenMethod::ClosedForm, EigenMethod::Qr] {
            let e = eigenvalues_with(&a, EigenOptions { method, ..Default::default() }).unwrap();
            assert!(close(e[0], -2.0, 0.0, 1e-10), "{method:?} {e:?}");
            assert!(close(e[1], -1.0, -1.0, 1e-10));
            assert!(close(e[2], -1.0, 1.0, 1e-10));
        }
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = eigenvalues(&Matrix::<f64>::identity(3)).unwrap();
        assert!(e.iter().all(|l| close(*l, 1.0, 0.0, 1e-14)));
        let e = eigenvalues_with(&Matrix::<f64>::identity(5), EigenOptions::default()).unwrap();
        assert!(e.iter().all(|l| close(*l, 1.0, 0.0, 1e-14)));
    }

    #[test]
    fn hurwitz_examples() {
        assert!(!is_hurwitz(&Matrix::<f64>::from_f64(&[[2.0, 0.0], [-2.0, -3.0]])).unwrap());
        assert!(is_hurwitz(&Matrix::<f64>::from_f64(&[[-4.0]])).unwrap());
        assert!(!is_hurwitz(&Matrix::<f64>::from_f64(&[[0.0, 1.0], [-1.0, 0.0]])).unwrap());
    }

    #[test]
    fn leso_error_matrix_has_triple_pole() {
        for w in [1.0f64, 2.0, 5.0] {
            let m = Matrix::from_f64(&[[-3.0 * w, 1.0, 0.0], [-3.0 * w * w, 0.0, 1.0], [-w * w * w, 0.0, 0.0]]);
            let e = eigenvalues(&m).unwrap();
            assert!(e.iter().all(|l| close(*l, -w, 0.0, 1e-6)), "w={w}: {e:?}");
        }
    }

    #[test]
    fn larger_matrix_by_qr() {
        // block diagonal: eigenvalues known
        let mut m = Matrix::<f64>::zeros(6, 6);
        m[(0, 0)] = -1.0;
        m[(1, 1)] = 3.0;
        m[(2, 2)] = 0.5;
        m[(2, 3)] = 2.0;
        m[(3, 2)] = -2.0;
        m[(3, 3)] = 0.5;
        m[(4, 4)] = -7.0;
        m[(4, 5)] = 1.0;
        m[(5, 5)] = -7.0;
        let e = eigenvalues(&m).unwrap();
        let expect = [(-7.0, 0.0), (-7.0, 0.0), (-1.0, 0.0), (0.5, -2.0), (0.5, 2.0), (3.0, 0.0)];
        for (l, (re, im)) in e.iter().zip(expect) {
            assert!(close(*l, re, im, 1e-7), "{e:?}");
        }
    }

    #[test]
    fn closed_form_rejects_large_matrices() {
        let r = eigenvalues_with(
            &Matrix::<f64>::identity(4),
            EigenOptions { method: EigenMethod::ClosedForm, ..Default::default() },
        );
        assert!(r.is_err());
        assert!(eigenvalues(&Matrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn iteration_cap_reports_no_convergence() {
        let m = Matrix::<f64>::from_f64(&[
            [1.0, 2.0, 3.0, 4.0],
            [-2.0, 1.0, 0.5, 1.0],
            [0.3, -1.0, 2.0, 0.1],
            [1.0, 0.0, -1.0, 0.5],
        ]);
        let r = eigenvalues_with(&m, EigenOptions { method: EigenMethod::Qr, max_iterations: 0 });
        assert!(matches!(r, Err(NumericsError::NoConvergence { .. })));
    }

    #[test]
    fn single_precision() {
        let a = Matrix::<f32>::from_f64(&[[0.0, 2.0], [-2.0, -3.0]]);
        let e = eigenvalues(&a).unwrap();
        assert!((e[0].re + 1.5).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn determinant_residual_vanishes(entries in proptest::collection::vec(-4.0f64..4.0, 64), n in 1usize..=8) {
            let m = Matrix::new(n, n, entries[..n * n].to_vec()).unwrap();
            let e = eigenvalues(&m).unwrap();
            prop_assert_eq!(e.len(), n);
            let bound = 1e-6 * (1.0 + m.norm_inf()).powi(n as i32);
            for l in e {
                let res = char_residual(&m, l);
                prop_assert!(res < bound, "n={} λ={} residual={} bound={}", n, l, res, bound);
            }
        }

        #[test]
        fn closed_form_agrees_with_qr(entries in proptest::collection::vec(-4.0f64..4.0, 9)) {
            let m = Matrix::new(3, 3, entries).unwrap();
            let a = eigenvalues_with(&m, EigenOptions { method: EigenMethod::ClosedForm, ..Default::default() }).unwrap();
            let b = eigenvalues_with(&m, EigenOptions { method: EigenMethod::Qr, ..Default::default() }).unwrap();
            let sa: Complex<f64> = a.iter().sum();
            let sb: Complex<f64> = b.iter().sum();
            prop_assert!((sa - sb).norm() < 1e-6);
            prop_assert!((sa.re - m.trace()).abs() < 1e-6);
        }

        #[test]
        fn hurwitz_matches_trace_determinant_test(entries in proptest::collection::vec(-5.0f64..5.0, 4)) {
            let m = Matrix::new(2, 2, entries).unwrap();
            let tr = m.trace();
            let det = m.determinant().unwrap();
            // skip the measure-zero boundary band
            prop_assume!(tr.abs() > 1e-6 && det.abs() > 1e-6);
            prop_assert_eq!(is_hurwitz(&m).unwrap(), tr < 0.0 && det > 0.0);
        }
    }
}
