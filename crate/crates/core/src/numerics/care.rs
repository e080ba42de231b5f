use super::{eigen::is_hurwitz, Matrix, NumericsError};
use crate::Scalar;

const SIGN_MAX_ITERATIONS: usize = 100;
const NEWTON_MAX_ITERATIONS: usize = 30;

/// Data of the continuous algebraic Riccati equation
/// `AᵀP + PA − PBR⁻¹BᵀP + Q = 0`.
#[derive(Debug, Clone)]
pub struct CareProblem<T> {
    a: Matrix<T>,
    b: Matrix<T>,
    q: Matrix<T>,
    r: Matrix<T>,
    r_inv: Matrix<T>,
}

#[derive(Debug, Clone)]
pub struct CareSolution<T> {
    /// Stabilizing solution, symmetric.
    pub p: Matrix<T>,
    /// Optimal gain `R⁻¹BᵀP`; the closed loop is `A − BK`.
    pub k: Matrix<T>,
    /// Sign-function iterations plus Newton refinement steps.
    pub iterations: usize,
    /// `‖AᵀP + PA − PBR⁻¹BᵀP + Q‖∞`.
    pub residual: T,
}

impl<T: Scalar> CareProblem<T> {
    pub fn new(a: Matrix<T>, b: Matrix<T>, q: Matrix<T>, r: Matrix<T>) -> Result<Self, NumericsError> {
        let n = a.rows();
        if !a.is_square() || n == 0 {
            return Err(NumericsError::dims("care", "square A", format!("{:?}", a.shape())));
        }
        if b.rows() != n || b.cols() == 0 {
            return Err(NumericsError::dims("care", format!("B with {n} rows"), format!("{:?}", b.shape())));
        }
        let m = b.cols();
        if q.shape() != (n, n) {
            return Err(NumericsError::dims("care", format!("Q of shape ({n}, {n})"), format!("{:?}", q.shape())));
        }
        if r.shape() != (m, m) {
            return Err(NumericsError::dims("care", format!("R of shape ({m}, {m})"), format!("{:?}", r.shape())));
        }
        let sym_tol = |x: &Matrix<T>| T::lit(1e-12) * (T::one() + x.max_abs());
        if !q.is_symmetric(sym_tol(&q)) {
            return Err(NumericsError::InvalidArgument("Q must be symmetric".into()));
        }
        if !r.is_symmetric(sym_tol(&r)) || !is_positive_definite(&r) {
            return Err(NumericsError::InvalidArgument("R must be symmetric positive definite".into()));
        }
        let r_inv = r.inverse()?;
        Ok(Self { a, b, q: q.symmetrized(), r, r_inv })
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<T> {
        &self.b
    }

    pub fn q(&self) -> &Matrix<T> {
        &self.q
    }

    pub fn r(&self) -> &Matrix<T> {
        &self.r
    }

    /// `‖AᵀP + PA − PBR⁻¹BᵀP + Q‖∞` for a candidate `P`.
    pub fn residual(&self, p: &Matrix<T>) -> T {
        let s = &(&self.b * &self.r_inv) * &self.b.transpose();
        let at_p = &self.a.transpose() * p;
        let r = &(&(&at_p + &(p * &self.a)) - &(&(p * &s) * p)) + &self.q;
        r.norm_inf()
    }

    fn gain(&self, p: &Matrix<T>) -> Matrix<T> {
        &(&self.r_inv * &self.b.transpose()) * p
    }
}

fn is_positive_definite<T: Scalar>(m: &Matrix<T>) -> bool {
    // Cholesky without storing the factor's transpose
    let n = m.rows();
    let mut l = Matrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) {
            return false;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    true
}

/// Solves `AᵀX + XA + C = 0` by vectorization. Fails with `Singular` when
/// `A` and `−A` share an eigenvalue.
pub fn solve_lyapunov<T: Scalar>(a: &Matrix<T>, c: &Matrix<T>) -> Result<Matrix<T>, NumericsError> {
    let n = a.rows();
    if !a.is_square() || c.shape() != (n, n) {
        return Err(NumericsError::dims(
            "solve_lyapunov",
            "square A and C of equal size",
            format!("{:?}, {:?}", a.shape(), c.shape()),
        ));
    }
    let nn = n * n;
    let mut op = Matrix::<T>::zeros(nn, nn);
    // (AᵀX)_{ij} = Σ_k A_{ki} X_{kj},  (XA)_{ij} = Σ_k X_{ik} A_{kj}
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                op[(row, k * n + j)] += a[(k, i)];
                op[(row, i * n + k)] += a[(k, j)];
            }
        }
    }
    let rhs = super::Vector::new(c.as_slice().iter().map(|&v| -v).collect());
    let x = op.solve_vec(&rhs)?;
    Ok(Matrix::new(n, n, x.into_vec())?.symmetrized())
}

/// Stabilizing solution of the CARE.
///
/// The Hamiltonian matrix sign function gives a first estimate, which is then
/// refined by Newton-Kleinman steps. Fails with `NotStabilizable` when the
/// Hamiltonian has eigenvalues on the imaginary axis or the resulting closed
/// loop is not Hurwitz, and with `NoConvergence` when the residual stays above
/// `max(1e-8, 1e3·ε)·(1 + ‖P‖∞²)`.
pub fn solve_care<T: Scalar>(problem: &CareProblem<T>) -> Result<CareSolution<T>, NumericsError> {
    let n = problem.a.rows();
    let s = &(&problem.b * &problem.r_inv) * &problem.b.transpose();
    let top = problem.a.hstack(&-&s)?;
    let bottom = (-&problem.q).hstack(&-&problem.a.transpose())?;
    let h = top.vstack(&bottom)?;

    let (w, mut iterations) = matrix_sign(&h)?;
    let eye = Matrix::<T>::identity(n);
    let w11 = w.block(0, 0, n, n);
    let w12 = w.block(0, n, n, n);
    let w21 = w.block(n, 0, n, n);
    let w22 = w.block(n, n, n, n);
    // [W12; W22 + I] P = −[W11 + I; W21], overdetermined but consistent
    let lhs = w12.vstack(&(&w22 + &eye))?;
    let rhs = -&(&w11 + &eye).vstack(&w21)?;
    let lt = lhs.transpose();
    let mut p = (&lt * &lhs)
        .solve(&(&lt * &rhs))
        .map_err(|_| NumericsError::NotStabilizable)?
        .symmetrized();

    let tol = T::lit(1e-8).max(T::lit(1e3) * T::epsilon());
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let k = problem.gain(&p);
        let acl = &problem.a - &(&problem.b * &k);
        if !is_hurwitz(&acl)? {
            break;
        }
        let c = &problem.q + &(&(&k.transpose() * &problem.r) * &k);
        let next = match solve_lyapunov(&acl, &c) {
            Ok(x) => x,
            Err(_) => break,
        };
        let step = (&next - &p).norm_inf();
        let improved = problem.residual(&next) <= problem.residual(&p);
        if improved {
            p = next;
            iterations += 1;
        }
        if !improved || step <= T::lit(1e2) * T::epsilon() * (T::one() + p.norm_inf()) {
            break;
        }
    }

    let k = problem.gain(&p);
    let acl = &problem.a - &(&problem.b * &k);
    if !p.is_finite() || !is_hurwitz(&acl)? {
        return Err(NumericsError::NotStabilizable);
    }
    let residual = problem.residual(&p);
    let pn = p.norm_inf();
    if !(residual < tol * (T::one() + pn * pn)) {
        return Err(NumericsError::NoConvergence { iterations });
    }
    Ok(CareSolution { p, k, iterations, residual })
}

/// Newton iteration with determinant scaling for `sign(H)`.
fn matrix_sign<T: Scalar>(h: &Matrix<T>) -> Result<(Matrix<T>, usize), NumericsError> {
    let dim = T::from_usize(h.rows()).unwrap();
    let half = T::lit(0.5);
    let mut z = h.clone();
    for it in 1..=SIGN_MAX_ITERATIONS {
        let inv = z.inverse().map_err(|_| NumericsError::NotStabilizable)?;
        let det = z.determinant()?.abs();
        let c = if det > T::zero() && det.is_finite() {
            det.powf(T::one() / dim)
        } else {
            T::one()
        };
        let next = (&z.scale(T::one() / c) + &inv.scale(c)).scale(half);
        if !next.is_finite() {
            return Err(NumericsError::NotStabilizable);
        }
        let delta = (&next - &z).norm1();
        let done = delta <= T::lit(1e2) * T::epsilon() * next.norm1();
        let near = delta <= T::lit(1e-6) * next.norm1();
        z = next;
        if done {
            return Ok((z, it));
        }
        // once close, an unscaled step or two finish quadratic convergence
        if near {
            for extra in 1..=3 {
                let inv = z.inverse().map_err(|_| NumericsError::NotStabilizable)?;
                let next = (&z + &inv).scale(half);
                let delta = (&next - &z).norm1();
                z = next;
                if delta <= T::lit(1e2) * T::epsilon() * z.norm1() {
                    return Ok((z, it + extra));
                }
            }
            return Ok((z, it + 3));
        }
    }
    Err(NumericsError::NoConvergence { iterations: SIGN_MAX_ITERATIONS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::eigenvalues;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[[f64; 1]]) -> Matrix<f64> {
        Matrix::from_f64(rows)
    }

    #[test]
    fn scalar_unstable_plant() {
        // 2p − p² + 1 = 0, stabilizing root 1 + √2
        let prob = CareProblem::new(m(&[[1.0]]), m(&[[1.0]]), m(&[[1.0]]), m(&[[1.0]])).unwrap();
        let sol = solve_care(&prob).unwrap();
        let expect = 1.0 + 2f64.sqrt();
        assert!((sol.p[(0, 0)] - expect).abs() < 1e-12);
        assert!((sol.k[(0, 0)] - expect).abs() < 1e-12);
        assert!((1.0 - sol.k[(0, 0)] + 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn stable_plant_with_zero_weight() {
        let prob = CareProblem::new(m(&[[-1.0]]), m(&[[1.0]]), m(&[[0.0]]), m(&[[1.0]])).unwrap();
        let sol = solve_care(&prob).unwrap();
        assert!(sol.p[(0, 0)].abs() < 1e-12);
        assert!(sol.k[(0, 0)].abs() < 1e-12);
    }

    #[test]
    fn mismatched_primary_pair() {
        let a = Matrix::from_f64(&[[0.0, 2.0], [-2.0, -3.0]]);
        let b = Matrix::from_f64(&[[0.0], [1.0]]);
        let q = Matrix::diag(&[10.0, 10.0]);
        let prob = CareProblem::new(a.clone(), b.clone(), q, m(&[[1.0]])).unwrap();
        let sol = solve_care(&prob).unwrap();
        let pn = sol.p.norm_inf();
        assert!(sol.residual < 1e-8 * (1.0 + pn * pn));
        assert!(sol.p.is_symmetric(1e-12));
        assert!(is_hurwitz(&(&a - &(&b * &sol.k))).unwrap());
    }

    #[test]
    fn double_integrator_gain() {
        // known: K = [√q1, √(q2 + 2√q1)] for R = 1
        let a = Matrix::from_f64(&[[0.0, 1.0], [0.0, 0.0]]);
        let b = Matrix::from_f64(&[[0.0], [1.0]]);
        let prob = CareProblem::new(a, b, Matrix::diag(&[10.0, 10.0]), m(&[[1.0]])).unwrap();
        let k = solve_care(&prob).unwrap().k;
        assert!((k[(0, 0)] - 10f64.sqrt()).abs() < 1e-10);
        assert!((k[(0, 1)] - (10.0 + 2.0 * 10f64.sqrt()).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn uncontrollable_unstable_mode_is_rejected() {
        let a = Matrix::from_f64(&[[1.0, 0.0], [0.0, -1.0]]);
        let b = Matrix::from_f64(&[[0.0], [1.0]]);
        let prob = CareProblem::new(a, b, Matrix::identity(2), m(&[[1.0]])).unwrap();
        assert!(solve_care(&prob).is_err());
    }

    #[test]
    fn imaginary_axis_hamiltonian_is_rejected() {
        let prob = CareProblem::new(m(&[[0.0]]), m(&[[1.0]]), m(&[[0.0]]), m(&[[1.0]])).unwrap();
        assert!(matches!(solve_care(&prob), Err(NumericsError::NotStabilizable)));
    }

    #[test]
    fn invalid_weights() {
        let a = Matrix::from_f64(&[[0.0, 1.0], [0.0, 0.0]]);
        let b = Matrix::from_f64(&[[0.0], [1.0]]);
        let q = Matrix::from_f64(&[[1.0, 2.0], [0.0, 1.0]]);
        assert!(CareProblem::new(a.clone(), b.clone(), q, m(&[[1.0]])).is_err());
        assert!(CareProblem::new(a.clone(), b.clone(), Matrix::identity(2), m(&[[-1.0]])).is_err());
        assert!(CareProblem::new(a, b, Matrix::identity(3), m(&[[1.0]])).is_err());
    }

    #[test]
    fn lyapunov_equation() {
        let a = Matrix::<f64>::from_f64(&[[-1.0, 2.0], [0.0, -3.0]]);
        let c = Matrix::from_f64(&[[2.0, 1.0], [1.0, 4.0]]);
        let x = solve_lyapunov(&a, &c).unwrap();
        let res = &(&(&a.transpose() * &x) + &(&x * &a)) + &c;
        assert!(res.norm_inf() < 1e-12);
        assert!(solve_lyapunov(&Matrix::from_f64(&[[1.0, 0.0], [0.0, -1.0]]), &c).is_err());
    }

    #[test]
    fn random_stabilizable_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut solved = 0;
        while solved < 100 {
            let n = rng.gen_range(1..=4);
            let mm = rng.gen_range(1..=2);
            let a = Matrix::new(n, n, (0..n * n).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
            let b = Matrix::new(n, mm, (0..n * mm).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
            let c = Matrix::new(n, n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let q = &(&c.transpose() * &c) + &Matrix::identity(n).scale(0.1);
            let r = Matrix::diag(&(0..mm).map(|_| rng.gen_range(0.5..2.0)).collect::<Vec<_>>());
            let prob = CareProblem::new(a.clone(), b.clone(), q, r).unwrap();
            let sol = solve_care(&prob).unwrap_or_else(|e| panic!("{e}: A={a:?} B={b:?}"));
            let pn = sol.p.norm_inf();
            assert!(sol.residual < 1e-8 * (1.0 + pn * pn), "residual {}", sol.residual);
            let acl = &a - &(&b * &sol.k);
            assert!(eigenvalues(&acl).unwrap().iter().all(|l| l.re < 0.0));
            solved += 1;
        }
    }
}
