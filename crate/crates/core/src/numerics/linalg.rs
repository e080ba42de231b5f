use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::Serialize;

use super::NumericsError;
use crate::Scalar;

/// Dense real vector.
///
/// Plant states, inputs and disturbances are all `Vector`s. An empty vector is
/// allowed so that laws without internal dynamics can report a zero-length
/// internal state.
#[derive(Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct Vector<T> {
    data: Vec<T>,
}

impl<T: Scalar> Vector<T> {
    pub fn new(data: Vec<T>) -> Self {
        Self { data }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: vec![T::zero(); n],
        }
    }

    pub fn from_slice(values: &[T]) -> Self {
        Self {
            data: values.to_vec(),
        }
    }

    pub fn from_f64(values: &[f64]) -> Self {
        Self {
            data: values.iter().map(|&v| T::lit(v)).collect(),
        }
    }

    pub fn scalar(v: T) -> Self {
        Self { data: vec![v] }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    pub fn norm_inf(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &v| if v.abs() > acc { v.abs() } else { acc })
    }

    pub fn norm1(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc + v.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: T, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "axpy: dimension mismatch");
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + alpha * b)
                .collect(),
        }
    }

    pub fn segment(&self, start: usize, len: usize) -> Self {
        Self {
            data: self.data[start..start + len].to_vec(),
        }
    }

    pub fn concat(parts: &[&Self]) -> Self {
        let mut data = Vec::with_capacity(parts.iter().map(|p| p.dim()).sum());
        for p in parts {
            data.extend_from_slice(&p.data);
        }
        Self { data }
    }

    pub fn check_dim(&self, op: &'static str, expected: usize) -> Result<(), NumericsError> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(NumericsError::dims(op, expected, self.dim()))
        }
    }
}

impl<T: Scalar> From<Vec<T>> for Vector<T> {
    fn from(data: Vec<T>) -> Self {
        Self { data }
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[i]
    }
}

impl<T: Scalar> Add for &Vector<T> {
    type Output = Vector<T>;
    fn add(self, rhs: Self) -> Vector<T> {
        self.axpy(T::one(), rhs)
    }
}

impl<T: Scalar> Sub for &Vector<T> {
    type Output = Vector<T>;
    fn sub(self, rhs: Self) -> Vector<T> {
        self.axpy(-T::one(), rhs)
    }
}

impl<T: Scalar> Add for Vector<T> {
    type Output = Vector<T>;
    fn add(self, rhs: Self) -> Vector<T> {
        &self + &rhs
    }
}

impl<T: Scalar> Sub for Vector<T> {
    type Output = Vector<T>;
    fn sub(self, rhs: Self) -> Vector<T> {
        &self - &rhs
    }
}

impl<T: Scalar> AddAssign<&Vector<T>> for Vector<T> {
    fn add_assign(&mut self, rhs: &Vector<T>) {
        assert_eq!(self.dim(), rhs.dim(), "add_assign: dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl<T: Scalar> SubAssign<&Vector<T>> for Vector<T> {
    fn sub_assign(&mut self, rhs: &Vector<T>) {
        assert_eq!(self.dim(), rhs.dim(), "sub_assign: dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl<T: Scalar> Mul<T> for &Vector<T> {
    type Output = Vector<T>;
    fn mul(self, rhs: T) -> Vector<T> {
        self.map(|v| v * rhs)
    }
}

impl<T: Scalar> Mul<T> for Vector<T> {
    type Output = Vector<T>;
    fn mul(self, rhs: T) -> Vector<T> {
        self.map(|v| v * rhs)
    }
}

impl<T: Scalar> Neg for &Vector<T> {
    type Output = Vector<T>;
    fn neg(self) -> Vector<T> {
        self.map(|v| -v)
    }
}

impl<T: fmt::Debug> fmt::Debug for Vector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.iter()).finish()
    }
}

/// Dense row-major real matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, NumericsError> {
        if rows * cols != data.len() {
            return Err(NumericsError::dims(
                "Matrix::new",
                format!("{} entries", rows * cols),
                data.len(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows<const C: usize>(rows: &[[T; C]]) -> Self {
        Self {
            rows: rows.len(),
            cols: C,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn from_f64<const C: usize>(rows: &[[f64; C]]) -> Self {
        Self {
            rows: rows.len(),
            cols: C,
            data: rows.iter().flat_map(|r| r.iter().map(|&v| T::lit(v))).collect(),
        }
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Column matrix from a vector.
    pub fn column(v: &Vector<T>) -> Self {
        Self {
            rows: v.dim(),
            cols: 1,
            data: v.as_slice().to_vec(),
        }
    }

    /// Row matrix from a vector.
    pub fn row(v: &Vector<T>) -> Self {
        Self {
            rows: 1,
            cols: v.dim(),
            data: v.as_slice().to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn col(&self, j: usize) -> Vector<T> {
        Vector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn row_vector(&self, i: usize) -> Vector<T> {
        Vector::from_slice(&self.data[i * self.cols..(i + 1) * self.cols])
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> T {
        self.data
            .chunks(self.cols.max(1))
            .map(|r| r.iter().fold(T::zero(), |acc, &v| acc + v.abs()))
            .fold(T::zero(), T::max)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> T {
        self.transpose().norm_inf()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    pub fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        let mut s = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                s[(i, j)] = half * (self[(i, j)] + self[(j, i)]);
            }
        }
        s
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, NumericsError> {
        if self.cols != rhs.rows {
            return Err(NumericsError::dims(
                "matmul",
                format!("{} rows", self.cols),
                rhs.rows,
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn try_mul_vec(&self, v: &Vector<T>) -> Result<Vector<T>, NumericsError> {
        if self.cols != v.dim() {
            return Err(NumericsError::dims("matvec", self.cols, v.dim()));
        }
        Ok(Vector::new(
            self.data
                .chunks(self.cols.max(1))
                .take(self.rows)
                .map(|r| {
                    r.iter()
                        .zip(v.iter())
                        .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
                })
                .collect(),
        ))
    }

    fn zip_with(&self, rhs: &Self, op: &'static str, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "{op}: shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `[self rhs]`
    pub fn hstack(&self, rhs: &Self) -> Result<Self, NumericsError> {
        if self.rows != rhs.rows {
            return Err(NumericsError::dims("hstack", self.rows, rhs.rows));
        }
        let mut out = Self::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
            for j in 0..rhs.cols {
                out[(i, self.cols + j)] = rhs[(i, j)];
            }
        }
        Ok(out)
    }

    /// `[self; rhs]`
    pub fn vstack(&self, rhs: &Self) -> Result<Self, NumericsError> {
        if self.cols != rhs.cols {
            return Err(NumericsError::dims("vstack", self.cols, rhs.cols));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Ok(Self {
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    /// LU factorization with partial pivoting, returned packed with the row
    /// permutation and its sign.
    fn lu(&self) -> Result<(Self, Vec<usize>, T), NumericsError> {
        if !self.is_square() {
            return Err(NumericsError::dims("lu", "square", format!("{:?}", self.shape())));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let tiny = T::epsilon() * (T::one() + self.max_abs());
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[(i, k)].abs()))
                .fold((k, -T::one()), |best, c| if c.1 > best.1 { c } else { best });
            if pmax <= tiny * T::lit(1e-3) {
                return Err(NumericsError::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in (k + 1)..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                if f != T::zero() {
                    for j in (k + 1)..n {
                        let akj = a[(k, j)];
                        a[(i, j)] -= f * akj;
                    }
                }
            }
        }
        Ok((a, perm, sign))
    }

    fn lu_solve_in_place(lu: &Self, perm: &[usize], b: &[T]) -> Vec<T> {
        let n = lu.rows;
        let mut y: Vec<T> = perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let yk = y[k];
                y[i] -= lu[(i, k)] * yk;
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let yk = y[k];
                y[i] -= lu[(i, k)] * yk;
            }
            y[i] /= lu[(i, i)];
        }
        y
    }

    pub fn solve_vec(&self, b: &Vector<T>) -> Result<Vector<T>, NumericsError> {
        b.check_dim("solve_vec", self.rows)?;
        let (lu, perm, _) = self.lu()?;
        Ok(Vector::new(Self::lu_solve_in_place(&lu, &perm, b.as_slice())))
    }

    /// Solves `self * X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self, NumericsError> {
        if rhs.rows != self.rows {
            return Err(NumericsError::dims("solve", self.rows, rhs.rows));
        }
        let (lu, perm, _) = self.lu()?;
        let mut out = Self::zeros(self.cols, rhs.cols);
        for j in 0..rhs.cols {
            let col = rhs.col(j);
            let x = Self::lu_solve_in_place(&lu, &perm, col.as_slice());
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Self, NumericsError> {
        self.solve(&Self::identity(self.rows))
    }

    pub fn determinant(&self) -> Result<T, NumericsError> {
        match self.lu() {
            Ok((lu, _, sign)) => Ok((0..self.rows).fold(sign, |acc, i| acc * lu[(i, i)])),
            Err(NumericsError::Singular) => Ok(T::zero()),
            Err(e) => Err(e),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.try_mul(rhs).expect("matmul: shape mismatch")
    }
}

impl<T: Scalar> Mul<&Vector<T>> for &Matrix<T> {
    type Output = Vector<T>;
    fn mul(self, rhs: &Vector<T>) -> Vector<T> {
        self.try_mul_vec(rhs).expect("matvec: shape mismatch")
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|v| -v)
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.data.chunks(self.cols.max(1)))
            .finish()
    }
}

impl<T: Scalar + Serialize> Serialize for Matrix<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}
