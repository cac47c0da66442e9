use crate::error::{Error, Result};
use crate::exterior::{OrientedPlane, Vector};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A symmetric bilinear form on Rⁿ, stored as a full matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor2<S>(Matrix<S>);

impl<S: Scalar> SymTensor2<S> {
    /// Rejects non-square or non-symmetric input (exactly in exact mode,
    /// to `1e-12` relative in float mode).
    pub fn new(m: Matrix<S>) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                got: m.cols(),
            });
        }
        let tol = match S::MODE {
            crate::scalar::ScalarMode::Exact => 0.0,
            crate::scalar::ScalarMode::Float => 1e-12 * (1.0 + m.max_abs()),
        };
        if !m.is_symmetric(tol) {
            return Err(Error::NotSymmetric);
        }
        Ok(Self(m))
    }

    /// Builds h from its upper triangle via `f(i, j)` for i ≤ j.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(j, i)] = v.clone();
                m[(i, j)] = v;
            }
        }
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn zero(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.0[(i, j)].clone()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.0
    }

    pub fn trace(&self) -> S {
        self.0.trace()
    }

    /// h − (tr h / n) g.
    pub fn trace_free(&self) -> Self {
        let n = self.dim();
        let t = self.trace() / S::from_i64(n as i64);
        Self(self.0.sub(&Matrix::identity(n).scale(&t)))
    }

    /// h(u, v).
    pub fn eval(&self, u: &Vector<S>, v: &Vector<S>) -> S {
        u.dot(&Vector::new(self.0.mul_vec(v.components())))
    }

    /// Trace of h restricted to a plane.
    pub fn restricted_trace(&self, p: &OrientedPlane<S>) -> S {
        p.onb()
            .iter()
            .fold(S::zero(), |acc, u| acc + self.eval(u, u))
    }

    pub fn scale(&self, s: &S) -> Self {
        Self(self.0.scale(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.sub(&other.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SymTensor2<T> {
        let n = self.dim();
        SymTensor2(Matrix::from_fn(n, n, |i, j| f(&self.0[(i, j)])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn rejects_asymmetric() {
        let mut m = Matrix::<Rational>::zeros(7, 7);
        m[(0, 1)] = Rational::from_i64(1);
        assert!(matches!(SymTensor2::new(m), Err(Error::NotSymmetric)));
    }

    #[test]
    fn trace_free_part() {
        let h =
            SymTensor2::<Rational>::from_upper(7, |i, j| Rational::from_i64((i + 2 * j) as i64));
        assert!(h.trace_free().trace() == Rational::from_i64(0));
        let p = OrientedPlane::coordinate(7, &[3, 4, 5, 6]).unwrap();
        assert_eq!(h.restricted_trace(&p), Rational::from_i64(9 + 12 + 15 + 18));
    }
}
