//! Exterior algebra over Rⁿ (n ≤ 8) with the Euclidean metric and the
//! orientation e¹∧…∧eⁿ.
//!
//! Forms are dense coefficient vectors over strictly increasing multi-indices
//! in lexicographic order. Orthonormal monomials e^{i₁…i_k} have unit norm
//! (no 1/k! weighting). Indices are 0-based in the API; the shorthand
//! constructor [`KForm::from_shorthand`] reads 1-based digit strings such as
//! `"123"` for e¹∧e²∧e³.

mod basis;
mod plane;

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use basis::{binomial, MAX_DIM};
pub use plane::{restrict, OrientedPlane};

pub(crate) use basis::{indices, merge_odd, sort_with_parity, table};

#[derive(Debug, Clone, PartialEq)]
pub struct Vector<S>(Vec<S>);

impl<S: Scalar> Vector<S> {
    pub fn new(components: Vec<S>) -> Self {
        Self(components)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![S::zero(); dim])
    }

    /// The standard basis vector e_i (0-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = S::one();
        v
    }

    pub fn from_i64(components: &[i64]) -> Self {
        Self(components.iter().map(|&c| S::from_i64(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[S] {
        &self.0
    }

    pub fn into_components(self) -> Vec<S> {
        self.0
    }

    pub fn dot(&self, other: &Self) -> S {
        crate::linalg::dot(&self.0, &other.0)
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn scale(&self, s: &S) -> Self {
        Self(self.0.iter().map(|x| x.clone() * s.clone()).collect())
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.0.iter().all(|x| x.is_zero_within(tol))
    }

    pub fn max_abs(&self) -> f64 {
        crate::scalar::max_abs_f64(&self.0)
    }

    /// The metric dual 1-form.
    pub fn flat(&self) -> KForm<S> {
        KForm {
            dim: self.dim(),
            degree: 1,
            coeffs: self.0.clone(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Vector<T> {
        Vector(self.0.iter().map(f).collect())
    }
}

impl<S: Scalar> Add for &Vector<S> {
    type Output = Vector<S>;

    fn add(self, rhs: Self) -> Vector<S> {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector(
            self.0
                .iter()
                .zip(&rhs.0)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }
}

impl<S: Scalar> Sub for &Vector<S> {
    type Output = Vector<S>;

    fn sub(self, rhs: Self) -> Vector<S> {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector(
            self.0
                .iter()
                .zip(&rhs.0)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }
}

impl<S: Scalar> Neg for &Vector<S> {
    type Output = Vector<S>;

    fn neg(self) -> Vector<S> {
        Vector(self.0.iter().map(|a| -a.clone()).collect())
    }
}

/// A degree-k alternating form on Rⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm<S> {
    dim: usize,
    degree: usize,
    coeffs: Vec<S>,
}

fn check_shape(dim: usize, degree: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::Contract(format!(
            "dimension {dim} outside 1..={MAX_DIM}"
        )));
    }
    if degree > dim {
        return Err(Error::DegreeOutOfRange { degree, dim });
    }
    Ok(())
}

impl<S: Scalar> KForm<S> {
    /// # Panics
    /// If `dim` is outside `1..=8` or `degree > dim`.
    pub fn zero(dim: usize, degree: usize) -> Self {
        check_shape(dim, degree).expect("invalid form shape");
        Self {
            dim,
            degree,
            coeffs: vec![S::zero(); binomial(dim, degree)],
        }
    }

    pub fn try_new(dim: usize, degree: usize, coeffs: Vec<S>) -> Result<Self> {
        check_shape(dim, degree)?;
        if coeffs.len() != binomial(dim, degree) {
            return Err(Error::DimensionMismatch {
                expected: binomial(dim, degree),
                got: coeffs.len(),
            });
        }
        Ok(Self {
            dim,
            degree,
            coeffs,
        })
    }

    pub fn scalar(dim: usize, value: S) -> Self {
        let mut f = Self::zero(dim, 0);
        f.coeffs[0] = value;
        f
    }

    pub fn volume(dim: usize) -> Self {
        let mut f = Self::zero(dim, dim);
        f.coeffs[0] = S::one();
        f
    }

    /// `c · e^{i₁}∧…∧e^{i_k}` for 0-based indices in any order; the sorting
    /// sign is applied and a repeated index gives zero.
    pub fn monomial(dim: usize, idx: &[usize], c: S) -> Self {
        let mut f = Self::zero(dim, idx.len());
        assert!(idx.iter().all(|&i| i < dim), "index out of range");
        if let Some((mask, odd)) = sort_with_parity(idx) {
            let p = table(dim, idx.len()).position(mask);
            f.coeffs[p] = if odd { -c } else { c };
        }
        f
    }

    /// Sum of monomials written in 1-based digit shorthand, e.g.
    /// `[("123", 1), ("145", 1)]` is e¹²³ + e¹⁴⁵.
    ///
    /// # Panics
    /// On malformed shorthand or inconsistent degrees.
    pub fn from_shorthand(dim: usize, terms: &[(&str, i64)]) -> Self {
        let degree = terms.first().map_or(0, |(s, _)| s.len());
        let mut f = Self::zero(dim, degree);
        for (s, c) in terms {
            let idx: Vec<usize> = s
                .chars()
                .map(|ch| ch.to_digit(10).expect("shorthand digit") as usize - 1)
                .collect();
            assert_eq!(idx.len(), degree, "mixed degrees in shorthand");
            f = &f + &Self::monomial(dim, &idx, S::from_i64(*c));
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of the monomial with the given (any-order) indices,
    /// including the sorting sign.
    pub fn get(&self, idx: &[usize]) -> S {
        assert_eq!(idx.len(), self.degree, "index count must equal degree");
        match sort_with_parity(idx) {
            None => S::zero(),
            Some((mask, odd)) => {
                let c = self.coeffs[table(self.dim, self.degree).position(mask)].clone();
                if odd {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// Nonzero terms as (sorted 0-based indices, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &S)> + '_ {
        table(self.dim, self.degree)
            .masks()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&m, c)| (indices(m).collect(), c))
    }

    pub(crate) fn mask_terms(&self) -> impl Iterator<Item = (u16, &S)> + '_ {
        table(self.dim, self.degree)
            .masks()
            .iter()
            .copied()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
    }

    /// Adds `c · e^{idx}` in place (any index order; repeated indices add
    /// nothing).
    pub fn add_term(&mut self, idx: &[usize], c: S) {
        if let Some((mask, odd)) = sort_with_parity(idx) {
            self.add_at_mask(mask, if odd { -c } else { c });
        }
    }

    pub(crate) fn add_at_mask(&mut self, mask: u16, value: S) {
        let p = table(self.dim, self.degree).position(mask);
        self.coeffs[p] += value;
    }

    pub fn scale(&self, s: &S) -> Self {
        Self {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_within(tol))
    }

    pub fn max_abs(&self) -> f64 {
        crate::scalar::max_abs_f64(&self.coeffs)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self.degree == other.degree
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> KForm<T> {
        KForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> KForm<f64> {
        self.map(Scalar::to_f64)
    }

    /// The vector metric-dual to a 1-form.
    pub fn sharp(&self) -> Result<Vector<S>> {
        if self.degree != 1 {
            return Err(Error::Contract(format!("sharp of a {}-form", self.degree)));
        }
        Ok(Vector(self.coeffs.clone()))
    }

    /// The single coefficient of a degree-0 or top-degree form.
    pub fn top_coeff(&self) -> Result<S> {
        if self.coeffs.len() != 1 {
            return Err(Error::Contract(format!(
                "form of degree {} in dimension {} has no single coefficient",
                self.degree, self.dim
            )));
        }
        Ok(self.coeffs[0].clone())
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        wedge(self, other)
    }

    pub fn interior(&self, v: &Vector<S>) -> Result<Self> {
        interior(v, self)
    }

    pub fn hodge(&self) -> Self {
        hodge(self)
    }

    pub fn inner(&self, other: &Self) -> Result<S> {
        form_inner(self, other)
    }

    pub fn norm_sq(&self) -> S {
        crate::linalg::dot(&self.coeffs, &self.coeffs)
    }

    /// α(v₁,…,v_k).
    pub fn evaluate(&self, vs: &[Vector<S>]) -> Result<S> {
        if vs.len() != self.degree {
            return Err(Error::Contract(format!(
                "evaluating a {}-form on {} vectors",
                self.degree,
                vs.len()
            )));
        }
        let mut f = self.clone();
        for v in vs {
            f = interior(v, &f)?;
        }
        f.top_coeff()
    }
}

impl<S: Scalar> Add for &KForm<S> {
    type Output = KForm<S>;

    /// # Panics
    /// On shape mismatch.
    fn add(self, rhs: Self) -> KForm<S> {
        assert_eq!(
            (self.dim, self.degree),
            (rhs.dim, rhs.degree),
            "form shape mismatch"
        );
        KForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Sub for &KForm<S> {
    type Output = KForm<S>;

    /// # Panics
    /// On shape mismatch.
    fn sub(self, rhs: Self) -> KForm<S> {
        assert_eq!(
            (self.dim, self.degree),
            (rhs.dim, rhs.degree),
            "form shape mismatch"
        );
        KForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Neg for &KForm<S> {
    type Output = KForm<S>;

    fn neg(self) -> KForm<S> {
        self.scale(&-S::one())
    }
}

impl<S: Scalar> fmt::Display for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let label: String = idx.iter().map(|i| (i + 1).to_string()).collect();
            if label.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})e{label}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

pub fn wedge<S: Scalar>(a: &KForm<S>, b: &KForm<S>) -> Result<KForm<S>> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    let degree = a.degree + b.degree;
    if degree > a.dim {
        return Err(Error::DegreeOutOfRange { degree, dim: a.dim });
    }
    let mut out = KForm::zero(a.dim, degree);
    for (ma, ca) in a.mask_terms() {
        for (mb, cb) in b.mask_terms() {
            if ma & mb != 0 {
                continue;
            }
            let prod = ca.clone() * cb.clone();
            out.add_at_mask(ma | mb, if merge_odd(ma, mb) { -prod } else { prod });
        }
    }
    Ok(out)
}

/// Wedge of a nonempty list of forms, left to right.
pub fn wedge_all<S: Scalar>(forms: &[KForm<S>]) -> Result<KForm<S>> {
    let (first, rest) = forms
        .split_first()
        .ok_or_else(|| Error::Contract("wedge of an empty list".into()))?;
    rest.iter().try_fold(first.clone(), |acc, f| wedge(&acc, f))
}

/// Contraction in the first slot: (v⌟α)(x₂,…,x_k) = α(v,x₂,…,x_k).
pub fn interior<S: Scalar>(v: &Vector<S>, a: &KForm<S>) -> Result<KForm<S>> {
    if a.degree == 0 {
        return Err(Error::Contract("interior product of a 0-form".into()));
    }
    if v.dim() != a.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: v.dim(),
        });
    }
    let mut out = KForm::zero(a.dim, a.degree - 1);
    for (m, c) in a.mask_terms() {
        for (p, i) in indices(m).enumerate() {
            let vi = &v.components()[i];
            if vi.is_zero() {
                continue;
            }
            let term = vi.clone() * c.clone();
            out.add_at_mask(m & !(1 << i), if p % 2 == 1 { -term } else { term });
        }
    }
    Ok(out)
}

/// Hodge star for the Euclidean metric and orientation e¹∧…∧eⁿ:
/// α∧⋆β = ⟨α,β⟩ vol.
pub fn hodge<S: Scalar>(a: &KForm<S>) -> KForm<S> {
    let full: u16 = (1u16 << a.dim) - 1;
    let mut out = KForm::zero(a.dim, a.dim - a.degree);
    for (m, c) in a.mask_terms() {
        let comp = full & !m;
        out.add_at_mask(
            comp,
            if merge_odd(m, comp) {
                -c.clone()
            } else {
                c.clone()
            },
        );
    }
    out
}

pub fn form_inner<S: Scalar>(a: &KForm<S>, b: &KForm<S>) -> Result<S> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    if a.degree != b.degree {
        return Err(Error::Contract(format!(
            "inner product of forms of degree {} and {}",
            a.degree, b.degree
        )));
    }
    Ok(crate::linalg::dot(&a.coeffs, &b.coeffs))
}

/// v₁∧…∧v_k as a k-form (via the metric); its squared norm is det Gram.
pub fn simple_kvector<S: Scalar>(vs: &[Vector<S>]) -> Result<KForm<S>> {
    let flats: Vec<KForm<S>> = vs.iter().map(Vector::flat).collect();
    wedge_all(&flats)
}

/// The antisymmetric matrix M with M_ij = a(e_i, e_j) of a 2-form.
pub fn two_form_to_matrix<S: Scalar>(a: &KForm<S>) -> Result<crate::linalg::Matrix<S>> {
    if a.degree != 2 {
        return Err(Error::Contract(format!(
            "expected a 2-form, got degree {}",
            a.degree
        )));
    }
    let mut m = crate::linalg::Matrix::zeros(a.dim, a.dim);
    for (idx, c) in a.terms() {
        m[(idx[0], idx[1])] = c.clone();
        m[(idx[1], idx[0])] = -c.clone();
    }
    Ok(m)
}

/// Inverse of [`two_form_to_matrix`]; reads the strictly upper triangle.
pub fn matrix_to_two_form<S: Scalar>(m: &crate::linalg::Matrix<S>) -> Result<KForm<S>> {
    if !m.is_antisymmetric(0.0) && S::MODE == crate::scalar::ScalarMode::Exact {
        return Err(Error::Contract("matrix is not antisymmetric".into()));
    }
    let n = m.rows();
    let mut f = KForm::zero(n, 2);
    for i in 0..n {
        for j in i + 1..n {
            f.add_at_mask((1 << i) | (1 << j), m[(i, j)].clone());
        }
    }
    Ok(f)
}

fn four_dim_two_form<S: Scalar>(a: &KForm<S>) -> Result<()> {
    if a.dim != 4 || a.degree != 2 {
        return Err(Error::Contract(format!(
            "expected a 2-form on R^4, got degree {} in dimension {}",
            a.degree, a.dim
        )));
    }
    Ok(())
}

/// (a + ⋆a)/2 for a 2-form on R⁴.
pub fn self_dual_part<S: Scalar>(a: &KForm<S>) -> Result<KForm<S>> {
    four_dim_two_form(a)?;
    Ok((&hodge(a) + a).scale(&S::from_ratio(1, 2)))
}

/// (a − ⋆a)/2 for a 2-form on R⁴.
pub fn anti_self_dual_part<S: Scalar>(a: &KForm<S>) -> Result<KForm<S>> {
    four_dim_two_form(a)?;
    Ok((a - &hodge(a)).scale(&S::from_ratio(1, 2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::One;

    type Q = Rational;

    fn e(i: usize) -> Vector<Q> {
        Vector::basis(7, i - 1)
    }

    #[test]
    fn wedge_basis_and_errors() {
        let e1 = KForm::<Q>::monomial(7, &[0], Q::one());
        let e2 = KForm::<Q>::monomial(7, &[1], Q::one());
        assert_eq!(
            wedge(&e1, &e2).unwrap(),
            KForm::monomial(7, &[0, 1], Q::one())
        );
        assert_eq!(
            wedge(&e2, &e1).unwrap(),
            KForm::monomial(7, &[0, 1], -Q::one())
        );
        let vol = KForm::<Q>::volume(7);
        assert!(matches!(
            wedge(&vol, &e1),
            Err(Error::DegreeOutOfRange { .. })
        ));
        let other = KForm::<Q>::monomial(6, &[0], Q::one());
        assert!(matches!(
            wedge(&e1, &other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn interior_basis_and_errors() {
        let f = KForm::<Q>::from_shorthand(7, &[("45", 1)]);
        assert_eq!(
            interior(&e(4), &f).unwrap(),
            KForm::from_shorthand(7, &[("5", 1)])
        );
        assert_eq!(
            interior(&e(5), &f).unwrap(),
            KForm::from_shorthand(7, &[("4", -1)])
        );
        let s = KForm::<Q>::scalar(7, Q::one());
        assert!(matches!(interior(&e(1), &s), Err(Error::Contract(_))));
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(hodge(&KForm::<Q>::scalar(7, Q::one())), KForm::volume(7));
        assert_eq!(
            hodge(&KForm::<Q>::from_shorthand(7, &[("4567", 1)])),
            KForm::from_shorthand(7, &[("123", 1)])
        );
    }

    #[test]
    fn inner_examples() {
        let a = KForm::<Q>::from_shorthand(7, &[("12", 1)]);
        assert_eq!(form_inner(&a, &a).unwrap(), Q::one());
        let b = KForm::<Q>::from_shorthand(7, &[("123", 1)]);
        assert!(form_inner(&a, &b).is_err());
    }

    #[test]
    fn simple_kvector_examples() {
        let v = simple_kvector(&[e(1), e(2)]).unwrap();
        assert_eq!(v, KForm::from_shorthand(7, &[("12", 1)]));
        assert!(simple_kvector(&[e(1), e(1)]).unwrap().is_zero_within(0.0));
        let sum = &e(1) + &e(2);
        let w = simple_kvector(&[sum, e(2)]).unwrap();
        assert_eq!(w, KForm::from_shorthand(7, &[("12", 1)]));
        assert_eq!(w.norm_sq(), Q::one());
    }

    #[test]
    fn evaluate_matches_determinant() {
        let f = KForm::<Q>::from_shorthand(7, &[("12", 1)]);
        let v = Vector::from_i64(&[1, 2, 0, 0, 0, 0, 0]);
        let w = Vector::from_i64(&[3, 4, 0, 0, 0, 0, 0]);
        assert_eq!(f.evaluate(&[v, w]).unwrap(), Q::from_i64(-2));
    }

    #[test]
    fn self_dual_split() {
        let a = KForm::<Q>::from_shorthand(4, &[("12", 1)]);
        assert_eq!(
            self_dual_part(&a).unwrap(),
            KForm::from_shorthand(4, &[("12", 1), ("34", 1)]).scale(&Q::from_ratio(1, 2))
        );
        let asd = KForm::<Q>::from_shorthand(4, &[("12", 1), ("34", -1)]);
        assert!(self_dual_part(&asd).unwrap().is_zero_within(0.0));
        assert_eq!(anti_self_dual_part(&asd).unwrap(), asd);
    }

    #[test]
    fn two_form_matrix_round_trip() {
        let a = KForm::<Q>::from_shorthand(7, &[("12", 3), ("57", -2)]);
        let m = two_form_to_matrix(&a).unwrap();
        assert_eq!(m[(4, 6)], Q::from_i64(-2));
        assert_eq!(m[(6, 4)], Q::from_i64(2));
        assert_eq!(matrix_to_two_form(&m).unwrap(), a);
    }

    #[test]
    fn display_is_one_based() {
        let f = KForm::<Q>::from_shorthand(7, &[("123", 1), ("257", -1)]);
        assert_eq!(f.to_string(), "(1)e123 + (-1)e257");
    }
}
