use super::{G2Structure, SymTensor2};
use crate::error::{Error, Result};
use crate::exterior::{form_inner, hodge, wedge, KForm, Vector};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

fn expect_shape<S: Scalar>(a: &KForm<S>, degree: usize) -> Result<()> {
    if a.dim() != 7 || a.degree() != degree {
        return Err(Error::Contract(format!(
            "expected a {degree}-form on R^7, got degree {} in dimension {}",
            a.degree(),
            a.dim()
        )));
    }
    Ok(())
}

/// (a₇, a₁₄) with a₇ = (a + ⋆(φ∧a))/3 and a₁₄ = (2a − ⋆(φ∧a))/3.
pub fn project_lambda2<S: Scalar>(
    g2: &G2Structure<S>,
    a: &KForm<S>,
) -> Result<(KForm<S>, KForm<S>)> {
    expect_shape(a, 2)?;
    let s = hodge(&wedge(g2.phi(), a)?);
    let third = S::from_ratio(1, 3);
    let a7 = (a + &s).scale(&third);
    let a14 = (&a.scale(&S::from_i64(2)) - &s).scale(&third);
    Ok((a7, a14))
}

/// (a₁, a₇, a₂₇) with a₁ ∈ span φ, a₇ = W⌟ψ and a₂₇ ∈ i(S²₀).
///
/// φ and the e_i⌟ψ are mutually orthogonal with |φ|² = 7 and
/// |e_i⌟ψ|² = 4, so their coefficients are read off by inner products. The
/// remainder is then solved for exactly in i(S²₀).
pub fn project_lambda3<S: Scalar>(
    g2: &G2Structure<S>,
    a: &KForm<S>,
) -> Result<(KForm<S>, KForm<S>, KForm<S>)> {
    expect_shape(a, 3)?;
    let a1 = g2.phi().scale(&(form_inner(a, g2.phi())? / S::from_i64(7)));
    let mut a7 = KForm::zero(7, 3);
    for i in 0..7 {
        let b = g2.psi().interior(&Vector::basis(7, i))?;
        let w = form_inner(a, &b)? / S::from_i64(4);
        a7 = &a7 + &b.scale(&w);
    }
    let a27 = &(a - &a1) - &a7;
    let h = i_map_inverse(g2, &a27)?;
    if !h.trace().is_zero_within(1e-9) {
        return Err(Error::Inconsistent(
            "Λ³₂₇ remainder has a trace part".into(),
        ));
    }
    Ok((a1, a7, a27))
}

/// i(h) = Σ ε_{ikl} h_{ij} e^j∧e^k∧e^l.
pub fn i_map<S: Scalar>(g2: &G2Structure<S>, h: &SymTensor2<S>) -> KForm<S> {
    let mut out = KForm::zero(7, 3);
    let two = S::from_i64(2);
    for i in 0..7 {
        for k in 0..7 {
            for l in k + 1..7 {
                let e = g2.eps(i, k, l);
                if e == 0 {
                    continue;
                }
                for j in 0..7 {
                    let hij = h.get(i, j);
                    if hij.is_zero() || j == k || j == l {
                        continue;
                    }
                    let c = two.clone() * S::from_i64(e as i64) * hij;
                    out.add_term(&[j, k, l], c);
                }
            }
        }
    }
    out
}

/// i applied to a raw matrix; rejects non-symmetric input.
pub fn i_map_matrix<S: Scalar>(g2: &G2Structure<S>, h: &Matrix<S>) -> Result<KForm<S>> {
    Ok(i_map(g2, &SymTensor2::new(h.clone())?))
}

/// The symmetric h with i(h) = a, for a ∈ Λ³₁ ⊕ Λ³₂₇.
///
/// Uses j(a)_{ab} = ⋆((e_a⌟φ)∧(e_b⌟φ)∧a), which satisfies j(φ) = 6g,
/// j(i(h₀)) = 8h₀ for trace-free h₀, and vanishes on Λ³₇.
pub fn i_map_inverse<S: Scalar>(g2: &G2Structure<S>, a: &KForm<S>) -> Result<SymTensor2<S>> {
    expect_shape(a, 3)?;
    let contractions: Vec<KForm<S>> = (0..7)
        .map(|i| g2.phi().interior(&Vector::basis(7, i)))
        .collect::<Result<_>>()?;
    let mut j = Matrix::zeros(7, 7);
    for p in 0..7 {
        for q in p..7 {
            let top = wedge(&wedge(&contractions[p], &contractions[q])?, a)?.top_coeff()?;
            j[(p, q)] = top.clone();
            j[(q, p)] = top;
        }
    }
    let s = form_inner(a, g2.phi())?;
    let id = Matrix::identity(7);
    let h0 = j
        .sub(&id.scale(&(S::from_i64(6) * s.clone() / S::from_i64(7))))
        .scale(&S::from_ratio(1, 8));
    let h = SymTensor2::new(h0.add(&id.scale(&(s / S::from_i64(42)))))?;
    let residual = &i_map(g2, &h) - a;
    if !residual.is_zero_within(1e-9 * (1.0 + a.max_abs())) {
        return Err(Error::Precondition(format!(
            "3-form is not in the image of i (residual {:.3e})",
            residual.max_abs()
        )));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{restrict, OrientedPlane};
    use crate::scalar::Rational;

    type Q = Rational;

    fn g() -> G2Structure<Q> {
        G2Structure::model()
    }

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    #[test]
    fn lambda2_examples() {
        let g = g();
        let a = g.phi().interior(&Vector::basis(7, 0)).unwrap();
        let (a7, a14) = project_lambda2(&g, &a).unwrap();
        assert_eq!(a7, a);
        assert!(a14.is_zero_within(0.0));
        let b = KForm::<Q>::from_shorthand(7, &[("45", 1), ("67", -1)]);
        let (b7, b14) = project_lambda2(&g, &b).unwrap();
        assert!(b7.is_zero_within(0.0));
        assert_eq!(b14, b);
        let (z7, z14) = project_lambda2(&g, &KForm::zero(7, 2)).unwrap();
        assert!(z7.is_zero_within(0.0) && z14.is_zero_within(0.0));
    }

    #[test]
    fn lambda7_basis_is_orthogonal() {
        let g = g();
        for i in 0..7 {
            let a = g.psi().interior(&Vector::basis(7, i)).unwrap();
            assert_eq!(form_inner(&a, g.phi()).unwrap(), q(0));
            for j in 0..7 {
                let b = g.psi().interior(&Vector::basis(7, j)).unwrap();
                assert_eq!(form_inner(&a, &b).unwrap(), q(if i == j { 4 } else { 0 }));
            }
        }
    }

    #[test]
    fn lambda3_examples() {
        let g = g();
        let (p1, p7, p27) = project_lambda3(&g, g.phi()).unwrap();
        assert_eq!(&p1, g.phi());
        assert!(p7.is_zero_within(0.0) && p27.is_zero_within(0.0));
        let b = g.psi().interior(&Vector::basis(7, 0)).unwrap();
        let (b1, b7, b27) = project_lambda3(&g, &b).unwrap();
        assert!(b1.is_zero_within(0.0) && b27.is_zero_within(0.0));
        assert_eq!(b7, b);
        let h = SymTensor2::from_upper(7, |i, j| q((i * 3 + j * 5) as i64 % 7 - 3)).trace_free();
        let ih = i_map(&g, &h);
        let (c1, c7, c27) = project_lambda3(&g, &ih).unwrap();
        assert!(c1.is_zero_within(0.0) && c7.is_zero_within(0.0));
        assert_eq!(c27, ih);
    }

    #[test]
    fn i_of_metric_is_six_phi() {
        let g = g();
        assert_eq!(i_map(&g, &SymTensor2::identity(7)), g.phi().scale(&q(6)));
        assert!(i_map(&g, &SymTensor2::zero(7)).is_zero_within(0.0));
    }

    #[test]
    fn i_of_diagonal_unit() {
        let g = g();
        let mut m = Matrix::<Q>::zeros(7, 7);
        m[(0, 0)] = q(1);
        let expected = KForm::from_shorthand(7, &[("123", 2), ("145", 2), ("167", 2)]);
        assert_eq!(i_map_matrix(&g, &m).unwrap(), expected);
        let recovered = i_map_inverse(&g, &expected).unwrap();
        assert_eq!(recovered.matrix(), &m);
    }

    #[test]
    fn i_rejects_asymmetric() {
        let g = g();
        let mut m = Matrix::<Q>::zeros(7, 7);
        m[(0, 1)] = q(1);
        assert!(matches!(i_map_matrix(&g, &m), Err(Error::NotSymmetric)));
    }

    #[test]
    fn i_inverse_rejects_lambda7() {
        let g = g();
        let b = g.psi().interior(&Vector::basis(7, 2)).unwrap();
        assert!(matches!(i_map_inverse(&g, &b), Err(Error::Precondition(_))));
    }

    /// e₁⌟i(h) restricted to span(e₄..e₇), against the twelve-term display
    /// (grouped by monomial).
    #[test]
    fn e1_contraction_display() {
        let g = g();
        let vals = [
            3, -1, 4, 1, -5, 9, 2, -6, 5, 3, 5, -8, 9, 7, -9, 3, 2, 3, 8, -4, 6, 2, 6, 4, -3, 3, 8,
            3,
        ];
        let mut it = vals.iter();
        let h = SymTensor2::from_upper(7, |_, _| q(*it.next().unwrap()));
        let x = |i: usize, j: usize| h.get(i - 1, j - 1);
        let two = q(2);
        let p = OrientedPlane::coordinate(7, &[3, 4, 5, 6]).unwrap();
        let got = restrict(&i_map(&g, &h).interior(&Vector::basis(7, 0)).unwrap(), &p).unwrap();
        let terms = [
            (
                "45",
                (x(1, 1) + two.clone() * x(4, 4)) + (x(1, 1) + two.clone() * x(5, 5)),
            ),
            (
                "67",
                (x(1, 1) + two.clone() * x(6, 6)) + (x(1, 1) + two.clone() * x(7, 7)),
            ),
            (
                "46",
                (x(1, 2) - two.clone() * x(4, 7)) + (x(1, 2) + two.clone() * x(5, 6)),
            ),
            (
                "57",
                (-x(1, 2) + two.clone() * x(5, 6)) - (x(1, 2) + two.clone() * x(4, 7)),
            ),
            (
                "47",
                (-x(1, 3) + two.clone() * x(4, 6)) - (x(1, 3) - two.clone() * x(5, 7)),
            ),
            (
                "56",
                (-x(1, 3) - two.clone() * x(5, 7)) - (x(1, 3) + two.clone() * x(4, 6)),
            ),
        ];
        let expected = terms.into_iter().fold(KForm::zero(4, 2), |acc, (s, c)| {
            let idx: Vec<usize> = s
                .chars()
                .map(|ch| ch.to_digit(10).unwrap() as usize - 4)
                .collect();
            &acc + &KForm::monomial(4, &idx, c)
        });
        assert_eq!(got, expected);
    }
}
