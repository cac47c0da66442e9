use super::{G2Structure, SymTensor2};
use crate::error::{Error, Result};
use crate::exterior::{wedge, KForm, Vector};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, ScalarMode};

/// The infinitesimal action of A ∈ gl(n) on forms, (A·α)(v, …) = −Σ α(…, Av, …);
/// on 1-forms A·eⁱ = −Σ_j A_ij eʲ.
pub fn act_on_form<S: Scalar>(a: &Matrix<S>, f: &KForm<S>) -> Result<KForm<S>> {
    let n = f.dim();
    if a.rows() != n || a.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.rows(),
        });
    }
    let mut out = KForm::zero(n, f.degree());
    for (idx, c) in f.terms() {
        for p in 0..idx.len() {
            let i = idx[p];
            for j in 0..n {
                let aij = &a[(i, j)];
                if aij.is_zero() {
                    continue;
                }
                let mut moved = idx.clone();
                moved[p] = j;
                out.add_term(&moved, -(aij.clone() * c.clone()));
            }
        }
    }
    Ok(out)
}

/// The same action on symmetric 2-tensors: A·h = −(Aᵀh + hA).
pub fn act_on_sym<S: Scalar>(a: &Matrix<S>, h: &SymTensor2<S>) -> SymTensor2<S> {
    let m = a.transpose().matmul(h.matrix()).add(&h.matrix().matmul(a));
    SymTensor2::new(m.scale(&-S::one())).expect("A^T h + h A is symmetric")
}

/// E_ab − E_ba for a < b, in lexicographic order.
pub fn so_basis<S: Scalar>(n: usize) -> Vec<Matrix<S>> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut m = Matrix::zeros(n, n);
            m[(a, b)] = S::one();
            m[(b, a)] = -S::one();
            out.push(m);
        }
    }
    out
}

/// A basis of g₂ = {A ∈ so(7) : A·φ = 0}.
pub fn g2_lie_algebra<S: Scalar>(g2: &G2Structure<S>) -> Result<Vec<Matrix<S>>> {
    let gens = so_basis::<S>(7);
    let columns = gens
        .iter()
        .map(|m| act_on_form(m, g2.phi()).map(|f| f.coeffs().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let tol = if S::MODE == ScalarMode::Exact {
        0.0
    } else {
        1e-10
    };
    let kernel = Matrix::from_columns(&columns).nullspace(tol);
    Ok(kernel
        .into_iter()
        .map(|coeffs| {
            gens.iter()
                .zip(&coeffs)
                .fold(Matrix::zeros(7, 7), |acc, (m, c)| acc.add(&m.scale(c)))
        })
        .collect())
}

/// The metric determined by a 3-form: β_ij vol = (e_i⌟φ)∧(e_j⌟φ)∧φ,
/// B = ±β/6 (sign chosen to make B positive definite) and
/// g = det(B)^{−1/9} B. Rejects 3-forms whose β is not definite; in exact
/// mode also rejects when det B is not a ninth power of a rational.
pub fn metric_from_phi<S: Scalar>(phi: &KForm<S>) -> Result<SymTensor2<S>> {
    if phi.dim() != 7 || phi.degree() != 3 {
        return Err(Error::Contract(
            "metric_from_phi expects a 3-form on R^7".into(),
        ));
    }
    let contractions: Vec<KForm<S>> = (0..7)
        .map(|i| phi.interior(&Vector::basis(7, i)))
        .collect::<Result<_>>()?;
    let mut beta = Matrix::zeros(7, 7);
    for i in 0..7 {
        for j in i..7 {
            let b = wedge(&wedge(&contractions[i], &contractions[j])?, phi)?.top_coeff()?;
            beta[(i, j)] = b.clone();
            beta[(j, i)] = b;
        }
    }
    let scale = 1.0 + beta.max_abs();
    let tol = match S::MODE {
        ScalarMode::Exact => 0.0,
        ScalarMode::Float => 1e-12 * scale,
    };
    let minors = beta.leading_minors();
    let positive = minors
        .iter()
        .all(|m| m.to_f64() > 0.0 && !m.is_zero_within(tol));
    let negative = minors.iter().enumerate().all(|(k, m)| {
        let signed = if k % 2 == 0 { -m.to_f64() } else { m.to_f64() };
        signed > 0.0 && !m.is_zero_within(tol)
    });
    let sign = match (positive, negative) {
        (true, _) => S::one(),
        (_, true) => -S::one(),
        _ => {
            return Err(Error::NotG2Form(format!(
                "β is not definite (leading minors {})",
                minors
                    .iter()
                    .map(|m| format!("{m}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            )))
        }
    };
    let b = beta.scale(&(sign / S::from_i64(6)));
    let det = b.determinant();
    let root = det
        .nth_root_exact(9)
        .ok_or_else(|| Error::NotG2Form(format!("det B = {det} has no exact ninth root")))?;
    SymTensor2::new(b.scale(&(S::one() / root)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2::i_map;
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn g2_has_dimension_fourteen_and_fixes_psi() {
        let g = G2Structure::<Q>::model();
        let basis = g2_lie_algebra(&g).unwrap();
        assert_eq!(basis.len(), 14);
        for a in &basis {
            assert!(a.is_antisymmetric(0.0));
            assert!(act_on_form(a, g.psi()).unwrap().is_zero_within(0.0));
        }
        let r12 = &so_basis::<Q>(7)[0];
        assert!(!act_on_form(r12, g.phi()).unwrap().is_zero_within(0.0));
    }

    #[test]
    fn i_map_is_equivariant() {
        let g = G2Structure::<Q>::model();
        let basis = g2_lie_algebra(&g).unwrap();
        let h = SymTensor2::from_upper(7, |i, j| Q::from_i64(((i + 1) * (j + 2)) as i64 % 5 - 2));
        for a in &basis {
            let lhs = i_map(&g, &act_on_sym(a, &h));
            let rhs = act_on_form(a, &i_map(&g, &h)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn metric_examples() {
        let g = G2Structure::<Q>::model();
        assert_eq!(metric_from_phi(g.phi()).unwrap(), SymTensor2::identity(7));
        let lambda = Q::from_ratio(2, 3);
        let cube = lambda.clone() * lambda.clone() * lambda.clone();
        let scaled = metric_from_phi(&g.phi().scale(&cube)).unwrap();
        assert_eq!(
            scaled,
            SymTensor2::identity(7).scale(&(lambda.clone() * lambda))
        );
        let flipped = metric_from_phi(&g.phi().scale(&Q::from_i64(-1))).unwrap();
        assert_eq!(flipped, SymTensor2::identity(7));
        let e123 = KForm::<Q>::from_shorthand(7, &[("123", 1)]);
        assert!(matches!(metric_from_phi(&e123), Err(Error::NotG2Form(_))));
    }

    #[test]
    fn float_metric_of_scaled_phi() {
        let g = G2Structure::<f64>::model();
        let m = metric_from_phi(&g.phi().scale(&8.0)).unwrap();
        assert!((m.get(3, 3) - 4.0).abs() < 1e-12);
    }
}
