use super::{ce_differential, curvature_ricci, levi_civita, Connection, Curvature, LieAlgebra};
use crate::error::{Error, Result};
use crate::exterior::{form_inner, hodge, wedge, KForm, Vector};
use crate::g2::{act_on_form, i_map, project_lambda2, G2Structure};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, ScalarMode};

/// A 7-dimensional Lie algebra on which the model φ is closed, with its
/// derived geometry.
///
/// The torsion is recorded both as T, with ∇_{e_i}φ = T(e_i)⌟ψ, and as the
/// 2-form τ₂ = −2 Σ_{i<j} T_ij e^{ij}; this normalization is the one for
/// which dψ = τ₂∧φ.
#[derive(Debug, Clone)]
pub struct ClosedG2Algebra<S> {
    pub alg: LieAlgebra<S>,
    pub connection: Connection<S>,
    pub curvature: Curvature<S>,
    pub tau2: KForm<S>,
    /// Row i holds the components of T(e_i).
    pub t_endo: Matrix<S>,
}

fn tol<S: Scalar>() -> f64 {
    match S::MODE {
        ScalarMode::Exact => 0.0,
        ScalarMode::Float => 1e-10,
    }
}

pub fn validate_closed_g2<S: Scalar>(
    g2: &G2Structure<S>,
    alg: &LieAlgebra<S>,
) -> Result<ClosedG2Algebra<S>> {
    if alg.dim() != 7 {
        return Err(Error::DimensionMismatch {
            expected: 7,
            got: alg.dim(),
        });
    }
    let dphi = ce_differential(alg, g2.phi())?;
    if !dphi.is_zero_within(tol::<S>()) {
        return Err(Error::NotClosed(dphi.to_string()));
    }
    let connection = levi_civita(alg);
    let (t_endo, residual, worst) = torsion_endomorphism(g2, &connection)?;
    if !residual.is_zero_within(tol::<S>()) {
        return Err(Error::Inconsistent(format!(
            "∇_{{e{}}}φ is not of the form T⌟ψ (residual {:.3e})",
            worst + 1,
            residual.max_abs()
        )));
    }
    if !t_endo.is_antisymmetric(tol::<S>()) {
        return Err(Error::Inconsistent(
            "torsion endomorphism is not antisymmetric".into(),
        ));
    }
    let tau2 = tau2_from_endomorphism(&t_endo);
    let (t7, _) = project_lambda2(g2, &tau2)?;
    if !t7.is_zero_within(tol::<S>()) {
        return Err(Error::Inconsistent(format!("τ₂ has a Λ²₇ component {t7}")));
    }
    let dpsi = ce_differential(alg, g2.psi())?;
    let gap = &dpsi - &wedge(&tau2, g2.phi())?;
    if !gap.is_zero_within(tol::<S>()) {
        return Err(Error::Inconsistent(format!("dψ − τ₂∧φ = {gap}")));
    }
    let curvature = curvature_ricci(alg, &connection);
    Ok(ClosedG2Algebra {
        alg: alg.clone(),
        connection,
        curvature,
        tau2,
        t_endo,
    })
}

/// T with T_ij = ⟨∇_{e_i}φ, e_j⌟ψ⟩/4, together with the largest remainder
/// ∇_{e_i}φ − T(e_i)⌟ψ and the index i where it occurs. Linear in the
/// structure constants.
pub(crate) fn torsion_endomorphism<S: Scalar>(
    g2: &G2Structure<S>,
    connection: &Connection<S>,
) -> Result<(Matrix<S>, KForm<S>, usize)> {
    let lambda7: Vec<KForm<S>> = (0..7)
        .map(|j| g2.psi().interior(&Vector::basis(7, j)))
        .collect::<Result<_>>()?;
    let quarter = S::from_ratio(1, 4);
    let mut t_endo = Matrix::zeros(7, 7);
    let mut worst = (KForm::zero(7, 3), 0);
    for i in 0..7 {
        let nabla_phi = act_on_form(&connection.matrix(i), g2.phi())?;
        let mut rebuilt = KForm::zero(7, 3);
        for (j, b) in lambda7.iter().enumerate() {
            let t = form_inner(&nabla_phi, b)? * quarter.clone();
            rebuilt = &rebuilt + &b.scale(&t);
            t_endo[(i, j)] = t;
        }
        let residual = &nabla_phi - &rebuilt;
        if residual.max_abs() > worst.0.max_abs() {
            worst = (residual, i);
        }
    }
    Ok((t_endo, worst.0, worst.1))
}

/// τ₂ = −2 Σ_{i<j} T_ij e^{ij}.
pub(crate) fn tau2_from_endomorphism<S: Scalar>(t: &Matrix<S>) -> KForm<S> {
    let mut tau2 = KForm::zero(7, 2);
    let minus_two = S::from_i64(-2);
    for i in 0..7 {
        for j in i + 1..7 {
            tau2.add_term(&[i, j], minus_two.clone() * t[(i, j)].clone());
        }
    }
    tau2
}

/// Residuals of the closed-G₂ identities. Forms are exact differences; the
/// scalar is tr Ric + ½|τ₂|².
#[derive(Debug, Clone, PartialEq)]
pub struct BryantReport<S> {
    /// dψ − τ₂∧φ.
    pub dpsi: KForm<S>,
    /// P₇(τ₂).
    pub p7: KForm<S>,
    /// tr Ric + ½|τ₂|².
    pub scalar: S,
    /// dτ₂ − ½⋆(τ₂∧τ₂) + ½ i(Ric).
    pub dtau2: KForm<S>,
}

impl<S: Scalar> BryantReport<S> {
    pub fn max_residual(&self) -> f64 {
        [
            self.dpsi.max_abs(),
            self.p7.max_abs(),
            self.scalar.to_f64().abs(),
            self.dtau2.max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn all_zero(&self, tol: f64) -> bool {
        self.dpsi.is_zero_within(tol)
            && self.p7.is_zero_within(tol)
            && self.scalar.is_zero_within(tol)
            && self.dtau2.is_zero_within(tol)
    }
}

/// The identities evaluated on an explicit τ₂; used directly for negative
/// controls with a corrupted τ₂.
pub fn bryant_identities_for<S: Scalar>(
    g2: &G2Structure<S>,
    alg: &LieAlgebra<S>,
    curvature: &Curvature<S>,
    tau2: &KForm<S>,
) -> Result<BryantReport<S>> {
    let dpsi = &ce_differential(alg, g2.psi())? - &wedge(tau2, g2.phi())?;
    let (p7, _) = project_lambda2(g2, tau2)?;
    let scalar = curvature.scal.clone() + tau2.norm_sq() * S::from_ratio(1, 2);
    let half = S::from_ratio(1, 2);
    let rhs = &hodge(&wedge(tau2, tau2)?).scale(&half) - &i_map(g2, &curvature.ric).scale(&half);
    let dtau2 = &ce_differential(alg, tau2)? - &rhs;
    Ok(BryantReport {
        dpsi,
        p7,
        scalar,
        dtau2,
    })
}

pub fn bryant_identities_check<S: Scalar>(
    g2: &G2Structure<S>,
    closed: &ClosedG2Algebra<S>,
) -> Result<BryantReport<S>> {
    bryant_identities_for(g2, &closed.alg, &closed.curvature, &closed.tau2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn abelian_is_torsion_free() {
        let g = G2Structure::<Q>::model();
        let c = validate_closed_g2(&g, &LieAlgebra::abelian(7)).unwrap();
        assert!(c.tau2.is_zero_within(0.0));
        assert_eq!(c.t_endo.max_abs(), 0.0);
        let r = bryant_identities_check(&g, &c).unwrap();
        assert!(r.all_zero(0.0));
    }

    #[test]
    fn rejects_non_closed() {
        let g = G2Structure::<Q>::model();
        let alg = LieAlgebra::from_brackets(7, &[(6, 0, 1, Q::from_i64(1))]).unwrap();
        assert!(matches!(
            validate_closed_g2(&g, &alg),
            Err(Error::NotClosed(_))
        ));
    }
}
