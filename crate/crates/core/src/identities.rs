//! Pointwise verifiers for the second-variation integrand of coassociative
//! volume in a closed G₂-structure, evaluated in the model frame.
//!
//! All functions return forms or residuals; pass/fail thresholds live in the
//! suites.

use crate::error::{Error, Result};
use crate::exterior::{
    hodge, matrix_to_two_form, restrict, self_dual_part, two_form_to_matrix, wedge, KForm, Vector,
};
use crate::g2::{
    i_map, i_map_inverse, normal_to_selfdual, project_lambda2, CoassocFrame, G2Structure,
    SymTensor2,
};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, ScalarMode};

fn tol<S: Scalar>() -> f64 {
    match S::MODE {
        ScalarMode::Exact => 0.0,
        ScalarMode::Float => 1e-10,
    }
}

/// Tangential shape of the variation field: `dz_tangent` is the matrix of
/// X ↦ (∇_X Z)ᵀ in the frame's orthonormal basis (column a is the image of
/// the a-th basis vector).
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeData<S> {
    frame: CoassocFrame<S>,
    dz_tangent: Matrix<S>,
    minimal_totally_geodesic: bool,
}

impl<S: Scalar> ShapeData<S> {
    pub fn new(frame: CoassocFrame<S>, dz_tangent: Matrix<S>) -> Result<Self> {
        if dz_tangent.rows() != 4 || dz_tangent.cols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: dz_tangent.rows(),
            });
        }
        Ok(Self {
            frame,
            dz_tangent,
            minimal_totally_geodesic: false,
        })
    }

    /// The totally geodesic case: dz_tangent = 0.
    pub fn totally_geodesic(frame: CoassocFrame<S>) -> Self {
        Self {
            frame,
            dz_tangent: Matrix::zeros(4, 4),
            minimal_totally_geodesic: true,
        }
    }

    pub fn frame(&self) -> &CoassocFrame<S> {
        &self.frame
    }

    pub fn dz_tangent(&self) -> &Matrix<S> {
        &self.dz_tangent
    }

    pub fn is_totally_geodesic(&self) -> bool {
        self.minimal_totally_geodesic
    }

    /// The symmetrized tangential derivative (D + Dᵀ)/2.
    pub fn symmetrized(&self) -> Matrix<S> {
        self.dz_tangent
            .add(&self.dz_tangent.transpose())
            .scale(&S::from_ratio(1, 2))
    }
}

/// Per-point inputs: τ₂ ∈ Λ²₁₄, Ric, a normal variation vector Z and the
/// tangential shape.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationPointData<S> {
    tau2: KForm<S>,
    ric: SymTensor2<S>,
    z: Vector<S>,
    shape: ShapeData<S>,
}

/// Fails unless P₇(τ₂) = 0.
pub fn require_lambda2_14<S: Scalar>(g2: &G2Structure<S>, tau2: &KForm<S>) -> Result<()> {
    let (t7, _) = project_lambda2(g2, tau2)?;
    if !t7.is_zero_within(tol::<S>() * (1.0 + tau2.max_abs())) {
        return Err(Error::NotInLambda2_14(format!(
            "|P₇ τ₂|max = {:.3e}",
            t7.max_abs()
        )));
    }
    Ok(())
}

impl<S: Scalar> VariationPointData<S> {
    pub fn new(
        g2: &G2Structure<S>,
        tau2: KForm<S>,
        ric: SymTensor2<S>,
        z: Vector<S>,
        shape: ShapeData<S>,
    ) -> Result<Self> {
        require_lambda2_14(g2, &tau2)?;
        if ric.dim() != 7 {
            return Err(Error::DimensionMismatch {
                expected: 7,
                got: ric.dim(),
            });
        }
        shape.frame.require_normal(&z)?;
        Ok(Self {
            tau2,
            ric,
            z,
            shape,
        })
    }

    pub fn tau2(&self) -> &KForm<S> {
        &self.tau2
    }

    pub fn ric(&self) -> &SymTensor2<S> {
        &self.ric
    }

    pub fn z(&self) -> &Vector<S> {
        &self.z
    }

    pub fn shape(&self) -> &ShapeData<S> {
        &self.shape
    }

    pub fn frame(&self) -> &CoassocFrame<S> {
        &self.shape.frame
    }
}

/// α_f(X₁, X₂) = α(fX₁, X₂) + α(X₁, fX₂) for a 2-form α on R⁴ and an
/// endomorphism f.
pub fn alpha_f<S: Scalar>(alpha: &KForm<S>, f: &Matrix<S>) -> Result<KForm<S>> {
    let a = two_form_to_matrix(alpha)?;
    matrix_to_two_form(&f.transpose().matmul(&a).add(&a.matmul(f)))
}

/// γ_Z built from α = (Z⌟φ)|Σ and the symmetrized tangential derivative.
pub fn gamma_z<S: Scalar>(g2: &G2Structure<S>, d: &VariationPointData<S>) -> Result<KForm<S>> {
    let alpha = normal_to_selfdual(g2, &d.z, d.frame())?;
    alpha_f(&alpha, &d.shape.symmetrized())
}

/// B_{W⊥}(Z₁, Z₂) = −ι_{W⊥}(ι_{Z₁}ψ ∧ ι_{Z₂}φ)|Σ, with W⊥ the normal part of W.
pub fn check_b_w<S: Scalar>(
    g2: &G2Structure<S>,
    w: &Vector<S>,
    z1: &Vector<S>,
    z2: &Vector<S>,
    frame: &CoassocFrame<S>,
) -> Result<KForm<S>> {
    frame.require_normal(z1)?;
    frame.require_normal(z2)?;
    let w_perp = frame.plane().normal_part(w);
    let inner = wedge(&g2.psi().interior(z1)?, &g2.phi().interior(z2)?)?;
    Ok(-&restrict(&inner.interior(&w_perp)?, frame.plane())?)
}

/// B_h(Z₁, Z₂) = (ι_{Z₁} i(h) ∧ ι_{Z₂}φ)|Σ.
pub fn check_b_h<S: Scalar>(
    g2: &G2Structure<S>,
    h: &SymTensor2<S>,
    z1: &Vector<S>,
    z2: &Vector<S>,
    frame: &CoassocFrame<S>,
) -> Result<KForm<S>> {
    frame.require_normal(z1)?;
    frame.require_normal(z2)?;
    let ih = i_map(g2, h);
    restrict(
        &wedge(&ih.interior(z1)?, &g2.phi().interior(z2)?)?,
        frame.plane(),
    )
}

/// (4h(Z₁, Z₂) + 2 tr(h|Σ) g(Z₁, Z₂)) vol₄.
pub fn b_h_closed_form<S: Scalar>(
    h: &SymTensor2<S>,
    z1: &Vector<S>,
    z2: &Vector<S>,
    frame: &CoassocFrame<S>,
) -> KForm<S> {
    let c = S::from_i64(4) * h.eval(z1, z2)
        + S::from_i64(2) * h.restricted_trace(frame.plane()) * z1.dot(z2);
    KForm::volume(4).scale(&c)
}

/// ½⋆(τ₂∧τ₂) − ½ i(Ric).
pub fn dtau2_from_identity<S: Scalar>(
    g2: &G2Structure<S>,
    tau2: &KForm<S>,
    ric: &SymTensor2<S>,
) -> Result<KForm<S>> {
    require_lambda2_14(g2, tau2)?;
    let half = S::from_ratio(1, 2);
    let quad = hodge(&wedge(tau2, tau2)?);
    Ok(&quad.scale(&half) - &i_map(g2, ric).scale(&half))
}

/// Both sides of the pointwise lemma on Σ:
/// (ι_Z dτ₂) ∧ ι_Zφ = −(2Ric(Z,Z) + |Z|² tr(Ric|Σ)) vol₄.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaDtau2<S> {
    pub lhs: KForm<S>,
    pub rhs: KForm<S>,
    /// lhs − rhs as a multiple of vol₄.
    pub residual: S,
}

/// −(2Ric(Z,Z) + |Z|² tr(Ric|Σ)).
fn ricci_term<S: Scalar>(d: &VariationPointData<S>) -> S {
    -(S::from_i64(2) * d.ric.eval(&d.z, &d.z)
        + d.z.norm_sq() * d.ric.restricted_trace(d.frame().plane()))
}

pub fn lemma_dtau2_check<S: Scalar>(
    g2: &G2Structure<S>,
    d: &VariationPointData<S>,
) -> Result<LemmaDtau2<S>> {
    let dtau2 = dtau2_from_identity(g2, &d.tau2, &d.ric)?;
    let lhs = restrict(
        &wedge(&dtau2.interior(&d.z)?, &g2.phi().interior(&d.z)?)?,
        d.frame().plane(),
    )?;
    let rhs = KForm::volume(4).scale(&ricci_term(d));
    let residual = (&lhs - &rhs).top_coeff()?;
    Ok(LemmaDtau2 { lhs, rhs, residual })
}

/// The torsion-quadratic part of the lemma's left side. ⋆(τ₂∧τ₂) lies in
/// Λ³₁ ⊕ Λ³₂₇, so it equals i(h_τ) for a symmetric h_τ and its contribution
/// is ½ B_{h_τ}(Z, Z) rather than zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionTerm<S> {
    /// ι_Z(½⋆(τ₂∧τ₂)) ∧ ι_Zφ restricted to Σ.
    pub direct: KForm<S>,
    /// ½ (4h_τ(Z,Z) + 2 tr(h_τ|Σ)|Z|²) vol₄.
    pub predicted: KForm<S>,
    pub h_tau: SymTensor2<S>,
}

pub fn lemma_dtau2_torsion_term<S: Scalar>(
    g2: &G2Structure<S>,
    d: &VariationPointData<S>,
) -> Result<TorsionTerm<S>> {
    let half = S::from_ratio(1, 2);
    let quad = hodge(&wedge(&d.tau2, &d.tau2)?);
    let h_tau = i_map_inverse(g2, &quad)?;
    let direct = restrict(
        &wedge(
            &quad.scale(&half).interior(&d.z)?,
            &g2.phi().interior(&d.z)?,
        )?,
        d.frame().plane(),
    )?;
    let predicted = b_h_closed_form(&h_tau, &d.z, &d.z, d.frame()).scale(&half);
    Ok(TorsionTerm {
        direct,
        predicted,
        h_tau,
    })
}

/// τ₂|Σ ∧ γ_Z − (2Ric(Z,Z) + |Z|² tr(Ric|Σ)) vol₄.
pub fn secvar_integrand<S: Scalar>(
    g2: &G2Structure<S>,
    d: &VariationPointData<S>,
) -> Result<KForm<S>> {
    let tg = tau_wedge_gamma(g2, d)?;
    Ok(&tg + &KForm::volume(4).scale(&ricci_term(d)))
}

/// (ι_Z dτ₂) ∧ ι_Zφ + τ₂ ∧ γ_Z on Σ, with dτ₂ from the algebraic identity.
pub fn eq2_assembly<S: Scalar>(g2: &G2Structure<S>, d: &VariationPointData<S>) -> Result<KForm<S>> {
    let lemma = lemma_dtau2_check(g2, d)?;
    Ok(&lemma.lhs + &tau_wedge_gamma(g2, d)?)
}

fn tau_wedge_gamma<S: Scalar>(g2: &G2Structure<S>, d: &VariationPointData<S>) -> Result<KForm<S>> {
    let t = restrict(&d.tau2, d.frame().plane())?;
    wedge(&t, &gamma_z(g2, d)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstVariation<S> {
    /// τ₂|Σ⁺ ∧ (Z⌟φ)|Σ.
    pub density: KForm<S>,
    /// The normal vector with −(H⌟φ)|Σ = τ₂|Σ⁺.
    pub mean_curvature: Vector<S>,
}

pub fn first_variation_density<S: Scalar>(
    g2: &G2Structure<S>,
    tau2: &KForm<S>,
    z: &Vector<S>,
    frame: &CoassocFrame<S>,
) -> Result<FirstVariation<S>> {
    require_lambda2_14(g2, tau2)?;
    let plus = self_dual_part(&restrict(tau2, frame.plane())?)?;
    let density = wedge(&plus, &normal_to_selfdual(g2, z, frame)?)?;
    let mut h = Vector::zero(7);
    let half = S::from_ratio(1, 2);
    for n in frame.normal().onb() {
        let img = normal_to_selfdual(g2, n, frame)?;
        let c = -(plus.inner(&img)? * half.clone());
        h = &h + &n.scale(&c);
    }
    let check = &normal_to_selfdual(g2, &h, frame)? + &plus;
    if !check.is_zero_within(tol::<S>() * (1.0 + plus.max_abs())) {
        return Err(Error::Inconsistent(format!(
            "mean curvature does not reproduce τ₂|Σ⁺ (residual {:.3e})",
            check.max_abs()
        )));
    }
    Ok(FirstVariation {
        density,
        mean_curvature: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::anti_self_dual_part;
    use crate::sample::{self, trial_rng};
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn e(i: usize) -> Vector<Q> {
        Vector::basis(7, i - 1)
    }

    fn vol4(c: i64) -> KForm<Q> {
        KForm::volume(4).scale(&q(c))
    }

    fn point(
        tau2: KForm<Q>,
        ric: SymTensor2<Q>,
        z: Vector<Q>,
        dz: Matrix<Q>,
    ) -> VariationPointData<Q> {
        let g = G2Structure::model();
        let shape = ShapeData::new(CoassocFrame::model(), dz).unwrap();
        VariationPointData::new(&g, tau2, ric, z, shape).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let g = G2Structure::<Q>::model();
        let zero = point(
            KForm::zero(7, 2),
            SymTensor2::zero(7),
            e(1),
            Matrix::zeros(4, 4),
        );
        assert!(gamma_z(&g, &zero).unwrap().is_zero_within(0.0));
        let mut f = Matrix::zeros(4, 4);
        for (i, v) in [1, 1, -1, -1].into_iter().enumerate() {
            f[(i, i)] = q(v);
        }
        let d = point(KForm::zero(7, 2), SymTensor2::zero(7), e(1), f);
        let expected = KForm::from_shorthand(4, &[("12", 2), ("34", -2)]);
        assert_eq!(gamma_z(&g, &d).unwrap(), expected);
    }

    #[test]
    fn gamma_trace_part() {
        let g = G2Structure::<Q>::model();
        let mut rng = trial_rng(11, 0);
        let f0 = sample::symmetric::<Q>(&mut rng, 4).trace_free();
        let t = Q::from_ratio(3, 5);
        let f = f0.into_matrix().add(&Matrix::identity(4).scale(&t));
        let z = Vector::from_i64(&[1, -2, 3, 0, 0, 0, 0]);
        let d = point(KForm::zero(7, 2), SymTensor2::zero(7), z.clone(), f);
        let gamma = gamma_z(&g, &d).unwrap();
        let alpha = normal_to_selfdual(&g, &z, d.frame()).unwrap();
        assert_eq!(self_dual_part(&gamma).unwrap(), alpha.scale(&(t * q(2))));
    }

    #[test]
    fn alpha_f_is_anti_self_dual_for_trace_free_f() {
        let mut rng = trial_rng(5, 1);
        let alpha = sample::self_dual_4::<Q>(&mut rng);
        let f = sample::symmetric::<Q>(&mut rng, 4)
            .trace_free()
            .into_matrix();
        let af = alpha_f(&alpha, &f).unwrap();
        assert!(self_dual_part(&af).unwrap().is_zero_within(0.0));
        assert_eq!(anti_self_dual_part(&af).unwrap(), af);
    }

    #[test]
    fn b_w_examples() {
        let g = G2Structure::<Q>::model();
        let f = CoassocFrame::model();
        assert_eq!(check_b_w(&g, &e(1), &e(2), &e(3), &f).unwrap(), vol4(2));
        let z = Vector::from_i64(&[2, -1, 4, 0, 0, 0, 0]);
        assert!(check_b_w(&g, &e(2), &z, &z, &f)
            .unwrap()
            .is_zero_within(0.0));
        assert!(check_b_w(&g, &e(4), &e(2), &e(3), &f)
            .unwrap()
            .is_zero_within(0.0));
        assert!(matches!(
            check_b_w(&g, &e(1), &e(4), &e(3), &f),
            Err(Error::NotNormal(_))
        ));
    }

    #[test]
    fn tangential_contraction_of_psi_vanishes_on_sigma() {
        let g = G2Structure::<Q>::model();
        let f = CoassocFrame::model();
        for w in 4..=7 {
            for z in 1..=3 {
                let t = g.psi().interior(&e(w)).unwrap().interior(&e(z)).unwrap();
                assert!(restrict(&t, f.plane()).unwrap().is_zero_within(0.0));
            }
        }
    }

    #[test]
    fn b_h_examples() {
        let g = G2Structure::<Q>::model();
        let f = CoassocFrame::model();
        let h = SymTensor2::from_upper(7, |i, j| if (i, j) == (0, 1) { q(1) } else { q(0) });
        assert_eq!(check_b_h(&g, &h, &e(1), &e(2), &f).unwrap(), vol4(4));
        assert_eq!(
            check_b_h(&g, &SymTensor2::identity(7), &e(1), &e(1), &f).unwrap(),
            vol4(12)
        );
        assert!(check_b_h(&g, &SymTensor2::zero(7), &e(1), &e(3), &f)
            .unwrap()
            .is_zero_within(0.0));
    }

    #[test]
    fn dtau2_examples() {
        let g = G2Structure::<Q>::model();
        let z = KForm::zero(7, 2);
        assert!(dtau2_from_identity(&g, &z, &SymTensor2::zero(7))
            .unwrap()
            .is_zero_within(0.0));
        assert_eq!(
            dtau2_from_identity(&g, &z, &SymTensor2::identity(7)).unwrap(),
            g.phi().scale(&q(-3))
        );
        let t = KForm::from_shorthand(7, &[("45", 1), ("67", -1)]);
        assert_eq!(
            dtau2_from_identity(&g, &t, &SymTensor2::zero(7)).unwrap(),
            KForm::from_shorthand(7, &[("123", -1)])
        );
        let bad = g.phi().interior(&e(1)).unwrap();
        assert!(matches!(
            dtau2_from_identity(&g, &bad, &SymTensor2::zero(7)),
            Err(Error::NotInLambda2_14(_))
        ));
    }

    #[test]
    fn lemma_ricci_half_holds() {
        let g = G2Structure::<Q>::model();
        let mut rng = trial_rng(3, 2);
        let ric = sample::symmetric::<Q>(&mut rng, 7);
        let d = point(KForm::zero(7, 2), ric.clone(), e(1), Matrix::zeros(4, 4));
        let l = lemma_dtau2_check(&g, &d).unwrap();
        assert_eq!(l.residual, q(0));
        let tr: Q = (3..7).map(|i| ric.get(i, i)).fold(q(0), |a, b| a + b);
        assert_eq!(l.rhs, KForm::volume(4).scale(&-(q(2) * ric.get(0, 0) + tr)));
        let zero = point(
            KForm::zero(7, 2),
            SymTensor2::zero(7),
            Vector::zero(7),
            Matrix::zeros(4, 4),
        );
        assert_eq!(lemma_dtau2_check(&g, &zero).unwrap().residual, q(0));
    }

    #[test]
    fn torsion_term_accounts_for_lemma_residual() {
        let g = G2Structure::<Q>::model();
        let mut rng = trial_rng(9, 0);
        let tau = sample::lambda2_14::<Q>(&mut rng, &g);
        let ric = sample::symmetric::<Q>(&mut rng, 7);
        let z = sample::normal_vector(&mut rng, &CoassocFrame::model());
        let d = point(tau, ric, z, Matrix::zeros(4, 4));
        let l = lemma_dtau2_check(&g, &d).unwrap();
        let t = lemma_dtau2_torsion_term(&g, &d).unwrap();
        assert_eq!(t.direct, t.predicted);
        assert_eq!(l.residual, t.predicted.top_coeff().unwrap());
    }

    #[test]
    fn integrand_examples() {
        let g = G2Structure::<Q>::model();
        let flat = point(
            KForm::zero(7, 2),
            SymTensor2::zero(7),
            e(2),
            Matrix::zeros(4, 4),
        );
        assert!(secvar_integrand(&g, &flat).unwrap().is_zero_within(0.0));
        let shape = ShapeData::totally_geodesic(CoassocFrame::model());
        let d = VariationPointData::new(
            &g,
            KForm::zero(7, 2),
            SymTensor2::identity(7).scale(&q(-1)),
            e(1),
            shape,
        )
        .unwrap();
        assert_eq!(secvar_integrand(&g, &d).unwrap(), vol4(6));
    }

    #[test]
    fn first_variation_examples() {
        let g = G2Structure::<Q>::model();
        let f = CoassocFrame::model();
        let z = Vector::from_i64(&[1, 2, -1, 0, 0, 0, 0]);
        let r = first_variation_density(&g, &KForm::zero(7, 2), &z, &f).unwrap();
        assert!(r.density.is_zero_within(0.0));
        assert_eq!(r.mean_curvature, Vector::zero(7));
        let tau = KForm::from_shorthand(7, &[("45", 1), ("67", 1), ("23", -2)]);
        let r = first_variation_density(&g, &tau, &z, &f).unwrap();
        assert_eq!(r.mean_curvature, -&e(1));
        let asd = KForm::from_shorthand(7, &[("45", 1), ("67", -1)]);
        let r = first_variation_density(&g, &asd, &z, &f).unwrap();
        assert!(r.density.is_zero_within(0.0));
    }
}
