//! Seeded property suites over the pointwise identities. Each suite returns
//! the largest residual it saw; the caller compares it with a tolerance.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{
    anti_self_dual_part, restrict, self_dual_part, wedge_all, KForm, OrientedPlane, Vector,
};
use crate::g2::{
    act_on_form, act_on_sym, g2_lie_algebra, i_map, normal_to_selfdual, project_lambda2,
    project_lambda3, CoassocFrame, G2Structure, SymTensor2,
};
use crate::identities::{
    alpha_f, b_h_closed_form, check_b_h, check_b_w, eq2_assembly, first_variation_density, gamma_z,
    lemma_dtau2_check, lemma_dtau2_torsion_term, secvar_integrand, ShapeData, VariationPointData,
};
use crate::linalg::Matrix;
use crate::sample::{self, trial_rng, Sample, TrialRng};
use crate::scalar::{Scalar, ScalarMode};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteSpec {
    pub id: &'static str,
    /// Formula label, indexed in the README.
    pub anchor: &'static str,
    pub exact_trials: u64,
    pub float_trials: u64,
    pub float_tolerance: f64,
}

const fn spec(
    id: &'static str,
    anchor: &'static str,
    exact: u64,
    float: u64,
    tol: f64,
) -> SuiteSpec {
    SuiteSpec {
        id,
        anchor,
        exact_trials: exact,
        float_trials: float,
        float_tolerance: tol,
    }
}

pub const SUITES: [SuiteSpec; 15] = [
    spec("model-fidelity", "model-forms", 1, 1, 1e-12),
    spec("hl-identity", "hl-coassociator", 100, 10_000, 1e-9),
    spec("calibration", "calibration-inequality", 200, 10_000, 1e-10),
    spec("lambda2-projectors", "lambda2-splitting", 200, 1_000, 1e-10),
    spec(
        "lambda3-decomposition",
        "lambda3-splitting",
        100,
        1_000,
        1e-9,
    ),
    spec("i-map", "i-map", 100, 1_000, 1e-9),
    spec("g2-algebra", "g2-algebra", 100, 1_000, 1e-10),
    spec(
        "selfdual-isometry",
        "selfdual-isometry",
        1_000,
        1_000,
        1e-10,
    ),
    spec("gamma-antiselfdual", "lem:tau2", 1_000, 1_000, 1e-10),
    spec("b-formulas", "b-forms", 1_000, 1_000, 1e-10),
    spec("lemma-dtau2", "lem:dtau2", 1_000, 1_000, 1e-9),
    spec("lemma-dtau2-ricci", "lem:dtau2/ricci", 1_000, 1_000, 1e-9),
    spec(
        "lemma-dtau2-torsion-term",
        "lem:dtau2/torsion",
        1_000,
        1_000,
        1e-9,
    ),
    spec("integrand-assembly", "thm:secvar", 1_000, 1_000, 1e-9),
    spec(
        "first-variation-density",
        "first-variation",
        1_000,
        1_000,
        1e-10,
    ),
];

pub fn suite(id: &str) -> Option<&'static SuiteSpec> {
    SUITES.iter().find(|s| s.id == id)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub max_residual: f64,
    pub trials: u64,
}

fn abs<S: Scalar>(x: &S) -> f64 {
    x.to_f64().abs()
}

/// Runs `f` on trials 0..n, each with its own generator, and keeps the
/// largest residual.
fn trials<F>(seed: u64, n: u64, f: F) -> Result<Outcome>
where
    F: Fn(&mut TrialRng) -> Result<f64> + Sync,
{
    let res: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|t| f(&mut trial_rng(seed, t)))
        .collect();
    let mut max: f64 = 0.0;
    for r in res {
        let r = r?;
        max = if r.is_nan() { f64::NAN } else { max.max(r) };
    }
    Ok(Outcome {
        max_residual: max,
        trials: n,
    })
}

fn point<S: Sample>(
    g2: &G2Structure<S>,
    rng: &mut TrialRng,
    tau2: KForm<S>,
    ric: SymTensor2<S>,
) -> Result<VariationPointData<S>> {
    let frame = CoassocFrame::model();
    let z = sample::normal_vector(rng, &frame);
    let shape = ShapeData::new(frame, sample::matrix(rng, 4, 4))?;
    VariationPointData::new(g2, tau2, ric, z, shape)
}

fn random_point<S: Sample>(
    g2: &G2Structure<S>,
    rng: &mut TrialRng,
) -> Result<VariationPointData<S>> {
    let tau2 = sample::lambda2_14(rng, g2);
    let ric = sample::symmetric(rng, 7);
    point(g2, rng, tau2, ric)
}

fn gram_det<S: Scalar>(vs: &[Vector<S>]) -> S {
    Matrix::from_fn(vs.len(), vs.len(), |i, j| vs[i].dot(&vs[j])).determinant()
}

fn model_fidelity<S: Sample>(g2: &G2Structure<S>) -> Result<Outcome> {
    // φ = 123 + 1(45+67) + 2(46−57) − 3(47+56), ψ = 4567 + 23(45+67) − 13(46−57) − 12(47+56)
    let phi = KForm::<S>::from_shorthand(
        7,
        &[
            ("123", 1),
            ("145", 1),
            ("167", 1),
            ("246", 1),
            ("257", -1),
            ("347", -1),
            ("356", -1),
        ],
    );
    let psi = KForm::<S>::from_shorthand(
        7,
        &[
            ("4567", 1),
            ("2345", 1),
            ("2367", 1),
            ("1346", -1),
            ("1357", 1),
            ("1247", -1),
            ("1256", -1),
        ],
    );
    let residuals = [
        (&phi - g2.phi()).max_abs(),
        (&psi - g2.psi()).max_abs(),
        (&phi.hodge() - &psi).max_abs(),
        (&phi.wedge(&psi)? - &KForm::volume(7).scale(&S::from_i64(7))).max_abs(),
        abs(&(phi.norm_sq() - S::from_i64(7))),
    ];
    Ok(Outcome {
        max_residual: residuals.into_iter().fold(0.0, f64::max),
        trials: 1,
    })
}

fn hl_identity<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    trials(seed, n, |rng| {
        let vs: [Vector<S>; 4] = std::array::from_fn(|_| sample::vector(rng, 7));
        let psi = g2.psi_value(&vs)?;
        let c = g2.coassociator(&vs)?;
        Ok(abs(&(psi.clone() * psi + c.norm_sq() - gram_det(&vs))))
    })
}

fn calibration<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    let eps = match S::MODE {
        ScalarMode::Exact => 0.0,
        ScalarMode::Float => 1e-10,
    };
    // every coordinate 4-plane: |ψ| ≤ 1, 1 − ψ² = |C|², defect 0 iff φ| = 0
    let mut worst: f64 = 0.0;
    let mut idx = vec![0usize; 4];
    for mask in 0u32..128 {
        if mask.count_ones() != 4 {
            continue;
        }
        idx.clear();
        idx.extend((0..7).filter(|i| mask & (1 << i) != 0));
        let p = OrientedPlane::<S>::coordinate(7, &idx)?;
        worst = worst.max(plane_residual(g2, &p, eps)?);
    }
    let random = trials(seed, n, |rng| {
        let vs: Vec<Vector<S>> = (0..4).map(|_| sample::vector(rng, 7)).collect();
        let psi = g2.psi_value(&[vs[0].clone(), vs[1].clone(), vs[2].clone(), vs[3].clone()])?;
        // ψ(v)² ≤ |v₁∧…∧v₄|² with equality iff the span is calibrated
        let excess = (psi.clone() * psi - gram_det(&vs)).to_f64().max(0.0);
        if S::MODE == ScalarMode::Exact {
            return Ok(excess);
        }
        let p = OrientedPlane::new(vs.clone())?;
        let mut r = excess.max(plane_residual(g2, &p, eps)?);
        // a coassociative plane: the complement of span(u, v, u×v)
        let u = &vs[0];
        let w = g2.cross(u, &vs[1])?;
        let assoc = OrientedPlane::new(vec![u.clone(), vs[1].clone(), w])?;
        let co = assoc.orthogonal_complement()?;
        let d = g2.calibration_defect(&co)?;
        r = r
            .max(abs(&d.defect))
            .max(restrict(g2.phi(), &co)?.max_abs());
        r = r.max(plane_residual(g2, &co, eps)?);
        Ok(r)
    })?;
    Ok(Outcome {
        max_residual: worst.max(random.max_residual),
        trials: random.trials + 35,
    })
}

fn plane_residual<S: Scalar>(g2: &G2Structure<S>, p: &OrientedPlane<S>, eps: f64) -> Result<f64> {
    let d = g2.calibration_defect(p)?;
    let over = (abs(&d.psi_value) - 1.0).max(0.0);
    let hl = abs(&(d.defect.clone() - d.coassociator_norm_sq.clone()));
    let phi_zero = restrict(g2.phi(), p)?.is_zero_within(eps);
    let iff = if phi_zero == d.defect.is_zero_within(eps) {
        0.0
    } else {
        1.0
    };
    Ok(over.max(hl).max(iff))
}

fn lambda2_projectors<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    // ranks on the basis
    let mut cols7 = Vec::new();
    let mut cols14 = Vec::new();
    for i in 0..7 {
        for j in i + 1..7 {
            let (p7, p14) = project_lambda2(g2, &KForm::monomial(7, &[i, j], S::one()))?;
            cols7.push(p7.coeffs().to_vec());
            cols14.push(p14.coeffs().to_vec());
        }
    }
    let tol = if S::MODE == ScalarMode::Exact {
        0.0
    } else {
        1e-9
    };
    let r7 = Matrix::from_columns(&cols7).rank(tol);
    let r14 = Matrix::from_columns(&cols14).rank(tol);
    let rank_res = (r7 as f64 - 7.0).abs().max((r14 as f64 - 14.0).abs());
    let out = trials(seed, n, |rng| {
        let a = sample::form::<S>(rng, 7, 2);
        let (p7, p14) = project_lambda2(g2, &a)?;
        let (p77, p714) = project_lambda2(g2, &p7)?;
        let (p147, p1414) = project_lambda2(g2, &p14)?;
        Ok([
            (&(&p7 + &p14) - &a).max_abs(),
            (&p77 - &p7).max_abs(),
            p714.max_abs(),
            p147.max_abs(),
            (&p1414 - &p14).max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max))
    })?;
    Ok(Outcome {
        max_residual: out.max_residual.max(rank_res),
        trials: out.trials,
    })
}

fn lambda3_decomposition<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    trials(seed, n, |rng| {
        let a = sample::form::<S>(rng, 7, 3);
        let (a1, a7, a27) = project_lambda3(g2, &a)?;
        let sum = &(&(&a1 + &a7) + &a27) - &a;
        let ortho = [a1.inner(&a7)?, a1.inner(&a27)?, a7.inner(&a27)?];
        let (b1, b7, b27) = project_lambda3(g2, &a27)?;
        Ok([
            sum.max_abs(),
            b1.max_abs(),
            b7.max_abs(),
            (&b27 - &a27).max_abs(),
        ]
        .into_iter()
        .chain(ortho.iter().map(abs))
        .fold(0.0, f64::max))
    })
}

/// e₁⌟i(h) restricted to span(e₄…e₇), written out term by term.
fn e1_display<S: Scalar>(h: &SymTensor2<S>) -> KForm<S> {
    let x = |i: usize, j: usize| h.get(i - 1, j - 1);
    let two = S::from_i64(2);
    let terms = [
        (
            [0, 1],
            (x(1, 1) + two.clone() * x(4, 4)) + (x(1, 1) + two.clone() * x(5, 5)),
        ),
        (
            [2, 3],
            (x(1, 1) + two.clone() * x(6, 6)) + (x(1, 1) + two.clone() * x(7, 7)),
        ),
        (
            [0, 2],
            (x(1, 2) - two.clone() * x(4, 7)) + (x(1, 2) + two.clone() * x(5, 6)),
        ),
        (
            [1, 3],
            (-x(1, 2) + two.clone() * x(5, 6)) - (x(1, 2) + two.clone() * x(4, 7)),
        ),
        (
            [0, 3],
            (-x(1, 3) + two.clone() * x(4, 6)) - (x(1, 3) - two.clone() * x(5, 7)),
        ),
        (
            [1, 2],
            (-x(1, 3) - two.clone() * x(5, 7)) - (x(1, 3) + two.clone() * x(4, 6)),
        ),
    ];
    let mut out = KForm::zero(4, 2);
    for (idx, c) in terms {
        out.add_term(&idx, c);
    }
    out
}

fn i_map_suite<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    let basis = g2_lie_algebra(g2)?;
    let id = (&i_map(g2, &SymTensor2::identity(7)) - &g2.phi().scale(&S::from_i64(6))).max_abs();
    let fibre = OrientedPlane::coordinate(7, &[3, 4, 5, 6])?;
    let out = trials(seed, n, |rng| {
        let h = sample::symmetric::<S>(rng, 7);
        let mut a = Matrix::zeros(7, 7);
        for b in &basis {
            a = a.add(&b.scale(&S::sample(rng)));
        }
        let lhs = i_map(g2, &act_on_sym(&a, &h));
        let rhs = act_on_form(&a, &i_map(g2, &h))?;
        let e1 = restrict(&i_map(g2, &h).interior(&Vector::basis(7, 0))?, &fibre)?;
        Ok((&lhs - &rhs)
            .max_abs()
            .max((&e1 - &e1_display(&h)).max_abs()))
    })?;
    Ok(Outcome {
        max_residual: out.max_residual.max(id),
        trials: out.trials,
    })
}

fn g2_algebra<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    let basis = g2_lie_algebra(g2)?;
    let dim_res = (basis.len() as f64 - 14.0).abs();
    let out = trials(seed, n, |rng| {
        let mut a = Matrix::zeros(7, 7);
        let mut b = Matrix::zeros(7, 7);
        for e in &basis {
            a = a.add(&e.scale(&S::sample(rng)));
            b = b.add(&e.scale(&S::sample(rng)));
        }
        let bracket = a.matmul(&b).sub(&b.matmul(&a));
        let skew = a.add(&a.transpose()).max_abs();
        Ok([
            act_on_form(&a, g2.phi())?.max_abs(),
            act_on_form(&a, g2.psi())?.max_abs(),
            act_on_form(&bracket, g2.phi())?.max_abs(),
            skew,
        ]
        .into_iter()
        .fold(0.0, f64::max))
    })?;
    Ok(Outcome {
        max_residual: out.max_residual.max(dim_res),
        trials: out.trials,
    })
}

fn selfdual_isometry<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    let frame = CoassocFrame::model();
    let e1 = normal_to_selfdual(g2, &Vector::basis(7, 0), &frame)?;
    let example = (&e1 - &KForm::from_shorthand(4, &[("12", 1), ("34", 1)])).max_abs();
    let out = trials(seed, n, |rng| {
        let z = sample::normal_vector(rng, &frame);
        let w = sample::normal_vector(rng, &frame);
        let a = normal_to_selfdual(g2, &z, &frame)?;
        let b = normal_to_selfdual(g2, &w, &frame)?;
        Ok([
            anti_self_dual_part(&a)?.max_abs(),
            abs(&(a.norm_sq() - z.norm_sq() * S::from_i64(2))),
            abs(&(a.inner(&b)? - z.dot(&w) * S::from_i64(2))),
        ]
        .into_iter()
        .fold(0.0, f64::max))
    })?;
    Ok(Outcome {
        max_residual: out.max_residual.max(example),
        trials: out.trials,
    })
}

fn gamma_antiselfdual<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    trials(seed, n, |rng| {
        let alpha = sample::self_dual_4::<S>(rng);
        let f = sample::symmetric::<S>(rng, 4).trace_free().into_matrix();
        let plus = self_dual_part(&alpha_f(&alpha, &f)?)?.max_abs();
        // with a trace part t·id, P₊(γ_Z) = 2t·(Z⌟φ)|Σ
        let t = S::sample(rng);
        let frame = CoassocFrame::model();
        let z = sample::normal_vector(rng, &frame);
        let shape = ShapeData::new(frame, f.add(&Matrix::identity(4).scale(&t)))?;
        let d =
            VariationPointData::new(g2, KForm::zero(7, 2), SymTensor2::zero(7), z.clone(), shape)?;
        let gamma = gamma_z(g2, &d)?;
        let expected = normal_to_selfdual(g2, &z, d.frame())?.scale(&(t * S::from_i64(2)));
        Ok(plus.max((&self_dual_part(&gamma)? - &expected).max_abs()))
    })
}

fn b_formulas<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    let frame = CoassocFrame::model();
    let e = |i: usize| Vector::<S>::basis(7, i);
    let example = (&check_b_w(g2, &e(0), &e(1), &e(2), &frame)?
        - &KForm::volume(4).scale(&S::from_i64(2)))
        .max_abs();
    let out = trials(seed, n, |rng| {
        let w = sample::normal_vector(rng, &frame);
        let z = sample::normal_vector(rng, &frame);
        let z2 = sample::normal_vector(rng, &frame);
        let bw = check_b_w(g2, &w, &z, &z, &frame)?.max_abs();
        let h = sample::symmetric::<S>(rng, 7);
        let bh = (&check_b_h(g2, &h, &z, &z2, &frame)? - &b_h_closed_form(&h, &z, &z2, &frame))
            .max_abs();
        Ok(bw.max(bh))
    })?;
    Ok(Outcome {
        max_residual: out.max_residual.max(example),
        trials: out.trials,
    })
}

fn lemma_dtau2<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    trials(seed, n, |rng| {
        let d = random_point(g2, rng)?;
        Ok(abs(&lemma_dtau2_check(g2, &d)?.residual))
    })
}

fn lemma_dtau2_ricci<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    trials(seed, n, |rng| {
        let ric = sample::symmetric(rng, 7);
        let d = point(g2, rng, KForm::zero(7, 2), ric)?;
        Ok(abs(&lemma_dtau2_check(g2, &d)?.residual))
    })
}

fn lemma_dtau2_torsion<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    trials(seed, n, |rng| {
        let d = random_point(g2, rng)?;
        let l = lemma_dtau2_check(g2, &d)?;
        let t = lemma_dtau2_torsion_term(g2, &d)?;
        let accounted = abs(&(l.residual - t.predicted.top_coeff()?));
        Ok((&t.direct - &t.predicted).max_abs().max(accounted))
    })
}

fn integrand_assembly<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    trials(seed, n, |rng| {
        let d = random_point(g2, rng)?;
        Ok((&secvar_integrand(g2, &d)? - &eq2_assembly(g2, &d)?).max_abs())
    })
}

fn first_variation<S: Sample>(g2: &G2Structure<S>, seed: u64, n: u64) -> Result<Outcome> {
    let frame = CoassocFrame::model();
    trials(seed, n, |rng| {
        let tau2 = sample::lambda2_14(rng, g2);
        let z = sample::normal_vector(rng, &frame);
        let fv = first_variation_density(g2, &tau2, &z, &frame)?;
        let plus = self_dual_part(&restrict(&tau2, frame.plane())?)?;
        let h_phi = restrict(&g2.phi().interior(&fv.mean_curvature)?, frame.plane())?;
        // density = −⟨(H⌟φ)|Σ, (Z⌟φ)|Σ⟩ vol₄ = −2⟨H, Z⟩ vol₄
        let expected = KForm::volume(4).scale(&-(fv.mean_curvature.dot(&z) * S::from_i64(2)));
        let direct = wedge_all(&[plus.clone(), normal_to_selfdual(g2, &z, &frame)?])?;
        Ok([
            (&h_phi + &plus).max_abs(),
            (&fv.density - &expected).max_abs(),
            (&fv.density - &direct).max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max))
    })
}

/// Runs one suite in scalar type `S`.
pub fn run_suite<S: Sample>(id: &str, seed: u64, n: u64) -> Result<Outcome> {
    let g2 = G2Structure::<S>::model();
    match id {
        "model-fidelity" => model_fidelity(&g2),
        "hl-identity" => hl_identity(&g2, seed, n),
        "calibration" => calibration(&g2, seed, n),
        "lambda2-projectors" => lambda2_projectors(&g2, seed, n),
        "lambda3-decomposition" => lambda3_decomposition(&g2, seed, n),
        "i-map" => i_map_suite(&g2, seed, n),
        "g2-algebra" => g2_algebra(&g2, seed, n),
        "selfdual-isometry" => selfdual_isometry(&g2, seed, n),
        "gamma-antiselfdual" => gamma_antiselfdual(&g2, seed, n),
        "b-formulas" => b_formulas(&g2, seed, n),
        "lemma-dtau2" => lemma_dtau2(&g2, seed, n),
        "lemma-dtau2-ricci" => lemma_dtau2_ricci(&g2, seed, n),
        "lemma-dtau2-torsion-term" => lemma_dtau2_torsion(&g2, seed, n),
        "integrand-assembly" => integrand_assembly(&g2, seed, n),
        "first-variation-density" => first_variation(&g2, seed, n),
        other => Err(Error::Precondition(format!("unknown suite `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn every_suite_is_dispatched() {
        for s in &SUITES {
            assert!(run_suite::<f64>(s.id, 1, 2).is_ok(), "{}", s.id);
        }
        assert!(run_suite::<f64>("nope", 1, 1).is_err());
    }

    #[test]
    fn exact_suites_are_exact() {
        for id in [
            "model-fidelity",
            "hl-identity",
            "calibration",
            "b-formulas",
            "lemma-dtau2-ricci",
        ] {
            assert_eq!(
                run_suite::<Rational>(id, 7, 5).unwrap().max_residual,
                0.0,
                "{id}"
            );
        }
    }

    #[test]
    fn lemma_residual_is_nonzero() {
        assert!(
            run_suite::<Rational>("lemma-dtau2", 7, 5)
                .unwrap()
                .max_residual
                > 0.0
        );
        assert_eq!(
            run_suite::<Rational>("lemma-dtau2-torsion-term", 7, 5)
                .unwrap()
                .max_residual,
            0.0
        );
    }
}
