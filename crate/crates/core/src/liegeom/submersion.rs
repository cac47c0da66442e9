use serde::Serialize;

use super::{ce_differential, curvature_ricci, levi_civita, ClosedG2Algebra, LieAlgebra};
use crate::error::{Error, Result};
use crate::exterior::{restrict, OrientedPlane};
use crate::g2::G2Structure;
use crate::scalar::Scalar;

/// A coordinate splitting g = V ⊕ H with V an ideal; the quotient g/V
/// carries the base geometry of the left-invariant Riemannian submersion.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmersionSplit<S> {
    alg: LieAlgebra<S>,
    vertical: Vec<usize>,
    horizontal: Vec<usize>,
}

impl<S: Scalar> SubmersionSplit<S> {
    /// `vertical` lists 0-based basis indices.
    pub fn new(alg: LieAlgebra<S>, vertical: &[usize]) -> Result<Self> {
        let n = alg.dim();
        let mut vertical = vertical.to_vec();
        vertical.sort_unstable();
        vertical.dedup();
        if vertical.iter().any(|&v| v >= n) || vertical.is_empty() || vertical.len() == n {
            return Err(Error::Contract(format!(
                "vertical indices must be a proper nonempty subset of 0..{n}"
            )));
        }
        let horizontal: Vec<usize> = (0..n).filter(|i| !vertical.contains(i)).collect();
        for i in 0..n {
            for &v in &vertical {
                if horizontal.iter().any(|&k| !alg.c(k, i, v).is_zero()) {
                    return Err(Error::NotAnIdeal { i: i + 1, v: v + 1 });
                }
            }
        }
        Ok(Self {
            alg,
            vertical,
            horizontal,
        })
    }

    pub fn alg(&self) -> &LieAlgebra<S> {
        &self.alg
    }

    pub fn vertical(&self) -> &[usize] {
        &self.vertical
    }

    pub fn horizontal(&self) -> &[usize] {
        &self.horizontal
    }

    /// g/V in the horizontal basis.
    pub fn quotient(&self) -> LieAlgebra<S> {
        let h = &self.horizontal;
        let m = h.len();
        let mut c = Vec::with_capacity(m * m * m);
        for &z in h {
            for &x in h {
                for &y in h {
                    c.push(self.alg.c(z, x, y).clone());
                }
            }
        }
        LieAlgebra::new(m, c).expect("quotient by an ideal is a Lie algebra")
    }
}

/// Sectional data of one horizontal pair: K, K_B and |A_XY|².
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizontalPair {
    pub x: usize,
    pub y: usize,
    pub sectional: f64,
    pub base_sectional: f64,
    pub a_norm_sq: f64,
}

/// O'Neill tensors A_XY = (∇_X Y)^ver, T_VW = (∇_V W)^hor and the residuals
/// of the identities relating them to the curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct OneillReport<S> {
    /// A[x][y][v] over horizontal positions x, y and vertical position v.
    pub a: Vec<S>,
    /// T[v][w][h] over vertical positions v, w and horizontal position h.
    pub t: Vec<S>,
    /// max |A_XY − ½[X,Y]^ver|.
    pub a_half_bracket_residual: f64,
    /// max |K(X,Y) − K_B(X,Y) + 3|A_XY|²|.
    pub curvature_identity_residual: f64,
    /// max ||(∇_X V)^hor|² − Σ_j (A_{f_j}X · V)²|.
    pub mixed_term_residual: f64,
    pub pairs: Vec<HorizontalPair>,
    /// Ric of the quotient.
    pub base_ricci_max: f64,
}

impl<S: Scalar> OneillReport<S> {
    pub fn a_max(&self) -> f64 {
        crate::scalar::max_abs_f64(&self.a)
    }

    pub fn t_max(&self) -> f64 {
        crate::scalar::max_abs_f64(&self.t)
    }

    /// T ≡ 0, i.e. totally geodesic fibres.
    pub fn fibres_totally_geodesic(&self) -> bool {
        self.t.iter().all(|x| x.is_zero_within(1e-10))
    }

    pub fn max_residual(&self) -> f64 {
        self.a_half_bracket_residual
            .max(self.curvature_identity_residual)
            .max(self.mixed_term_residual)
    }
}

pub fn oneill_analysis<S: Scalar>(s: &SubmersionSplit<S>) -> Result<OneillReport<S>> {
    let alg = &s.alg;
    let conn = levi_civita(alg);
    let curv = curvature_ricci(alg, &conn);
    let base = s.quotient();
    let base_curv = curvature_ricci(&base, &levi_civita(&base));
    let (hs, vs) = (&s.horizontal, &s.vertical);
    let half = S::from_ratio(1, 2);
    let mut a = Vec::new();
    let mut a_res: f64 = 0.0;
    for &x in hs {
        for &y in hs {
            for &v in vs {
                let val = conn.gamma(x, y, v).clone();
                let expected = alg.c(v, x, y).clone() * half.clone();
                a_res = a_res.max((val.clone() - expected).to_f64().abs());
                a.push(val);
            }
        }
    }
    let mut t = Vec::new();
    for &v in vs {
        for &w in vs {
            for &h in hs {
                t.push(conn.gamma(v, w, h).clone());
            }
        }
    }
    let a_at = |px: usize, py: usize| -> S {
        (0..vs.len()).fold(S::zero(), |acc, pv| {
            let x = a[(px * hs.len() + py) * vs.len() + pv].clone();
            acc + x.clone() * x
        })
    };
    let mut pairs = Vec::new();
    let mut curv_res: f64 = 0.0;
    for px in 0..hs.len() {
        for py in 0..hs.len() {
            if px == py {
                continue;
            }
            let k = curv.sectional(hs[px], hs[py]);
            let kb = base_curv.sectional(px, py);
            let an = a_at(px, py);
            let r = k.clone() - kb.clone() + S::from_i64(3) * an.clone();
            curv_res = curv_res.max(r.to_f64().abs());
            if px < py {
                pairs.push(HorizontalPair {
                    x: hs[px],
                    y: hs[py],
                    sectional: k.to_f64(),
                    base_sectional: kb.to_f64(),
                    a_norm_sq: an.to_f64(),
                });
            }
        }
    }
    let mut mixed_res: f64 = 0.0;
    for &x in hs {
        for &v in vs {
            let lhs = hs.iter().fold(S::zero(), |acc, &h| {
                let g = conn.gamma(x, v, h).clone();
                acc + g.clone() * g
            });
            let rhs = hs.iter().fold(S::zero(), |acc, &f| {
                let g = conn.gamma(f, x, v).clone();
                acc + g.clone() * g
            });
            mixed_res = mixed_res.max((lhs - rhs).to_f64().abs());
        }
    }
    Ok(OneillReport {
        a,
        t,
        a_half_bracket_residual: a_res,
        curvature_identity_residual: curv_res,
        mixed_term_residual: mixed_res,
        pairs,
        base_ricci_max: base_curv.ric.max_abs(),
    })
}

/// The quantities entering the corollary: premises A ≡ 0, T ≡ 0 and
/// conclusions Ric_B = 0, Ric = 0, τ₂ = 0, dψ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorEvidence {
    pub a_max: f64,
    pub t_max: f64,
    pub base_ricci_max: f64,
    pub ricci_max: f64,
    pub tau2_norm_sq: f64,
    pub dpsi_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    /// Premises hold and so do all conclusions.
    Consistent,
    /// At least one of A, T is nonzero; the corollary says nothing.
    PremisesFail { nonzero: Vec<String> },
    /// Premises hold but a conclusion fails.
    Inconsistent { failed: Vec<String> },
}

pub fn assess(e: &CorEvidence, tol: f64) -> Verdict {
    let mut nonzero = Vec::new();
    if e.a_max > tol {
        nonzero.push("A".to_string());
    }
    if e.t_max > tol {
        nonzero.push("T".to_string());
    }
    if !nonzero.is_empty() {
        return Verdict::PremisesFail { nonzero };
    }
    let failed: Vec<String> = [
        ("Ric_B", e.base_ricci_max),
        ("Ric", e.ricci_max),
        ("tau2", e.tau2_norm_sq),
        ("dpsi", e.dpsi_max),
    ]
    .into_iter()
    .filter(|(_, v)| *v > tol)
    .map(|(n, _)| n.to_string())
    .collect();
    if failed.is_empty() {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent { failed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorReport {
    pub evidence: CorEvidence,
    pub verdict: Verdict,
}

/// Checks the vertical subspace is coassociative, then evaluates the
/// corollary's premises and conclusions.
pub fn cor_g2sub_check<S: Scalar>(
    g2: &G2Structure<S>,
    closed: &ClosedG2Algebra<S>,
    s: &SubmersionSplit<S>,
) -> Result<CorReport> {
    if s.alg != closed.alg {
        return Err(Error::Contract("split and closed algebra differ".into()));
    }
    if s.vertical.len() != 4 {
        return Err(Error::NotCoassociative(format!(
            "vertical has dimension {}",
            s.vertical.len()
        )));
    }
    let tol = match S::MODE {
        crate::scalar::ScalarMode::Exact => 0.0,
        crate::scalar::ScalarMode::Float => 1e-10,
    };
    let plane = OrientedPlane::coordinate(7, &s.vertical)?;
    let phi_r = restrict(g2.phi(), &plane)?;
    if !phi_r.is_zero_within(tol) {
        return Err(Error::NotCoassociative(format!("φ restricts to {phi_r}")));
    }
    let report = oneill_analysis(s)?;
    let evidence = CorEvidence {
        a_max: report.a_max(),
        t_max: report.t_max(),
        base_ricci_max: report.base_ricci_max,
        ricci_max: closed.curvature.ric.max_abs(),
        tau2_norm_sq: closed.tau2.norm_sq().to_f64(),
        dpsi_max: ce_differential(&closed.alg, g2.psi())?.max_abs(),
    };
    Ok(CorReport {
        verdict: assess(&evidence, tol),
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegeom::validate_closed_g2;
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn heisenberg_submersion() {
        let h = LieAlgebra::from_brackets(3, &[(2, 0, 1, Q::from_i64(1))]).unwrap();
        let s = SubmersionSplit::new(h, &[2]).unwrap();
        let r = oneill_analysis(&s).unwrap();
        assert_eq!(r.max_residual(), 0.0);
        assert_eq!(r.pairs.len(), 1);
        assert_eq!(r.pairs[0].a_norm_sq, 0.25);
        assert_eq!(r.pairs[0].sectional, -0.75);
        assert_eq!(r.pairs[0].base_sectional, 0.0);
        assert!(r.fibres_totally_geodesic());
    }

    #[test]
    fn non_ideal_is_rejected() {
        let h = LieAlgebra::from_brackets(3, &[(2, 0, 1, Q::from_i64(1))]).unwrap();
        assert!(matches!(
            SubmersionSplit::new(h, &[0]),
            Err(Error::NotAnIdeal { .. })
        ));
    }

    #[test]
    fn abelian_corollary() {
        let g = G2Structure::<Q>::model();
        let alg = LieAlgebra::abelian(7);
        let closed = validate_closed_g2(&g, &alg).unwrap();
        let s = SubmersionSplit::new(alg, &[3, 4, 5, 6]).unwrap();
        let r = oneill_analysis(&s).unwrap();
        assert_eq!((r.a_max(), r.t_max(), r.max_residual()), (0.0, 0.0, 0.0));
        assert_eq!(
            cor_g2sub_check(&g, &closed, &s).unwrap().verdict,
            Verdict::Consistent
        );
        let bad = SubmersionSplit::new(LieAlgebra::abelian(7), &[0, 1, 3, 4]).unwrap();
        assert!(matches!(
            cor_g2sub_check(&g, &closed, &bad),
            Err(Error::NotCoassociative(_))
        ));
    }

    #[test]
    fn forced_premises_with_torsion_are_inconsistent() {
        let e = CorEvidence {
            a_max: 0.0,
            t_max: 0.0,
            base_ricci_max: 0.0,
            ricci_max: 0.5,
            tau2_norm_sq: 2.0,
            dpsi_max: 1.0,
        };
        assert!(matches!(assess(&e, 0.0), Verdict::Inconsistent { .. }));
    }
}
