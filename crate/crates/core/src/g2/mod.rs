//! The pointwise G₂ package in the adapted frame of R⁷:
//!
//! φ = e¹²³ + e¹⁴⁵ + e¹⁶⁷ + e²⁴⁶ − e²⁵⁷ − e³⁴⁷ − e³⁵⁶ and ψ = ⋆φ.

mod action;
mod frame;
mod projections;
mod sym;

pub use action::{act_on_form, act_on_sym, g2_lie_algebra, metric_from_phi, so_basis};
pub use frame::{normal_to_selfdual, CoassocFrame};
pub use projections::{i_map, i_map_inverse, i_map_matrix, project_lambda2, project_lambda3};
pub use sym::SymTensor2;

use crate::error::{Error, Result};
use crate::exterior::{hodge, simple_kvector, KForm, OrientedPlane, Vector};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub const PHI_TERMS: [(&str, i64); 7] = [
    ("123", 1),
    ("145", 1),
    ("167", 1),
    ("246", 1),
    ("257", -1),
    ("347", -1),
    ("356", -1),
];

pub const PSI_TERMS: [(&str, i64); 7] = [
    ("4567", 1),
    ("2345", 1),
    ("2367", 1),
    ("1346", -1),
    ("1357", 1),
    ("1247", -1),
    ("1256", -1),
];

#[derive(Debug, Clone)]
pub struct G2Structure<S> {
    phi: KForm<S>,
    psi: KForm<S>,
    volume: KForm<S>,
    eps: [[[i8; 7]; 7]; 7],
}

impl<S: Scalar> Default for G2Structure<S> {
    fn default() -> Self {
        Self::model()
    }
}

impl<S: Scalar> G2Structure<S> {
    pub fn model() -> Self {
        let phi: KForm<S> = KForm::from_shorthand(7, &PHI_TERMS);
        let psi = hodge(&phi);
        let mut eps = [[[0i8; 7]; 7]; 7];
        for (idx, c) in phi.terms() {
            let c = c.to_f64() as i8;
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            for (a, b, d, s) in [
                (i, j, k, 1),
                (j, k, i, 1),
                (k, i, j, 1),
                (j, i, k, -1),
                (i, k, j, -1),
                (k, j, i, -1),
            ] {
                eps[a][b][d] = s * c;
            }
        }
        Self {
            phi,
            psi,
            volume: KForm::volume(7),
            eps,
        }
    }

    pub fn phi(&self) -> &KForm<S> {
        &self.phi
    }

    pub fn psi(&self) -> &KForm<S> {
        &self.psi
    }

    pub fn volume(&self) -> &KForm<S> {
        &self.volume
    }

    pub fn metric(&self) -> Matrix<S> {
        Matrix::identity(7)
    }

    /// ε_{ijk} = φ(e_i, e_j, e_k).
    pub fn eps(&self, i: usize, j: usize, k: usize) -> i8 {
        self.eps[i][j][k]
    }

    /// u × v with ⟨u × v, w⟩ = φ(u, v, w).
    pub fn cross(&self, u: &Vector<S>, v: &Vector<S>) -> Result<Vector<S>> {
        self.phi.interior(u)?.interior(v)?.sharp()
    }

    /// χ(a, b, c) with ⟨χ(a, b, c), w⟩ = ψ(a, b, c, w).
    pub fn triple_chi(&self, a: &Vector<S>, b: &Vector<S>, c: &Vector<S>) -> Result<Vector<S>> {
        self.psi.interior(a)?.interior(b)?.interior(c)?.sharp()
    }

    /// χ extended linearly to 3-vectors, given as 3-forms via the metric.
    fn chi_of_trivector(&self, xi: &KForm<S>) -> Result<Vector<S>> {
        let mut out = Vector::zero(7);
        for (idx, c) in xi.terms() {
            let e = |i: usize| Vector::basis(7, i);
            let w = self.triple_chi(&e(idx[0]), &e(idx[1]), &e(idx[2]))?;
            out = &out + &w.scale(c);
        }
        Ok(out)
    }

    /// C(v₁,…,v₄) = χ(⋆(v₁∧v₂∧v₃∧v₄)).
    pub fn coassociator(&self, vs: &[Vector<S>; 4]) -> Result<Vector<S>> {
        let xi = simple_kvector(vs)?;
        self.chi_of_trivector(&hodge(&xi))
    }

    pub fn psi_value(&self, vs: &[Vector<S>; 4]) -> Result<S> {
        self.psi.evaluate(vs)
    }

    /// ψ(p) and 1 − ψ(p)² on the oriented orthonormal basis of a 4-plane,
    /// together with |C|² on the same basis.
    pub fn calibration_defect(&self, p: &OrientedPlane<S>) -> Result<CalibrationDefect<S>> {
        if p.dim() != 4 || p.ambient_dim() != 7 {
            return Err(Error::Contract(format!(
                "calibration defect needs a 4-plane in R^7, got a {}-plane in R^{}",
                p.dim(),
                p.ambient_dim()
            )));
        }
        let onb: [Vector<S>; 4] = std::array::from_fn(|i| p.onb()[i].clone());
        let psi_value = self.psi_value(&onb)?;
        let defect = S::one() - psi_value.clone() * psi_value.clone();
        let coassociator_norm_sq = self.coassociator(&onb)?.norm_sq();
        Ok(CalibrationDefect {
            psi_value,
            defect,
            coassociator_norm_sq,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationDefect<S> {
    pub psi_value: S,
    pub defect: S,
    pub coassociator_norm_sq: S,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{form_inner, restrict, wedge};
    use crate::scalar::Rational;

    type Q = Rational;

    fn g() -> G2Structure<Q> {
        G2Structure::model()
    }

    fn e(i: usize) -> Vector<Q> {
        Vector::basis(7, i - 1)
    }

    #[test]
    fn model_forms() {
        let g = g();
        assert_eq!(g.psi(), &KForm::from_shorthand(7, &PSI_TERMS));
        assert_eq!(
            wedge(g.phi(), g.psi()).unwrap(),
            KForm::volume(7).scale(&Q::from_i64(7))
        );
        assert_eq!(form_inner(g.phi(), g.phi()).unwrap(), Q::from_i64(7));
        assert_eq!(form_inner(g.psi(), g.psi()).unwrap(), Q::from_i64(7));
        assert_eq!(
            g.phi().interior(&e(1)).unwrap(),
            KForm::from_shorthand(7, &[("23", 1), ("45", 1), ("67", 1)])
        );
    }

    #[test]
    fn eps_reproduces_phi() {
        let g = g();
        let mut f = KForm::<Q>::zero(7, 3);
        for i in 0..7 {
            for j in i + 1..7 {
                for k in j + 1..7 {
                    f = &f + &KForm::monomial(7, &[i, j, k], Q::from_i64(g.eps(i, j, k) as i64));
                }
            }
        }
        assert_eq!(&f, g.phi());
        assert_eq!(g.eps(2, 1, 0), -1);
    }

    /// The display "(−3−3)4567" reads e³ for the symbol 3: the wedge is
    /// −2·e³⁴⁵⁶⁷, and −2·e³⁴⁵⁶⁷ with the factors swapped gives +2.
    #[test]
    fn lemma_wedge_example() {
        let g = g();
        let a = g.psi().interior(&e(1)).unwrap();
        let b = g.phi().interior(&e(2)).unwrap();
        let w = wedge(&a, &b).unwrap();
        assert_eq!(w.get(&[2, 3, 4, 5, 6]), Q::from_i64(-2));
        let p = OrientedPlane::coordinate(7, &[3, 4, 5, 6]).unwrap();
        assert!(restrict(&w, &p).is_err());
        let r = restrict(&w.interior(&e(3)).unwrap(), &p).unwrap();
        assert_eq!(r, KForm::volume(4).scale(&Q::from_i64(-2)));
        let a2 = g.psi().interior(&e(2)).unwrap();
        let b2 = g.phi().interior(&e(1)).unwrap();
        assert_eq!(
            wedge(&a2, &b2).unwrap().get(&[2, 3, 4, 5, 6]),
            Q::from_i64(2)
        );
        let zero = wedge(&a, &b2).unwrap();
        assert_eq!(zero.get(&[2, 3, 4, 5, 6]), Q::from_i64(0));
    }

    #[test]
    fn cross_examples() {
        let g = g();
        assert_eq!(g.cross(&e(1), &e(2)).unwrap(), e(3));
        assert_eq!(g.cross(&e(4), &e(5)).unwrap(), e(1));
        assert_eq!(g.cross(&e(6), &e(6)).unwrap(), Vector::zero(7));
    }

    #[test]
    fn chi_examples() {
        let g = g();
        // w sits in the last slot, so χ(e₅,e₆,e₇) = ψ(e₅,e₆,e₇,·) = −e₄, and
        // ι_{e₅}ι_{e₆}ι_{e₇}ψ = χ(e₇,e₆,e₅) = e₄.
        assert_eq!(g.triple_chi(&e(5), &e(6), &e(7)).unwrap(), -&e(4));
        assert_eq!(g.triple_chi(&e(7), &e(6), &e(5)).unwrap(), e(4));
        assert_eq!(g.triple_chi(&e(1), &e(2), &e(3)).unwrap(), Vector::zero(7));
        assert_eq!(g.triple_chi(&e(1), &e(1), &e(4)).unwrap(), Vector::zero(7));
    }

    #[test]
    fn coassociator_examples() {
        let g = g();
        assert_eq!(
            g.coassociator(&[e(4), e(5), e(6), e(7)]).unwrap(),
            Vector::zero(7)
        );
        assert_eq!(g.coassociator(&[e(1), e(2), e(4), e(5)]).unwrap(), -&e(2));
        let v = [e(4).scale(&Q::from_i64(2)), e(5), e(6), e(7)];
        assert_eq!(g.coassociator(&v).unwrap(), Vector::zero(7));
        assert_eq!(g.psi_value(&v).unwrap(), Q::from_i64(2));
    }

    #[test]
    fn calibration_examples() {
        let g = g();
        let p = OrientedPlane::coordinate(7, &[3, 4, 5, 6]).unwrap();
        let d = g.calibration_defect(&p).unwrap();
        assert_eq!((d.psi_value, d.defect), (Q::from_i64(1), Q::from_i64(0)));
        let p = OrientedPlane::coordinate(7, &[0, 1, 3, 4]).unwrap();
        let d = g.calibration_defect(&p).unwrap();
        assert_eq!(
            (d.psi_value, d.defect.clone()),
            (Q::from_i64(0), Q::from_i64(1))
        );
        assert_eq!(d.coassociator_norm_sq, d.defect);
    }
}
