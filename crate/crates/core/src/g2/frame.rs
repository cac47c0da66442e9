use super::G2Structure;
use crate::error::{Error, Result};
use crate::exterior::{restrict, KForm, OrientedPlane, Vector};
use crate::scalar::{Scalar, ScalarMode};

/// A coassociative 4-plane together with its associative normal 3-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct CoassocFrame<S> {
    plane: OrientedPlane<S>,
    normal: OrientedPlane<S>,
}

fn tol<S: Scalar>() -> f64 {
    match S::MODE {
        ScalarMode::Exact => 0.0,
        ScalarMode::Float => 1e-10,
    }
}

impl<S: Scalar> CoassocFrame<S> {
    /// span(e₄, e₅, e₆, e₇) with normal span(e₁, e₂, e₃).
    pub fn model() -> Self {
        Self {
            plane: OrientedPlane::coordinate(7, &[3, 4, 5, 6]).expect("coordinate plane"),
            normal: OrientedPlane::coordinate(7, &[0, 1, 2]).expect("coordinate plane"),
        }
    }

    /// Checks φ|plane = 0 and ψ|plane = vol₄, then orients the normal
    /// complement so that φ restricts to its volume form.
    pub fn new(g2: &G2Structure<S>, plane: OrientedPlane<S>) -> Result<Self> {
        if plane.dim() != 4 || plane.ambient_dim() != 7 {
            return Err(Error::NotCoassociative(format!(
                "expected a 4-plane in R^7, got a {}-plane",
                plane.dim()
            )));
        }
        let phi_r = restrict(g2.phi(), &plane)?;
        if !phi_r.is_zero_within(tol::<S>()) {
            return Err(Error::NotCoassociative(format!(
                "φ restricts to {phi_r} (max {:.3e})",
                phi_r.max_abs()
            )));
        }
        let psi_r = restrict(g2.psi(), &plane)?.top_coeff()?;
        if !(psi_r.clone() - S::one()).is_zero_within(tol::<S>()) {
            return Err(Error::NotCoassociative(format!(
                "ψ restricts to {psi_r}·vol₄"
            )));
        }
        let mut normal = plane.orthogonal_complement()?;
        let phi_n = restrict(g2.phi(), &normal)?.top_coeff()?;
        if phi_n.to_f64() < 0.0 {
            let mut b = normal.basis().to_vec();
            b[0] = -&b[0];
            normal = OrientedPlane::new(b)?;
        }
        Ok(Self { plane, normal })
    }

    pub fn plane(&self) -> &OrientedPlane<S> {
        &self.plane
    }

    pub fn normal(&self) -> &OrientedPlane<S> {
        &self.normal
    }

    /// Rejects vectors with a tangential component.
    pub fn require_normal(&self, z: &Vector<S>) -> Result<()> {
        if z.dim() != 7 {
            return Err(Error::DimensionMismatch {
                expected: 7,
                got: z.dim(),
            });
        }
        let scale = 1.0 + z.max_abs();
        if !self.plane.is_normal(z, tol::<S>() * scale) {
            return Err(Error::NotNormal(format!(
                "tangential components {:?}",
                self.plane
                    .coords(z)
                    .iter()
                    .map(Scalar::to_f64)
                    .collect::<Vec<_>>()
            )));
        }
        Ok(())
    }
}

/// Z ↦ (Z⌟φ)|Σ, a conformal map from the normal space onto Λ²₊(Σ) with
/// |image|² = 2|Z|².
pub fn normal_to_selfdual<S: Scalar>(
    g2: &G2Structure<S>,
    z: &Vector<S>,
    frame: &CoassocFrame<S>,
) -> Result<KForm<S>> {
    frame.require_normal(z)?;
    restrict(&g2.phi().interior(z)?, frame.plane())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::anti_self_dual_part;
    use crate::scalar::Rational;

    type Q = Rational;

    #[test]
    fn model_frame_images() {
        let g = G2Structure::<Q>::model();
        let f = CoassocFrame::model();
        let e = |i: usize| Vector::<Q>::basis(7, i - 1);
        assert_eq!(
            normal_to_selfdual(&g, &e(1), &f).unwrap(),
            KForm::from_shorthand(4, &[("12", 1), ("34", 1)])
        );
        assert_eq!(
            normal_to_selfdual(&g, &e(2), &f).unwrap(),
            KForm::from_shorthand(4, &[("13", 1), ("24", -1)])
        );
        assert!(normal_to_selfdual(&g, &Vector::zero(7), &f)
            .unwrap()
            .is_zero_within(0.0));
        assert!(matches!(
            normal_to_selfdual(&g, &e(4), &f),
            Err(Error::NotNormal(_))
        ));
        let z = Vector::<Q>::from_i64(&[2, -3, 5, 0, 0, 0, 0]);
        let img = normal_to_selfdual(&g, &z, &f).unwrap();
        assert!(anti_self_dual_part(&img).unwrap().is_zero_within(0.0));
        assert_eq!(img.norm_sq(), z.norm_sq() * Q::from_i64(2));
    }

    #[test]
    fn frame_validation() {
        let g = G2Structure::<Q>::model();
        let f =
            CoassocFrame::new(&g, OrientedPlane::coordinate(7, &[3, 4, 5, 6]).unwrap()).unwrap();
        assert_eq!(f, CoassocFrame::model());
        let flipped = OrientedPlane::coordinate(7, &[4, 3, 5, 6]).unwrap();
        assert!(matches!(
            CoassocFrame::new(&g, flipped),
            Err(Error::NotCoassociative(_))
        ));
        let bad = OrientedPlane::coordinate(7, &[0, 1, 3, 4]).unwrap();
        assert!(matches!(
            CoassocFrame::new(&g, bad),
            Err(Error::NotCoassociative(_))
        ));
        let other =
            CoassocFrame::new(&g, OrientedPlane::coordinate(7, &[1, 2, 3, 4]).unwrap()).unwrap();
        assert_eq!(
            restrict(g.phi(), other.normal())
                .unwrap()
                .top_coeff()
                .unwrap(),
            Q::from_i64(1)
        );
    }
}
