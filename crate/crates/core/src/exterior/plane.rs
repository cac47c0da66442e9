use super::{indices, table, KForm, Vector};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// An oriented k-plane in Rⁿ with a cached oriented orthonormal basis.
///
/// In exact mode Gram–Schmidt needs exact square roots, so only planes whose
/// orthogonalized norms are perfect rational squares are representable.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedPlane<S> {
    ambient: usize,
    basis: Vec<Vector<S>>,
    onb: Vec<Vector<S>>,
}

fn gram_schmidt<S: Scalar>(basis: &[Vector<S>]) -> Result<Vec<Vector<S>>> {
    let tol = if S::MODE == crate::scalar::ScalarMode::Exact {
        0.0
    } else {
        1e-12
    };
    let mut onb: Vec<Vector<S>> = Vec::with_capacity(basis.len());
    for v in basis {
        let mut w = v.clone();
        for u in &onb {
            w = &w - &u.scale(&w.dot(u));
        }
        let n2 = w.norm_sq();
        if n2.is_zero_within(tol * (1.0 + v.norm_sq().to_f64())) {
            return Err(Error::DegeneratePlane);
        }
        let n = n2.sqrt_exact().ok_or_else(|| {
            Error::NotExactlyOrthonormalizable(format!(
                "squared norm {n2} is not a rational square"
            ))
        })?;
        w = w.scale(&(S::one() / n));
        onb.push(w);
    }
    Ok(onb)
}

impl<S: Scalar> OrientedPlane<S> {
    /// The plane spanned by `basis`, oriented by its order.
    pub fn new(basis: Vec<Vector<S>>) -> Result<Self> {
        let ambient = basis
            .first()
            .map(Vector::dim)
            .ok_or(Error::DegeneratePlane)?;
        if let Some(bad) = basis.iter().find(|v| v.dim() != ambient) {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                got: bad.dim(),
            });
        }
        if basis.len() > ambient {
            return Err(Error::DegeneratePlane);
        }
        let onb = gram_schmidt(&basis)?;
        Ok(Self {
            ambient,
            basis,
            onb,
        })
    }

    /// span(e_{i₁},…,e_{i_k}) in the given order (0-based).
    pub fn coordinate(ambient: usize, idx: &[usize]) -> Result<Self> {
        Self::new(idx.iter().map(|&i| Vector::basis(ambient, i)).collect())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector<S>] {
        &self.basis
    }

    pub fn onb(&self) -> &[Vector<S>] {
        &self.onb
    }

    /// Components of `v` along the orthonormal basis.
    pub fn coords(&self, v: &Vector<S>) -> Vec<S> {
        self.onb.iter().map(|u| u.dot(v)).collect()
    }

    /// The ambient vector Σ cᵢ uᵢ for onb coordinates c.
    pub fn embed(&self, c: &[S]) -> Vector<S> {
        self.onb
            .iter()
            .zip(c)
            .fold(Vector::zero(self.ambient), |acc, (u, ci)| {
                &acc + &u.scale(ci)
            })
    }

    pub fn project(&self, v: &Vector<S>) -> Vector<S> {
        self.embed(&self.coords(v))
    }

    pub fn normal_part(&self, v: &Vector<S>) -> Vector<S> {
        v - &self.project(v)
    }

    pub fn is_normal(&self, v: &Vector<S>, tol: f64) -> bool {
        self.coords(v).iter().all(|c| c.is_zero_within(tol))
    }

    /// The orthogonal complement, oriented so that (onb, complement onb) is
    /// positively oriented in the ambient space.
    pub fn orthogonal_complement(&self) -> Result<Self> {
        let rows: Vec<Vec<S>> = self.onb.iter().map(|u| u.components().to_vec()).collect();
        let tol = if S::MODE == crate::scalar::ScalarMode::Exact {
            0.0
        } else {
            1e-10
        };
        let kernel = Matrix::from_rows(&rows).nullspace(tol);
        let mut comp = Self::new(kernel.into_iter().map(Vector::new).collect())?;
        let mut all: Vec<Vec<S>> = rows;
        all.extend(comp.onb.iter().map(|u| u.components().to_vec()));
        if Matrix::from_rows(&all).determinant() < S::zero() {
            comp.basis[0] = -&comp.basis[0];
            comp.onb[0] = -&comp.onb[0];
        }
        Ok(comp)
    }
}

/// Pullback of `a` to span(p) in the oriented orthonormal coordinates of p.
pub fn restrict<S: Scalar>(a: &KForm<S>, p: &OrientedPlane<S>) -> Result<KForm<S>> {
    if a.dim() != p.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: p.ambient_dim(),
            got: a.dim(),
        });
    }
    let k = p.dim();
    if a.degree() > k {
        return Err(Error::DegreeOutOfRange {
            degree: a.degree(),
            dim: k,
        });
    }
    let coeffs = table(k, a.degree())
        .masks()
        .iter()
        .map(|&m| {
            let vs: Vec<Vector<S>> = indices(m).map(|i| p.onb()[i].clone()).collect();
            if vs.is_empty() {
                Ok(a.coeffs()[0].clone())
            } else {
                a.evaluate(&vs)
            }
        })
        .collect::<Result<Vec<S>>>()?;
    KForm::try_new(k, a.degree(), coeffs)
}
