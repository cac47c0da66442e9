//! Left-invariant geometry of Lie algebras with an orthonormal basis e₁,…,eₙ.
//!
//! Structure constants: [e_i, e_j] = Σ_k c^k_ij e_k. The Chevalley–Eilenberg
//! differential is de^k = −Σ_{i<j} c^k_ij e^{ij}, so (de^k)(e_i, e_j) = −c^k_ij.
//! Indices are 0-based in the API and 1-based in errors and the text format.

mod closed;
mod format;
mod geometry;
mod search;
mod submersion;

pub use closed::{
    bryant_identities_check, bryant_identities_for, validate_closed_g2, BryantReport,
    ClosedG2Algebra,
};
pub use format::{parse_structure_constants, write_structure_constants};
pub use geometry::{curvature_ricci, levi_civita, Connection, Curvature};
pub use search::{search_closed_g2, SearchHit};
pub use submersion::{
    assess, cor_g2sub_check, oneill_analysis, CorEvidence, CorReport, HorizontalPair, OneillReport,
    SubmersionSplit, Verdict,
};

use crate::error::{Error, Result};
use crate::exterior::{KForm, MAX_DIM};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra<S> {
    dim: usize,
    c: Vec<S>,
}

impl<S: Scalar> LieAlgebra<S> {
    pub fn abelian(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension out of range");
        Self {
            dim,
            c: vec![S::zero(); dim * dim * dim],
        }
    }

    /// Validates antisymmetry and the Jacobi identity. `c` is indexed
    /// `[k][i][j]` for c^k_ij.
    pub fn new(dim: usize, c: Vec<S>) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::Contract(format!(
                "dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: c.len(),
            });
        }
        let alg = Self { dim, c };
        alg.check_antisymmetry()?;
        alg.check_jacobi()?;
        Ok(alg)
    }

    /// From brackets `(k, i, j, c^k_ij)` with i ≠ j; c^k_ji is set to −c^k_ij.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, usize, S)]) -> Result<Self> {
        let mut c = vec![S::zero(); dim * dim * dim];
        for (k, i, j, v) in brackets {
            if i == j {
                return Err(Error::NotAntisymmetric {
                    k: k + 1,
                    i: i + 1,
                    j: j + 1,
                });
            }
            c[(k * dim + i) * dim + j] = v.clone();
            c[(k * dim + j) * dim + i] = -v.clone();
        }
        Self::new(dim, c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// c^k_ij.
    pub fn c(&self, k: usize, i: usize, j: usize) -> &S {
        &self.c[(k * self.dim + i) * self.dim + j]
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    fn check_antisymmetry(&self) -> Result<()> {
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    if !(self.c(k, i, j).clone() + self.c(k, j, i).clone()).is_zero() {
                        return Err(Error::NotAntisymmetric {
                            k: k + 1,
                            i: i + 1,
                            j: j + 1,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.dim;
        let tol = if S::MODE == crate::scalar::ScalarMode::Exact {
            0.0
        } else {
            1e-10
        };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in 0..n {
                        let mut s = S::zero();
                        for m in 0..n {
                            s += self.c(m, i, j).clone() * self.c(l, m, k).clone();
                            s += self.c(m, j, k).clone() * self.c(l, m, i).clone();
                            s += self.c(m, k, i).clone() * self.c(l, m, j).clone();
                        }
                        if !s.is_zero_within(tol) {
                            return Err(Error::Jacobi {
                                i: i + 1,
                                j: j + 1,
                                k: k + 1,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// dim [g, g].
    pub fn derived_dim(&self) -> usize {
        let n = self.dim;
        let cols: Vec<Vec<S>> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (0..n).map(|k| self.c(k, i, j).clone()).collect())
            .collect();
        let tol = if S::MODE == crate::scalar::ScalarMode::Exact {
            0.0
        } else {
            1e-10
        };
        crate::linalg::Matrix::from_columns(&cols).rank(tol)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LieAlgebra<T> {
        LieAlgebra {
            dim: self.dim,
            c: self.c.iter().map(f).collect(),
        }
    }
}

/// de^k as a 2-form.
fn d_basis<S: Scalar>(alg: &LieAlgebra<S>, k: usize) -> Vec<(usize, usize, S)> {
    let n = alg.dim;
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = alg.c(k, i, j);
            if !c.is_zero() {
                out.push((i, j, -c.clone()));
            }
        }
    }
    out
}

/// The Chevalley–Eilenberg differential on left-invariant forms, extended
/// from 1-forms as an antiderivation.
pub fn ce_differential<S: Scalar>(alg: &LieAlgebra<S>, a: &KForm<S>) -> Result<KForm<S>> {
    let n = alg.dim;
    if a.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.dim(),
        });
    }
    if a.degree() + 1 > n {
        return Ok(KForm::zero(n, n));
    }
    let de: Vec<Vec<(usize, usize, S)>> = (0..n).map(|k| d_basis(alg, k)).collect();
    let mut out = KForm::zero(n, a.degree() + 1);
    for (idx, coeff) in a.terms() {
        for (p, &ip) in idx.iter().enumerate() {
            for (x, y, v) in &de[ip] {
                let mut list = Vec::with_capacity(idx.len() + 1);
                list.extend_from_slice(&idx[..p]);
                list.push(*x);
                list.push(*y);
                list.extend_from_slice(&idx[p + 1..]);
                let mut term = v.clone() * coeff.clone();
                if p % 2 == 1 {
                    term = -term;
                }
                out.add_term(&list, term);
            }
        }
    }
    Ok(out)
}
