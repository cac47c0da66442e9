use super::LieAlgebra;
use crate::g2::SymTensor2;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Levi-Civita coefficients ∇_{e_i} e_j = Σ_k Γ^k_ij e_k from the Koszul
/// formula Γ^k_ij = ½(c^k_ij − c^i_jk + c^j_ki).
#[derive(Debug, Clone, PartialEq)]
pub struct Connection<S> {
    dim: usize,
    gamma: Vec<S>,
}

impl<S: Scalar> Connection<S> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Γ^k_ij.
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &S {
        &self.gamma[(i * self.dim + j) * self.dim + k]
    }

    /// The matrix of ∇_{e_i}, with entry [k][j] = Γ^k_ij.
    pub fn matrix(&self, i: usize) -> Matrix<S> {
        Matrix::from_fn(self.dim, self.dim, |k, j| self.gamma(i, j, k).clone())
    }

    /// Largest |Γ^k_ij + Γ^j_ik|.
    pub fn metricity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = self.gamma(i, j, k).clone() + self.gamma(i, k, j).clone();
                    worst = worst.max(r.to_f64().abs());
                }
            }
        }
        worst
    }

    /// Largest |Γ^k_ij − Γ^k_ji − c^k_ij|.
    pub fn torsion_residual(&self, alg: &LieAlgebra<S>) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = self.gamma(i, j, k).clone()
                        - self.gamma(j, i, k).clone()
                        - alg.c(k, i, j).clone();
                    worst = worst.max(r.to_f64().abs());
                }
            }
        }
        worst
    }
}

pub fn levi_civita<S: Scalar>(alg: &LieAlgebra<S>) -> Connection<S> {
    let n = alg.dim();
    let half = S::from_ratio(1, 2);
    let mut gamma = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = alg.c(k, i, j).clone() - alg.c(i, j, k).clone() + alg.c(j, k, i).clone();
                gamma.push(v * half.clone());
            }
        }
    }
    Connection { dim: n, gamma }
}

/// R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]} on basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature<S> {
    dim: usize,
    /// R(e_i, e_j) as a matrix, with R(e_i,e_j)e_b = Σ_a [a][b] e_a.
    r: Vec<Matrix<S>>,
    pub ric: SymTensor2<S>,
    pub scal: S,
}

impl<S: Scalar> Curvature<S> {
    pub fn operator(&self, i: usize, j: usize) -> &Matrix<S> {
        &self.r[i * self.dim + j]
    }

    /// ⟨R(e_i, e_j) e_b, e_a⟩.
    pub fn r(&self, i: usize, j: usize, a: usize, b: usize) -> S {
        self.operator(i, j)[(a, b)].clone()
    }

    /// ⟨R(e_x, e_y) e_y, e_x⟩, the sectional curvature of an orthonormal pair.
    pub fn sectional(&self, x: usize, y: usize) -> S {
        self.r(x, y, x, y)
    }

    /// Largest violation of the algebraic curvature symmetries and the first
    /// Bianchi identity.
    pub fn symmetry_residuals(&self) -> CurvatureResiduals {
        let n = self.dim;
        let mut out = CurvatureResiduals::default();
        let bump = |slot: &mut f64, v: S| *slot = slot.max(v.to_f64().abs());
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        bump(&mut out.skew_ij, self.r(i, j, a, b) + self.r(j, i, a, b));
                        bump(&mut out.skew_ab, self.r(i, j, a, b) + self.r(i, j, b, a));
                        bump(&mut out.pair, self.r(i, j, a, b) - self.r(a, b, i, j));
                        // R(e_i,e_j)e_b + R(e_j,e_b)e_i + R(e_b,e_i)e_j, paired with e_a
                        bump(
                            &mut out.bianchi,
                            self.r(i, j, a, b) + self.r(j, b, a, i) + self.r(b, i, a, j),
                        );
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CurvatureResiduals {
    pub skew_ij: f64,
    pub skew_ab: f64,
    pub pair: f64,
    pub bianchi: f64,
}

impl CurvatureResiduals {
    pub fn max(&self) -> f64 {
        self.skew_ij
            .max(self.skew_ab)
            .max(self.pair)
            .max(self.bianchi)
    }
}

/// Curvature operators, Ric(b, c) = Σ_i ⟨R(e_i, e_b) e_c, e_i⟩ and scal = tr Ric.
pub fn curvature_ricci<S: Scalar>(alg: &LieAlgebra<S>, conn: &Connection<S>) -> Curvature<S> {
    let n = alg.dim();
    let mats: Vec<Matrix<S>> = (0..n).map(|i| conn.matrix(i)).collect();
    let mut r = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut m = mats[i].matmul(&mats[j]).sub(&mats[j].matmul(&mats[i]));
            for (l, ml) in mats.iter().enumerate() {
                let c = alg.c(l, i, j);
                if !c.is_zero() {
                    m = m.sub(&ml.scale(c));
                }
            }
            r.push(m);
        }
    }
    let ric_m = Matrix::from_fn(n, n, |b, c| {
        (0..n).fold(S::zero(), |acc, i| acc + r[i * n + b][(i, c)].clone())
    });
    let ric =
        SymTensor2::new(ric_m).expect("Ricci tensor of a Levi-Civita connection is symmetric");
    let scal = ric.trace();
    Curvature {
        dim: n,
        r,
        ric,
        scal,
    }
}
